"""
Compact matrix groups and their Lie algebras.

A :class:`LieContext` bundles a basis of anti-hermitian matrices for the Lie
algebra, the Gram matrix of the invariant inner product
``<x, y> = -1/2 Re tr(x y)``, structure constants, the center, and the
exponential / logarithm / adjoint machinery that the twisted complexes are
built from.

Algebra elements are plain real coordinate vectors in the chosen basis; group
elements are complex square matrices.  Backends shipped here:

=======  ===========================================================
``u1``   circle group U(1), basis ``i*sqrt(2)``
``su2``  SU(2), basis ``i*sigma_k``
``u2``   U(2), basis ``i*sigma_k`` plus ``i*I``
``o2``   O(2), two components, basis the unit rotation generator
=======  ===========================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import BranchAmbiguity

#: relative singular-value cutoff used for every rank decision
RANK_RTOL = 1e-8
#: absolute floor below which a singular value is zero regardless of scale
RANK_ATOL = 1e-12
#: distance of an eigenvalue angle from pi that triggers BranchAmbiguity
BRANCH_TOL = 1e-8

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def numerical_rank(s: np.ndarray, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> int:
    """Number of singular values above ``max(rtol * s_max, atol)``."""
    if s.size == 0:
        return 0
    smax = float(np.max(s))
    return int(np.sum(s > max(rtol * smax, atol)))


def null_space(a: np.ndarray, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``a`` under the rank rule."""
    a = np.atleast_2d(a)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(a)
    r = numerical_rank(s, rtol, atol)
    return vh[r:].conj().T


def range_space(a: np.ndarray, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of ``a``."""
    a = np.atleast_2d(a)
    if a.size == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = np.linalg.svd(a)
    r = numerical_rank(s, rtol, atol)
    return u[:, :r]


@dataclass(frozen=True, eq=False)
class LieContext:
    """A compact matrix group together with its Lie algebra data.

    Attributes:
        group_id: registry key of the backend.
        basis: array ``(dim_g, N, N)`` of anti-hermitian matrices.
        gram: Gram matrix of the invariant inner product in ``basis``.
        structure_constants: ``c[i, j, k]`` with ``[e_i, e_j] = sum_k c[i,j,k] e_k``.
        center_basis: coordinate vectors (rows) spanning the center ``z``.
        center_elements: finite list of central group elements, one per
            component of the center not reached by ``exp(z)``.
        components: representatives of the components of the group
            (just the identity for connected backends).
        special: whether elements must have determinant one.
    """

    group_id: str
    basis: np.ndarray
    gram: np.ndarray
    structure_constants: np.ndarray = field(repr=False)
    center_basis: np.ndarray = field(repr=False)
    center_elements: tuple = field(repr=False)
    components: tuple = field(repr=False)
    special: bool = False

    # -- sizes -----------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def size(self) -> int:
        return self.basis.shape[1]

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.size, dtype=complex)

    @property
    def is_abelian(self) -> bool:
        return not np.any(self.structure_constants)

    # -- algebra ---------------------------------------------------------
    def to_matrix(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} algebra coordinates, got shape {x.shape}")
        return np.tensordot(x, self.basis, axes=1)

    def coords(self, m: np.ndarray) -> np.ndarray:
        """Coordinates of the orthogonal projection of ``m`` onto the algebra."""
        pairings = np.array([-0.5 * np.trace(e @ m).real for e in self.basis])
        return np.linalg.solve(self.gram, pairings)

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.asarray(x) @ self.gram @ np.asarray(y))

    def norm(self, x: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner(x, x), 0.0)))

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != (self.dim,) or y.shape != (self.dim,):
            raise ValueError("bracket arguments must both have length dim_g")
        return np.einsum("i,j,ijk->k", x, y, self.structure_constants)

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ``y -> [x, y]`` in the basis."""
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=float), self.structure_constants)

    # -- group -----------------------------------------------------------
    def exp(self, x: np.ndarray) -> np.ndarray:
        return scipy.linalg.expm(self.to_matrix(x))

    def log(self, a: np.ndarray, hint: np.ndarray | None = None) -> np.ndarray:
        """Principal logarithm of ``a`` as algebra coordinates.

        ``hint`` is an algebra element with ``exp(hint)`` close to ``a``; it
        selects the branch when an eigenvalue sits at -1.
        """
        a = np.asarray(a, dtype=complex)
        t, z = scipy.linalg.schur(a, output="complex")
        lam = np.diag(t)
        angles = np.angle(lam)
        at_minus_one = np.abs(np.abs(angles) - np.pi) < BRANCH_TOL
        if np.any(at_minus_one):
            if hint is None:
                raise BranchAmbiguity("eigenvalue within tolerance of -1; supply a branch hint")
            h = self.to_matrix(hint)
            # hint is anti-hermitian, hence normal: diagonalise it instead
            w, v = np.linalg.eigh(-1j * h)
            d = v.conj().T @ a @ v
            angles = np.angle(np.diag(d))
            near = np.abs(np.abs(angles) - np.pi) < BRANCH_TOL
            angles[near] = np.pi * np.sign(np.where(w[near] == 0, 1.0, w[near]))
            z = v
        m = z @ np.diag(1j * angles) @ z.conj().T
        x = self.coords(m)
        if np.linalg.norm(self.exp(x) - a) > 1e-8:
            raise BranchAmbiguity("logarithm does not lie in the algebra on the principal branch")
        return x

    def Ad(self, a: np.ndarray) -> np.ndarray:
        """Matrix of ``x -> a x a^{-1}`` in the basis."""
        a = np.asarray(a, dtype=complex)
        ainv = np.linalg.inv(a)
        return np.column_stack([self.coords(a @ e @ ainv) for e in self.basis])

    def is_element(self, a: np.ndarray, tol: float = 1e-10) -> bool:
        a = np.asarray(a, dtype=complex)
        if a.shape != (self.size, self.size):
            return False
        if np.linalg.norm(a.conj().T @ a - self.identity) > tol:
            return False
        if self.special and abs(np.linalg.det(a) - 1) > tol:
            return False
        if self.is_real and np.linalg.norm(a.imag) > tol:
            return False
        return True

    @property
    def is_real(self) -> bool:
        return not np.any(self.basis.imag)

    def is_central(self, c: np.ndarray, tol: float = 1e-12) -> bool:
        c = np.asarray(c, dtype=complex)
        gens = [self.exp(e) for e in np.eye(self.dim)] + list(self.components)
        return all(np.linalg.norm(c @ g - g @ c) <= tol for g in gens)

    def random_algebra(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        return scale * rng.standard_normal(self.dim)

    def random_element(self, rng: np.random.Generator, scale: float = np.pi) -> np.ndarray:
        comp = self.components[rng.integers(len(self.components))]
        return comp @ self.exp(self.random_algebra(rng, scale))

    def centralizer_algebra(self, elems: Sequence[np.ndarray]) -> np.ndarray:
        """Orthonormal basis (rows) of the joint fixed space of ``Ad(a)``, ``a`` in ``elems``."""
        if len(elems) == 0:
            return self.orthonormalize(np.eye(self.dim))
        stacked = np.vstack([self.Ad(a) - np.eye(self.dim) for a in elems])
        return self.orthonormalize(null_space(stacked).T)

    def orthonormalize(self, rows: np.ndarray) -> np.ndarray:
        """Gram-orthonormal basis (rows) of the span of ``rows``."""
        rows = np.atleast_2d(rows)
        if rows.shape[0] == 0:
            return np.zeros((0, self.dim))
        chol = np.linalg.cholesky(self.gram)
        q = range_space((rows @ chol).T)
        return np.linalg.solve(chol.T, q).T

    def split_central(self, c: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, int]:
        """Write a central ``c`` as ``exp(X) * t`` with ``X`` in ``z``, ``t`` listed.

        Returns the center coordinates of ``X`` and the index of ``t`` in
        :attr:`center_elements`.  Raises ``ValueError`` when no listed
        element works.
        """
        c = np.asarray(c, dtype=complex)
        for k, t in enumerate(self.center_elements):
            rest = c @ np.linalg.inv(t)
            if self.center_basis.shape[0] == 0:
                if np.linalg.norm(rest - self.identity) <= tol:
                    return np.zeros(0), k
                continue
            try:
                x = self.log(rest)
            except BranchAmbiguity:
                x = self.log(rest, hint=np.pi * self.center_basis[0])
            zc = self.center_basis @ self.gram @ x
            xz = zc @ self.center_basis
            if np.linalg.norm(self.exp(xz) - rest) <= tol:
                return zc, k
        raise ValueError("element is not of the form exp(z) * listed central element")

    def central_element(self, z_coords: Sequence[float], twist: int = 0) -> np.ndarray:
        z_coords = np.asarray(z_coords, dtype=float)
        if z_coords.shape != (self.center_basis.shape[0],):
            raise ValueError(
                f"{self.group_id} has a {self.center_basis.shape[0]}-dimensional center, "
                f"got {z_coords.size} coordinates"
            )
        x = z_coords @ self.center_basis if z_coords.size else np.zeros(self.dim)
        return self.exp(x) @ self.center_elements[twist]


def _structure_constants(basis: np.ndarray, gram: np.ndarray) -> np.ndarray:
    n = basis.shape[0]
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            comm = basis[i] @ basis[j] - basis[j] @ basis[i]
            pair = np.array([-0.5 * np.trace(e @ comm).real for e in basis])
            c[i, j] = np.linalg.solve(gram, pair)
    return c


def _make(group_id, basis, center_rows, center_elements, components=None, special=False):
    basis = np.asarray(basis, dtype=complex)
    gram = np.array([[-0.5 * np.trace(x @ y).real for y in basis] for x in basis])
    size = basis.shape[1]
    if components is None:
        components = (np.eye(size, dtype=complex),)
    return LieContext(
        group_id=group_id,
        basis=basis,
        gram=gram,
        structure_constants=_structure_constants(basis, gram),
        center_basis=np.asarray(center_rows, dtype=float).reshape(-1, basis.shape[0]),
        center_elements=tuple(np.asarray(t, dtype=complex) for t in center_elements),
        components=tuple(np.asarray(t, dtype=complex) for t in components),
        special=special,
    )


def _u1():
    return _make("u1", [[[1j * np.sqrt(2)]]], [[1.0]], [np.eye(1)])


def _su2():
    return _make("su2", 1j * PAULI, np.zeros((0, 3)), [np.eye(2), -np.eye(2)], special=True)


def _u2():
    basis = np.concatenate([1j * PAULI, [1j * np.eye(2)]])
    return _make("u2", basis, [[0, 0, 0, 1.0]], [np.eye(2)])


def _o2():
    rot = np.array([[[0, -1], [1, 0]]], dtype=complex)
    return _make(
        "o2",
        rot,
        np.zeros((0, 1)),
        [np.eye(2), -np.eye(2)],
        components=[np.eye(2), np.diag([1.0, -1.0])],
    )


_REGISTRY: dict[str, Callable[[], LieContext]] = {
    "u1": _u1,
    "su2": _su2,
    "u2": _u2,
    "o2": _o2,
}
_CACHE: dict[str, LieContext] = {}


def register_group(group_id: str, factory: Callable[[], LieContext]) -> None:
    """Add a backend; ``factory`` is called lazily on first use."""
    _REGISTRY[group_id] = factory
    _CACHE.pop(group_id, None)


def available_groups() -> list[str]:
    return sorted(_REGISTRY)


def lie_context(group_id: str) -> LieContext:
    if group_id not in _REGISTRY:
        raise ValueError(f"unknown group {group_id!r}; available: {available_groups()}")
    if group_id not in _CACHE:
        _CACHE[group_id] = _REGISTRY[group_id]()
    return _CACHE[group_id]
