"""
Surface-group presentations and twisted cochain complexes.

The closed orientable surface of genus ``g`` is modelled by its one-vertex
presentation 2-complex with relator ``prod_i a_i b_i a_i^-1 b_i^-1``.  For a
representation ``rho`` of the free group whose relator value is central, the
adjoint action makes ``g`` a right module over the surface group via
``m . x = Ad(rho(x))^{-1} m`` and the cellular cochains

    C^0 = g  --D0-->  C^1 = g^{2g}  --D1-->  C^2 = g

form a complex.  ``D0`` is the twisted difference on generators and ``D1``
the Fox derivative of the relator, transported to the base vertex.

Cup products come from a polygon diagonal on the 2-cell: each letter of the
relator contributes an *edge value* ``E_k(u) = u(l_k) . S_k`` (``S_k`` the
suffix after letter ``k``), so that ``D1 u = sum_k E_k(u)``, and

    cup_sigma(u, v)   = 1/2 sum_{i<j} <E_i u, E_j v> - <E_i v, E_j u>
    cup_bracket(u, v) = 1/2 sum_{i<j} [E_i u, E_j v] + [E_i v, E_j u]

``cup_bracket(u, u)`` is exactly the second-order term of
``log(rho_u(r) c^{-1})`` for the deformation ``rho_u(s) = rho(s) exp(u_s)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import NotCentral
from .lie import LieContext, null_space, numerical_rank

DEFECT_TOL = 1e-10


@dataclass(frozen=True)
class SurfacePresentation:
    """One-relator presentation of the genus-``genus`` surface group.

    Generators are ordered ``a1, b1, ..., ag, bg``; the relator is stored as
    ``(generator index, +1 | -1)`` pairs.
    """

    genus: int

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be at least 1")

    @property
    def n_generators(self) -> int:
        return 2 * self.genus

    @property
    def generators(self) -> list[str]:
        return [f"{c}{i + 1}" for i in range(self.genus) for c in "ab"]

    @cached_property
    def relator(self) -> tuple[tuple[int, int], ...]:
        word = []
        for i in range(self.genus):
            a, b = 2 * i, 2 * i + 1
            word += [(a, 1), (b, 1), (a, -1), (b, -1)]
        return tuple(word)

    def evaluate(self, word, images: Sequence[np.ndarray]) -> np.ndarray:
        out = np.eye(images[0].shape[0], dtype=complex)
        for s, e in word:
            out = out @ (images[s] if e > 0 else np.linalg.inv(images[s]))
        return out


def relator_eval(images: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate ``prod_i a_i b_i a_i^-1 b_i^-1`` on a ``2g``-tuple, left to right."""
    if len(images) % 2 or not images:
        raise ValueError("expected a nonempty 2g-tuple of group elements")
    return SurfacePresentation(len(images) // 2).evaluate(
        SurfacePresentation(len(images) // 2).relator, [np.asarray(a, dtype=complex) for a in images]
    )


@dataclass(frozen=True, eq=False)
class CentralRep:
    """A ``2g``-tuple whose relator value is a prescribed central element.

    ``central_target`` is ``c = exp(X_xi) * t`` where ``X_xi`` lies in the
    center of the algebra and ``t`` is one of the context's listed central
    elements (index ``twist``).
    """

    context: LieContext
    images: tuple
    X_xi: np.ndarray
    twist: int = 0

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(np.asarray(a, dtype=complex) for a in self.images))
        object.__setattr__(self, "X_xi", np.asarray(self.X_xi, dtype=float).reshape(-1))
        if len(self.images) < 2 or len(self.images) % 2:
            raise ValueError("a representation needs 2g images with g >= 1")
        for a in self.images:
            if not self.context.is_element(a, tol=1e-8):
                raise ValueError(f"image is not an element of {self.context.group_id}")

    @property
    def genus(self) -> int:
        return len(self.images) // 2

    @property
    def presentation(self) -> SurfacePresentation:
        return SurfacePresentation(self.genus)

    @cached_property
    def central_target(self) -> np.ndarray:
        return self.context.central_element(self.X_xi, self.twist)

    @cached_property
    def X_xi_algebra(self) -> np.ndarray:
        """``X_xi`` as coordinates in the full algebra basis."""
        if self.X_xi.size == 0:
            return np.zeros(self.context.dim)
        return self.X_xi @ self.context.center_basis

    @cached_property
    def relator_value(self) -> np.ndarray:
        return relator_eval(self.images)

    @cached_property
    def defect(self) -> float:
        return float(np.linalg.norm(self.relator_value @ np.linalg.inv(self.central_target) - self.context.identity))

    def with_images(self, images) -> "CentralRep":
        return CentralRep(self.context, tuple(images), self.X_xi, self.twist)


def stabilizer_group(rep: CentralRep, rng: np.random.Generator | None = None, count: int = 32):
    """Basis of ``z_A`` (rows) and ``count`` sampled elements of ``Z_A``.

    Group samples are ``exp`` of random ``z_A`` vectors times discrete
    centralizer elements found among the listed central elements, the
    component representatives, the quarter-turn basis exponentials and the
    images themselves.
    """
    ctx = rep.context
    zA = ctx.centralizer_algebra(rep.images)
    if rng is None:
        rng = np.random.default_rng(0)
    candidates = list(ctx.center_elements) + list(ctx.components)
    candidates += [ctx.exp(0.5 * np.pi * e / ctx.norm(e)) for e in np.eye(ctx.dim)]
    candidates += list(rep.images)
    discrete = []
    for c in candidates:
        if all(np.linalg.norm(c @ a - a @ c) <= 1e-10 for a in rep.images):
            if not any(np.linalg.norm(c - d) <= 1e-10 for d in discrete):
                discrete.append(c)
    samples = []
    for k in range(count):
        d = discrete[k % len(discrete)]
        if zA.shape[0] and k >= len(discrete):
            x = rng.standard_normal(zA.shape[0]) * np.pi @ zA
            samples.append(ctx.exp(x) @ d)
        else:
            samples.append(d)
    return zA, samples


class TwistedComplex:
    """The cochain complex ``C^0 -> C^1 -> C^2`` of a central representation.

    C^1 coordinates are ``(x_1, y_1, ..., x_g, y_g)``, blocks of length
    ``dim_g`` ordered like the generators.
    """

    def __init__(self, rep: CentralRep, defect_tol: float = DEFECT_TOL):
        if rep.defect > defect_tol:
            raise NotCentral(f"relator defect {rep.defect:.3e} exceeds {defect_tol:.1e}")
        self.rep = rep
        self.context = ctx = rep.context
        self.n = n = ctx.dim
        self.genus = rep.genus
        self.dim1 = 2 * self.genus * n
        ads = [ctx.Ad(a) for a in rep.images]
        ad_inv = [np.linalg.inv(m) for m in ads]
        self.D0 = np.vstack([ad_inv[s] - np.eye(n) for s in range(2 * self.genus)])

        # edge maps E_k : C^1 -> g, one per relator letter
        word = rep.presentation.relator
        edges = []
        suffix = np.eye(n)  # Ad(rho(S_k))^{-1}, built right to left
        for s, e in reversed(word):
            m = np.zeros((n, self.dim1))
            if e > 0:
                m[:, s * n:(s + 1) * n] = suffix
                suffix = suffix @ ad_inv[s]
            else:
                m[:, s * n:(s + 1) * n] = -suffix @ ads[s]
                suffix = suffix @ ads[s]
            edges.append(m)
        self.edges = np.array(edges[::-1])
        self.D1 = self.edges.sum(axis=0)

        G = ctx.gram
        m = len(word)
        omega = np.zeros((self.dim1, self.dim1))
        c = ctx.structure_constants
        # bracket tensor: cb(u, v)_k = sum_ab T[k, a, b] u_a v_b
        T = np.zeros((n, self.dim1, self.dim1))
        for i in range(m):
            Ei = self.edges[i]
            for j in range(i + 1, m):
                Ej = self.edges[j]
                omega += 0.5 * (Ei.T @ G @ Ej - Ej.T @ G @ Ei)
                T += 0.5 * np.einsum("pqk,pa,qb->kab", c, Ei, Ej)
        self.omega = omega
        self.bracket_tensor = T + T.transpose(0, 2, 1)

    # -- pairings --------------------------------------------------------
    def cup_sigma(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.asarray(u) @ self.omega @ np.asarray(v))

    def cup_bracket(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum("kab,a,b->k", self.bracket_tensor, u, v)

    def pair02(self, phi: np.ndarray, beta: np.ndarray) -> float:
        return float(np.asarray(phi) @ self.context.gram @ np.asarray(beta))

    def bracket0(self, phi: np.ndarray, beta: np.ndarray) -> np.ndarray:
        """Pointwise bracket ``C^0 x C^j -> C^j`` for ``j`` = 0 or 2."""
        return self.context.bracket(phi, beta)

    def bracket01(self, phi: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Bracket ``C^0 x C^1 -> C^1``, blockwise ``[phi, u_s]``."""
        return self.ad_blocks(phi) @ u

    def ad_blocks(self, phi: np.ndarray) -> np.ndarray:
        return np.kron(np.eye(2 * self.genus), self.context.ad(phi))

    # -- group actions ---------------------------------------------------
    def action(self, z: np.ndarray, degree: int) -> np.ndarray:
        """Matrix of the stabilizer element ``z`` acting on ``C^degree``."""
        a = self.context.Ad(z)
        if degree == 1:
            return np.kron(np.eye(2 * self.genus), a)
        if degree in (0, 2):
            return a
        raise ValueError(f"degree must be 0, 1 or 2, got {degree}")

    # -- cohomology ------------------------------------------------------
    def betti(self) -> tuple[int, int, int]:
        r0 = numerical_rank(np.linalg.svd(self.D0, compute_uv=False))
        r1 = numerical_rank(np.linalg.svd(self.D1, compute_uv=False))
        return (self.n - r0, self.dim1 - r0 - r1, self.n - r1)

    def kernel0(self) -> np.ndarray:
        """Orthonormal basis (rows) of ``ker D0``."""
        return self.context.orthonormalize(null_space(self.D0).T)

    def cocycle_basis(self) -> np.ndarray:
        return null_space(self.D1)


def build_complex(rep: CentralRep, defect_tol: float = DEFECT_TOL) -> TwistedComplex:
    return TwistedComplex(rep, defect_tol)
