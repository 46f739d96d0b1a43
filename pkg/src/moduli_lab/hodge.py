"""
Hodge theory and Kaehler structure on a twisted cochain complex.

The symplectic pairing on C^1 is written against the block-diagonal base
metric as ``cup_sigma(u, v) = base(u, S v)``; the complex structure ``J`` is
the orthogonal polar factor of ``S`` (sign fixed so that the refined metric
``g1(u, v) = cup_sigma(u, J v)`` is positive definite).  In degrees 0 and 2
the metric is the Lie-algebra gram and the star ``C^0 -> C^2`` is the
identity in coordinates.  With these choices

    pair02(phi, D1 psi) = cup_sigma(D0 phi, psi)        (Stokes)
    D0adj = star2 . D1 . J,   D1adj = J . D0 . star2    (adjoints)
    h = d^* Delta^+ P,        d h + h d = Id - iota alpha

hold exactly.  All spectral decisions use the shared rank rule.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DegenerateSigma, NotACocycle
from .lie import null_space, numerical_rank
from .surface import TwistedComplex

COCYCLE_TOL = 1e-8

# Signed identities asserted by the test suite, as (name, statement).
CONVENTIONS = (
    ("stokes", "pair02(phi, D1 psi) = cup_sigma(D0 phi, psi)"),
    ("invariance", "pair02(phi, cup_bracket(u, v)) = cup_sigma(u, [v, phi]) for phi in z_A"),
    ("kaehler", "g1(u, v) = cup_sigma(u, J v), J^2 = -1, cup_sigma(J u, J v) = cup_sigma(u, v)"),
    ("star", "star0 = star2 = identity in coordinates, pair02(phi, star0 psi) = g0(phi, psi)"),
    ("adjoint0", "D0adj = star2 D1 J"),
    ("adjoint1", "D1adj = J D0 star2"),
    ("homotopy", "D h + h D = Id - iota alpha in every degree"),
    ("momentum", "d theta_phi(xi)[v] = cup_sigma([phi, xi], v)"),
)


def _orth_projector(cols: np.ndarray) -> np.ndarray:
    return cols @ cols.T


class KaehlerHodgePackage:
    """Metrics, complex structure, adjoints, Laplacians and homotopy of a complex.

    Matrices act on coordinate vectors; ``h1`` maps ``C^1 -> C^0`` and ``h2``
    maps ``C^2 -> C^1``.  Projectors are orthogonal for the degree's metric.
    """

    def __init__(self, complex: TwistedComplex, base_metric: np.ndarray | None = None):
        self.complex = K = complex
        n, m = K.n, K.dim1
        G = K.context.gram
        # J, g1 and the harmonic spaces depend on this choice; the adjoint relations do not
        base1 = np.kron(np.eye(2 * K.genus), G) if base_metric is None else np.asarray(base_metric, dtype=float)
        if base1.shape != (m, m) or np.linalg.norm(base1 - base1.T) > 1e-12 * np.linalg.norm(base1) \
                or np.linalg.eigvalsh(base1)[0] <= 0:
            raise ValueError("base metric must be a symmetric positive definite matrix on C^1")
        s = np.linalg.svd(K.omega, compute_uv=False)
        rank = numerical_rank(s)
        if rank < m:
            raise DegenerateSigma(rank, m)

        # complex structure: polar factor of S computed in base-orthonormal coordinates
        Lb = np.linalg.cholesky(base1)
        S_hat = np.linalg.solve(Lb, K.omega) @ np.linalg.inv(Lb).T
        U, _ = scipy.linalg.polar(S_hat)
        J = np.linalg.solve(Lb.T, U @ Lb.T)
        if np.linalg.eigvalsh(0.5 * (K.omega @ J + (K.omega @ J).T))[0] <= 0:
            J = -J
        self.Jop = J
        self.base1 = base1
        self.g0 = G.copy()
        self.g1 = 0.5 * (K.omega @ J + (K.omega @ J).T)
        self.g2 = G.copy()
        self.star0 = np.eye(n)
        self.star2 = np.linalg.inv(self.star0)

        self.D0, self.D1 = K.D0, K.D1
        self.D0adj = np.linalg.solve(self.g0, K.D0.T @ self.g1)
        self.D1adj = np.linalg.solve(self.g1, K.D1.T @ self.g2)
        self.lap0 = self.D0adj @ K.D0
        self.lap1 = K.D0 @ self.D0adj + self.D1adj @ K.D1
        self.lap2 = K.D1 @ self.D1adj

        # orthonormal coordinates x_hat = L^T x for each metric
        self._L = [np.linalg.cholesky(g) for g in (self.g0, self.g1, self.g2)]
        d0 = self._hat(K.D0, 0, 1)
        d1 = self._hat(K.D1, 1, 2)
        lap = [self._hat(a, j, j) for j, a in enumerate((self.lap0, self.lap1, self.lap2))]

        harm_hat = [null_space(d0), null_space(np.vstack([d1, d0.T])), null_space(d1.T)]
        self.harm0, self.harm1, self.harm2 = (self._unhat_cols(h, j) for j, h in enumerate(harm_hat))
        ex_hat = [np.zeros((n, 0)), _range(d0), _range(d1)]
        proj_h = [_orth_projector(h) for h in harm_hat]
        proj_ex = [_orth_projector(e) for e in ex_hat]
        green = [_restricted_inverse(lap[j], ex_hat[j]) for j in range(3)]

        self.harm_proj = [self._unhat(p, j, j) for j, p in enumerate(proj_h)]
        self.P1 = self._unhat(proj_ex[1], 1, 1)
        self.P2 = self._unhat(proj_ex[2], 2, 2)
        self.green1 = self._unhat(green[1], 1, 1)
        self.green2 = self._unhat(green[2], 2, 2)
        self.h1 = self._unhat(d0.T @ green[1] @ proj_ex[1], 1, 0)
        self.h2 = self._unhat(d1.T @ green[2] @ proj_ex[2], 2, 1)

    # -- coordinate changes ------------------------------------------------
    def _hat(self, a, src, tgt):
        return self._L[tgt].T @ a @ np.linalg.inv(self._L[src].T)

    def _unhat(self, a, src, tgt):
        return np.linalg.solve(self._L[tgt].T, a @ self._L[src].T)

    def _unhat_cols(self, cols, j):
        return np.linalg.solve(self._L[j].T, cols)

    # -- accessors ----------------------------------------------------------
    def metric(self, j: int) -> np.ndarray:
        return (self.g0, self.g1, self.g2)[_degree(j)]

    def harmonic_basis(self, j: int) -> np.ndarray:
        """Metric-orthonormal basis of the harmonic space, as columns."""
        return (self.harm0, self.harm1, self.harm2)[_degree(j)]

    def laplacian(self, j: int) -> np.ndarray:
        return (self.lap0, self.lap1, self.lap2)[_degree(j)]

    def exact_projector(self, j: int) -> np.ndarray:
        j = _degree(j)
        return (np.zeros((self.complex.n, self.complex.n)), self.P1, self.P2)[j]

    def alpha(self, j: int) -> np.ndarray:
        """Harmonic coordinates ``C^j -> R^{b_j}`` (orthogonal projection)."""
        h = self.harmonic_basis(j)
        return h.T @ self.metric(j)

    def iota(self, j: int) -> np.ndarray:
        return self.harmonic_basis(j)

    def homotopy(self, j: int) -> np.ndarray:
        """Matrix of ``h : C^j -> C^{j-1}``; zero on ``C^0``."""
        j = _degree(j)
        if j == 0:
            return np.zeros((0, self.complex.n))
        return self.h1 if j == 1 else self.h2

    # -- operations -----------------------------------------------------------
    def hodge_split(self, v: np.ndarray, j: int):
        """``(exact, harmonic, coexact)`` components of ``v`` in degree ``j``."""
        v = np.asarray(v, dtype=float)
        exact = self.exact_projector(j) @ v
        harmonic = self.harm_proj[_degree(j)] @ v
        return exact, harmonic, v - exact - harmonic

    def homotopy_h(self, v: np.ndarray, j: int) -> np.ndarray:
        if j not in (1, 2):
            raise ValueError(f"homotopy is defined on C^1 and C^2, got degree {j}")
        return self.homotopy(j) @ np.asarray(v, dtype=float)

    def kappa(self, v: np.ndarray, j: int, tol: float = COCYCLE_TOL) -> np.ndarray:
        """Harmonic representative of the class of the cocycle ``v``."""
        v = np.asarray(v, dtype=float)
        j = _degree(j)
        d = self.D0 @ v if j == 0 else self.D1 @ v if j == 1 else np.zeros(0)
        if d.size and np.linalg.norm(d) > tol * max(1.0, np.linalg.norm(v)):
            raise NotACocycle(f"coboundary of degree-{j} input has norm {np.linalg.norm(d):.3e}")
        return self.harm_proj[j] @ v

    def betti(self) -> tuple[int, int, int]:
        return tuple(self.harmonic_basis(j).shape[1] for j in range(3))


def _degree(j: int) -> int:
    if j not in (0, 1, 2):
        raise ValueError(f"degree must be 0, 1 or 2, got {j}")
    return j


def _range(a: np.ndarray) -> np.ndarray:
    if a.size == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = np.linalg.svd(a)
    return u[:, :numerical_rank(s)]


def _restricted_inverse(lap: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric operator on the invariant subspace spanned by ``cols``, zero on its complement."""
    if cols.shape[1] == 0:
        return np.zeros_like(lap)
    block = cols.T @ lap @ cols
    return cols @ np.linalg.solve(block, cols.T)


def perturbed_base_metric(complex: TwistedComplex, scale: float, rng: np.random.Generator) -> np.ndarray:
    """Base metric ``kron(M, gram)`` with ``M = exp(scale * S)`` for a random symmetric ``S`` on the generators.

    The factor on the generator index keeps the metric invariant under the
    stabilizer, which acts by the same ``Ad`` on every block.
    """
    k = 2 * complex.genus
    a = rng.standard_normal((k, k))
    M = scipy.linalg.expm(0.5 * scale * (a + a.T) / np.sqrt(k))
    return np.kron(0.5 * (M + M.T), complex.context.gram)


def build_package(complex: TwistedComplex, base_metric: np.ndarray | None = None) -> KaehlerHodgePackage:
    return KaehlerHodgePackage(complex, base_metric)
