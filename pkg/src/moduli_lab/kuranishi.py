"""
Kuranishi local model at a central representation.

A chart bundles the complex, its Kaehler/Hodge package and stabilizer data
and evaluates the quadratic curvature map

    J(eta) = K_xi + D1 eta + 1/2 [eta, eta]

together with the Kuranishi map ``F(eta) = eta + 1/2 h[eta, eta]``, its
inverse on a certified ball, the quadratic momentum map on harmonic
1-cochains and the chart maps into ``H^1 x z_A^*``.  Norms on C^1 are taken
in the refined metric ``g1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotInChart, NotInSliceVariety
from .hodge import KaehlerHodgePackage, build_package
from .lie import numerical_rank
from .reps import newton_polish
from .surface import CentralRep, TwistedComplex, build_complex, relator_eval, stabilizer_group

SLICE_TOL = 1e-8
CONE_TOL = 1e-8
ACTION_TOL = 1e-10
INVERSE_MAX_ITER = 200
ORBIT_RADIUS = 1e-4
ORBIT_SEPARATION = 10.0
POLISH_ACCEPT = 1e-8


class KuranishiChart:
    """The local model at one central representation."""

    def __init__(self, rep: CentralRep, *, rng: np.random.Generator | None = None,
                 stabilizer_samples: int = 32, package: KaehlerHodgePackage | None = None):
        self.rep = rep
        self.complex: TwistedComplex = package.complex if package else build_complex(rep)
        self.package = H = package or build_package(self.complex)
        K = self.complex
        self.zA, self.stab_samples = stabilizer_group(rep, rng, stabilizer_samples)
        self.K_xi = rep.X_xi_algebra.copy()

        # bound N with ||h [a, b]|| <= N ||a|| ||b|| in metric-orthonormal coordinates
        L1, L2 = np.linalg.cholesky(H.g1), np.linalg.cholesky(H.g2)
        L1inv = np.linalg.inv(L1.T)
        T_hat = np.einsum("ck,kab,ai,bj->cij", L2.T, K.bracket_tensor, L1inv, L1inv)
        h_hat = L1.T @ H.h2 @ np.linalg.inv(L2.T)
        t_norm = np.sqrt(sum(np.linalg.norm(t, 2) ** 2 for t in T_hat))
        self.norm_h = float(np.linalg.norm(h_hat, 2) * t_norm)
        self.ball_radius = 0.25 / max(1.0, self.norm_h)

        self.harm1 = H.harm1
        self.alpha1 = H.alpha(1)
        self._L1 = L1
        self.stab_action1 = np.array([K.action(z, 1) for z in self.stab_samples])
        # z_A acting on harmonic 1-cochains (infinitesimally and by group samples)
        self.action_h1 = [self.alpha1 @ K.ad_blocks(phi) @ self.harm1 for phi in self.zA]
        self.group_action_h1 = [self.alpha1 @ K.action(z, 1) @ self.harm1 for z in self.stab_samples]
        self.group_action_h2 = [H.alpha(2) @ K.action(z, 2) @ H.harm2 for z in self.stab_samples]

    # -- basic quantities ---------------------------------------------------
    @property
    def dim_h1(self) -> int:
        return self.harm1.shape[1]

    @property
    def dim_zA(self) -> int:
        return self.zA.shape[0]

    @property
    def contraction_factor(self) -> float:
        return 2.0 * self.ball_radius * self.norm_h

    def norm1(self, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=float)
        return float(np.sqrt(max(v @ self.package.g1 @ v, 0.0)))

    def momentum_coords(self, beta: np.ndarray) -> np.ndarray:
        """Coordinates in ``z_A^*`` of a C^2 vector, by pairing against the ``z_A`` basis."""
        return np.array([self.complex.pair02(phi, beta) for phi in self.zA])

    def coadjoint(self, z: np.ndarray) -> np.ndarray:
        """Matrix of the coadjoint action of ``z`` on momentum coordinates."""
        G = self.complex.context.gram
        return self.zA @ G @ self.complex.action(z, 2) @ self.zA.T

    def random_harmonic(self, rng: np.random.Generator, radius: float | None = None) -> np.ndarray:
        """Uniform sample from the ``g1``-ball of harmonic 1-cochains."""
        r = self.ball_radius if radius is None else radius
        b = self.dim_h1
        if b == 0:
            return np.zeros(self.complex.dim1)
        a = rng.standard_normal(b)
        a *= r * rng.uniform() ** (1.0 / b) / np.linalg.norm(a)
        return self.harm1 @ a

    # -- maps -------------------------------------------------------------------
    def curvature_quad(self, eta: np.ndarray) -> np.ndarray:
        K = self.complex
        return self.K_xi + K.D1 @ eta + 0.5 * K.cup_bracket(eta, eta)

    def slice_variety_residual(self, eta: np.ndarray) -> float:
        """Norm of the coboundary part of ``J(eta) - K_xi``."""
        return float(np.linalg.norm(self.package.P2 @ (self.curvature_quad(eta) - self.K_xi)))

    def slice_residual(self, eta: np.ndarray) -> float:
        return float(np.linalg.norm(self.package.D0adj @ eta))

    def j_sharp(self, eta: np.ndarray, tol: float = SLICE_TOL) -> np.ndarray:
        res = self.slice_variety_residual(eta)
        if res > tol:
            raise NotInSliceVariety(f"coboundary residual {res:.3e} exceeds {tol:.1e}")
        return self.package.harm_proj[2] @ self.curvature_quad(eta)

    def kuranishi_F(self, eta: np.ndarray) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        return eta + 0.5 * self.package.h2 @ self.complex.cup_bracket(eta, eta)

    def kuranishi_inverse(self, xi: np.ndarray, max_iter: int = INVERSE_MAX_ITER) -> np.ndarray:
        """Solve ``F(eta) = xi`` by the iteration ``eta <- xi - 1/2 h[eta, eta]``."""
        xi = np.asarray(xi, dtype=float)
        h2, K = self.package.h2, self.complex
        eta = xi.copy()
        scale = max(1.0, self.norm1(xi))
        for _ in range(max_iter):
            new = xi - 0.5 * h2 @ K.cup_bracket(eta, eta)
            step = self.norm1(new - eta)
            eta = new
            if not np.isfinite(step):
                break
            if step <= 1e-15 * scale:
                return eta
        res = self.norm1(self.kuranishi_F(eta) - xi)
        if np.isfinite(res) and res <= 1e-12 * scale:
            return eta
        raise NoConvergence(f"Kuranishi inverse did not contract within {max_iter} steps "
                            f"(|xi| = {self.norm1(xi):.3e}, certified radius {self.ball_radius:.3e})")

    def theta(self, xi: np.ndarray) -> np.ndarray:
        """Momentum map ``1/2 kappa[xi, xi]`` in ``z_A^*`` coordinates."""
        xi = np.asarray(xi, dtype=float)
        beta = self.package.harm_proj[2] @ self.complex.cup_bracket(xi, xi)
        return 0.5 * self.momentum_coords(beta)

    def phi_chart(self, eta: np.ndarray, tol: float = SLICE_TOL):
        """Chart maps ``(kappa F(eta), kappa J(eta) - kappa K_xi)`` at a point of the local model."""
        eta = np.asarray(eta, dtype=float)
        res_a, res_s = self.slice_variety_residual(eta), self.slice_residual(eta)
        if res_a > tol or res_s > tol:
            raise NotInChart(f"point off the local model: variety residual {res_a:.3e}, slice residual {res_s:.3e}")
        f = self.kuranishi_F(eta)
        if self.norm1(f) > self.ball_radius * (1 + 1e-9):
            raise NotInChart(f"|F(eta)| = {self.norm1(f):.3e} exceeds the ball radius {self.ball_radius:.3e}")
        phi = self.package.kappa(f, 1, tol=tol)
        vartheta = self.momentum_coords(self.j_sharp(eta, tol) - self.package.harm_proj[2] @ self.K_xi)
        return phi, vartheta

    def cone_test(self, xi: np.ndarray) -> tuple[bool, float]:
        res = float(np.linalg.norm(self.theta(xi)))
        return res <= CONE_TOL * (1 + self.norm1(xi) ** 2), res

    def nonsingular_test(self) -> bool:
        inf = max((np.linalg.norm(a) for a in self.action_h1), default=0.0)
        grp = max((np.linalg.norm(a - np.eye(self.dim_h1)) for a in self.group_action_h1), default=0.0)
        return bool(inf <= ACTION_TOL and grp <= ACTION_TOL)

    def hamiltonian_error(self, xi: np.ndarray, v: np.ndarray, step: float = 1e-5) -> float:
        """Worst relative error of ``d Theta_phi(xi)[v] = cup_sigma([phi, xi], v)`` over the ``z_A`` basis.

        The derivative is a central difference; errors are relative to
        ``max(|exact|, |xi| |v|)`` so directions acting trivially do not divide by zero.
        """
        K = self.complex
        d = (self.theta(xi + step * v) - self.theta(xi - step * v)) / (2 * step)
        scale = self.norm1(xi) * self.norm1(v)
        worst = 0.0
        for i, phi in enumerate(self.zA):
            exact = K.cup_sigma(K.ad_blocks(phi) @ xi, v)
            worst = max(worst, abs(d[i] - exact) / max(abs(exact), scale))
        return worst

    def theta_vanishing_by_sampling(self, rng: np.random.Generator, count: int = 32) -> float:
        """Largest ``|Theta(xi)| / |xi|^2`` over random harmonic ``xi``."""
        worst = 0.0
        for _ in range(count):
            xi = self.random_harmonic(rng)
            n = self.norm1(xi)
            if n > 0:
                worst = max(worst, float(np.linalg.norm(self.theta(xi))) / n ** 2)
        return worst

    def singularity_witness(self):
        """A harmonic ``xi`` on the ball boundary with the largest ``|Theta|`` among pairs of basis directions."""
        best, best_val = None, 0.0
        b = self.dim_h1
        for i in range(b):
            for j in range(i, b):
                xi = self.harm1[:, i] + self.harm1[:, j]
                xi *= self.ball_radius / self.norm1(xi)
                val = float(np.linalg.norm(self.theta(xi)))
                if val > best_val:
                    best, best_val = xi, val
        return best, best_val

    def relator_curvature(self, eta: np.ndarray) -> np.ndarray:
        """Exact nonlinear curvature ``log(r(rho exp(eta)) c^{-1}) + X_xi``."""
        ctx, n = self.complex.context, self.complex.n
        images = [a @ ctx.exp(eta[s * n:(s + 1) * n]) for s, a in enumerate(self.rep.images)]
        value = relator_eval(images) @ np.linalg.inv(self.rep.central_target)
        return ctx.log(value) + self.rep.X_xi_algebra

    def taylor_slope(self, eta: np.ndarray, ts=None) -> tuple[float, np.ndarray]:
        """Log-log slope of the second-order remainder of the relator curvature.

        Returns ``(slope, residuals)``; the slope is ``inf`` when every
        residual is at roundoff level (the quadratic model is then exact).
        """
        ts = np.logspace(-1, -3, 5) if ts is None else np.asarray(ts)
        H = self.package
        quad = 0.5 * H.harm_proj[2] @ self.complex.cup_bracket(eta, eta)
        res = np.array([np.linalg.norm(H.harm_proj[2] @ (self.relator_curvature(t * eta) - self.K_xi)
                                       - t * t * quad) for t in ts])
        # roundoff of the group logarithm is absolute, not O(t^2)
        floor = 64 * np.finfo(float).eps * max(1.0, float(np.linalg.norm(eta))) ** 2
        if np.all(res <= floor):
            return float("inf"), res
        slope = np.polyfit(np.log(ts), np.log(np.maximum(res, 1e-300)), 1)[0]
        return float(slope), res

    def local_dimension(self, xi: np.ndarray) -> int:
        """Dimension of the reduced space at a cone point: tangent of the cone minus orbit directions."""
        b = self.dim_h1
        if b == 0:
            return 0
        K, alpha = self.complex, self.alpha1
        grads = []
        for phi in self.zA:
            # gradient of Theta_phi at xi in harmonic coordinates
            grads.append([self.complex.pair02(phi, K.cup_bracket(xi, self.harm1[:, k])) for k in range(b)])
        grads = np.array(grads).reshape(-1, b)
        r_grad = numerical_rank(np.linalg.svd(grads, compute_uv=False)) if grads.size else 0
        orbit = np.array([alpha @ K.ad_blocks(phi) @ xi for phi in self.zA]).reshape(-1, b)
        r_orbit = numerical_rank(np.linalg.svd(orbit, compute_uv=False)) if orbit.size else 0
        return b - r_grad - r_orbit

    # -- orbits -----------------------------------------------------------------
    def _orbit(self, xi: np.ndarray) -> np.ndarray:
        # sampled orbit in g1-orthonormal coordinates, one row per stabilizer sample
        return (self.stab_action1 @ np.asarray(xi, dtype=float)) @ self._L1

    def _orbit_distances(self, xi: np.ndarray, others: np.ndarray, other_orbits: np.ndarray) -> np.ndarray:
        x_hat = self._L1.T @ xi
        o_hat = others @ self._L1
        d1 = np.linalg.norm(self._orbit(xi)[None, :, :] - o_hat[:, None, :], axis=2).min(axis=1)
        d2 = np.linalg.norm(other_orbits - x_hat[None, None, :], axis=2).min(axis=1)
        return np.minimum(d1, d2)

    def orbit_distance(self, xi: np.ndarray, other: np.ndarray) -> float:
        """Symmetric distance ``min_z |z xi - other|`` over the sampled stabilizer."""
        other = np.asarray(other, dtype=float)
        return float(self._orbit_distances(np.asarray(xi, dtype=float), other[None], self._orbit(other)[None])[0])

    def orbit_labels(self, xis, radius: float = ORBIT_RADIUS) -> tuple[list[int], float]:
        """Greedy orbit clustering; returns labels and the minimal distance between cluster seeds."""
        m = self.complex.dim1
        seeds, orbits, labels = np.zeros((0, m)), np.zeros((0, len(self.stab_samples), m)), []
        sep = float("inf")
        for xi in xis:
            xi = np.asarray(xi, dtype=float)
            d = self._orbit_distances(xi, seeds, orbits) if len(seeds) else np.zeros(0)
            if d.size and d.min() <= radius:
                labels.append(int(np.argmin(d)))
            else:
                if d.size:
                    sep = min(sep, float(d.min()))
                labels.append(len(seeds))
                seeds = np.vstack([seeds, xi])
                orbits = np.concatenate([orbits, self._orbit(xi)[None]])
        return labels, sep

    # -- sampling the reduced space --------------------------------------------
    def project_to_cone(self, xi: np.ndarray, max_iter: int = 50) -> np.ndarray | None:
        """Gauss-Newton on ``Theta = 0`` in harmonic coordinates; None if it collapses to the vertex."""
        a = self.alpha1 @ xi
        scale = np.linalg.norm(a)
        K = self.complex
        for _ in range(max_iter):
            x = self.harm1 @ a
            th = self.theta(x)
            if np.linalg.norm(th) <= 1e-15 * max(1.0, np.linalg.norm(a) ** 2):
                break
            jac = np.array([[self.complex.pair02(phi, K.cup_bracket(x, self.harm1[:, k]))
                             for k in range(self.dim_h1)] for phi in self.zA])
            a = a - np.linalg.pinv(jac) @ th
        if np.linalg.norm(a) <= 1e-6 * scale:
            return None
        return self.harm1 @ a

    def reduced_sample(self, count: int, seed: int | np.random.Generator = 0) -> list["Sample"]:
        """Sample the ball in ``H^1``, test cone membership, label orbits and polish to exact reps.

        When the stabilizer is positive dimensional, every other candidate is
        first projected onto the cone (and rescaled into the ball) so that
        both cone points and non-cone points are represented.
        """
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        if self.dim_h1 == 0:
            return []
        xis = []
        for k in range(count):
            xi = self.random_harmonic(rng)
            if self.dim_zA and k % 2 == 1:
                on = self.project_to_cone(xi)
                if on is not None:
                    xi = on * (self.ball_radius * rng.uniform(0.1, 1.0) / self.norm1(on))
            xis.append(xi)
        labels, _ = self.orbit_labels(xis)
        return [self._sample(xi, lab) for xi, lab in zip(xis, labels)]

    def _sample(self, xi: np.ndarray, label: int) -> "Sample":
        kept, cone_res = self.cone_test(xi)
        ctx, n = self.complex.context, self.complex.n
        try:
            eta = self.kuranishi_inverse(xi)
        except NoConvergence:
            return Sample(xi, label, float("nan"), kept, cone_res, "no-inverse", None, None)
        seed_imgs = [a @ ctx.exp(eta[s * n:(s + 1) * n]) for s, a in enumerate(self.rep.images)]
        try:
            polished, d, _ = newton_polish(ctx, seed_imgs, self.rep.central_target, target=1e-12,
                                           accept=POLISH_ACCEPT)
        except NoConvergence:
            status = "contradiction" if kept else "no-polish"
            return Sample(xi, label, float("nan"), kept, cone_res, status, None, None)
        # chart image of the polished representation
        eta_p = np.concatenate([ctx.log(np.linalg.inv(a) @ b) for a, b in zip(self.rep.images, polished)])
        image = self.package.harm_proj[1] @ self.kuranishi_F(eta_p)
        if kept:
            _, vartheta = self.phi_chart(eta)
            ok = d <= POLISH_ACCEPT and np.linalg.norm(vartheta) <= CONE_TOL * (1 + self.norm1(xi) ** 2)
            status = "exact" if ok else "contradiction"
        elif self.norm1(image) > self.ball_radius:
            status = "outside-ball"
        elif not self.cone_test(image)[0]:
            status = "off-cone"
        else:
            status = "contradiction"
        return Sample(xi, label, float(d), kept, cone_res, status, tuple(polished), image)


@dataclass(frozen=True, eq=False)
class Sample:
    xi: np.ndarray
    label: int
    polish_residual: float
    kept: bool
    cone_residual: float
    status: str
    polished: tuple | None
    chart_image: np.ndarray | None


def build_chart(rep: CentralRep, **kwargs) -> KuranishiChart:
    return KuranishiChart(rep, **kwargs)
