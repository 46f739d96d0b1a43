"""Named invariant checks over a chart, shared by the CLI verify and chart runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kuranishi import KuranishiChart
from .lie import null_space

# name -> (default tolerance, sense); "le": residual <= tol passes, "ge": value >= tol passes
DEFAULT_TOLERANCES = {
    "complex_square_zero": (1e-10, "le"),
    "euler_characteristic": (0.5, "le"),
    "poincare_duality": (0.5, "le"),
    "stokes": (1e-10, "le"),
    "ad_invariance": (1e-10, "le"),
    "complex_equivariance": (1e-10, "le"),
    "stabilizer_kernel": (1e-10, "le"),
    "complex_structure_square": (1e-10, "le"),
    "complex_structure_symplectic": (1e-10, "le"),
    "refined_metric_positive": (1e-8, "ge"),
    "adjoint_star_relations": (1e-10, "le"),
    "homotopy_coexact": (1e-10, "le"),
    "homotopy_kernel": (1e-10, "le"),
    "projector_dh": (1e-10, "le"),
    "homotopy_identity": (1e-10, "le"),
    "package_equivariance": (1e-10, "le"),
    "green_inverse": (1e-10, "le"),
    "bracket_commutes_with_J": (1e-10, "le"),
    "bracket_class_J_invariant": (1e-8, "le"),
    "hermitian_harmonic": (1e-10, "le"),
    "curvature_harmonic_invariant": (1e-10, "le"),
    "ball_contraction": (0.5, "le"),
    "curvature_jacobian": (1e-6, "le"),
    "kuranishi_differential": (1e-10, "le"),
    "kuranishi_slice": (1e-10, "le"),
    "kuranishi_equivariance": (1e-10, "le"),
    "kuranishi_inverse": (1e-9, "le"),
    "symplectomorphism": (1e-9, "le"),
    "momentum_intertwining": (1e-9, "le"),
    "bracket_coboundaries": (1e-9, "le"),
    "chart_momentum": (1e-9, "le"),
    "momentum_hamiltonian": (1e-5, "le"),
    "momentum_equivariance": (1e-9, "le"),
    "relator_jacobian": (1e-6, "le"),
    "taylor_slope": (2.7, "ge"),
    "nonsingular_momentum": (1e-12, "le"),
}


# sample-level checks evaluated by the chart runs
SAMPLE_TOLERANCES = {
    "local_model_contradictions": (0.5, "le"),
    "polish_defect": (1e-8, "le"),
    "orbit_separation": (1e-3, "ge"),
    "zero_bracket_flatness": (1e-12, "le"),
}

ALL_TOLERANCES = {**DEFAULT_TOLERANCES, **SAMPLE_TOLERANCES}


@dataclass(frozen=True)
class InvariantResult:
    name: str
    residual: float
    tolerance: float
    sense: str
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual, "tolerance": self.tolerance,
                "sense": self.sense, "pass": self.passed}


def _subspace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Spectral distance between column spans (orthonormalized internally)."""
    qa = np.linalg.qr(a)[0] if a.size else a
    qb = np.linalg.qr(b)[0] if b.size else b
    if qa.shape[1] != qb.shape[1]:
        return float("inf")
    if qa.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(qa @ qa.T - qb @ qb.T, 2))


def _fd_jacobian(f, x0: np.ndarray, step: float) -> np.ndarray:
    cols = []
    for k in range(x0.size):
        e = np.zeros_like(x0)
        e[k] = step
        cols.append((f(x0 + e) - f(x0 - e)) / (2 * step))
    return np.column_stack(cols)


def run_suite(chart: KuranishiChart, rng: np.random.Generator, trials: int = 100,
              tolerances: dict | None = None) -> list[InvariantResult]:
    """Evaluate every named invariant on ``chart``; residuals are worst cases over ``trials`` draws."""
    tol = {k: v[0] for k, v in DEFAULT_TOLERANCES.items()}
    tol.update(tolerances or {})
    K, H, C = chart.complex, chart.package, chart
    n, m = K.n, K.dim1
    norm = np.linalg.norm
    res: dict[str, float] = {}
    acts = [(K.action(z, 0), K.action(z, 1)) for z in C.stab_samples]

    # -- complex ------------------------------------------------------------------
    res["complex_square_zero"] = norm(K.D1 @ K.D0)
    b = K.betti()
    res["euler_characteristic"] = abs(b[0] - b[1] + b[2] - (2 - 2 * K.genus) * n)
    res["poincare_duality"] = abs(b[0] - b[2])
    stokes = adinv = 0.0
    for _ in range(trials):
        phi, psi, beta = rng.standard_normal((3, n))
        u, v = rng.standard_normal((2, m))
        stokes = max(stokes, abs(K.pair02(phi, K.D1 @ u) - K.cup_sigma(K.D0 @ phi, u)))
        adinv = max(adinv, abs(K.pair02(K.bracket0(phi, psi), beta) - K.pair02(phi, K.bracket0(psi, beta))))
        for z in C.zA:
            adinv = max(adinv, abs(K.pair02(z, K.cup_bracket(u, v)) + K.cup_sigma(u, K.bracket01(z, v))))
            adinv = max(adinv, abs(K.cup_sigma(K.bracket01(z, u), v) + K.cup_sigma(u, K.bracket01(z, v))))
    res["stokes"] = stokes
    res["ad_invariance"] = adinv
    eq = 0.0
    u, v = rng.standard_normal((2, m))
    phi, beta = rng.standard_normal((2, n))
    for a0, a1 in acts:
        eq = max(eq, norm(K.D0 @ a0 - a1 @ K.D0), norm(K.D1 @ a1 - a0 @ K.D1),
                 abs(K.cup_sigma(a1 @ u, a1 @ v) - K.cup_sigma(u, v)),
                 abs(K.pair02(a0 @ phi, a0 @ beta) - K.pair02(phi, beta)),
                 norm(K.cup_bracket(a1 @ u, a1 @ v) - a0 @ K.cup_bracket(u, v)))
    res["complex_equivariance"] = eq
    res["stabilizer_kernel"] = _subspace_distance(null_space(K.D0), K.context.centralizer_algebra(K.rep.images).T)

    # -- Hodge / Kaehler ----------------------------------------------------------
    J = H.Jop
    I0, I1 = np.eye(n), np.eye(m)
    res["complex_structure_square"] = norm(J @ J + I1)
    res["complex_structure_symplectic"] = norm(J.T @ K.omega @ J - K.omega)
    g1 = K.omega @ J
    res["refined_metric_positive"] = float(np.linalg.eigvalsh(0.5 * (g1 + g1.T))[0] / norm(g1, 2)) \
        if norm(g1 - g1.T) <= 1e-10 * norm(g1) else -1.0
    res["adjoint_star_relations"] = max(norm(H.D0adj - H.star2 @ K.D1 @ J), norm(H.D1adj - J @ K.D0 @ H.star2))
    res["homotopy_coexact"] = max(norm(H.D0adj @ H.h2), norm(H.h1 - H.D0adj @ H.green1 @ H.P1),
                                  norm(H.h2 - H.D1adj @ H.green2 @ H.P2))
    res["homotopy_kernel"] = max(_subspace_distance(null_space(H.h1), null_space(H.D0adj)),
                                 _subspace_distance(null_space(H.h2), null_space(H.D1adj)))
    res["projector_dh"] = max(norm(H.P1 - K.D0 @ H.h1), norm(H.P2 - K.D1 @ H.h2))
    res["homotopy_identity"] = max(norm(H.h1 @ K.D0 - (I0 - H.harm_proj[0]), 2),
                                   norm(K.D0 @ H.h1 + H.h2 @ K.D1 - (I1 - H.harm_proj[1]), 2),
                                   norm(K.D1 @ H.h2 - (I0 - H.harm_proj[2]), 2))
    eq = 0.0
    for a0, a1 in acts:
        for X, left, right in ((H.lap0, a0, a0), (H.lap1, a1, a1), (H.lap2, a0, a0), (H.P1, a1, a1),
                               (H.P2, a0, a0), (H.h1, a0, a1), (H.h2, a1, a0), (J, a1, a1),
                               (H.harm_proj[0], a0, a0), (H.harm_proj[1], a1, a1), (H.harm_proj[2], a0, a0)):
            eq = max(eq, norm(X @ right - left @ X))
    res["package_equivariance"] = eq
    green = max(norm(H.green1 @ H.lap1 @ H.P1 - H.P1), norm(H.green2 @ H.lap2 @ H.P2 - H.P2))
    for a0, a1 in acts:
        green = max(green, norm(H.green1 @ a1 - a1 @ H.green1), norm(H.green2 @ a0 - a0 @ H.green2))
    res["green_inverse"] = green
    res["bracket_commutes_with_J"] = max((norm(K.ad_blocks(z) @ J - J @ K.ad_blocks(z)) for z in C.zA), default=0.0)
    cls = 0.0
    for _ in range(trials):
        u, v = rng.standard_normal((2, m))
        cls = max(cls, norm(H.kappa(K.cup_bracket(u, v), 2) - H.kappa(K.cup_bracket(J @ u, J @ v), 2)))
    res["bracket_class_J_invariant"] = cls
    h1b = H.harm1
    herm = norm(H.harm_proj[1] @ J @ h1b - J @ h1b)
    for a in C.group_action_h1:
        herm = max(herm, norm(a.T @ a - np.eye(a.shape[0])))
    for a0, a1 in acts:
        herm = max(herm, norm((a1 @ h1b).T @ K.omega @ (a1 @ h1b) - h1b.T @ K.omega @ h1b))
    res["hermitian_harmonic"] = herm

    # -- Kuranishi ------------------------------------------------------------------
    kx = max([norm(H.lap2 @ C.K_xi)] + [norm(a0 @ C.K_xi - C.K_xi) for a0, _ in acts])
    res["curvature_harmonic_invariant"] = kx
    res["ball_contraction"] = C.contraction_factor
    step = 1e-5
    jac = _fd_jacobian(C.curvature_quad, np.zeros(m), step)
    res["curvature_jacobian"] = norm(jac - K.D1) / max(norm(K.D1), 1.0)
    jac = _fd_jacobian(C.relator_curvature, np.zeros(m), step)
    res["relator_jacobian"] = norm(jac - K.D1) / max(norm(K.D1), 1.0)
    dif = sl = equi = 0.0
    for _ in range(trials):
        eta = rng.standard_normal(m)
        f = C.kuranishi_F(eta)
        dif = max(dif, norm(K.D1 @ (f) - H.P2 @ C.curvature_quad(eta)))
        sl = max(sl, norm(H.D0adj @ f - H.D0adj @ eta))
        for _, a1 in acts[:4]:
            equi = max(equi, norm(C.kuranishi_F(a1 @ eta) - a1 @ f))
    res["kuranishi_differential"] = dif
    res["kuranishi_slice"] = sl
    res["kuranishi_equivariance"] = equi

    inv = sym = mom = cob = chm = ham = meq = 0.0
    proj_slice = I1 - H.P1
    for _ in range(trials if C.dim_h1 else 0):
        xi = C.random_harmonic(rng)
        eta = C.kuranishi_inverse(xi)
        inv = max(inv, C.norm1(C.kuranishi_F(eta) - xi), C.slice_residual(eta), C.slice_variety_residual(eta))
        psi, vt = proj_slice @ rng.standard_normal(m), proj_slice @ rng.standard_normal(m)
        dpsi = psi + H.h2 @ K.cup_bracket(eta, psi)
        dvt = vt + H.h2 @ K.cup_bracket(eta, vt)
        sym = max(sym, abs(K.cup_sigma(psi, vt) - K.cup_sigma(dpsi, dvt)))
        lhs = C.momentum_coords(H.harm_proj[2] @ C.j_sharp(eta))
        rhs = C.momentum_coords(H.harm_proj[2] @ C.K_xi) + C.theta(C.kuranishi_F(eta))
        mom = max(mom, norm(lhs - rhs))
        q = H.h2 @ K.cup_bracket(eta, eta)
        cob = max(cob, norm(H.harm_proj[2] @ K.cup_bracket(eta, q)), norm(H.harm_proj[2] @ K.cup_bracket(q, q)))
        phi_v, vartheta = C.phi_chart(eta)
        chm = max(chm, norm(vartheta - C.theta(phi_v)))
        ham = max(ham, C.hamiltonian_error(xi, C.random_harmonic(rng)))
        for z in C.stab_samples:
            meq = max(meq, norm(C.theta(K.action(z, 1) @ xi) - C.coadjoint(z) @ C.theta(xi)))
    res.update(kuranishi_inverse=inv, symplectomorphism=sym, momentum_intertwining=mom,
               bracket_coboundaries=cob, chart_momentum=chm, momentum_hamiltonian=ham,
               momentum_equivariance=meq)

    slopes = []
    zb = K.cocycle_basis()
    for _ in range(min(trials, 20)):
        eta = zb @ rng.standard_normal(zb.shape[1])
        eta *= 1.0 / max(norm(eta), 1e-300)
        slopes.append(C.taylor_slope(eta)[0])
    res["taylor_slope"] = min(slopes) if slopes else float("inf")
    # at a non-singular point the momentum map must vanish identically
    res["nonsingular_momentum"] = C.theta_vanishing_by_sampling(rng) if C.nonsingular_test() else 0.0

    out = []
    for name, (_, sense) in DEFAULT_TOLERANCES.items():
        r, t = float(res[name]), float(tol[name])
        passed = r <= t if sense == "le" else r >= t
        out.append(InvariantResult(name, r, t, sense, bool(passed)))
    return out
