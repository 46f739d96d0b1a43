"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import functools

import numpy as np

from moduli_lab import build_chart, build_complex, find_central_rep, lie_context
from moduli_lab.config import load_config
from moduli_lab.runner import run_chart, run_verify
from moduli_lab.streams import stream
from moduli_lab.suite import run_suite

from conftest import CHART_SPECS, make_chart, record_criterion

NAMES = sorted(CHART_SPECS)


@functools.lru_cache(maxsize=None)
def suite_results(name):
    """Full invariant suite (100 trials, 32 stabilizer samples) on one chart, by invariant name."""
    results = run_suite(make_chart(name), stream(0, f"acceptance/{name}"), trials=100)
    return {r.name: r for r in results}


def gate(number, names, invariants, bound, sense="le"):
    """Check ``invariants`` against ``bound`` on every named chart and record the criterion."""
    worst, failures = None, []
    for name in names:
        res = suite_results(name)
        for inv in invariants:
            r = res[inv].residual
            ok = r <= bound if sense == "le" else r >= bound
            if not ok:
                failures.append(f"{name}:{inv}={r:.2e}")
            if worst is None or (r > worst if sense == "le" else r < worst):
                worst = r
    op = "<=" if sense == "le" else ">="
    detail = f"worst {worst:.3e} {op} {bound:g} over {len(names)} charts" + (
        f"; failures {failures}" if failures else "")
    record_criterion(number, not failures, detail)
    assert not failures, detail


def test_criterion_01_complex_validity():
    strategies = ("trivial", "diagonal", "random-polish")
    worst_sq, bad = 0.0, []
    count = 0
    for gid in ("u1", "su2", "u2"):
        ctx = lie_context(gid)
        rng = stream(0, f"acceptance/reps/{gid}")
        for k in range(100):
            genus = 1 + k % 3
            strategy = strategies[(k // 3) % 3]
            kw = {}
            # include twisted targets among the random-polish draws
            if strategy == "random-polish" and k % 2:
                kw = {"twist": 1} if gid == "su2" else {"central_target": [np.pi]} if gid == "u2" else {}
            K = build_complex(find_central_rep(ctx, genus, strategy, rng=rng, **kw))
            b = K.betti()
            sq = float(np.linalg.norm(K.D1 @ K.D0))
            worst_sq = max(worst_sq, sq)
            if sq > 1e-10 or b[0] - b[1] + b[2] != (2 - 2 * genus) * ctx.dim:
                bad.append((gid, genus, strategy, sq, b))
            count += 1
    ok = not bad
    record_criterion(1, ok, f"{count} reps, max |D1 D0| {worst_sq:.2e}, Euler characteristic exact"
                     + ("" if ok else f"; failures {bad[:5]}"))
    assert ok


def test_criterion_02_identity_suite():
    gate(2, NAMES, ["stokes", "ad_invariance", "complex_structure_square", "complex_structure_symplectic",
                    "adjoint_star_relations", "homotopy_identity", "homotopy_coexact", "homotopy_kernel",
                    "projector_dh", "complex_equivariance", "package_equivariance", "green_inverse",
                    "hermitian_harmonic", "bracket_commutes_with_J"], 1e-10)


def test_criterion_03_kuranishi_identities():
    gate(3, NAMES, ["kuranishi_differential", "kuranishi_slice", "kuranishi_equivariance"], 1e-10)


def test_criterion_04_inverse_certificate():
    gate(4, NAMES, ["kuranishi_inverse"], 1e-9)


def test_criterion_05_symplectomorphism():
    assert "su2-g2-trivial" in NAMES
    gate(5, NAMES, ["symplectomorphism"], 1e-9)


def test_criterion_06_momentum_intertwining():
    gate(6, NAMES, ["momentum_intertwining", "chart_momentum", "bracket_coboundaries"], 1e-9)


def test_criterion_07_momentum_property():
    hamiltonian = max(suite_results(n)["momentum_hamiltonian"].residual for n in NAMES)
    equivariance = max(suite_results(n)["momentum_equivariance"].residual for n in NAMES)
    ok = hamiltonian <= 1e-5 and equivariance <= 1e-9
    record_criterion(7, ok, f"Hamiltonian relative error {hamiltonian:.2e} <= 1e-5, "
                            f"equivariance {equivariance:.2e} <= 1e-9")
    assert ok


def test_criterion_08_local_model():
    rep = find_central_rep(lie_context("su2"), 2, "trivial")
    chart = build_chart(rep, rng=stream(0, "surface/stabilizer_group"))
    samples = chart.reduced_sample(200, stream(0, "kuranishi/reduced_sample"))
    kept = [s for s in samples if s.kept]
    rejected = [s for s in samples if not s.kept]
    bad_kept = [s for s in kept if s.status != "exact" or not s.polish_residual <= 1e-8]
    # a rejected sample must fail to polish, leave the ball, or land off the cone
    bad_rejected = [s for s in rejected if s.status not in ("no-inverse", "no-polish", "outside-ball", "off-cone")]
    for s in rejected:
        if s.status == "off-cone":
            assert not chart.cone_test(s.chart_image)[0]
    contradictions = len(bad_kept) + len(bad_rejected)
    ok = len(samples) == 200 and contradictions == 0 and len(kept) > 0
    max_defect = max(s.polish_residual for s in kept) if kept else float("nan")
    record_criterion(8, ok, f"{len(kept)} kept (max polish defect {max_defect:.2e}), {len(rejected)} rejected, "
                            f"{contradictions} contradictions")
    assert ok


def test_criterion_09_taylor_slope():
    slopes = {n: suite_results(n)["taylor_slope"].residual for n in NAMES}
    finite = {n: s for n, s in slopes.items() if np.isfinite(s)}
    ok = all(s >= 2.7 for s in slopes.values())
    record_criterion(9, ok, f"min slope {min(slopes.values()):.3f} >= 2.7 (20 cocycles per chart; finite on "
                            f"{sorted(finite)}, quadratic model exact elsewhere)")
    assert ok


def test_criterion_10_dichotomy_witnesses():
    rng = stream(0, "acceptance/dichotomy")
    u1_ok = all(make_chart(n).nonsingular_test() and make_chart(n).theta_vanishing_by_sampling(rng, 200) == 0.0
                for n in ("u1-g2-trivial", "u1-g3-diagonal"))
    pauli = make_chart("su2-g1-pauli")
    pauli_ok = pauli.dim_h1 == 0 and pauli.nonsingular_test()
    report, _ = run_chart(load_config(None, ["sample_count=10", "trials=10"]))
    witness = report.chart["witness"]
    trivial_ok = report.chart["nonsingular"] is False and witness is not None and witness["theta_norm"] > 1e-3
    ok = u1_ok and pauli_ok and trivial_ok
    record_criterion(10, ok, f"u1 nonsingular with Theta == 0: {u1_ok}; pauli dim H1 = {pauli.dim_h1}; "
                             f"trivial SU(2) genus 2 witness |Theta| = {witness['theta_norm']:.4f}")
    assert ok


def test_criterion_11_determinism(tmp_path):
    same = []
    for run in (run_verify, run_chart):
        texts = []
        for _ in range(2):
            cfg = load_config(None, [f"output_path='{tmp_path / 'report.json'}'"], seed=0)
            run(cfg)
            texts.append((tmp_path / "report.json").read_bytes())
        same.append(texts[0] == texts[1])
    ok = all(same)
    record_criterion(11, ok, f"verify identical: {same[0]}, chart identical: {same[1]}")
    assert ok
