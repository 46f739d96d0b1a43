"""Experiment runs behind the command line: representation search, verification and chart sampling."""

from __future__ import annotations

import time
from collections import Counter

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigError, DegenerateSigma, Infeasible, NoConvergence, NotCentral, SchemaError
from .hodge import build_package, perturbed_base_metric
from .kuranishi import KuranishiChart
from .lie import lie_context
from .report import Report, read_rep_file, write_report
from .reps import find_central_rep
from .streams import stream
from .surface import build_complex
from .suite import SAMPLE_TOLERANCES, InvariantResult, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
# momentum values below this count as an identically vanishing bracket pairing
ZERO_BRACKET = 1e-13

# failures of construction (as opposed to failed invariants)
CONSTRUCTION_ERRORS = (NotCentral, DegenerateSigma, Infeasible, NoConvergence, ConfigError, SchemaError)


def find_rep(config: ExperimentConfig):
    """Build the representation described by ``config``."""
    if config.rep_strategy == "from-file":
        rep = read_rep_file(config.rep_file)
        if rep.context.group_id != config.group_id or rep.genus != config.genus:
            raise ConfigError("representation file does not match group_id/genus of the config")
        return rep
    ctx = lie_context(config.group_id)
    target = config.central_target or None
    if target is None and config.central_twist is not None:
        target = [0.0] * ctx.center_basis.shape[0]
    return find_central_rep(ctx, config.genus, config.rep_strategy, central_target=target,
                            twist=config.central_twist, rng=stream(config.seed, "reps/find_central_rep"))


def _rep_summary(rep, chart: KuranishiChart | None) -> dict:
    out = {
        "group_id": rep.context.group_id,
        "genus": rep.genus,
        "X_xi": list(rep.X_xi),
        "central_twist": rep.twist,
        "defect": rep.defect,
    }
    if chart is not None:
        out["stabilizer_dim"] = chart.dim_zA
        out["betti"] = list(chart.complex.betti())
    return out


def _chart_summary(chart: KuranishiChart) -> dict:
    witness, value = chart.singularity_witness()
    return {
        "ball_radius": chart.ball_radius,
        "norm_h": chart.norm_h,
        "contraction_factor": chart.contraction_factor,
        "dim_H1": chart.dim_h1,
        "dim_zA": chart.dim_zA,
        "nonsingular": chart.nonsingular_test(),
        "stabilizer_samples": len(chart.stab_samples),
        "witness": None if witness is None else {
            "harmonic_coords": chart.alpha1 @ witness, "theta_norm": value},
    }


def _sample_invariants(chart: KuranishiChart, samples, tol: dict) -> tuple[list[InvariantResult], dict]:
    """Sample-level local-model checks and the sample table."""
    labels = [s.label for s in samples]
    _, sep = chart.orbit_labels([s.xi for s in samples])
    kept = [s for s in samples if s.kept]
    contradictions = sum(s.status == "contradiction" for s in samples)
    polish = max((s.polish_residual for s in kept), default=0.0)
    theta_zero = max((float(np.linalg.norm(chart.theta(s.xi))) for s in samples), default=0.0)
    flat = 0.0
    if theta_zero <= ZERO_BRACKET:
        # vanishing bracket pairing: every chart point solves the full equation
        for s in samples:
            eta = chart.kuranishi_inverse(s.xi)
            flat = max(flat, float(np.linalg.norm(chart.curvature_quad(eta) - chart.K_xi)))
    dims = sorted(chart.local_dimension(s.xi) for s in kept)
    table = {
        "count": len(samples),
        "kept": len(kept),
        "kept_fraction": len(kept) / len(samples) if samples else None,
        "orbit_labels": len(set(labels)),
        "orbit_separation": sep,
        "status_counts": dict(sorted(Counter(s.status for s in samples).items())),
        "local_dimension": dims[len(dims) // 2] if dims else None,
        "max_theta": theta_zero,
        "rows": [{"harmonic_coords": chart.alpha1 @ s.xi, "label": s.label, "kept": s.kept,
                  "cone_residual": s.cone_residual, "polish_residual": s.polish_residual,
                  "status": s.status} for s in samples],
    }
    values = {
        "local_model_contradictions": float(contradictions),
        "polish_defect": float(polish),
        "orbit_separation": float(sep),
        "zero_bracket_flatness": flat,
    }
    spec = [(name, values[name], tol[name], sense) for name, (_, sense) in SAMPLE_TOLERANCES.items()]
    results = [InvariantResult(n, r, t, s, bool(r <= t if s == "le" else r >= t)) for n, r, t, s in spec]
    return results, table


def _run(config: ExperimentConfig, command: str, with_table: bool, record_timing: bool = False):
    report = Report(command=command, seed=int(config.seed), config=config.as_dict())
    t0 = time.perf_counter()
    try:
        rep = find_rep(config)
        report.rep = _rep_summary(rep, None)
        package = None
        if config.metric_perturbation > 0:
            K = build_complex(rep)
            base = perturbed_base_metric(K, config.metric_perturbation, stream(config.seed, "hodge/base_metric"))
            package = build_package(K, base)
        chart = KuranishiChart(rep, rng=stream(config.seed, "surface/stabilizer_group"), package=package)
    except CONSTRUCTION_ERRORS as exc:
        report.status = "error"
        report.error = {"type": type(exc).__name__, "message": str(exc)}
        return report, EXIT_ERROR
    report.rep = _rep_summary(rep, chart)
    report.chart = _chart_summary(chart)
    tol = config.tolerance_table()
    results = run_suite(chart, stream(config.seed, "suite/invariants"), config.trials, tol)
    samples = chart.reduced_sample(config.sample_count, stream(config.seed, "kuranishi/reduced_sample"))
    extra, table = _sample_invariants(chart, samples, tol)
    results += extra
    report.invariants = [r.as_dict() for r in results]
    if with_table:
        report.samples = table
    else:
        report.samples = {k: v for k, v in table.items() if k != "rows"}
    if record_timing:
        report.timing = {"seconds": time.perf_counter() - t0}
    ok = all(r.passed for r in results)
    report.status = "pass" if ok else "fail"
    return report, EXIT_PASS if ok else EXIT_FAIL


def run_verify(config: ExperimentConfig, record_timing: bool = False):
    """Full invariant suite on one representation; returns ``(report, exit_code)``."""
    report, code = _run(config, "verify", with_table=False, record_timing=record_timing)
    if config.output_path:
        write_report(report, config.output_path)
    return report, code


def run_chart(config: ExperimentConfig, record_timing: bool = False):
    """Chart construction and reduced-space sampling with the full sample table."""
    report, code = _run(config, "chart", with_table=True, record_timing=record_timing)
    if config.output_path:
        write_report(report, config.output_path)
    return report, code


def sweep(config: ExperimentConfig, count: int):
    """Repeat ``run_chart`` over seeds ``seed .. seed + count - 1``."""
    out = []
    for k in range(count):
        cfg = ExperimentConfig(**{**config.__dict__, "seed": int(config.seed) + k, "output_path": None})
        out.append(run_chart(cfg.validate()))
    return out
