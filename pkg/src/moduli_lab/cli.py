"""Command-line interface: ``moduli-lab {find-rep,verify,chart,sweep,report}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigError, ModuliLabError, SchemaError
from .report import read_report, write_rep_file, write_report
from .runner import EXIT_ERROR, EXIT_PASS, find_rep, run_chart, run_verify, sweep


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="moduli-lab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help="output path"):
        sp.add_argument("--config", help="TOML experiment config")
        sp.add_argument("--seed", type=int, help="root seed (overrides the config)")
        sp.add_argument("--out", help=out_help)
        sp.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry; repeatable (tolerances.NAME=VALUE for tolerances)")

    common(sub.add_parser("find-rep", help="construct a central representation and write it as JSON"),
           "representation file to write")
    common(sub.add_parser("verify", help="run the invariant suite on one representation"), "report path")
    common(sub.add_parser("chart", help="build the local model and sample the reduced space"), "report path")
    sw = sub.add_parser("sweep", help="repeat chart over a range of seeds")
    common(sw, "directory for the per-seed reports")
    sw.add_argument("--count", type=int, default=5, help="number of consecutive seeds")
    rp = sub.add_parser("report", help="pretty-print a report")
    rp.add_argument("path")
    return p


def _config(args):
    cfg = load_config(args.config, args.override, args.seed)
    if args.out and args.command in ("verify", "chart"):
        cfg.output_path = args.out
    return cfg


def _summary(report) -> str:
    lines = [f"{report.command}  seed={report.seed}  status={report.status}  version={report.version}"]
    if report.error:
        lines.append(f"  error: {report.error['type']}: {report.error['message']}")
    if report.rep:
        r = report.rep
        lines.append(f"  rep: {r['group_id']} genus {r['genus']}  defect {r['defect']:.2e}"
                     + (f"  betti {r['betti']}  dim z_A {r['stabilizer_dim']}" if "betti" in r else ""))
    if report.chart:
        c = report.chart
        lines.append(f"  chart: dim H1 {c['dim_H1']}  ball radius {c['ball_radius']:.3e}"
                     f"  nonsingular {c['nonsingular']}")
    if report.samples:
        s = report.samples
        lines.append(f"  samples: {s['count']} drawn, {s['kept']} on the cone, {s['orbit_labels']} orbit labels,"
                     f" statuses {s['status_counts']}")
    for inv in report.invariants:
        mark = "ok  " if inv["pass"] else "FAIL"
        op = "<=" if inv["sense"] == "le" else ">="
        lines.append(f"  [{mark}] {inv['name']:<30} {inv['residual']:.3e} {op} {inv['tolerance']:.1e}")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "report":
            print(_summary(read_report(args.path)))
            return EXIT_PASS
        cfg = _config(args)
        if args.command == "find-rep":
            rep = find_rep(cfg)
            if args.out:
                write_rep_file(rep, args.out)
            print(f"{rep.context.group_id} genus {rep.genus}: defect {rep.defect:.3e}")
            return EXIT_PASS
        if args.command == "sweep":
            results = sweep(cfg, args.count)
            if args.out:
                Path(args.out).mkdir(parents=True, exist_ok=True)
            for report, code in results:
                if args.out:
                    write_report(report, Path(args.out) / f"chart_seed{report.seed}.json")
                print(f"seed {report.seed}: {report.status}")
            return max((code for _, code in results), default=EXIT_PASS)
        run = run_verify if args.command == "verify" else run_chart
        report, code = run(cfg)
        print(_summary(report))
        return code
    except (ConfigError, SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ModuliLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
