"""Command line interface.

Exit codes: 0 success, 1 configuration error, 2 infeasible cap or exhausted
storage. Default output root comes from NZIAM_OUT when --out is omitted.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError, InfeasibleError
from .report import run_scenario
from .sweep import parse_sweep_spec, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2


def _default_out(name: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    root = os.environ.get("NZIAM_OUT")
    if not root:
        raise ConfigError("no --out given and NZIAM_OUT is not set")
    return os.path.join(root, name)


def _cmd_run(args: argparse.Namespace) -> int:
    report = run_scenario(
        args.scenario, _default_out(os.path.splitext(os.path.basename(args.scenario))[0], args.out)
    )
    print(f"scenario {report.scenario} -> {report.out_dir}")
    print(f"  config hash {report.config_hash[:12]}")
    for region, metrics in sorted(report.summary.get("regions", {}).items()):
        parts = ", ".join(f"{k}={v:.3f}" for k, v in sorted(metrics.items()))
        print(f"  {region}: {parts}")
    for key in sorted(report.summary):
        if key.startswith("anomaly_") or key.startswith("co2_ppm_"):
            print(f"  {key}={report.summary[key]:.3f}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = parse_sweep_spec(args.spec)
    out_dir = _default_out(spec.name, args.out)
    outcomes = run_sweep(spec, out_dir, workers=args.workers)
    print(f"sweep {spec.name} -> {out_dir}")
    for o in outcomes:
        if o.status == "ok":
            print(f"  {o.name:32s} {o.metric:8.3f}  {o.pct_change:+7.1f}%")
        else:
            print(f"  {o.name:32s} FAILED: {o.error}")
    from .figures import render_tornado

    render_tornado(
        os.path.join(out_dir, "tornado.csv"), os.path.join(out_dir, "fig6_tornado.png")
    )
    failed = [o for o in outcomes if o.status != "ok"]
    if failed:
        print(f"  ({len(failed)} variant(s) failed, see sweep_metadata.json)")
    return EXIT_OK


def _cmd_figures(args: argparse.Namespace) -> int:
    from .figures import emit_figure_data

    out_dir = _default_out("figures", args.out)
    paths = emit_figure_data(args.runs, out_dir, region=args.region)
    print(f"figures -> {out_dir}")
    for key in sorted(paths):
        print(f"  {key}: {os.path.basename(paths[key])}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nziam",
        description="Two-region net-zero pathway simulator with carbon dioxide removal",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("--scenario", required=True, help="scenario YAML file")
    p_run.add_argument("--out", help="output directory (default: $NZIAM_OUT/<scenario>)")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a sensitivity sweep spec")
    p_sweep.add_argument("--spec", required=True, help="sweep YAML file")
    p_sweep.add_argument("--out", help="output directory (default: $NZIAM_OUT/<sweep>)")
    p_sweep.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_fig = sub.add_parser("figures", help="build figure data and plots from run directories")
    p_fig.add_argument("--runs", nargs="+", required=True, help="completed run directories")
    p_fig.add_argument("--out", help="output directory (default: $NZIAM_OUT/figures)")
    p_fig.add_argument("--region", default="china", help="region shown in figures")
    p_fig.set_defaults(func=_cmd_figures)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
