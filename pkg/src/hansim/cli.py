"""Operator entry point: batch runs, case comparisons, and the live dashboard bridge.

Exit codes: 0 success, 2 bad flags, 3 scenario or module error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from .errors import HansimError
from .lmu import PenaltyReport
from .simnet import Scenario, event_log_text, load_scenario, profile_csv, run_day, scenario_from_dict

EXIT_OK = 0
EXIT_BAD_FLAGS = 2
EXIT_SCENARIO = 3
EXIT_IO = 4

#: Names resolved against the scenarios shipped inside the package.
BUNDLED = {"case-study": "case_study.json"}


def resolve_scenario(ref: str) -> Scenario:
    """A path on disk, or the name of a bundled scenario."""
    if ref in BUNDLED and not Path(ref).exists():
        text = resources.files("hansim.data").joinpath(BUNDLED[ref]).read_text()
        return scenario_from_dict(json.loads(text))
    return load_scenario(ref)


def _seed_from(args: argparse.Namespace) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("HANSIM_SEED")
    return int(env) if env else None


def _out_dir(args: argparse.Namespace) -> Path:
    out = args.out or os.environ.get("HANSIM_OUT") or "out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _report_dict(report: PenaltyReport) -> dict:
    return {
        "energy_over_kwh": report.energy_over_kwh,
        "penalty": report.penalty,
        "intervals_over": report.intervals_over,
        "rate_x": report.rate_x,
    }


def cmd_run(args: argparse.Namespace) -> int:
    scenario = resolve_scenario(args.scenario)
    result = run_day(scenario, args.algorithm, seed=_seed_from(args))
    out = _out_dir(args)
    (out / "profile.csv").write_text(profile_csv(result, scenario))
    (out / "events.log").write_text(event_log_text(result))
    report = {"algorithm": args.algorithm, **_report_dict(result.penalty_report)}
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"{args.algorithm}: energy over limit {result.penalty_report.energy_over_kwh:.3f} kWh, "
          f"penalty {result.penalty_report.penalty:.3f} x, "
          f"{result.penalty_report.intervals_over} intervals over -> {out}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    scenario = resolve_scenario(args.scenario)
    seed = _seed_from(args)
    case1 = run_day(scenario, "none", seed=seed)
    case2 = run_day(scenario, "priority", seed=seed)
    r1, r2 = case1.penalty_report, case2.penalty_report
    report = {
        "case1_without_scheduling": _report_dict(r1),
        "case2_with_scheduling": _report_dict(r2),
        "savings": r1.penalty - r2.penalty,
        "savings_energy_kwh": r1.energy_over_kwh - r2.energy_over_kwh,
    }
    out = _out_dir(args)
    (out / "case1_profile.csv").write_text(profile_csv(case1, scenario))
    (out / "case2_profile.csv").write_text(profile_csv(case2, scenario))
    (out / "compare.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    x = scenario.penalty_rate_x
    print("                      E (kWh over)   penalty")
    print(f"  without scheduling  {r1.energy_over_kwh:12.3f}   {r1.penalty:.3f} (rate {x})")
    print(f"  with scheduling     {r2.energy_over_kwh:12.3f}   {r2.penalty:.3f}")
    print(f"  savings             {report['savings_energy_kwh']:12.3f}   {report['savings']:.3f}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from . import live  # asyncio/websockets only needed here

    scenario = resolve_scenario(args.scenario)
    host, _, port = args.listen.rpartition(":")
    try:
        portno = int(port)
    except ValueError:
        raise HansimError(f"--listen wants HOST:PORT, got {args.listen!r}") from None
    live.serve(scenario, host=host or "127.0.0.1", port=portno,
               algorithm=args.algorithm, seed=_seed_from(args),
               pace_s=args.pace)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hansim",
        description="Emulate one day of a home area network under a maximum demand limit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate one day and write profile/event/report artifacts")
    run_p.add_argument("--scenario", required=True, help="scenario JSON path or bundled name (case-study)")
    run_p.add_argument("--algorithm", choices=["none", "priority"], default="priority")
    run_p.add_argument("--seed", type=int, default=None, help="override the scenario's link seed")
    run_p.add_argument("--out", default=None, help="output directory (default ./out or HANSIM_OUT)")
    run_p.set_defaults(func=cmd_run)

    cmp_p = sub.add_parser("compare", help="run both algorithms and report the savings")
    cmp_p.add_argument("--scenario", required=True)
    cmp_p.add_argument("--seed", type=int, default=None)
    cmp_p.add_argument("--out", default=None)
    cmp_p.set_defaults(func=cmd_compare)

    srv_p = sub.add_parser("serve", help="live mode: pace the day and bridge it to the dashboard")
    srv_p.add_argument("--scenario", required=True)
    srv_p.add_argument("--listen", default="127.0.0.1:8766", help="HOST:PORT for the WebSocket bridge")
    srv_p.add_argument("--algorithm", choices=["none", "priority"], default="priority")
    srv_p.add_argument("--seed", type=int, default=None)
    srv_p.add_argument("--pace", type=float, default=1.0, help="wall seconds per simulated interval")
    srv_p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HansimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
