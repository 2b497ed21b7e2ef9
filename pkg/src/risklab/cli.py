"""Command-line interface.

Subcommands:

* ``gen`` — write the task battery (standard, or from custom bases) as JSON;
* ``regions`` — export the simplex geometry: region polygons, feasible
  triangles, exact overlap areas, CRRA intervals and curve, plus a figure;
* ``simulate`` — run a population of simulated agents and write their
  choice records (JSONL or CSV);
* ``analyze`` — full statistical report for a record file or the bundled
  reference aggregates: JSON + CSV tables with PNG figures alongside;
* ``serve`` — run the live-session HTTP service.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .agents import parse_utility, population, simulate_population
from .analysis import analyze_records, analyze_reference
from .lottery import Lottery
from .records import read_records, write_records
from .tasks import battery_to_json, custom_battery, price_list_battery, standard_battery

log = logging.getLogger("risklab")


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.custom:
        spec = json.loads(Path(args.custom).read_text())
        bases = [Lottery.from_json_dict(item) for item in spec["bases"]]
        cases = custom_battery(bases, spec.get("ids"))
    else:
        cases = standard_battery()
    payload = battery_to_json(cases, price_list_battery())
    out = Path(args.out)
    out.write_text(json.dumps(payload, indent=2) + "\n")
    log.info("wrote battery (%d screens, %d rows) to %s", len(payload["mps_cases"]),
             len(payload["price_list"]), out)
    print(out)
    return 0


def _cmd_regions(args: argparse.Namespace) -> int:
    from .report import write_geometry_exports

    written = write_geometry_exports(
        args.out_dir,
        crra_lo=args.crra_min,
        crra_hi=args.crra_max,
        crra_steps=args.crra_steps,
        figures=not args.no_figures,
    )
    for path in written:
        print(path)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    utility = parse_utility(args.agent)
    specs = population(utility, args.n, tremble=args.tremble, master_seed=args.seed)
    records = simulate_population(specs, session_id=args.session_id)
    write_records(records, args.out)
    log.info("simulated %d agents (%d records) into %s", args.n, len(records), args.out)
    print(args.out)
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    from .report import write_analysis_report

    if args.reference:
        report = analyze_reference()
    else:
        records = read_records(args.records)
        report = analyze_records(records)
    written = write_analysis_report(report, args.out_dir, figures=not args.no_figures)
    for flag in report.flags:
        log.warning("flag: %s", flag)
    for path in written:
        print(path)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import SessionStore, create_app

    store = SessionStore(args.data_dir)
    app = create_app(store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risklab",
        description="Risk-preference task construction, simulation, sessions, analysis.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write the task battery as JSON")
    p.add_argument("--out", default="batteries.json", help="output path")
    p.add_argument("--custom", help="JSON file with custom base lotteries")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("regions", help="export simplex geometry and CRRA tables")
    p.add_argument("--out-dir", default="regions-out", help="output directory")
    p.add_argument("--crra-min", type=float, default=-5.0)
    p.add_argument("--crra-max", type=float, default=5.0)
    p.add_argument("--crra-steps", type=int, default=1001)
    p.add_argument("--no-figures", action="store_true", help="skip PNG output")
    p.set_defaults(func=_cmd_regions)

    p = sub.add_parser("simulate", help="simulate an agent population")
    p.add_argument(
        "--agent",
        required=True,
        help="utility spec: crra:R | cara:A | powerexpo:R,ALPHA | table:V1,V2,...",
    )
    p.add_argument("--n", type=int, default=100, help="number of agents")
    p.add_argument("--tremble", type=float, default=0.0, help="tremble rate in [0, 1]")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", default="records.jsonl", help="output records (.jsonl or .csv)")
    p.add_argument("--session-id", default="sim", help="session id stamped on records")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="statistical report for records or the reference data")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--records", help="records file (.jsonl or .csv)")
    source.add_argument(
        "--reference", action="store_true", help="analyze the bundled reference aggregates"
    )
    p.add_argument("--out-dir", default="analysis-out", help="output directory")
    p.add_argument("--no-figures", action="store_true", help="skip PNG output")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("serve", help="run the live-session HTTP service")
    p.add_argument("--data-dir", default="sessions", help="event-log directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
