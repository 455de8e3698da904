"""Command line entry point: ``ppbass <subcommand> ...``.

Each direct subcommand builds a one-task scenario and runs it through the
same executor as ``scenario run``, so the JSON printed by ``--json`` has
the report layout in both cases.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .. import __version__
from .report import dumps
from .runner import Options, ScenarioError, load_scenario, run_scenario_data


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--ring", default="Z", help="Z, Zmod:<n>, Fp:<p> or Fpx:<p> (default Z)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--stage-bound", type=int, default=None, help="stages for chains, systems and probes")
    g.add_argument("--enum-bound", type=int, default=None, help="largest set the oracle may enumerate")
    fmt = g.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output", action="store_const", const="json", help="print the JSON report")
    fmt.add_argument("--text", dest="output", action="store_const", const="text", help="print a summary (default)")
    g.add_argument("--with-oracle", action="store_true", help="cross-check against brute-force enumeration")
    g.add_argument("--report", metavar="PATH", help="also write the JSON report to PATH")
    p.set_defaults(output="text")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="ppbass", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ppbass {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("implies", parents=[common], help="decide phi <= psi")
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("evaluate", parents=[common], help="phi(M) as a subgroup of M^n")
    p.add_argument("formula")
    p.add_argument("--module", required=True, help='e.g. "R/4 + R/2" or a presentation .json')

    p = sub.add_parser("free-realization", parents=[common], help="free realization of phi")
    p.add_argument("formula")

    chain = sub.add_parser("chain", help="chain commands").add_subparsers(dest="action", required=True)
    p = chain.add_parser("analyze", parents=[common], help="strictness of a descending chain")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--template", help="formula with stage index i")
    src.add_argument("--formulas", nargs="+", help="explicit list of formulas")
    p.add_argument("--stages", type=int)
    p.add_argument("--module", help="analyze inside this module instead of the pp lattice")

    bass = sub.add_parser("bass", help="Bass systems").add_subparsers(dest="action", required=True)
    p = bass.add_parser("build", parents=[common], help="direct system of free realizations")
    p.add_argument("--template", required=True)
    p.add_argument("--stages", type=int)
    p.add_argument("--tiebreak", choices=["first", "last"], default="first")

    p = sub.add_parser("eq-probe", parents=[common], help="compare pp indices of two module descriptions")
    p.add_argument("--left", required=True, help="module spec, family:<spec> or .json")
    p.add_argument("--right", required=True)
    p.add_argument("--pairs", help="auto:<seed>,<count>")
    p.add_argument("--arity", type=int, default=1)

    sub.add_parser("perfect-probe", parents=[common], help="stabilization of principal-ideal chains")

    scen = sub.add_parser("scenario", help="scenario files").add_subparsers(dest="action", required=True)
    p = scen.add_parser("run", parents=[common], help="run a scenario file")
    p.add_argument("path")
    return parser


def _task(args) -> dict:
    cmd = args.command
    if cmd == "implies":
        return {"kind": "implies", "left": args.left, "right": args.right}
    if cmd == "evaluate":
        return {"kind": "evaluate", "formula": args.formula, "module": args.module}
    if cmd == "free-realization":
        return {"kind": "free-realization", "formula": args.formula}
    if cmd == "chain":
        decl = {"template": args.template} if args.template else {"formulas": args.formulas}
        task = {"kind": "chain-analyze", "chain": decl}
        if args.module:
            task["module"] = args.module
    elif cmd == "bass":
        task = {"kind": "bass-build", "chain": {"template": args.template}, "tiebreak": args.tiebreak}
    elif cmd == "eq-probe":
        task = {"kind": "eq-probe", "left": args.left, "right": args.right}
        pairs = {"arity": args.arity}
        if args.pairs:
            if not args.pairs.startswith("auto:"):
                raise ScenarioError("--pairs must look like auto:<seed>,<count>")
            seed, count = args.pairs[len("auto:"):].split(",")
            pairs.update(seed=int(seed), count=int(count))
        task["pairs"] = pairs
        return task
    else:
        return {"kind": "perfect-probe"}
    if getattr(args, "stages", None) is not None:
        task["stages"] = args.stages
    return task


def _value(v) -> str:
    if isinstance(v, dict):
        return ", ".join(f"{k}={_value(x)}" for k, x in v.items())
    return str(v)


def format_text(report: dict) -> str:
    lines = [f"ppbass {report['tool']['version']}  ring {report['ring']}  seed {report['seed']}"]
    if not report["tasks"]:
        lines.append("(no tasks)")
    for n, t in enumerate(report["tasks"], 1):
        secs = t.get("timing", {}).get("seconds")
        lines.append(f"[{n}] {t['kind']}: {t['verdict']}" + (f"  ({secs:.3f} s)" if secs is not None else ""))
        if "error" in t:
            lines.append(f"    {t['error']['type']}: {t['error']['message']}")
        data = t.get("stage_data", {})
        for key in ("left", "right", "formula", "pair", "upper", "lower"):
            if key in data:
                lines.append(f"    {key}: {_value(data[key])}")
        if "order" in data:
            lines.append(f"    |phi(M)| = {data['order']}, index in M^n = {data.get('index_in_power')}")
        if "realization" in data:
            r = data["realization"]
            lines.append(f"    module with invariant factors {r['invariant_factors']}, order {r['order']}")
        for s in data.get("stages") or []:
            extra = f"  order {s['order']}" if "order" in s else ""
            mark = {True: "  strict", False: "  equal", None: ""}.get(s.get("strict_next"), "")
            lines.append(f"    stage {s['stage']}: {s['formula']}{extra}{mark}")
        ev = data.get("evidence")
        if ev:
            lines.append(f"    {ev['statement']}")
        if "oracle" in t:
            lines.append(f"    oracle: {_value(t['oracle'])}")
        if t["certificates"]:
            lines.append(f"    {len(t['certificates'])} certificate(s)")
    return "\n".join(lines) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    options = Options(
        seed=args.seed, stage_bound=args.stage_bound, enum_bound=args.enum_bound, with_oracle=args.with_oracle
    )
    try:
        if args.command == "scenario":
            scenario = load_scenario(args.path)
        else:
            scenario = {"ring": args.ring, "seed": args.seed, "tasks": [_task(args)]}
        result = run_scenario_data(scenario, options)
    except (ScenarioError, OSError) as exc:
        print(f"ppbass: {exc}", file=sys.stderr)
        return 2
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(dumps(result.report))
    sys.stdout.write(dumps(result.report) if args.output == "json" else format_text(result.report))
    return result.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
