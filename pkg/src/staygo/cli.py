"""Command line: ``staygo gen-traces | run | report``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .decision import POLICY_KINDS
from .harness import (
    ExperimentConfig,
    SweepSpec,
    cmd_gen_traces,
    cmd_report,
    cmd_run,
    load_config,
    parse_H,
)
from .regression import KINDS as ESTIMATOR_KINDS
from .scenarios import SCENARIOS, WORLD_KINDS
from .sim import RESET_MODES
from .world import ConfigError


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI config file; flags override its values")
    p.add_argument("--scenario", choices=(*SCENARIOS, "all"))
    p.add_argument("--world", choices=WORLD_KINDS)
    p.add_argument("--days", type=int)
    p.add_argument("--traces", type=int, dest="num_traces")
    p.add_argument("--seed", type=int)
    p.add_argument("--procT", type=float)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="staygo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-traces", help="write seeded event trace files")
    _common(gen)

    run = sub.add_parser("run", help="run a configuration or sweep, write results.csv")
    _common(run)
    run.add_argument("--policy", choices=(*POLICY_KINDS, "all"))
    run.add_argument("--estimator", choices=ESTIMATOR_KINDS)
    run.add_argument("--H", help="experience memory size (integer or inf)")
    run.add_argument("--reset", choices=RESET_MODES)
    run.add_argument("--features", choices=("coords", "id"))
    run.add_argument("--sweep", action="append", default=[], metavar="AXIS=V1,V2",
                     help="sweep over H, procT, estimator, policy or reset (repeatable)")
    run.add_argument("--svg", action="store_true", help="also write SVG charts")

    rep = sub.add_parser("report", help="summarize a results CSV")
    rep.add_argument("results", help="path to results.csv")
    rep.add_argument("--out", help="summary CSV path (default: next to results)")
    return parser


def _config(args) -> ExperimentConfig:
    overrides = {
        k: getattr(args, k, None)
        for k in ("world", "days", "num_traces", "seed", "out_dir", "estimator", "reset", "features")
    }
    if getattr(args, "scenario", None) not in (None, "all"):
        overrides["scenario"] = args.scenario
    if getattr(args, "policy", None) not in (None, "all"):
        overrides["policy"] = args.policy
    if args.config:
        cfg = load_config(args.config, **overrides)
    else:
        cfg = ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "H", None) is not None:
        # applied last: "inf" parses to None, which would read as "not given"
        cfg = replace(cfg, H=parse_H(args.H))
    if args.procT is not None:
        cfg = replace(cfg, timing=replace(cfg.timing, procT=args.procT))
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        if args.command == "report":
            table, _ = cmd_report(args.results, args.out)
            print(table)
            return 0
        cfg = _config(args)
        if args.command == "gen-traces":
            paths = cmd_gen_traces(cfg)
            print(f"wrote {len(paths)} trace files to {cfg.trace_dir}")
            return 0
        sweeps = [SweepSpec.parse(s) for s in args.sweep]
        policies = list(POLICY_KINDS) if args.policy == "all" else None
        scenarios = list(SCENARIOS) if args.scenario == "all" else None
        path = cmd_run(cfg, sweeps, policies=policies, scenarios=scenarios, svg_out=args.svg)
        print(f"wrote {path}")
        return 0
    except (ConfigError, ValueError, OSError) as exc:
        print(f"staygo: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
