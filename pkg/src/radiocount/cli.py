"""Command line interface.

    radiocount run --protocol NAME --topology SPEC --trials T --seed S
                   [--cd/--no-cd] [--param k=v]... [--predicate NAME]
                   [--max-slots M] [--workers W] [--out DIR] [--trace FILE]
    radiocount sweep --grid FILE [--out DIR]
    radiocount oracle --formula {one|silence|noise} --n N --p P
    radiocount replay --trace FILE [--topology SPEC] [--cd/--no-cd]

Exit codes: 0 success, 1 validation or input error, 2 the configured
success predicate (or replay verification) failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Optional

from .engine import SimConfig, run_simulation
from .harness.experiment import (
    ConfigError,
    ExperimentConfig,
    parse_topology,
    run_experiment,
    write_summary_csv,
)
from .harness.oracles import p_exactly_one, p_noise, p_silence
from .harness.predicates import REGISTRY as PREDICATES
from .protocols import REGISTRY as PROTOCOLS
from .protocols import ProtocolParams, build_protocols, get_protocol
from .seeding import derive_seed
from .topology import TopologyError
from .trace_io import ReplayMismatch, dump_trace, load_trace, replay_verify

_PARAM_FIELDS = {f.name: f.type for f in dataclasses.fields(ProtocolParams)}


def _parse_params(pairs) -> ProtocolParams:
    overrides = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"--param expects k=v, got {pair!r}")
        if key not in _PARAM_FIELDS:
            known = ", ".join(sorted(_PARAM_FIELDS))
            raise ConfigError(f"unknown param {key!r}; known: {known}")
        try:
            overrides[key] = float(value) if "." in value else int(value)
        except ValueError:
            raise ConfigError(f"param {key} needs a number, got {value!r}")
    return ProtocolParams(**overrides)


def _add_cd_flags(parser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--cd", dest="cd", action="store_true", default=None,
                       help="run with collision detection")
    group.add_argument("--no-cd", dest="cd", action="store_false",
                       help="run without collision detection")


def _cmd_run(args) -> int:
    config = ExperimentConfig(
        protocol=args.protocol,
        topology=args.topology,
        trials=args.trials,
        master_seed=args.seed,
        cd=args.cd,
        params=_parse_params(args.param),
        max_slots=args.max_slots,
        predicate=args.predicate,
        workers=args.workers,
        out_dir=args.out,
    )
    if args.trace:
        # Single-trial trace capture for replay/debugging.
        topology = config.validate()
        trial_seed = derive_seed(config.master_seed, 0)
        protos = build_protocols(config.protocol, topology, config.params,
                                 trial_seed)
        _, trace = run_simulation(
            topology, protos,
            SimConfig(config.resolved_cd(), trial_seed, config.max_slots),
            keep_trace=True)
        with open(args.trace, "w", encoding="ascii") as fh:
            dump_trace(trace, fh, meta={
                "protocol": config.protocol, "topology": args.topology,
                "cd": config.resolved_cd(), "seed": trial_seed,
                "n": topology.n,
            })
        print(f"trace written to {args.trace}")
        if args.trials > 1:
            print("note: --trace captures trial 0 only; stats run separately",
                  file=sys.stderr)

    result = run_experiment(config)
    stats = result.stats
    print(f"protocol={config.protocol} topology={config.topology} "
          f"trials={stats.trials}")
    if stats.total_slots:
        print(f"slots: mean={stats.total_slots.mean:.1f} "
              f"median={stats.total_slots.median:.0f} "
              f"p95={stats.total_slots.p95:.0f}")
    print(f"abort_rate={stats.abort_rate:.4f} cutoff_rate={stats.cutoff_rate:.4f}")
    if config.predicate:
        print(f"predicate={config.predicate} success_rate="
              f"{stats.success_rate:.4f} "
              f"({stats.success_count}/{stats.success_total})")
        if args.require is not None and stats.success_rate < args.require:
            print(f"FAIL: success rate below required {args.require}",
                  file=sys.stderr)
            return 2
    return 0


def _cmd_sweep(args) -> int:
    with open(args.grid, "r", encoding="ascii") as fh:
        grid = json.load(fh)
    if not isinstance(grid, list):
        raise ConfigError("grid file must hold a JSON array of run configs")
    rows = []
    for entry in grid:
        params = ProtocolParams(**entry.get("params", {}))
        config = ExperimentConfig(
            protocol=entry["protocol"],
            topology=entry["topology"],
            trials=entry.get("trials", 100),
            master_seed=entry.get("seed", 0),
            cd=entry.get("cd"),
            params=params,
            max_slots=entry.get("max_slots", 10**6),
            predicate=entry.get("predicate"),
            workers=entry.get("workers", args.workers),
            out_dir=args.out,
        )
        result = run_experiment(config)
        rows.append((config, result.stats))
        print(f"{config.protocol} {config.topology}: "
              f"success={result.stats.success_rate:.4f} "
              f"median_slots={result.stats.total_slots.median:.0f}")
    if args.out:
        write_summary_csv(f"{args.out}/sweep.summary.csv", rows)
    return 0


def _cmd_oracle(args) -> int:
    fn = {"one": p_exactly_one, "silence": p_silence, "noise": p_noise}[args.formula]
    print(f"{fn(args.n, args.p):.12g}")
    return 0


def _cmd_replay(args) -> int:
    with open(args.trace, "r", encoding="ascii") as fh:
        meta, trace = load_trace(fh)
    topo_spec = args.topology or meta.get("topology")
    if topo_spec is None:
        raise ConfigError("no topology in trace metadata; pass --topology")
    cd = args.cd if args.cd is not None else meta.get("cd")
    if cd is None:
        raise ConfigError("no cd flag in trace metadata; pass --cd/--no-cd")
    topology = parse_topology(topo_spec)
    try:
        replay_verify(trace, topology, cd)
    except ReplayMismatch as exc:
        print(f"replay FAILED: {exc}", file=sys.stderr)
        return 2
    print(f"trace verified: {trace.total_slots} slots, n={topology.n}, "
          f"cd={'on' if cd else 'off'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radiocount",
        description="Slotted radio network protocol simulator and Monte "
                    "Carlo harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("--protocol", required=True, choices=sorted(PROTOCOLS))
    p_run.add_argument("--topology", required=True,
                       help="clique:N | star:LEAVES | gnp:N:P:SEED | file:PATH")
    p_run.add_argument("--trials", type=int, default=100)
    p_run.add_argument("--seed", type=int, default=0)
    _add_cd_flags(p_run)
    p_run.add_argument("--param", action="append", metavar="K=V",
                       help="protocol parameter override (repeatable)")
    p_run.add_argument("--predicate", choices=sorted(PREDICATES))
    p_run.add_argument("--require", type=float, default=None,
                       help="exit 2 unless predicate success rate reaches this")
    p_run.add_argument("--max-slots", type=int, default=10**6)
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--out", help="directory for JSONL/JSON/CSV outputs")
    p_run.add_argument("--trace", help="write trial 0's full trace here")
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a grid of experiments")
    p_sweep.add_argument("--grid", required=True,
                         help="JSON array of run configurations")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", help="directory for outputs")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_oracle = sub.add_parser("oracle", help="closed-form channel statistics")
    p_oracle.add_argument("--formula", required=True,
                          choices=["one", "silence", "noise"])
    p_oracle.add_argument("--n", type=int, required=True)
    p_oracle.add_argument("--p", type=float, required=True)
    p_oracle.set_defaults(fn=_cmd_oracle)

    p_replay = sub.add_parser("replay", help="verify a recorded trace")
    p_replay.add_argument("--trace", required=True)
    p_replay.add_argument("--topology")
    _add_cd_flags(p_replay)
    p_replay.set_defaults(fn=_cmd_replay)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, TopologyError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
