"""Monte Carlo experiment runner.

An ExperimentConfig names a protocol, a topology, a trial count, and a
master seed; run_experiment executes the trials (optionally on a process
pool; trials are independent and aggregation is order-insensitive, so
worker scheduling never affects results), aggregates an ExperimentStats,
and optionally writes one JSONL file of per-trial records plus JSON and
CSV summaries.

Trial t runs with seed derive_seed(master_seed, t); inside a trial, node
u's generator is seeded with derive_seed(trial_seed, u). Identical
configs therefore produce identical outputs, byte for byte.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import multiprocessing
import os
from dataclasses import dataclass, field
from typing import Optional

from ..engine import NodeOutcome, SimConfig, TrialRecord, run_simulation
from ..protocols import ProtocolParams, build_protocols, get_protocol
from ..seeding import derive_seed
from ..topology import Topology, clique, from_file, random_multihop, star
from .predicates import get_predicate
from .stats import ExperimentStats, StatsAccumulator

DEFAULT_EXPERIMENT_MAX_SLOTS = 10**6


class ConfigError(ValueError):
    pass


def parse_topology(spec: str) -> Topology:
    """Build a topology from a compact spec string.

    clique:N | star:LEAVES | gnp:N:EDGE_PROB:SEED | file:PATH
    """
    kind, _, rest = spec.partition(":")
    try:
        if kind == "clique":
            return clique(int(rest))
        if kind == "star":
            return star(int(rest))
        if kind == "gnp":
            n_s, p_s, seed_s = rest.split(":")
            return random_multihop(int(n_s), float(p_s), int(seed_s))
        if kind == "file":
            return from_file(rest)
    except ValueError as exc:
        raise ConfigError(f"bad topology spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown topology kind in {spec!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: str
    topology: str
    trials: int
    master_seed: int = 0
    cd: Optional[bool] = None          # None: take the protocol's requirement
    params: ProtocolParams = field(default_factory=ProtocolParams)
    max_slots: int = DEFAULT_EXPERIMENT_MAX_SLOTS
    predicate: Optional[str] = None
    workers: int = 1
    out_dir: Optional[str] = None
    keep_records: bool = True

    def resolved_cd(self) -> bool:
        spec = get_protocol(self.protocol)
        if self.cd is None:
            return spec.requires_cd
        return self.cd

    def validate(self) -> Topology:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.max_slots < 1:
            raise ConfigError("max_slots must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        spec = get_protocol(self.protocol)
        if self.cd is not None and self.cd != spec.requires_cd:
            want = "on" if spec.requires_cd else "off"
            raise ConfigError(
                f"{self.protocol} requires collision detection {want}")
        topology = parse_topology(self.topology)
        spec.validate(topology, self.params)
        get_predicate(self.predicate)
        return topology


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    stats: ExperimentStats
    records: Optional[list[TrialRecord]]


def run_trial(config: ExperimentConfig, topology: Topology,
              trial_index: int) -> TrialRecord:
    """One simulation with the trial's derived seed."""
    trial_seed = derive_seed(config.master_seed, trial_index)
    protocols = build_protocols(config.protocol, topology, config.params,
                                trial_seed)
    sim = SimConfig(collision_detection=config.resolved_cd(),
                    seed=trial_seed, max_slots=config.max_slots)
    record, _ = run_simulation(topology, protocols, sim,
                               trial_index=trial_index)
    return record


_WORKER_STATE: dict = {}


def _worker_init(config: ExperimentConfig) -> None:
    _WORKER_STATE["config"] = config
    _WORKER_STATE["topology"] = config.validate()


def _worker_run(trial_index: int) -> TrialRecord:
    return run_trial(_WORKER_STATE["config"], _WORKER_STATE["topology"],
                     trial_index)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    topology = config.validate()
    acc = StatsAccumulator(topology, get_predicate(config.predicate))
    records: list[Optional[TrialRecord]] = [None] * config.trials

    if config.workers > 1 and config.trials > 1:
        ctx = multiprocessing.get_context("fork")
        chunk = max(1, config.trials // (config.workers * 8))
        with ctx.Pool(config.workers, initializer=_worker_init,
                      initargs=(config,)) as pool:
            for rec in pool.imap_unordered(_worker_run, range(config.trials),
                                           chunksize=chunk):
                records[rec.trial] = rec
    else:
        for t in range(config.trials):
            records[t] = run_trial(config, topology, t)

    for rec in records:
        acc.add(rec)
    stats = acc.finalize()

    if config.out_dir is not None:
        write_outputs(config, stats, records)
    return ExperimentResult(config, stats,
                            records if config.keep_records else None)


# -- persistence ---------------------------------------------------------------


def record_to_json(rec: TrialRecord) -> dict:
    return {
        "trial": rec.trial,
        "outcomes": [o.value for o in rec.outcomes],
        "estimates": rec.estimates,
        "estimate_slots": rec.estimate_slots,
        "termination_slots": rec.termination_slots,
        "total_slots": rec.total_slots,
        "cutoff": rec.cutoff,
    }


def record_from_json(obj: dict) -> TrialRecord:
    return TrialRecord(
        trial=obj["trial"],
        outcomes=[NodeOutcome(o) for o in obj["outcomes"]],
        estimates=obj["estimates"],
        estimate_slots=obj["estimate_slots"],
        termination_slots=obj["termination_slots"],
        total_slots=obj["total_slots"],
        cutoff=obj["cutoff"],
    )


def config_to_json(config: ExperimentConfig) -> dict:
    d = dataclasses.asdict(config)
    d["params"] = {k: v for k, v in dataclasses.asdict(config.params).items()}
    return d


def write_outputs(config: ExperimentConfig, stats: ExperimentStats,
                  records) -> None:
    os.makedirs(config.out_dir, exist_ok=True)
    base = os.path.join(config.out_dir,
                        f"{config.protocol}-{config.topology.replace(':', '_').replace('/', '_')}")
    with open(base + ".records.jsonl", "w", encoding="ascii") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_json(rec), sort_keys=True) + "\n")
    summary = {"config": config_to_json(config), "stats": stats.as_dict()}
    with open(base + ".summary.json", "w", encoding="ascii") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_summary_csv(base + ".summary.csv", [(config, stats)])


def load_records(path) -> list[TrialRecord]:
    records = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(record_from_json(json.loads(line)))
    return records


SUMMARY_FIELDS = [
    "protocol", "topology", "trials", "predicate", "success_rate",
    "success_count", "success_total", "abort_rate", "cutoff_rate",
    "slots_mean", "slots_median", "slots_p95",
    "success_slots_median", "acquisition_slots_median",
]


def write_summary_csv(path, rows) -> None:
    """rows: iterable of (config, stats) pairs, one CSV line each."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS)
        writer.writeheader()
        for config, stats in rows:
            total = stats.total_slots
            succ = stats.success_slots
            acq = stats.acquisition_slots
            writer.writerow({
                "protocol": config.protocol,
                "topology": config.topology,
                "trials": stats.trials,
                "predicate": stats.predicate_name or "",
                "success_rate": f"{stats.success_rate:.6f}",
                "success_count": stats.success_count,
                "success_total": stats.success_total,
                "abort_rate": f"{stats.abort_rate:.6f}",
                "cutoff_rate": f"{stats.cutoff_rate:.6f}",
                "slots_mean": f"{total.mean:.3f}" if total else "",
                "slots_median": f"{total.median:.1f}" if total else "",
                "slots_p95": f"{total.p95:.1f}" if total else "",
                "success_slots_median": f"{succ.median:.1f}" if succ else "",
                "acquisition_slots_median": f"{acq.median:.1f}" if acq else "",
            })
