"""Aggregation of trial records into experiment statistics.

The accumulator is an associative, commutative fold over TrialRecords:
feeding the same records in any order, or re-folding records read back
from their JSONL file, produces an identical ExperimentStats. Quantiles
are computed at finalization from retained integer slot counts, so
nothing depends on float accumulation order.
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from ..engine import NodeOutcome, TrialRecord
from ..topology import Topology
from .predicates import Predicate


@dataclass
class SlotSummary:
    count: int
    mean: float
    median: float
    p95: float

    @staticmethod
    def from_values(values) -> Optional["SlotSummary"]:
        vals = sorted(values)
        if not vals:
            return None
        idx95 = min(len(vals) - 1, (len(vals) * 95 + 99) // 100 - 1)
        return SlotSummary(
            count=len(vals),
            mean=sum(vals) / len(vals),
            median=float(statistics.median(vals)),
            p95=float(vals[idx95]),
        )

    def as_dict(self) -> dict:
        return {"count": self.count, "mean": self.mean,
                "median": self.median, "p95": self.p95}


@dataclass
class ExperimentStats:
    trials: int
    predicate_name: Optional[str]
    success_count: int
    success_total: int
    # estimate / n_u, keyed by the exact ratio, over every latched
    # estimate of every trial. Mass equals the estimate-bearing node count.
    ratio_histogram: dict[float, int]
    total_slots: Optional[SlotSummary]
    # Per-trial slot counts restricted to trials the predicate accepted.
    success_slots: Optional[SlotSummary]
    # Per (node, trial) estimate-acquisition slots.
    acquisition_slots: Optional[SlotSummary]
    abort_rate: float
    cutoff_rate: float

    @property
    def success_rate(self) -> float:
        return self.success_count / self.success_total if self.success_total else 0.0

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "predicate": self.predicate_name,
            "success_count": self.success_count,
            "success_total": self.success_total,
            "success_rate": self.success_rate,
            "ratio_histogram": {str(k): v for k, v in
                                sorted(self.ratio_histogram.items())},
            "total_slots": self.total_slots.as_dict() if self.total_slots else None,
            "success_slots": self.success_slots.as_dict() if self.success_slots else None,
            "acquisition_slots": (self.acquisition_slots.as_dict()
                                  if self.acquisition_slots else None),
            "abort_rate": self.abort_rate,
            "cutoff_rate": self.cutoff_rate,
        }


@dataclass
class StatsAccumulator:
    topology: Topology
    predicate: Optional[Predicate] = None
    trials: int = 0
    success_count: int = 0
    success_total: int = 0
    aborts: int = 0
    cutoffs: int = 0
    ratio_histogram: Counter = field(default_factory=Counter)
    _total_slots: list = field(default_factory=list)
    _success_slots: list = field(default_factory=list)
    _acq_slots: list = field(default_factory=list)

    def add(self, rec: TrialRecord) -> None:
        self.trials += 1
        self._total_slots.append(rec.total_slots)
        if rec.cutoff:
            self.cutoffs += 1
        if any(o is NodeOutcome.ABORTED for o in rec.outcomes):
            self.aborts += 1
        for u in range(rec.n):
            est = rec.estimates[u]
            if est is not None:
                self.ratio_histogram[est / self.topology.degree(u)] += 1
            if rec.estimate_slots[u] is not None:
                self._acq_slots.append(rec.estimate_slots[u])
        if self.predicate is not None:
            ok, total = self.predicate.evaluate(rec, self.topology)
            self.success_count += ok
            self.success_total += total
            if self.predicate.scope == "trial" and ok:
                self._success_slots.append(rec.total_slots)

    def finalize(self) -> ExperimentStats:
        return ExperimentStats(
            trials=self.trials,
            predicate_name=self.predicate.name if self.predicate else None,
            success_count=self.success_count,
            success_total=self.success_total,
            ratio_histogram=dict(self.ratio_histogram),
            total_slots=SlotSummary.from_values(self._total_slots),
            success_slots=SlotSummary.from_values(self._success_slots),
            acquisition_slots=SlotSummary.from_values(self._acq_slots),
            abort_rate=self.aborts / self.trials if self.trials else 0.0,
            cutoff_rate=self.cutoffs / self.trials if self.trials else 0.0,
        )
