"""Named success predicates.

A predicate turns one TrialRecord into (successes, total) so aggregated
success rates have a single, versioned definition that experiments and
acceptance tests reference by name. Trial-scoped predicates return
totals of 1; node-scoped ones count each qualifying node separately.

Names are versioned (_v1): a change in meaning must be a new name so
recorded summaries stay interpretable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..engine import NodeOutcome, TrialRecord
from ..topology import Topology


@dataclass(frozen=True)
class Predicate:
    name: str
    scope: str  # "trial" or "node"
    evaluate: Callable[[TrialRecord, Topology], tuple[int, int]]


def _all_done_identical_in_range(factor: int):
    """All nodes Done, one shared estimate in [n, factor*n], and one
    shared termination slot (the single-hop theorems promise simultaneous
    termination)."""
    def evaluate(rec: TrialRecord, topology: Topology) -> tuple[int, int]:
        n = topology.n
        if any(o is not NodeOutcome.DONE for o in rec.outcomes):
            return 0, 1
        ests = set(rec.estimates)
        if len(ests) != 1 or None in ests:
            return 0, 1
        if len(set(rec.termination_slots)) != 1:
            return 0, 1
        est = next(iter(ests))
        return (1 if n <= est <= factor * n else 0), 1
    return evaluate


def _node_estimate_in_range(factor: int):
    """Counts nodes whose latched estimate lies in [n_u, factor*n_u];
    termination state is irrelevant (the never-terminating counter latches
    and keeps running)."""
    def evaluate(rec: TrialRecord, topology: Topology) -> tuple[int, int]:
        ok = 0
        for u in range(rec.n):
            est = rec.estimates[u]
            d = topology.degree(u)
            if est is not None and d <= est <= factor * d:
                ok += 1
        return ok, rec.n
    return evaluate


def _all_done_estimates_in_range(factor: int):
    """All nodes Done and every node's own estimate in
    [n_u, factor*n_u]."""
    def evaluate(rec: TrialRecord, topology: Topology) -> tuple[int, int]:
        for u in range(rec.n):
            est = rec.estimates[u]
            if rec.outcomes[u] is not NodeOutcome.DONE or est is None:
                return 0, 1
            d = topology.degree(u)
            if not d <= est <= factor * d:
                return 0, 1
        return 1, 1
    return evaluate


def _center_estimate_in_range(factor: int):
    """Designated node Done with estimate in [n_w, factor*n_w]."""
    def evaluate(rec: TrialRecord, topology: Topology) -> tuple[int, int]:
        w = topology.designated
        if w is None:
            raise ValueError("predicate needs a designated node")
        est = rec.estimates[w]
        if rec.outcomes[w] is not NodeOutcome.DONE or est is None:
            return 0, 1
        d = topology.degree(w)
        return (1 if d <= est <= factor * d else 0), 1
    return evaluate


def _center_node_estimate_in_range(factor: int):
    """Designated node's latched estimate in [n_w, factor*n_w],
    termination state ignored."""
    def evaluate(rec: TrialRecord, topology: Topology) -> tuple[int, int]:
        w = topology.designated
        if w is None:
            raise ValueError("predicate needs a designated node")
        est = rec.estimates[w]
        d = topology.degree(w)
        if est is None:
            return 0, 1
        return (1 if d <= est <= factor * d else 0), 1
    return evaluate


def _lg_upper_bound():
    """All nodes Done with one shared lg-estimate e such that 2^e >= n
    (the output bounds the size from above)."""
    def evaluate(rec: TrialRecord, topology: Topology) -> tuple[int, int]:
        if any(o is not NodeOutcome.DONE for o in rec.outcomes):
            return 0, 1
        ests = set(rec.estimates)
        if len(ests) != 1 or None in ests:
            return 0, 1
        return (1 if 2 ** next(iter(ests)) >= topology.n else 0), 1
    return evaluate


REGISTRY: dict[str, Predicate] = {}


def _register(name: str, scope: str, evaluate) -> None:
    REGISTRY[name] = Predicate(name, scope, evaluate)


_register("sh_identical_range_4x_v1", "trial", _all_done_identical_in_range(4))
_register("sh_identical_range_64x_v1", "trial", _all_done_identical_in_range(64))
_register("node_range_4x_v1", "node", _node_estimate_in_range(4))
_register("all_done_range_5x_v1", "trial", _all_done_estimates_in_range(5))
_register("center_done_range_4x_v1", "trial", _center_estimate_in_range(4))
_register("center_done_range_64x_v1", "trial", _center_estimate_in_range(64))
_register("center_node_range_4x_v1", "trial", _center_node_estimate_in_range(4))
_register("lg_upper_bound_v1", "trial", _lg_upper_bound())


def get_predicate(name: Optional[str]) -> Optional[Predicate]:
    if name is None:
        return None
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise KeyError(f"unknown predicate {name!r}; known: {known}") from None
