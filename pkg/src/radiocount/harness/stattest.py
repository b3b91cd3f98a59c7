"""Statistical binding of the simulator to the closed-form oracles.

A SlotFilter picks specific slots out of each trial's trace and reads
off a binary channel event (exactly one broadcaster, silence, or noise
i.e. two or more). channel_stat_test runs seeded trials, pools the
observations, and checks the empirical frequency against a closed-form
expectation within a z-score band (default 4 sigma, a false-failure rate
of about 6e-5 per test).

Slots from the same trial are valid pooled Bernoulli samples here
because every protocol draws its broadcast coins independently across
slots, and the filters require all nodes active, which pins the per-slot
success probability to the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..engine import SimConfig, run_simulation
from ..messages import IDLE, LISTEN
from ..protocols import ProtocolParams, build_protocols
from ..seeding import derive_seed
from ..topology import Topology


class InsufficientSamples(RuntimeError):
    pass


_EVENTS = ("one", "silence", "noise")


@dataclass(frozen=True)
class SlotFilter:
    """Samples `event` over the given global slot indices (0-based), in
    slots where every node is still active."""

    name: str
    slots: tuple[int, ...]
    event: str  # "one" | "silence" | "noise"

    def __post_init__(self):
        if self.event not in _EVENTS:
            raise ValueError(f"event must be one of {_EVENTS}")

    def observations(self, trace, topology: Topology):
        n = topology.n
        for k in self.slots:
            if k >= len(trace.slots):
                continue
            actions, _ = trace.slots[k]
            if len(actions) != n:
                continue  # someone already terminated; probability differs
            count = 0
            for a in actions.values():
                if a is not LISTEN and a is not IDLE:
                    count += 1
            if self.event == "one":
                yield count == 1
            elif self.event == "silence":
                yield count == 0
            else:
                yield count >= 2


@dataclass(frozen=True)
class StatTestResult:
    passed: bool
    z_score: float
    expected: float
    empirical: float
    samples: int

    def __str__(self) -> str:
        word = "pass" if self.passed else "FAIL"
        return (f"{word} z={self.z_score:+.2f} expected={self.expected:.4f} "
                f"empirical={self.empirical:.4f} samples={self.samples}")


def channel_stat_test(protocol: str,
                      topology: Topology,
                      slot_filter: SlotFilter,
                      expected: float,
                      trials: int,
                      *,
                      master_seed: int = 0,
                      params: Optional[ProtocolParams] = None,
                      max_slots: int = 10**5,
                      cd: Optional[bool] = None,
                      band: float = 4.0,
                      min_samples: int = 100) -> StatTestResult:
    """Empirical frequency of the filtered event vs a closed-form value.

    Raises InsufficientSamples when fewer than min_samples filtered slots
    exist across all trials (the filter is degenerate or the trials too
    few).
    """
    if not 0.0 < expected < 1.0:
        raise ValueError("expected must be in (0, 1)")
    from ..protocols import get_protocol
    spec = get_protocol(protocol)
    use_cd = spec.requires_cd if cd is None else cd
    params = params or ProtocolParams()

    hits = 0
    samples = 0
    for t in range(trials):
        trial_seed = derive_seed(master_seed, t)
        protos = build_protocols(protocol, topology, params, trial_seed)
        _, trace = run_simulation(
            topology, protos,
            SimConfig(collision_detection=use_cd, seed=trial_seed,
                      max_slots=max_slots),
            trial_index=t, keep_trace=True)
        for obs in slot_filter.observations(trace, topology):
            samples += 1
            if obs:
                hits += 1

    if samples < min_samples:
        raise InsufficientSamples(
            f"filter {slot_filter.name!r} matched {samples} slots "
            f"(< {min_samples})")
    empirical = hits / samples
    sigma = math.sqrt(expected * (1.0 - expected) / samples)
    z = (empirical - expected) / sigma
    return StatTestResult(passed=abs(z) <= band, z_score=z,
                          expected=expected, empirical=empirical,
                          samples=samples)
