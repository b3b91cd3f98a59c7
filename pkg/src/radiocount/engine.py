"""Synchronous slotted simulation engine.

Time advances in discrete slots shared by all nodes. Each slot the engine
collects one action from every active node, resolves the channel
independently for every listener over that listener's neighborhood, and
delivers feedback. A listener hears silence when no neighbor broadcast,
the message itself when exactly one did, and (only with collision
detection enabled) noise when two or more did; without collision
detection a collision is indistinguishable from silence. Broadcasting and
idle nodes get no feedback.

The engine itself consumes no randomness: all coins live in the per-node
generators owned by the protocol instances, so a run is a pure function
of (topology, protocol seeds, config). Polling happens in ascending node
id order by default, but channel resolution sees the complete action set,
so any poll order yields the same trace (tests assert this).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

from .messages import (
    IDLE,
    LISTEN,
    NOISE,
    SILENCE,
    Broadcast,
    Feedback,
    Message,
    Received,
)
from .topology import Topology

DEFAULT_MAX_SLOTS = 10**6


@dataclass(frozen=True)
class SimConfig:
    collision_detection: bool
    seed: int = 0
    # Safety cutoff. Hitting it marks the trial CutoffReached instead of
    # raising: some protocols legitimately never terminate when the
    # network-size bound they would need is not supplied.
    max_slots: int = DEFAULT_MAX_SLOTS

    def __post_init__(self):
        if self.max_slots < 1:
            raise ValueError("max_slots must be >= 1")


class NodeOutcome(str, Enum):
    DONE = "done"
    ABORTED = "aborted"
    CUTOFF = "cutoff"


@dataclass
class TrialRecord:
    """Outcome of one simulation, per node."""

    trial: int
    outcomes: list[NodeOutcome]
    estimates: list[Optional[int]]
    estimate_slots: list[Optional[int]]
    termination_slots: list[Optional[int]]
    total_slots: int
    cutoff: bool

    @property
    def n(self) -> int:
        return len(self.outcomes)


@dataclass
class Trace:
    """Optional per-slot record: actions and feedback keyed by node id."""

    slots: list[tuple[dict, dict]] = field(default_factory=list)

    @property
    def total_slots(self) -> int:
        return len(self.slots)


def resolve_channel(listener: int,
                    broadcasters_in_neighborhood,
                    cd: bool) -> Feedback:
    """Channel outcome for one listener.

    broadcasters_in_neighborhood holds (node, Message) pairs for the
    listener's broadcasting neighbors only. Total function: empty set is
    silence, a single broadcaster delivers its message, two or more are
    noise with collision detection and silence without.
    """
    count = len(broadcasters_in_neighborhood)
    if count == 0:
        return SILENCE
    if count == 1:
        for _, msg in broadcasters_in_neighborhood:
            return Received(msg)
    return NOISE if cd else SILENCE


def run_simulation(topology: Topology,
                   protocols: Sequence,
                   config: SimConfig,
                   *,
                   trial_index: int = 0,
                   keep_trace: bool = False,
                   poll_order: Optional[Sequence[int]] = None,
                   observer: Optional[Callable[[int, Sequence], None]] = None,
                   ) -> tuple[TrialRecord, Optional[Trace]]:
    """Run one simulation to completion or the slot cutoff.

    protocols[u] is node u's state machine (see protocols.base). All
    nodes start at slot 0. Returns the per-node outcomes and, when
    keep_trace is set, the full slot-by-slot trace. `observer`, if given,
    is called after every slot with (slot_index, protocols) so tests can
    assert cross-node invariants at slot boundaries.
    """
    n = topology.n
    if len(protocols) != n:
        raise ValueError(f"need {n} protocol instances, got {len(protocols)}")
    cd = config.collision_detection
    uniform = topology.uniform_channel
    trace = Trace() if keep_trace else None

    order = list(range(n)) if poll_order is None else list(poll_order)
    if sorted(order) != list(range(n)):
        raise ValueError("poll_order must be a permutation of node ids")

    termination_slots: list[Optional[int]] = [None] * n
    for u in order:
        if protocols[u].done:
            termination_slots[u] = 0

    active = [u for u in order if not protocols[u].done]
    slot = 0
    fb_of: list[Optional[Feedback]] = [None] * n

    while active and slot < config.max_slots:
        blist: list[tuple[int, Message]] = []
        listeners: list[int] = []
        for u in active:
            a = protocols[u].act()
            if a is LISTEN:
                listeners.append(u)
            elif a is not IDLE:
                blist.append((u, a.message))

        if listeners:
            if uniform:
                # One shared channel: every listener hears the same thing
                # (a listener is never among the broadcasters).
                k = len(blist)
                if k == 0:
                    fb = SILENCE
                elif k == 1:
                    fb = Received(blist[0][1])
                else:
                    fb = NOISE if cd else SILENCE
                for u in listeners:
                    fb_of[u] = fb
            else:
                bset = {v for v, _ in blist}
                for u in listeners:
                    count, msg = topology.neighbor_broadcasts(u, blist, bset)
                    if count == 0:
                        fb_of[u] = SILENCE
                    elif count == 1:
                        fb_of[u] = Received(msg)
                    else:
                        fb_of[u] = NOISE if cd else SILENCE

        if keep_trace:
            actions_rec = {u: protocols[u].act() for u in active}
            feedback_rec = {u: fb_of[u] for u in listeners}
            trace.slots.append((actions_rec, feedback_rec))

        finished = False
        for u in active:
            p = protocols[u]
            p.absorb(fb_of[u])
            if p.done:
                finished = True
                termination_slots[u] = slot + 1

        for u in listeners:
            fb_of[u] = None
        slot += 1
        if observer is not None:
            observer(slot, protocols)
        if finished:
            active = [u for u in active if not protocols[u].done]

    outcomes = []
    estimates = []
    estimate_slots: list[Optional[int]] = []
    cutoff = bool(active)
    for u in range(n):
        p = protocols[u]
        if p.done:
            outcomes.append(NodeOutcome.ABORTED if p.aborted else NodeOutcome.DONE)
        else:
            outcomes.append(NodeOutcome.CUTOFF)
        estimates.append(p.estimate)
        estimate_slots.append(p.estimate_slot)

    record = TrialRecord(
        trial=trial_index,
        outcomes=outcomes,
        estimates=estimates,
        estimate_slots=estimate_slots,
        termination_slots=termination_slots,
        total_slots=slot,
        cutoff=cutoff,
    )
    return record, trace
