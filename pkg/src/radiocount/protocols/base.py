"""Per-node protocol state machines.

Every protocol is a pure per-node machine driven through a uniform
triple: construct with (params, rng), then per slot the engine calls
act() to read this slot's action and absorb(feedback) to deliver the
channel outcome (None unless the node listened). Machines never see node
ids or the topology, only their own coin flips and feedback, which keeps
nodes anonymous: two machines with equal seeds and equal feedback
sequences behave identically.

Concrete protocols are written as generator scripts that yield one
action per slot and receive the feedback as the value of the yield
expression. The wrapper turns that script into the act/absorb interface
and tracks status, the latched estimate, and slot counts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional


class ProtocolStatus(Enum):
    RUNNING = "running"
    DONE = "done"
    ABORTED = "aborted"


# 1/(2e), the clear-message fraction at which a node concludes its current
# size guess is accurate. Compared in double precision: the achievable
# fractions are k/len with len well below 1e4, and none of them sits close
# enough to the threshold for representation error to flip a comparison.
INFORMED_THRESHOLD = 0.183939720585721


@dataclass(frozen=True)
class ProtocolParams:
    """Tunable constants shared by all protocols.

    The multipliers scale every phase whose length the analysis only
    pins up to a constant; defaults are the smallest values that pass
    the acceptance suite with margin (larger values raise success
    probabilities and runtime together). The fraction thresholds are
    fixed protocol constants, not tuning knobs.
    """

    # Slots per unit of phase length: iteration i of the growing-phase
    # protocols runs phase_multiplier * i slots per phase.
    phase_multiplier: int = 6
    # Random-walk protocols run walk_multiplier * lg(upper bound) iterations.
    walk_multiplier: int = 6
    # Clear-message fraction that confirms a size guess (1/(2e)).
    informed_threshold: float = INFORMED_THRESHOLD
    # Heard fraction that latches an estimate in the every-node multihop
    # counters.
    allnodes_threshold: float = 1.0 / 10.0
    # Heard fraction that latches a per-round broadcaster-count estimate
    # in the double-counting protocol.
    subiter_threshold: float = 1.0 / 40.0
    # Double-counting schedule: rounds = dc_iter_multiplier * lg N,
    # sub-round length = dc_subiter_multiplier * lg N slots. Kept as two
    # knobs: the averaging depth needs to grow much faster than the
    # per-sub-round sample size for the final mean to concentrate.
    dc_iter_multiplier: int = 48
    dc_subiter_multiplier: int = 7
    # Verification slots per iteration for the designated-node constant
    # probability counter. Adjustable: longer phases trade time for
    # success probability.
    center_l: int = 32
    # Known upper bounds on network size / max degree. known_N is
    # required by the double-counting protocol; known_N_delta only
    # bounds the running time of the every-node counters.
    known_N: Optional[int] = None
    known_N_delta: Optional[int] = None

    def with_overrides(self, **kwargs) -> "ProtocolParams":
        return replace(self, **kwargs)


class MissingParam(ValueError):
    pass


class ProtocolViolation(RuntimeError):
    """Feedback that the protocol's own structure rules out."""


def lg_ceil(x: int) -> int:
    """Smallest k with 2**k >= x (x >= 1)."""
    if x < 1:
        raise ValueError("lg_ceil needs x >= 1")
    return (x - 1).bit_length()


class NodeProtocol:
    """Wraps a generator script into the init/act/absorb triple."""

    __slots__ = ("params", "rng", "status", "estimate", "estimate_slot",
                 "private_estimate", "observed_payload", "slots_seen",
                 "_gen", "_next")

    def __init__(self, params: ProtocolParams, rng):
        self.params = params
        self.rng = rng
        self.status = ProtocolStatus.RUNNING
        self.estimate: Optional[int] = None
        self.estimate_slot: Optional[int] = None
        self.private_estimate: Optional[int] = None
        self.observed_payload: Optional[int] = None
        self.slots_seen = 0
        self._gen = self._script()
        try:
            self._next = next(self._gen)
        except StopIteration:
            self._on_finish()

    # -- engine interface ------------------------------------------------

    @property
    def done(self) -> bool:
        return self.status is not ProtocolStatus.RUNNING

    @property
    def aborted(self) -> bool:
        return self.status is ProtocolStatus.ABORTED

    def act(self):
        """This slot's action. Idempotent until absorb() is called."""
        return self._next

    def absorb(self, feedback) -> None:
        """Deliver this slot's feedback (None unless the node listened)."""
        self.slots_seen += 1
        try:
            self._next = self._gen.send(feedback)
        except StopIteration:
            self._on_finish()

    # -- script helpers ---------------------------------------------------

    def _script(self):
        raise NotImplementedError

    def _latch(self, estimate: int) -> None:
        """Record the estimate without terminating (first latch wins)."""
        if self.estimate is None:
            self.estimate = estimate
            # Scripts latch while absorbing a slot's feedback, after
            # slots_seen was bumped, so this is the 1-based slot at whose
            # end the estimate was acquired (0 when latched at init).
            self.estimate_slot = self.slots_seen

    def _finish(self, estimate: Optional[int]) -> None:
        self.status = ProtocolStatus.DONE
        if estimate is not None:
            self._latch(estimate)

    def _abort(self) -> None:
        self.status = ProtocolStatus.ABORTED

    def _on_finish(self) -> None:
        if self.status is ProtocolStatus.RUNNING:
            raise ProtocolViolation(
                f"{type(self).__name__} script ended without setting a status")


class ImmediateDone(NodeProtocol):
    """Terminates before emitting any action. Degenerate, for tests and
    bystander roles."""

    def __init__(self, params: ProtocolParams, rng, estimate: Optional[int] = None):
        self._init_estimate = estimate
        super().__init__(params, rng)

    __slots__ = ("_init_estimate",)

    def _script(self):
        self._finish(self._init_estimate)
        return
        yield  # pragma: no cover
