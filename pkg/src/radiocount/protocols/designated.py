"""Designated-node counting on graphs with a marked node w.

Only w must learn an estimate (of its own neighbor count n_w); its
neighbors assist and terminate on w's broadcast signals without
estimates of their own. Nodes outside w's neighborhood cannot hear w and
take no part: the registry instantiates them as immediately-done idlers.

w's control broadcasts carry the current value as payload where
neighbors need it to stay in lockstep (the bound from the upper-bound
search, binary-search moves, walk moves).
"""

from __future__ import annotations

from enum import Enum

from ..messages import (
    BCAST_BEACON,
    BCAST_CONTINUE,
    BCAST_OVER_EST,
    BCAST_STOP,
    BCAST_UNDER_EST,
    IDLE,
    LISTEN,
    NOISE,
    SILENCE,
    Broadcast,
    Message,
    MessageKind,
    Received,
    received_kind,
)
from .base import NodeProtocol, ProtocolViolation


class CenterRole(Enum):
    DESIGNATED = "designated"
    NEIGHBOR = "neighbor"
    BYSTANDER = "bystander"


def _stop_with(payload: int) -> Broadcast:
    return Broadcast(Message(MessageKind.STOP, payload))


def _expect_received(fb) -> Message:
    if type(fb) is not Received:
        raise ProtocolViolation(
            "expected the designated node's control broadcast, heard "
            f"{fb!r}")
    return fb.message


# -- upper bound on lg(n_w) -------------------------------------------------

def est_upper_center_w_steps(rng):
    """Designated side of the lg(n_w) upper-bound search (collision
    detection required). Two slots per iteration: neighbors beacon with
    probability 2^-(2^i) while w listens; w stops everyone (payload =
    estimate 2^(i+1)) unless it heard noise. Returns the lg-estimate.
    """
    i = 1
    while True:
        fb = yield LISTEN
        if fb is not NOISE:
            est = 2 ** (i + 1)
            yield _stop_with(est)
            return est
        yield IDLE
        i += 1


def est_upper_center_nbr_steps(rng):
    """Neighbor side of the lg(n_w) upper-bound search. Returns the
    lg-estimate learned from w's stop payload."""
    i = 1
    while True:
        if rng.random() < 0.5 ** (2 ** i):
            yield BCAST_BEACON
        else:
            yield IDLE
        fb = yield LISTEN
        if received_kind(fb) is MessageKind.STOP:
            return fb.message.payload
        i += 1


class EstUpperCenterW(NodeProtocol):
    __slots__ = ()

    def _script(self):
        est = yield from est_upper_center_w_steps(self.rng)
        self._finish(est)


class EstUpperCenterNbr(NodeProtocol):
    __slots__ = ()

    def _script(self):
        est = yield from est_upper_center_nbr_steps(self.rng)
        self.observed_payload = est
        self._finish(None)


# -- fraction-verified doubling --------------------------------------------

class CountCenterNoCDW(NodeProtocol):
    """Designated side of the no-collision-detection counters.

    Iteration i has phase_len(i) + 1 slots: neighbors beacon with
    probability 1/2^i through the phase while w listens and counts; in
    the closing slot w broadcasts stop (payload = estimate 2^(i+2)) iff
    the heard fraction reached 1/(2e), else it stays silent and everyone
    continues. The constant-probability variant uses a fixed phase
    length l; the high-probability variant grows it as
    phase_multiplier * i.
    """

    __slots__ = ("_grow",)

    def __init__(self, params, rng, grow: bool):
        self._grow = grow
        super().__init__(params, rng)

    def _phase_len(self, i: int) -> int:
        return self.params.phase_multiplier * i if self._grow else self.params.center_l

    def _script(self):
        threshold = self.params.informed_threshold
        i = 1
        while True:
            phase_len = self._phase_len(i)
            heard = 0
            for _ in range(phase_len):
                fb = yield LISTEN
                if received_kind(fb) is MessageKind.BEACON:
                    heard += 1
            if heard / phase_len >= threshold:
                est = 2 ** (i + 2)
                yield _stop_with(est)
                self._finish(est)
                return
            yield IDLE
            i += 1


class CountCenterNoCDNbr(NodeProtocol):
    """Neighbor side of the no-collision-detection counters."""

    __slots__ = ("_grow",)

    def __init__(self, params, rng, grow: bool):
        self._grow = grow
        super().__init__(params, rng)

    def _phase_len(self, i: int) -> int:
        return self.params.phase_multiplier * i if self._grow else self.params.center_l

    def _script(self):
        rng = self.rng
        i = 1
        while True:
            bprob = 0.5 ** i
            for _ in range(self._phase_len(i)):
                if rng.random() < bprob:
                    yield BCAST_BEACON
                else:
                    yield IDLE
            fb = yield LISTEN
            if received_kind(fb) is MessageKind.STOP:
                self.observed_payload = fb.message.payload
                self._finish(None)
                return
            i += 1


# -- binary search -----------------------------------------------------------

class CountCenterCDConstW(NodeProtocol):
    """Designated side of the binary search counter (collision detection).

    After the lg upper-bound search fixes b, each iteration probes the
    window midpoint m: neighbors beacon with probability 1/2^m while w
    listens; w answers with over-est (silence seen: b <- m-1), under-est
    (noise: a <- m+1), or stop with estimate 2^(m+1). Every answer is
    heard by all neighbors, so windows never diverge; a > b aborts all
    nodes in lockstep.
    """

    __slots__ = ("search_bounds",)

    def __init__(self, params, rng):
        self.search_bounds = None
        super().__init__(params, rng)

    def _script(self):
        b = yield from est_upper_center_w_steps(self.rng)
        a = 1
        while True:
            self.search_bounds = (a, b)
            if a > b:
                self._abort()
                return
            m = (a + b) // 2
            fb = yield LISTEN
            if fb is SILENCE:
                yield BCAST_OVER_EST
                b = m - 1
            elif fb is NOISE:
                yield BCAST_UNDER_EST
                a = m + 1
            else:
                est = 2 ** (m + 1)
                yield _stop_with(est)
                self._finish(est)
                return


class CountCenterCDConstNbr(NodeProtocol):
    """Neighbor side of the binary search counter."""

    __slots__ = ("search_bounds",)

    def __init__(self, params, rng):
        self.search_bounds = None
        super().__init__(params, rng)

    def _script(self):
        rng = self.rng
        b = yield from est_upper_center_nbr_steps(rng)
        a = 1
        while True:
            self.search_bounds = (a, b)
            if a > b:
                self._abort()
                return
            m = (a + b) // 2
            if rng.random() < 0.5 ** m:
                yield BCAST_BEACON
            else:
                yield IDLE
            msg = _expect_received((yield LISTEN))
            if msg.kind is MessageKind.OVER_EST:
                b = m - 1
            elif msg.kind is MessageKind.UNDER_EST:
                a = m + 1
            elif msg.kind is MessageKind.STOP:
                self.observed_payload = msg.payload
                self._finish(None)
                return
            else:
                raise ProtocolViolation(f"unexpected control message {msg!r}")


# -- random walk --------------------------------------------------------------

class CountCenterCDHighW(NodeProtocol):
    """Designated side of the random-walk counter (collision detection).

    Walks n̂ over the grid N̂ * 4^-k exactly like the single-hop walk,
    but w observes the channel itself and broadcasts the move each
    iteration: over-est (divide by 4), under-est (multiply by 4, capped),
    or continue (hold). After walk_multiplier * lg N̂ iterations w
    returns 4 times its most-visited estimate (ties toward smallest).
    """

    __slots__ = ("walk_estimate", "visit_histogram")

    def __init__(self, params, rng):
        self.walk_estimate = None
        self.visit_histogram = {}
        super().__init__(params, rng)

    def _script(self):
        e = yield from est_upper_center_w_steps(self.rng)
        n_cap = 2 ** e
        nhat = n_cap
        hist = self.visit_histogram
        for _ in range(self.params.walk_multiplier * e):
            self.walk_estimate = nhat
            hist[nhat] = hist.get(nhat, 0) + 1
            fb = yield LISTEN
            if fb is SILENCE:
                yield BCAST_OVER_EST
                nhat = max(1, nhat // 4)
            elif fb is NOISE:
                yield BCAST_UNDER_EST
                nhat = min(n_cap, nhat * 4)
            else:
                yield BCAST_CONTINUE
        self.walk_estimate = nhat
        top = max(hist.values())
        mode = min(k for k, v in hist.items() if v == top)
        self._finish(4 * mode)


class CountCenterCDHighNbr(NodeProtocol):
    """Neighbor side of the random-walk counter."""

    __slots__ = ("walk_estimate",)

    def __init__(self, params, rng):
        self.walk_estimate = None
        super().__init__(params, rng)

    def _script(self):
        rng = self.rng
        e = yield from est_upper_center_nbr_steps(rng)
        n_cap = 2 ** e
        nhat = n_cap
        for _ in range(self.params.walk_multiplier * e):
            self.walk_estimate = nhat
            if rng.random() < 1.0 / nhat:
                yield BCAST_BEACON
            else:
                yield IDLE
            msg = _expect_received((yield LISTEN))
            if msg.kind is MessageKind.OVER_EST:
                nhat = max(1, nhat // 4)
            elif msg.kind is MessageKind.UNDER_EST:
                nhat = min(n_cap, nhat * 4)
            elif msg.kind is not MessageKind.CONTINUE:
                raise ProtocolViolation(f"unexpected control message {msg!r}")
        self.walk_estimate = nhat
        self._finish(None)
