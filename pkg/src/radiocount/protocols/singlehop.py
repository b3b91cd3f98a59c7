"""Single-hop counting protocols.

All five machines assume a complete communication graph, so every
listener in a slot hears the same channel. Four estimate the network
size n (all nodes must finish with one identical estimate); EstUpperSH
estimates lg n and doubles as the bound bootstrap for the two
collision-detection protocols.
"""

from __future__ import annotations

from ..messages import (
    BCAST_BEACON,
    BCAST_INFORMED,
    BCAST_NOISE_ECHO,
    BCAST_OVER_EST,
    BCAST_SILENCE_ECHO,
    BCAST_STOP,
    BCAST_UNDER_EST,
    IDLE,
    LISTEN,
    NOISE,
    SILENCE,
    MessageKind,
    received_kind,
)
from .base import NodeProtocol


class CountSHnoCDConst(NodeProtocol):
    """Doubling guess-and-verify; two slots per iteration; no collision
    detection.

    Iteration i: slot 1, beacon with probability 1/2^i, otherwise listen.
    Hearing a beacon means someone broadcast alone, so the guess 2^i is
    about right: the listener will finish this iteration with estimate
    2^(i+2), after using slot 2 to send a stop back to the lone
    broadcaster with probability 1/(2^i - 1) (which is 1 at i = 1, as
    intended). The slot-1 broadcaster listens in slot 2 and finishes with
    the same estimate iff the stop gets through; otherwise it is left
    running alone.
    """

    __slots__ = ()

    def _script(self):
        rng = self.rng
        i = 1
        while True:
            if rng.random() < 0.5 ** i:
                yield BCAST_BEACON
                fb = yield LISTEN
                if received_kind(fb) is MessageKind.STOP:
                    self._finish(2 ** (i + 2))
                    return
            else:
                fb = yield LISTEN
                if received_kind(fb) is MessageKind.BEACON:
                    if rng.random() < 1.0 / (2 ** i - 1):
                        yield BCAST_STOP
                    else:
                        yield IDLE
                    self._finish(2 ** (i + 2))
                    return
                yield IDLE
            i += 1


class CountSHnoCDHigh(NodeProtocol):
    """Fraction-verified doubling with a three-phase stop agreement; no
    collision detection.

    Iteration i runs three phases of phase_multiplier * i slots. Phase 1
    measures the fraction of listening slots that carried a clear beacon
    (per-slot beacon probability 1/2^i); crossing 1/(2e) for the first
    time fixes 2^i as the node's private estimate. Phase 2 spreads the
    news: nodes holding a private estimate send "informed" with
    probability 1/2^i; hearing one is the only way any node, informed or
    not, may finish, committing to 2^(i+2). Phase 3 lets the nodes that
    just committed send "stop" so a lone phase-2 sender that informed
    everyone else can commit too. Nodes with a committed estimate return
    it at the iteration boundary.
    """

    __slots__ = ()

    def _script(self):
        rng = self.rng
        params = self.params
        a = params.phase_multiplier
        threshold = params.informed_threshold
        informed = False
        stopped = False
        final = None
        i = 1
        while True:
            bprob = 0.5 ** i
            phase_len = a * i

            count_listen = 0
            count_msg = 0
            for _ in range(phase_len):
                if rng.random() < bprob:
                    yield BCAST_BEACON
                else:
                    fb = yield LISTEN
                    count_listen += 1
                    if received_kind(fb) is MessageKind.BEACON:
                        count_msg += 1
            if (not informed and count_listen != 0
                    and count_msg / count_listen >= threshold):
                informed = True
                self.private_estimate = 2 ** i

            for _ in range(phase_len):
                if informed and not stopped and rng.random() < bprob:
                    yield BCAST_INFORMED
                else:
                    fb = yield LISTEN
                    if received_kind(fb) is MessageKind.INFORMED:
                        stopped = True
                        final = 2 ** (i + 2)

            for _ in range(phase_len):
                if stopped:
                    if rng.random() < bprob:
                        yield BCAST_STOP
                    else:
                        yield IDLE
                else:
                    fb = yield LISTEN
                    if received_kind(fb) is MessageKind.STOP:
                        stopped = True
                        final = 2 ** (i + 2)

            if stopped:
                self._finish(final)
                return
            i += 1


def est_upper_sh_steps(rng):
    """Shared script for the lg(n) upper-bound search; needs collision
    detection. Yields the per-slot actions and returns the estimate of
    lg n on termination.

    Iteration i guesses lg n = 2^i: slot 1, beacon with probability
    2^-(2^i), otherwise listen. A listener that hears silence or a clear
    beacon knows at most one node broadcast, so the guess is high enough:
    it sends stop in slot 2 and finishes with 2^(i+1). A slot-1
    broadcaster listens in slot 2 and finishes on noise or a stop. Either
    no node finishes in an iteration or all do.
    """
    i = 1
    while True:
        if rng.random() < 0.5 ** (2 ** i):
            yield BCAST_BEACON
            fb = yield LISTEN
            if fb is NOISE or received_kind(fb) is MessageKind.STOP:
                return 2 ** (i + 1)
        else:
            fb = yield LISTEN
            if fb is SILENCE or received_kind(fb) is MessageKind.BEACON:
                yield BCAST_STOP
                return 2 ** (i + 1)
            yield IDLE
        i += 1


class EstUpperSH(NodeProtocol):
    """Standalone wrapper for the lg(n) upper-bound search; the Done
    estimate is the lg-estimate (so 2**estimate bounds n)."""

    __slots__ = ()

    def _script(self):
        est = yield from est_upper_sh_steps(self.rng)
        self._finish(est)


class CountSHCDConst(NodeProtocol):
    """Binary search over lg n; four slots per iteration; needs collision
    detection.

    Bootstraps b from the lg upper-bound search, keeps a search window
    [a, b], and probes the midpoint m: slot 1, beacon with probability
    1/2^m. Silence means m is too high (b <- m-1, announced via over-est
    in slot 2), noise means too low (a <- m+1, under-est in slot 3), and
    a clear beacon ends the search with estimate 2^(m+1) (stop in slot
    4). Slot-1 broadcasters listen through slots 2-4 and mirror whichever
    announcement they hear. An empty window aborts without an estimate.

    The current window is exposed as .search_bounds for boundary
    invariant checks.
    """

    __slots__ = ("search_bounds",)

    def __init__(self, params, rng):
        self.search_bounds = None
        super().__init__(params, rng)

    def _script(self):
        rng = self.rng
        b = yield from est_upper_sh_steps(rng)
        a = 1
        while True:
            self.search_bounds = (a, b)
            if a > b:
                self._abort()
                return
            m = (a + b) // 2
            if rng.random() < 0.5 ** m:
                yield BCAST_BEACON
                fb1 = yield LISTEN
                fb2 = yield LISTEN
                fb3 = yield LISTEN
                if fb1 is not SILENCE:
                    b = m - 1
                elif fb2 is not SILENCE:
                    a = m + 1
                else:
                    self._finish(2 ** (m + 1))
                    return
            else:
                fb = yield LISTEN
                if fb is SILENCE:
                    yield BCAST_OVER_EST
                    yield IDLE
                    yield IDLE
                    b = m - 1
                elif fb is NOISE:
                    yield IDLE
                    yield BCAST_UNDER_EST
                    yield IDLE
                    a = m + 1
                else:
                    yield IDLE
                    yield IDLE
                    yield BCAST_STOP
                    self._finish(2 ** (m + 1))
                    return


class CountSHCDHigh(NodeProtocol):
    """Multiplicative random walk over candidate estimates; three slots
    per iteration; needs collision detection.

    Starts from N̂ = 2^(lg upper-bound search output) and walks the grid
    N̂ * 4^-k (floored at 1): slot 1, beacon with probability 1/n̂.
    Silence divides n̂ by 4, noise multiplies it by 4 (capped at N̂), a
    clear beacon keeps it. Slots 2 and 3 echo the slot-1 outcome (silence
    echo, then noise echo) so the slot-1 broadcaster applies the same
    move; hearing nothing in both tells it it broadcast alone. After
    walk_multiplier * lg N̂ iterations every node returns 4 times the
    most-visited estimate, breaking ties toward the smallest.

    The current walk position is exposed as .walk_estimate for boundary
    invariant checks.
    """

    __slots__ = ("walk_estimate", "visit_histogram")

    def __init__(self, params, rng):
        self.walk_estimate = None
        self.visit_histogram = {}
        super().__init__(params, rng)

    def _script(self):
        rng = self.rng
        e = yield from est_upper_sh_steps(rng)
        n_cap = 2 ** e
        nhat = n_cap
        hist = self.visit_histogram
        for _ in range(self.params.walk_multiplier * e):
            self.walk_estimate = nhat
            hist[nhat] = hist.get(nhat, 0) + 1
            if rng.random() < 1.0 / nhat:
                yield BCAST_BEACON
                fb2 = yield LISTEN
                fb3 = yield LISTEN
                if fb2 is not SILENCE:
                    nhat = max(1, nhat // 4)
                elif fb3 is not SILENCE:
                    nhat = min(n_cap, nhat * 4)
            else:
                fb = yield LISTEN
                if fb is SILENCE:
                    yield BCAST_SILENCE_ECHO
                    yield IDLE
                    nhat = max(1, nhat // 4)
                elif fb is NOISE:
                    yield IDLE
                    yield BCAST_NOISE_ECHO
                    nhat = min(n_cap, nhat * 4)
                else:
                    yield IDLE
                    yield IDLE
        self.walk_estimate = nhat
        top = max(hist.values())
        mode = min(k for k, v in hist.items() if v == top)
        self._finish(4 * mode)
