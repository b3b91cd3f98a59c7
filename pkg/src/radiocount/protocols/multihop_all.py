"""Every-node counting on arbitrary connected graphs.

Each node estimates its own neighbor count n_u. Unlike the single-hop
machines, nodes here split into broadcaster/listener roles by fair coin
so a node can both feed its neighbors' statistics and collect its own.
"""

from __future__ import annotations

from ..messages import (
    BCAST_BEACON,
    BCAST_CONTINUE,
    IDLE,
    LISTEN,
    SILENCE,
    MessageKind,
    received_kind,
)
from .base import MissingParam, NodeProtocol, lg_ceil


class CountAllnoCDa(NodeProtocol):
    """Fraction-verified doubling, per-node; no collision detection.

    Iteration i runs phase_multiplier * i slots. Each slot the node
    flips a fair coin: broadcasters send a beacon with probability 1/2^i
    and otherwise do nothing (idle, not listen, so the slot never enters
    anyone's listening statistics); listeners listen. A node whose heard
    fraction over its listening slots first reaches 1/10 latches 2^(i+3)
    as its neighbor-count estimate but keeps participating: its neighbors
    may still be counting. Without a known degree bound the machine never
    terminates (the engine cutoff is the expected outcome); with
    known_N_delta it stops after iteration lg(N_delta).
    """

    __slots__ = ()

    def _script(self):
        rng = self.rng
        params = self.params
        a = params.phase_multiplier
        threshold = params.allnodes_threshold
        last_iteration = (lg_ceil(params.known_N_delta)
                          if params.known_N_delta is not None else None)
        i = 1
        while True:
            bprob = 0.5 ** i
            listen_count = 0
            heard = 0
            for _ in range(a * i):
                if rng.random() < 0.5:
                    if rng.random() < bprob:
                        yield BCAST_BEACON
                    else:
                        yield IDLE
                else:
                    fb = yield LISTEN
                    listen_count += 1
                    if received_kind(fb) is MessageKind.BEACON:
                        heard += 1
            if (self.estimate is None and listen_count != 0
                    and heard / listen_count >= threshold):
                self._latch(2 ** (i + 3))
            if last_iteration is not None and i >= last_iteration:
                self._finish(self.estimate)
                return
            i += 1


class CountAllnoCDb(NodeProtocol):
    """Double counting: average many broadcaster-subset estimates; no
    collision detection; requires the known size bound N.

    Runs L = dc_iter_multiplier * lg N rounds. Each round the node flips
    one fair coin for the whole round: broadcasters run a decay schedule
    (lg N sub-rounds of dc_subiter_multiplier * lg N slots; beacon with
    probability 1/2^i in sub-round i), listeners listen throughout and
    record 2^(i+2) at the first sub-round whose heard fraction reaches
    1/40 (0 if none fires; broadcaster rounds contribute nothing). After
    all rounds the estimate is the recorded sum divided by L/4, rounded
    up and floored at 1.

    Always terminates after exactly L * lg N * (sub-round length) slots.
    Per-round recordings are kept in .round_estimates for invariant
    checks.
    """

    __slots__ = ("round_estimates",)

    def __init__(self, params, rng):
        self.round_estimates = []
        if params.known_N is None:
            raise MissingParam("count_all_nocd_b requires known_N")
        super().__init__(params, rng)

    def _script(self):
        rng = self.rng
        params = self.params
        lg_n = lg_ceil(params.known_N)
        rounds = params.dc_iter_multiplier * lg_n
        sub_len = params.dc_subiter_multiplier * lg_n
        threshold = params.subiter_threshold
        total = 0
        for _ in range(rounds):
            if rng.random() < 0.5:
                for sub in range(1, lg_n + 1):
                    bprob = 0.5 ** sub
                    for _ in range(sub_len):
                        if rng.random() < bprob:
                            yield BCAST_BEACON
                        else:
                            yield IDLE
            else:
                recorded = 0
                for sub in range(1, lg_n + 1):
                    heard = 0
                    for _ in range(sub_len):
                        fb = yield LISTEN
                        if received_kind(fb) is MessageKind.BEACON:
                            heard += 1
                    if recorded == 0 and heard / sub_len >= threshold:
                        recorded = 2 ** (sub + 2)
                total += recorded
                self.round_estimates.append(recorded)
        # ceil(total / (rounds / 4)), floored at 1 so the output is a
        # positive count even in the all-zero corner.
        final = max(1, -((-4 * total) // rounds))
        self._finish(final)


class CountAllCDa(NodeProtocol):
    """CountAllnoCDa plus a per-iteration control slot; needs collision
    detection.

    Part 1 of iteration i is exactly a CountAllnoCDa iteration. Part 2 is
    one slot: nodes still lacking an estimate broadcast "continue"; nodes
    holding one listen and keep going iff they hear continue or noise.
    Silence proves every neighbor has latched, so the node terminates.
    Supplying known_N_delta adds the fallback stop after iteration
    lg(N_delta) for topologies where the silence test can never pass.
    """

    __slots__ = ()

    def _script(self):
        rng = self.rng
        params = self.params
        a = params.phase_multiplier
        threshold = params.allnodes_threshold
        backup_iteration = (lg_ceil(params.known_N_delta)
                            if params.known_N_delta is not None else None)
        i = 1
        while True:
            bprob = 0.5 ** i
            listen_count = 0
            heard = 0
            for _ in range(a * i):
                if rng.random() < 0.5:
                    if rng.random() < bprob:
                        yield BCAST_BEACON
                    else:
                        yield IDLE
                else:
                    fb = yield LISTEN
                    listen_count += 1
                    if received_kind(fb) is MessageKind.BEACON:
                        heard += 1
            if (self.estimate is None and listen_count != 0
                    and heard / listen_count >= threshold):
                self._latch(2 ** (i + 3))

            if self.estimate is None:
                yield BCAST_CONTINUE
            else:
                fb = yield LISTEN
                if fb is SILENCE:
                    self._finish(self.estimate)
                    return
            if backup_iteration is not None and i >= backup_iteration:
                self._finish(self.estimate)
                return
            i += 1
