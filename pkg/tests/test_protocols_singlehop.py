"""Behavioral contracts of the single-hop machines."""

import pytest

from radiocount.engine import NodeOutcome, SimConfig, run_simulation
from radiocount.messages import LISTEN, SILENCE, IDLE
from radiocount.protocols import (
    ProtocolParams,
    ProtocolStatus,
    build_protocols,
    get_protocol,
)
from radiocount.protocols.singlehop import CountSHnoCDConst
from radiocount.seeding import derive_seed, node_rng
from radiocount.topology import clique

PARAMS = ProtocolParams()


def run_named(name, topo, seed, max_slots=10**4, params=PARAMS, **kw):
    spec = get_protocol(name)
    protos = build_protocols(name, topo, params, seed)
    rec, trace = run_simulation(
        topo, protos, SimConfig(spec.requires_cd, seed, max_slots=max_slots),
        **kw)
    return rec, trace, protos


def is_power_of_two(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


class TestAnonymity:
    def test_same_seed_same_feedback_gives_same_actions(self):
        # Two machines over the same coins and the same feedback stream
        # must behave identically: state machines cannot see node ids.
        feedback_script = [None, SILENCE, None, SILENCE, SILENCE]
        actions = []
        for _ in range(2):
            p = CountSHnoCDConst(PARAMS, node_rng(123, 7))
            out = []
            for fb in feedback_script:
                if p.done:
                    break
                out.append(p.act())
                p.absorb(fb if p.act() is LISTEN else None)
            actions.append(out)
        assert actions[0] == actions[1]


class TestCountSHnoCDConst:
    def test_lone_broadcast_rate_n2(self):
        # First iteration on two nodes: exactly-one w.p. 2*(1/2)*(1/2).
        hits = 0
        trials = 4000
        topo = clique(2)
        for t in range(trials):
            _, trace, _ = run_named("count_sh_nocd_const", topo,
                                    derive_seed(3, t), max_slots=2,
                                    keep_trace=True)
            actions, _ = trace.slots[0]
            count = sum(1 for a in actions.values()
                        if a is not LISTEN and a is not IDLE)
            hits += count == 1
        assert hits / trials == pytest.approx(0.5, abs=0.03)

    def test_estimates_always_on_grid(self):
        # A terminating node's output is 2^(i+2) for the iteration it
        # stopped in, never anything else.
        topo = clique(16)
        seen = set()
        for t in range(200):
            rec, _, _ = run_named("count_sh_nocd_const", topo,
                                  derive_seed(4, t), max_slots=40)
            for u, est in enumerate(rec.estimates):
                if est is None:
                    continue
                assert is_power_of_two(est) and est >= 8
                term = rec.termination_slots[u]
                assert term is not None and term % 2 == 0
                iteration = term // 2
                assert est == 2 ** (iteration + 2)
                seen.add(est)
        assert len(seen) > 1


class TestEstUpperSH:
    def test_all_or_none_termination_every_trace(self):
        # Deterministic consequence of the two-slot structure: listeners
        # all hear the same channel, and a lone broadcaster is flushed
        # out by the stop volley.
        topo = clique(32)
        for t in range(200):
            rec, _, _ = run_named("est_upper_sh", topo, derive_seed(5, t),
                                  max_slots=64)
            assert not rec.cutoff
            assert len(set(rec.termination_slots)) == 1
            assert len(set(rec.estimates)) == 1

    def test_output_distribution_n256(self):
        # floor(lg lg 256) = 3: termination lands at iteration 3 or 4,
        # i.e. lg-estimates 2^4 or 2^5, with the lower value common.
        topo = clique(256)
        outputs = []
        for t in range(400):
            rec, _, _ = run_named("est_upper_sh", topo, derive_seed(6, t),
                                  max_slots=64)
            outputs.append(rec.estimates[0])
        assert set(outputs) <= {16, 32}
        assert outputs.count(16) / len(outputs) >= 0.25

    def test_upper_bound_property_n1024(self):
        # 2^output >= n nearly always (the output is an upper bound).
        topo = clique(1024)
        ok = 0
        trials = 300
        for t in range(trials):
            rec, _, _ = run_named("est_upper_sh", topo, derive_seed(7, t),
                                  max_slots=64)
            ok += 2 ** rec.estimates[0] >= 1024
        assert ok / trials >= 0.99


class TestCountSHCDConst:
    def test_all_or_none_and_shared_bounds(self):
        topo = clique(64)
        for t in range(100):
            seed = derive_seed(8, t)
            bounds_per_slot = []

            def observe(slot, protos):
                bounds_per_slot.append({p.search_bounds for p in protos})

            rec, _, protos = run_named("count_sh_cd_const", topo, seed,
                                       max_slots=200, observer=observe)
            # Bounds agree across nodes at every slot boundary.
            for bounds in bounds_per_slot:
                assert len(bounds) == 1
            # All-or-none: one shared termination slot and one outcome.
            assert len(set(rec.termination_slots)) == 1
            assert len(set(rec.outcomes)) == 1

    def test_terminating_estimate_shape(self):
        topo = clique(64)
        for t in range(150):
            rec, _, _ = run_named("count_sh_cd_const", topo,
                                  derive_seed(9, t), max_slots=200)
            if rec.outcomes[0] is NodeOutcome.DONE:
                est = rec.estimates[0]
                assert est is not None and is_power_of_two(est)

    def test_aborts_happen_and_are_shared(self):
        topo = clique(64)
        aborted = 0
        for t in range(150):
            rec, _, _ = run_named("count_sh_cd_const", topo,
                                  derive_seed(10, t), max_slots=200)
            if NodeOutcome.ABORTED in rec.outcomes:
                aborted += 1
                assert all(o is NodeOutcome.ABORTED for o in rec.outcomes)
                assert all(e is None for e in rec.estimates)
        assert aborted > 0


class TestCountSHCDHigh:
    def test_histogram_mass_equals_iterations(self):
        topo = clique(64)
        for t in range(20):
            _, _, protos = run_named("count_sh_cd_high", topo,
                                     derive_seed(11, t), max_slots=10**4)
            for p in protos:
                iters = PARAMS.walk_multiplier * _est_output(p)
                assert sum(p.visit_histogram.values()) == iters

    def test_walk_stays_synchronized(self):
        # Echo slots keep the lone broadcaster in step: identical n-hat
        # across nodes at every slot boundary.
        topo = clique(32)
        for t in range(30):
            def observe(slot, protos):
                values = {p.walk_estimate for p in protos}
                assert len(values) == 1

            run_named("count_sh_cd_high", topo, derive_seed(12, t),
                      max_slots=10**4, observer=observe)

    def test_walk_values_on_quarter_grid(self):
        topo = clique(64)
        for t in range(20):
            _, _, protos = run_named("count_sh_cd_high", topo,
                                     derive_seed(13, t), max_slots=10**4)
            for p in protos:
                cap = 2 ** _est_output(p)
                for value in p.visit_histogram:
                    assert value == 1 or _on_quarter_grid(value, cap)

    def test_final_estimate_is_four_times_mode(self):
        topo = clique(64)
        for t in range(20):
            rec, _, protos = run_named("count_sh_cd_high", topo,
                                       derive_seed(14, t), max_slots=10**4)
            for u, p in enumerate(protos):
                top = max(p.visit_histogram.values())
                mode = min(k for k, v in p.visit_histogram.items() if v == top)
                assert rec.estimates[u] == 4 * mode


def _est_output(proto) -> int:
    # The walk starts at the cap, so the cap is the largest visited value.
    cap = max(proto.visit_histogram)
    e = cap.bit_length() - 1
    assert 2 ** e == cap
    return e


def _on_quarter_grid(value: int, cap: int) -> bool:
    while cap > value:
        cap //= 4
    return cap == value


class TestCountSHnoCDHigh:
    def test_private_estimates_not_early_n1024(self):
        # No node should hold a private estimate while the guess is far
        # below the true size: before iteration lg(n / ln n) ~ 7 for
        # n=1024, collisions drown everything.
        topo = clique(1024)
        import math
        cutoff_iter = math.floor(math.log2(1024 / math.log(1024)))
        a = PARAMS.phase_multiplier
        boundary = sum(3 * a * i for i in range(1, cutoff_iter))
        early_free = 0
        trials = 40
        for t in range(trials):
            seed = derive_seed(15, t)
            protos = build_protocols("count_sh_nocd_high", topo, PARAMS, seed)
            hit = []

            def observe(slot, protos=protos, hit=hit):
                if slot <= boundary and not hit:
                    if any(p.private_estimate is not None for p in protos):
                        hit.append(slot)

            run_simulation(topo, protos,
                           SimConfig(False, seed, max_slots=boundary + 1),
                           observer=observe)
            early_free += not hit
        assert early_free / trials >= 0.95

    def test_termination_only_through_stop_or_informed(self):
        # A node that never hears informed or stop keeps running; in a
        # trace where everyone finished, every node's final estimate is
        # the shared 2^(i+2) for the closing iteration.
        topo = clique(32)
        done_seen = 0
        for t in range(30):
            rec, _, _ = run_named("count_sh_nocd_high", topo,
                                  derive_seed(16, t), max_slots=4000)
            if rec.cutoff:
                continue
            done_seen += 1
            assert len(set(rec.estimates)) == 1
            assert len(set(rec.termination_slots)) == 1
            assert is_power_of_two(rec.estimates[0])
        assert done_seen > 0
