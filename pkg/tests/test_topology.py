"""Graph constructors, validation, and file round-trips."""

import statistics

import pytest

from radiocount.topology import (
    DisconnectedGraph,
    ExplicitTopology,
    GenerationFailed,
    InvalidSize,
    IsolatedNode,
    ParseError,
    clique,
    from_file,
    random_multihop,
    star,
    write_edge_list,
)


def bfs_connected(topo) -> bool:
    seen = {0}
    frontier = [0]
    while frontier:
        u = frontier.pop()
        for v in topo.neighbors(u):
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    return len(seen) == topo.n


class TestClique:
    def test_two_nodes_single_edge(self):
        t = clique(2)
        assert list(t.edges()) == [(0, 1)]
        assert t.degree(0) == t.degree(1) == 1

    def test_edge_count_n8(self):
        assert len(list(clique(8).edges())) == 28

    @pytest.mark.parametrize("n", range(2, 65))
    def test_every_degree_is_n_minus_1(self, n):
        t = clique(n)
        assert all(t.degree(u) == n - 1 for u in range(n))
        assert t.max_degree() == n - 1

    def test_too_small(self):
        with pytest.raises(InvalidSize):
            clique(1)

    def test_adjacency(self):
        t = clique(5)
        assert t.adjacent(0, 4) and not t.adjacent(3, 3)
        assert sorted(t.neighbors(2)) == [0, 1, 3, 4]


class TestStar:
    def test_single_leaf_is_one_edge(self):
        t = star(1)
        assert list(t.edges()) == [(0, 1)]

    def test_center_and_leaf_degrees(self):
        t = star(5)
        assert t.degree(0) == 5
        assert all(t.degree(u) == 1 for u in range(1, 6))
        assert t.designated == 0

    @pytest.mark.parametrize("k", range(1, 101))
    def test_connectivity(self, k):
        assert bfs_connected(star(k))

    def test_too_small(self):
        with pytest.raises(InvalidSize):
            star(0)


class TestRandomMultihop:
    def test_two_nodes_full_prob(self):
        t = random_multihop(2, 1.0, seed=5)
        assert list(t.edges()) == [(0, 1)]

    @pytest.mark.parametrize("seed", range(12))
    def test_postconditions_hold(self, seed):
        t = random_multihop(40, 0.15, seed=seed)
        assert bfs_connected(t)
        assert min(t.degree(u) for u in range(t.n)) >= 1

    def test_degree_mean_tracks_binomial(self):
        # Mean degree over nodes and seeds should sit within 3 sigma of
        # (n-1) * p; sigma for the pooled mean of n*seeds draws.
        n, p, seeds = 100, 0.1, 100
        degrees = []
        for seed in range(seeds):
            t = random_multihop(n, p, seed=seed)
            degrees.extend(t.degree(u) for u in range(n))
        mean = statistics.fmean(degrees)
        expected = (n - 1) * p
        # Degrees are pairwise dependent (each edge feeds two nodes), so
        # bound the variance as 2x the binomial's to stay conservative.
        sigma = (2 * (n - 1) * p * (1 - p) / len(degrees)) ** 0.5
        assert abs(mean - expected) < 3 * sigma + 0.05

    def test_generation_failure_for_tiny_prob(self):
        with pytest.raises(GenerationFailed):
            random_multihop(64, 1e-6, seed=1, max_attempts=8)


class TestEdgeListFiles:
    def test_single_edge_file(self, tmp_path):
        path = tmp_path / "pair.edges"
        path.write_text("0 1\n")
        t = from_file(path)
        assert t.n == 2 and t.degree(0) == 1

    def test_isolated_node_rejected(self, tmp_path):
        # Node 1 never appears: a dense id range makes it isolated.
        path = tmp_path / "gap.edges"
        path.write_text("0 2\n")
        with pytest.raises(IsolatedNode):
            from_file(path)

    def test_disconnected_rejected(self, tmp_path):
        path = tmp_path / "split.edges"
        path.write_text("0 1\n2 3\n")
        with pytest.raises(DisconnectedGraph):
            from_file(path)

    def test_parse_errors(self, tmp_path):
        bad = tmp_path / "bad.edges"
        bad.write_text("0 1 2\n")
        with pytest.raises(ParseError):
            from_file(bad)
        empty = tmp_path / "empty.edges"
        empty.write_text("\n")
        with pytest.raises(ParseError):
            from_file(empty)

    def test_round_trip_preserves_graph(self, tmp_path):
        original = random_multihop(30, 0.2, seed=3)
        path = tmp_path / "graph.edges"
        write_edge_list(original, path)
        loaded = from_file(path)
        assert loaded.n == original.n
        assert sorted(loaded.edges()) == sorted(original.edges())

    def test_round_trip_keeps_designated(self, tmp_path):
        original = star(6)
        path = tmp_path / "star.edges"
        write_edge_list(original, path)
        loaded = from_file(path)
        assert loaded.designated == 0
        assert sorted(loaded.edges()) == sorted(original.edges())


class TestNeighborBroadcasts:
    @pytest.mark.parametrize("build", [
        lambda: clique(9),
        lambda: star(8),
        lambda: random_multihop(9, 0.4, seed=2),
    ])
    def test_counts_match_brute_force(self, build):
        import random
        from radiocount.messages import MSG_BEACON
        topo = build()
        rnd = random.Random(11)
        for _ in range(100):
            broadcasters = [u for u in range(topo.n) if rnd.random() < 0.3]
            blist = [(u, MSG_BEACON) for u in broadcasters]
            bset = set(broadcasters)
            for u in range(topo.n):
                if u in bset:
                    continue
                count, msg = topo.neighbor_broadcasts(u, blist, bset)
                want = sum(1 for v in broadcasters if topo.adjacent(u, v))
                assert count == want
                if count == 1:
                    assert msg is MSG_BEACON
