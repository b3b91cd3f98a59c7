"""Network graphs the protocols run on.

A Topology is an immutable connected undirected graph over dense node ids
0..n-1 with no isolated nodes (every degree >= 1). An optional designated
node marks the single node that must produce an estimate in the
designated-node protocols. Node ids exist for the engine and harness
only; protocol state machines never see them.

Cliques and stars get dedicated classes so the engine can resolve
broadcasts in O(1) per listener regardless of size; arbitrary graphs use
explicit adjacency sets.
"""

from __future__ import annotations

import random
from typing import Iterable, Iterator, Optional, Sequence

from .seeding import derive_seed


class TopologyError(ValueError):
    pass


class InvalidSize(TopologyError):
    pass


class ParseError(TopologyError):
    pass


class DisconnectedGraph(TopologyError):
    pass


class IsolatedNode(TopologyError):
    pass


class GenerationFailed(TopologyError):
    pass


class Topology:
    """Base class; subclasses fix n, adjacency, and the designated node."""

    n: int
    designated: Optional[int]

    # True when every pair of distinct nodes is adjacent, i.e. all
    # listeners in a slot share one channel. Lets the engine resolve the
    # channel once per slot instead of once per listener.
    uniform_channel = False

    def degree(self, u: int) -> int:
        raise NotImplementedError

    def neighbors(self, u: int) -> Iterator[int]:
        raise NotImplementedError

    def adjacent(self, u: int, v: int) -> bool:
        raise NotImplementedError

    def max_degree(self) -> int:
        return max(self.degree(u) for u in range(self.n))

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    yield (u, v)

    def neighbor_broadcasts(self, u, blist, bset):
        """(count, message) of broadcasters adjacent to listener u.

        blist is the slot's [(node, message)] list, bset the matching id
        set. message is meaningful only when count == 1.
        """
        count = 0
        msg = None
        for v, m in blist:
            if self.adjacent(u, v):
                count += 1
                msg = m
        return count, msg

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} n={self.n} designated={self.designated}>"


class Clique(Topology):
    uniform_channel = True

    def __init__(self, n: int, designated: Optional[int] = None):
        if n < 2:
            raise InvalidSize(f"clique needs n >= 2, got {n}")
        if designated is not None and not (0 <= designated < n):
            raise TopologyError(f"designated node {designated} out of range")
        self.n = n
        self.designated = designated

    def degree(self, u: int) -> int:
        return self.n - 1

    def neighbors(self, u: int) -> Iterator[int]:
        return (v for v in range(self.n) if v != u)

    def adjacent(self, u: int, v: int) -> bool:
        return u != v

    def max_degree(self) -> int:
        return self.n - 1

    def neighbor_broadcasts(self, u, blist, bset):
        count = len(blist)
        if u in bset:
            count -= 1
        if count == 1:
            for v, m in blist:
                if v != u:
                    return 1, m
        return count, None

    def describe(self) -> str:
        return f"clique:{self.n}"


class Star(Topology):
    """Center node 0 adjacent to every leaf; leaves mutually non-adjacent."""

    CENTER = 0

    def __init__(self, leaves: int):
        if leaves < 1:
            raise InvalidSize(f"star needs >= 1 leaf, got {leaves}")
        self.n = leaves + 1
        self.designated = Star.CENTER

    def degree(self, u: int) -> int:
        return self.n - 1 if u == Star.CENTER else 1

    def neighbors(self, u: int) -> Iterator[int]:
        if u == Star.CENTER:
            return iter(range(1, self.n))
        return iter((Star.CENTER,))

    def adjacent(self, u: int, v: int) -> bool:
        return (u == Star.CENTER) != (v == Star.CENTER)

    def max_degree(self) -> int:
        return self.n - 1

    def neighbor_broadcasts(self, u, blist, bset):
        if u == Star.CENTER:
            count = len(blist)
            if Star.CENTER in bset:
                count -= 1
            if count == 1:
                for v, m in blist:
                    if v != Star.CENTER:
                        return 1, m
            return count, None
        if Star.CENTER in bset:
            for v, m in blist:
                if v == Star.CENTER:
                    return 1, m
        return 0, None

    def describe(self) -> str:
        return f"star:{self.n - 1}"


class ExplicitTopology(Topology):
    def __init__(self, n: int, edges: Iterable[tuple[int, int]],
                 designated: Optional[int] = None, label: Optional[str] = None):
        if n < 2:
            raise InvalidSize(f"graph needs n >= 2, got {n}")
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ParseError(f"self-loop at node {u}")
            adj[u].add(v)
            adj[v].add(u)
        for u, nbrs in enumerate(adj):
            if not nbrs:
                raise IsolatedNode(f"node {u} has no neighbors")
        if not _connected(n, adj):
            raise DisconnectedGraph("graph is not connected")
        if designated is not None and not (0 <= designated < n):
            raise TopologyError(f"designated node {designated} out of range")
        self.n = n
        self.designated = designated
        self._adj = [frozenset(s) for s in adj]
        self._label = label

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def neighbors(self, u: int) -> Iterator[int]:
        return iter(self._adj[u])

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def neighbor_broadcasts(self, u, blist, bset):
        count = 0
        msg = None
        nbrs = self._adj[u]
        for v, m in blist:
            if v in nbrs:
                count += 1
                msg = m
        return count, msg

    def describe(self) -> str:
        return self._label or f"graph:n={self.n},m={sum(len(a) for a in self._adj) // 2}"


def _connected(n: int, adj: Sequence[Iterable[int]]) -> bool:
    seen = [False] * n
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == n


def clique(n: int, designated: Optional[int] = None) -> Clique:
    """Complete graph on n >= 2 nodes; every degree is n-1."""
    return Clique(n, designated)


def star(leaves: int) -> Star:
    """Star with the center as designated node; center degree = leaves."""
    return Star(leaves)


def random_multihop(n: int, edge_prob: float, seed: int,
                    max_attempts: int = 64) -> ExplicitTopology:
    """G(n, p) sample conditioned on connectivity and min degree >= 1.

    Resamples with seeds derived from `seed` until a valid graph appears;
    raises GenerationFailed when the retry budget runs out (edge_prob too
    small for n).
    """
    if n < 2:
        raise InvalidSize(f"random graph needs n >= 2, got {n}")
    if not (0.0 < edge_prob <= 1.0):
        raise TopologyError(f"edge_prob must be in (0, 1], got {edge_prob}")
    for attempt in range(max_attempts):
        rng = random.Random(derive_seed(seed, attempt))
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if rng.random() < edge_prob]
        try:
            return ExplicitTopology(n, edges,
                                    label=f"gnp:{n}:{edge_prob}:{seed}")
        except (IsolatedNode, DisconnectedGraph):
            continue
    raise GenerationFailed(
        f"no connected G({n}, {edge_prob}) sample in {max_attempts} attempts")


def from_file(path) -> ExplicitTopology:
    """Load an edge list: one "u v" pair per line, optional "# designated w".

    Blank lines and other "#" comments are ignored. Node ids must be the
    dense range 0..max; a gap would be an isolated node.
    """
    designated = None
    edges = []
    max_id = -1
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "designated":
                    try:
                        designated = int(parts[1])
                    except ValueError:
                        raise ParseError(f"line {lineno}: bad designated id")
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer node id")
            if u < 0 or v < 0:
                raise ParseError(f"line {lineno}: negative node id")
            edges.append((u, v))
            max_id = max(max_id, u, v)
    if max_id < 1:
        raise ParseError("edge list is empty")
    return ExplicitTopology(max_id + 1, edges, designated=designated,
                            label=f"file:{path}")


def write_edge_list(topology: Topology, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        if topology.designated is not None:
            fh.write(f"# designated {topology.designated}\n")
        for u, v in topology.edges():
            fh.write(f"{u} {v}\n")
