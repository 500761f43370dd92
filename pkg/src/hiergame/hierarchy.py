"""Reaching-centrality hierarchy measures on directed graphs.

Local reaching centrality of a node is the fraction of other nodes it can
reach along directed edges; general reaching centrality (GRC) aggregates the
deviations from the best-reaching node. For the two-level structures produced
by the leadership game (x tops, each pointing at every bottom) the GRC has
the closed form ((n - x) / (n - 1))**2, exposed here as
``two_level_hierarchy``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


@dataclass(frozen=True)
class DirectedGraph:
    """Unweighted directed graph on nodes 0..node_count-1 without self-loops."""

    node_count: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.node_count, int) or self.node_count < 1:
            raise ValueError(f"node_count must be a positive integer, got {self.node_count!r}")
        object.__setattr__(self, "edges", frozenset(self.edges))
        for edge in self.edges:
            u, v = edge
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge {edge} outside node range [0, {self.node_count})")
            if u == v:
                raise ValueError(f"self-loop {edge} not allowed")

    def out_neighbours(self) -> list:
        adj = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].append(v)
        return adj


@dataclass(frozen=True)
class TwoLevelStructure:
    """A group of size n split into x tops and n - x bottoms."""

    group_size: int
    top_count: int

    def __post_init__(self):
        if not isinstance(self.group_size, int) or self.group_size < 2:
            raise ValueError(f"group size must be an integer >= 2, got {self.group_size!r}")
        if not isinstance(self.top_count, int) or not 0 <= self.top_count <= self.group_size:
            raise ValueError(
                f"top count must be an integer in [0, {self.group_size}], got {self.top_count!r}"
            )


def local_reaching_centrality(g: DirectedGraph, node: int) -> float:
    """Fraction of the other nodes reachable from ``node`` along directed paths."""
    if g.node_count < 2:
        raise ValueError("reaching centrality needs at least 2 nodes")
    if not isinstance(node, int) or not 0 <= node < g.node_count:
        raise ValueError(f"invalid node id {node!r} for a {g.node_count}-node graph")
    return _reach_count(g.out_neighbours(), node) / (g.node_count - 1)


def _reach_count(adj: list, start: int) -> int:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) - 1


def general_reaching_centrality(g: DirectedGraph) -> float:
    """GRC(G) = sum_i (c_R^max - c_R(i)) / (n - 1).

    Equals 1 for the out-star and 0 for any graph whose nodes all reach
    equally far (e.g. the complete symmetric digraph).
    """
    if g.node_count < 2:
        raise ValueError("reaching centrality needs at least 2 nodes")
    adj = g.out_neighbours()
    local = [_reach_count(adj, i) / (g.node_count - 1) for i in range(g.node_count)]
    top = max(local)
    return sum(top - value for value in local) / (g.node_count - 1)


def two_level_hierarchy(n: int, x: int) -> float:
    """Closed-form hierarchicalness of the two-level structure with x tops.

    Returns ((n - x) / (n - 1))**2 for 0 < x <= n and 0 for x = 0 (a group
    that produced no leader has no structure at all). Strictly decreasing in
    x on [1, n]: one top is maximally hierarchical, all-top is flat.
    """
    s = TwoLevelStructure(n, x)
    if s.top_count == 0:
        return 0.0
    return ((s.group_size - s.top_count) / (s.group_size - 1)) ** 2


def build_two_level_graph(s: TwoLevelStructure) -> DirectedGraph:
    """Materialize the two-level structure: every top points at every bottom."""
    if s.top_count == 0:
        raise ValueError("an all-bottom structure has no canonical edge set")
    n, x = s.group_size, s.top_count
    edges = {(t, u) for t in range(x) for u in range(x, n)}
    return DirectedGraph(node_count=n, edges=frozenset(edges))


def read_edge_list(text: str) -> DirectedGraph:
    """Parse a plain edge list: first line ``nodes N``, then ``from to`` pairs."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty edge-list input")
    head = lines[0].split()
    if len(head) != 2 or head[0].lower() != "nodes":
        raise ValueError(f"first line must be 'nodes <N>', got {lines[0]!r}")
    try:
        count = int(head[1])
    except ValueError:
        raise ValueError(f"bad node count {head[1]!r}") from None
    edges = set()
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"expected 'from to' pair, got {ln!r}")
        edges.add((int(parts[0]), int(parts[1])))
    return DirectedGraph(node_count=count, edges=frozenset(edges))
