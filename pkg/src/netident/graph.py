"""Directed acyclic network topology and the structural queries built on it.

Nodes are the dense integers ``1..n``. An edge is stored as ``(head, tail, delay)``
following the ``f_{i,j}`` convention: the signal travels from ``tail`` (j) into
``head`` (i) after ``delay`` time steps.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from .errors import CycleDetected, InvalidGraph, UnknownNode

Edge = tuple[int, int]


@dataclass(frozen=True)
class Dag:
    """Immutable weakly connected DAG with positive integer edge delays.

    Args:
        n: number of nodes, labelled ``1..n``.
        edges: iterable of ``(head, tail, delay)`` triples.
        require_connected: enforce weak connectivity. Induced subgraphs built
            internally pass ``False``.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]
    require_connected: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidGraph("a network needs at least one node")
        edges = tuple(sorted((int(h), int(t), int(d)) for h, t, d in self.edges))
        object.__setattr__(self, "edges", edges)

        seen: set[Edge] = set()
        preds: dict[int, list[int]] = {i: [] for i in self.nodes}
        succs: dict[int, list[int]] = {i: [] for i in self.nodes}
        delays: dict[Edge, int] = {}
        for head, tail, delay in edges:
            for node in (head, tail):
                if not 1 <= node <= self.n:
                    raise InvalidGraph(f"edge ({head},{tail}) references node {node} outside 1..{self.n}")
            if head == tail:
                raise CycleDetected([head])
            if (head, tail) in seen:
                raise InvalidGraph(f"duplicate edge ({head},{tail})")
            if delay < 1:
                raise InvalidGraph(f"edge ({head},{tail}) has delay {delay}; delays must be >= 1")
            seen.add((head, tail))
            delays[(head, tail)] = delay
            preds[head].append(tail)
            succs[tail].append(head)

        object.__setattr__(self, "_preds", {i: tuple(sorted(v)) for i, v in preds.items()})
        object.__setattr__(self, "_succs", {i: tuple(sorted(v)) for i, v in succs.items()})
        object.__setattr__(self, "_delays", delays)
        object.__setattr__(self, "_order", _kahn(self))
        if self.require_connected and not _weakly_connected(self):
            raise InvalidGraph("graph is not weakly connected")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, ...]], n: int | None = None, **kwargs) -> Dag:
        """Build from ``(head, tail)`` or ``(head, tail, delay)`` tuples; delay defaults to 1."""
        triples = [(e[0], e[1], e[2] if len(e) > 2 else 1) for e in edges]
        if n is None:
            n = max((max(h, t) for h, t, _ in triples), default=1)
        return cls(n, tuple(triples), **kwargs)

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    @property
    def edge_keys(self) -> tuple[Edge, ...]:
        return tuple((h, t) for h, t, _ in self.edges)

    def _check(self, node: int) -> None:
        if not (isinstance(node, int) and 1 <= node <= self.n):
            raise UnknownNode(node)

    def in_neighbors(self, node: int) -> tuple[int, ...]:
        self._check(node)
        return self._preds[node]

    def out_neighbors(self, node: int) -> tuple[int, ...]:
        self._check(node)
        return self._succs[node]

    def delay(self, head: int, tail: int) -> int:
        try:
            return self._delays[(head, tail)]
        except KeyError:
            raise InvalidGraph(f"no edge ({head},{tail})") from None

    def has_edge(self, head: int, tail: int) -> bool:
        return (head, tail) in self._delays

    @property
    def sources(self) -> frozenset[int]:
        return frozenset(i for i in self.nodes if not self._preds[i])

    @property
    def sinks(self) -> frozenset[int]:
        return frozenset(i for i in self.nodes if not self._succs[i])

    def roles(self) -> list[NodeRole]:
        return [NodeRole(i, not self._preds[i], not self._succs[i]) for i in self.nodes]

    def ancestors(self, node: int) -> frozenset[int]:
        """Nodes with a directed path into ``node`` (excluding ``node``)."""
        return frozenset(_walk(node, self.in_neighbors))

    def descendants(self, node: int) -> frozenset[int]:
        return frozenset(_walk(node, self.out_neighbors))

    def has_path(self, start: int, end: int) -> bool:
        """True when a directed path of at least one edge leads from ``start`` to ``end``."""
        return start in self.ancestors(end)

    def with_delays(self, delays: dict[Edge, int]) -> Dag:
        """Copy of the graph with some edge delays replaced."""
        return Dag(
            self.n,
            tuple((h, t, delays.get((h, t), d)) for h, t, d in self.edges),
            require_connected=self.require_connected,
        )


@dataclass(frozen=True)
class NodeRole:
    node: int
    is_source: bool
    is_sink: bool


@dataclass(frozen=True)
class LagTable:
    """Total input-to-output lags ``T_{i,j}`` for every excited ``j`` reaching ``i``.

    Each lag is the sum of edge delays along one path plus the one-step input delay.
    """

    entries: dict[Edge, frozenset[int]]

    def __getitem__(self, key: Edge) -> frozenset[int]:
        return self.entries[key]

    def __contains__(self, key: object) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def _walk(start: int, step) -> Iterator[int]:
    seen = {start}
    stack = list(step(start))
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        yield node
        stack.extend(step(node))


def _kahn(dag: Dag) -> tuple[int, ...]:
    indeg = {i: len(dag._preds[i]) for i in dag.nodes}
    heap = [i for i in dag.nodes if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        node = heapq.heappop(heap)
        order.append(node)
        for nxt in dag._succs[node]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(heap, nxt)
    if len(order) != dag.n:
        raise CycleDetected(sorted(i for i in dag.nodes if indeg[i] > 0))
    return tuple(order)


def _weakly_connected(dag: Dag) -> bool:
    seen = {1}
    stack = [1]
    while stack:
        node = stack.pop()
        for nxt in dag._preds[node] + dag._succs[node]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == dag.n


def topological_order(dag: Dag) -> list[int]:
    """Topological order with ties broken by ascending node id.

    Every tail precedes its head. Cycles are rejected when the ``Dag`` is built.
    """
    return list(dag._order)


def measured_aware_order(dag: Dag, pattern) -> list[int]:
    """Topological order in which every node placed strictly between two
    consecutive measured nodes has a directed path to the later one.

    Greedy construction: target the earliest unemitted measured node ``q`` of the
    plain topological order and emit only nodes that lead to ``q`` (smallest id
    first) until ``q`` itself is emitted. Nodes with no path to ``q`` are deferred
    past it, which is always legal in a topological order.
    """
    base = topological_order(dag)
    measured = [i for i in base if i in pattern.measured]
    emitted: set[int] = set()
    order: list[int] = []

    def available(candidates: Iterable[int]) -> list[int]:
        return sorted(i for i in candidates if i not in emitted and all(p in emitted for p in dag.in_neighbors(i)))

    for q in measured:
        if q in emitted:
            continue
        targets = dag.ancestors(q) | {q}
        while q not in emitted:
            ready = available(targets - {q}) or available([q])
            node = ready[0]
            emitted.add(node)
            order.append(node)
    while len(order) < dag.n:
        node = available(dag.nodes)[0]
        emitted.add(node)
        order.append(node)
    return order


def reachable_excited(dag: Dag, node: int, pattern) -> frozenset[int]:
    """Excited nodes with a directed path to ``node``; ``node`` itself is excluded."""
    dag._check(node)
    return dag.ancestors(node) & frozenset(pattern.excited)


def paths_between(dag: Dag, start: int, end: int) -> list[tuple[int, ...]]:
    """All directed paths (node sequences, at least one edge) from ``start`` to ``end``."""
    dag._check(start)
    dag._check(end)
    if start == end:
        return []
    relevant = dag.ancestors(end) | {end}
    found: list[tuple[int, ...]] = []

    def extend(path: list[int]) -> None:
        tip = path[-1]
        if tip == end:
            found.append(tuple(path))
            return
        for nxt in dag.out_neighbors(tip):
            if nxt in relevant:
                path.append(nxt)
                extend(path)
                path.pop()

    extend([start])
    return found


def path_lag(dag: Dag, path: tuple[int, ...]) -> int:
    """Total lag of an input entering at ``path[0]`` and observed at ``path[-1]``."""
    return 1 + sum(dag.delay(head, tail) for tail, head in zip(path, path[1:]))


def lag_table(dag: Dag, pattern) -> LagTable:
    entries: dict[Edge, frozenset[int]] = {}
    for j in sorted(pattern.excited):
        for i in sorted(dag.descendants(j)):
            entries[(i, j)] = frozenset(path_lag(dag, p) for p in paths_between(dag, j, i))
    return LagTable(entries)


def induced_subgraph(dag: Dag, keep: Iterable[int]) -> tuple[Dag, dict[int, int]]:
    """Subgraph on ``keep`` with every edge whose endpoints are both kept.

    Nodes are relabelled densely in ascending order; the returned mapping sends
    original ids to new ids. Weak connectivity is not enforced on the result.
    """
    keep = sorted(set(keep))
    if not keep:
        raise InvalidGraph("induced subgraph needs a non-empty node set")
    for node in keep:
        dag._check(node)
    relabel = {old: new for new, old in enumerate(keep, start=1)}
    edges = tuple(
        (relabel[h], relabel[t], d) for h, t, d in dag.edges if h in relabel and t in relabel
    )
    return Dag(len(keep), edges, require_connected=False), relabel


def is_tree(dag: Dag) -> bool:
    """True iff the underlying undirected graph is connected with ``n - 1`` edges."""
    return len(dag.edges) == dag.n - 1 and _weakly_connected(dag)
