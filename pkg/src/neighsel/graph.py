"""Edge sets, connectivity, and comparison metrics.

Neighborhoods are combined into an undirected edge set under one of two
rules: "and" keeps a pair only when each node selects the other, "or"
keeps it when at least one does.  The "and" set is always contained in
the "or" set at the same penalty.

Edges are stored as 0-based (a, b) pairs with a < b.
"""
from __future__ import annotations

import dataclasses
from typing import Iterable, Sequence

from .errors import DomainError, EmptyPath, InconsistentP
from .neighborhood import NeighborhoodSet


@dataclasses.dataclass(frozen=True)
class EdgeSet:
    """An undirected graph on p nodes given by its edge list."""

    p: int
    edges: frozenset[tuple[int, int]]
    rule: str  # "and" | "or" | "truth" | "path" (stepwise/baseline sets)

    def __post_init__(self):
        if self.p < 1:
            raise DomainError(f"need p >= 1, got {self.p}")
        if self.rule not in ("and", "or", "truth", "path"):
            raise DomainError(f"unknown edge rule {self.rule!r}")
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise DomainError(f"self edge on node {a}")
            if not (0 <= a < self.p and 0 <= b < self.p):
                raise DomainError(f"edge ({a}, {b}) out of range for p={self.p}")
            norm.add((a, b) if a < b else (b, a))
        object.__setattr__(self, "edges", frozenset(norm))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def degree(self, a: int) -> int:
        return sum(1 for e in self.edges if a in e)


@dataclasses.dataclass(frozen=True)
class ComponentPartition:
    """Connected components; each node is labeled by the smallest node
    index in its component."""

    p: int
    labels: tuple[int, ...]

    @property
    def n_components(self) -> int:
        return len(set(self.labels))

    def same_component(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]


@dataclasses.dataclass(frozen=True)
class Metrics:
    """Counts comparing an estimated edge set against a reference."""

    tp: int
    fp: int
    fn: int
    fdp: float
    cross_component_fp: int

    @property
    def component_violation(self) -> bool:
        """True when some estimated edge joins two distinct reference
        components."""
        return self.cross_component_fp > 0


def _memberships(neighborhoods: Sequence[NeighborhoodSet], p: int) -> list[set[int]]:
    if len(neighborhoods) != p:
        raise InconsistentP(f"expected {p} neighborhoods, got {len(neighborhoods)}")
    nodes = sorted(nb.node for nb in neighborhoods)
    if nodes != list(range(p)):
        raise InconsistentP("neighborhood nodes must cover 0..p-1 exactly once")
    members = [set() for _ in range(p)]
    for nb in neighborhoods:
        for b in nb.members:
            if not 0 <= b < p or b == nb.node:
                raise InconsistentP(f"member {b} invalid for node {nb.node}, p={p}")
        members[nb.node] = set(nb.members)
    return members


def aggregate_and(neighborhoods: Sequence[NeighborhoodSet], p: int) -> EdgeSet:
    """Edges whose endpoints select each other."""
    members = _memberships(neighborhoods, p)
    edges = {
        (a, b)
        for a in range(p)
        for b in members[a]
        if a < b and a in members[b]
    }
    return EdgeSet(p=p, edges=frozenset(edges), rule="and")


def aggregate_or(neighborhoods: Sequence[NeighborhoodSet], p: int) -> EdgeSet:
    """Edges selected by at least one endpoint."""
    members = _memberships(neighborhoods, p)
    edges = set()
    for a in range(p):
        for b in members[a]:
            edges.add((a, b) if a < b else (b, a))
    return EdgeSet(p=p, edges=frozenset(edges), rule="or")


def connected_components(edge_set: EdgeSet) -> ComponentPartition:
    """Union-find with path compression and union by size."""
    p = edge_set.p
    parent = list(range(p))
    size = [1] * p

    def find(a: int) -> int:
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    for a, b in edge_set.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            if size[ra] < size[rb]:
                ra, rb = rb, ra
            parent[rb] = ra
            size[ra] += size[rb]

    # canonical label: smallest node index in the component
    smallest: dict[int, int] = {}
    for a in range(p):
        r = find(a)
        if r not in smallest or a < smallest[r]:
            smallest[r] = a
    labels = tuple(smallest[find(a)] for a in range(p))
    return ComponentPartition(p=p, labels=labels)


def compare_edge_sets(estimate: EdgeSet, truth: EdgeSet) -> Metrics:
    """True/false positive counts plus the component-violation count.

    fdp is fp / max(1, |estimate|).  cross_component_fp counts estimated
    edges whose endpoints lie in distinct connectivity components of the
    truth; such edges can never be true positives, and their absence is
    what the alpha-level penalty is designed to guarantee.
    """
    if estimate.p != truth.p:
        raise InconsistentP(f"estimate has p={estimate.p}, truth has p={truth.p}")
    tp = len(estimate.edges & truth.edges)
    fp = len(estimate.edges - truth.edges)
    fn = len(truth.edges - estimate.edges)
    parts = connected_components(truth)
    cross = sum(1 for a, b in estimate.edges if not parts.same_component(a, b))
    return Metrics(
        tp=tp,
        fp=fp,
        fn=fn,
        fdp=fp / max(1, len(estimate.edges)),
        cross_component_fp=cross,
    )


def roc_at_false_counts(
    path: Sequence[EdgeSet],
    truth: EdgeSet,
    ks: Iterable[int],
) -> dict[int, int]:
    """True-positive counts read off at given false-positive budgets.

    First-crossing semantics: walking the path in order, the count for k
    is the number of true positives at the last position before the
    false-positive count first exceeds k (0 if the very first position
    already exceeds it).  If the path never exceeds k false positives,
    the final position is used.
    """
    if not path:
        raise EmptyPath("cannot evaluate an empty estimation path")
    ks = sorted({int(k) for k in ks})
    if ks and ks[0] < 0:
        raise DomainError("false-positive budgets must be >= 0")
    tps, fps = [], []
    for es in path:
        m = compare_edge_sets(es, truth)
        tps.append(m.tp)
        fps.append(m.fp)
    out: dict[int, int] = {}
    for k in ks:
        crossing = next((i for i, f in enumerate(fps) if f > k), None)
        if crossing is None:
            out[k] = tps[-1]
        elif crossing == 0:
            out[k] = 0
        else:
            out[k] = tps[crossing - 1]
    return out


ROC_PROTOCOL = "first-crossing"
