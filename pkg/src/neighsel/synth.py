"""Synthetic sparse Gaussian models on random geometric graphs.

Nodes are dropped uniformly on the unit square.  A pair at Euclidean
distance d is proposed as an edge with probability phi(d / sqrt(p))
("text" kernel) or phi(d * sqrt(p)) ("local" kernel), phi the standard
normal density; phi(0) = 0.39894.  Degrees are then capped at 4 by
removing, one at a time, an edge chosen uniformly among edges incident
to nodes still above the cap.

The precision matrix puts 1 on the diagonal and 0.245 on edges, which
keeps it diagonally dominant (4 * 0.245 < 1).  The covariance is the
rescaled inverse with exact unit diagonal, so every edge carries a
partial correlation of magnitude 0.245.
"""
from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .errors import DomainError
from .graph import EdgeSet
from .numeric import DataMatrix, SymMatrix, cholesky, invert_spd, substream

MAX_DEGREE = 4
OFFDIAG = 0.245
KERNELS = ("text", "local")

# substream keys within a model seed
_POSITIONS, _EDGES, _PRUNE, _SAMPLE, _NOISE = 0, 1, 2, 3, 4


@dataclasses.dataclass(frozen=True)
class TrueGraph:
    """A degree-capped geometric graph with its node positions."""

    p: int
    positions: np.ndarray
    edges: frozenset[tuple[int, int]]
    raw_edge_count: int
    max_degree: int = MAX_DEGREE

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.shape != (self.p, 2):
            raise DomainError(f"positions must have shape ({self.p}, 2)")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        degree = np.zeros(self.p, dtype=int)
        for a, b in self.edges:
            degree[a] += 1
            degree[b] += 1
        if degree.max(initial=0) > self.max_degree:
            raise DomainError(f"a node exceeds the degree cap {self.max_degree}")

    def edge_set(self) -> EdgeSet:
        return EdgeSet(p=self.p, edges=self.edges, rule="truth")

    def neighbors(self, a: int) -> tuple[int, ...]:
        out = [b if a == c else c for c, b in self.edges if a in (c, b)]
        return tuple(sorted(out))


@dataclasses.dataclass(frozen=True)
class GgmModel:
    """A graph with its precision and (unit-diagonal) covariance."""

    graph: TrueGraph
    precision: SymMatrix
    covariance: SymMatrix

    def __post_init__(self):
        p = self.graph.p
        k = self.precision.values
        if k.shape != (p, p) or self.covariance.values.shape != (p, p):
            raise DomainError("matrix dimensions must match the graph")
        # precision support must equal the graph exactly (plus diagonal)
        nz = {(int(a), int(b)) for a, b in np.argwhere(np.triu(k, 1) != 0.0)}
        if nz != set(self.graph.edges):
            raise DomainError("precision support does not match the graph edges")
        if np.max(np.abs(np.diag(self.covariance.values) - 1.0)) > 1e-10:
            raise DomainError("covariance must have unit diagonal")


@dataclasses.dataclass(frozen=True)
class PopulationDiagnostics:
    """Population regression structure of a model.

    coefficients[a] is the best-linear-predictor vector for node a on
    all other nodes; partial_correlations has NaN on the diagonal;
    stability[a, b] is NaN on the diagonal and on edges of the graph.
    """

    coefficients: np.ndarray
    partial_correlations: np.ndarray
    stability: np.ndarray


def _normal_pdf(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)


def generate_geometric_graph(p: int, seed: int, kernel: str = "text") -> TrueGraph:
    """Sample a degree-capped geometric graph on p nodes.

    kernel "text" proposes a pair at distance d with probability
    phi(d / sqrt(p)) (nearly distance-independent for large p), kernel
    "local" with probability phi(d * sqrt(p)) (short edges only).  The
    raw proposal count before degree pruning is kept on the result.
    """
    if p < 1:
        raise DomainError(f"need p >= 1, got {p}")
    if kernel not in KERNELS:
        raise DomainError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    positions = substream(seed, _POSITIONS).uniform(size=(p, 2))
    if p == 1:
        return TrueGraph(p=1, positions=positions, edges=frozenset(), raw_edge_count=0)

    dist = pdist(positions)
    arg = dist / np.sqrt(p) if kernel == "text" else dist * np.sqrt(p)
    keep = substream(seed, _EDGES).random(dist.shape[0]) < _normal_pdf(arg)
    ia, ib = np.triu_indices(p, 1)
    pairs = [(int(a), int(b)) for a, b in zip(ia[keep], ib[keep])]
    raw = len(pairs)
    edges = _prune_degrees(p, pairs, substream(seed, _PRUNE))
    return TrueGraph(p=p, positions=positions, edges=frozenset(edges), raw_edge_count=raw)


def _prune_degrees(p, pairs, rng, cap=MAX_DEGREE):
    """Remove edges incident to over-cap nodes, uniformly at random.

    Maintains the eligible edge set as an indexed list with O(1)
    swap-pop removal so that each draw is uniform over edges currently
    touching a violating node.
    """
    adj = [set() for _ in range(p)]
    degree = [0] * p
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
        degree[a] += 1
        degree[b] += 1

    eligible: list[tuple[int, int]] = []
    where: dict[tuple[int, int], int] = {}

    def push(e):
        if e not in where:
            where[e] = len(eligible)
            eligible.append(e)

    def drop(e):
        i = where.pop(e, None)
        if i is None:
            return
        last = eligible.pop()
        if i < len(eligible):
            eligible[i] = last
            where[last] = i

    for e in pairs:
        a, b = e
        if degree[a] > cap or degree[b] > cap:
            push(e)

    removed = set()
    while eligible:
        e = eligible[int(rng.integers(len(eligible)))]
        a, b = e
        drop(e)
        removed.add(e)
        adj[a].discard(b)
        adj[b].discard(a)
        for u in (a, b):
            degree[u] -= 1
            if degree[u] == cap:  # u just became compliant
                for w in sorted(adj[u]):
                    if degree[w] <= cap:
                        drop((u, w) if u < w else (w, u))
    return [e for e in pairs if e not in removed]


def build_precision(graph: TrueGraph, offdiag: float = OFFDIAG) -> SymMatrix:
    """Unit diagonal, `offdiag` on graph edges, zero elsewhere."""
    if abs(offdiag) * graph.max_degree >= 1.0:
        raise DomainError(
            f"|offdiag| * max_degree must stay below 1, got {offdiag} * {graph.max_degree}"
        )
    k = np.eye(graph.p)
    for a, b in graph.edges:
        k[a, b] = offdiag
        k[b, a] = offdiag
    return SymMatrix(k)


def covariance_from_precision(precision: SymMatrix) -> SymMatrix:
    """Inverse of the precision, rescaled to exact unit diagonal."""
    inv = invert_spd(precision).values
    scale = 1.0 / np.sqrt(np.diag(inv))
    return SymMatrix(inv * scale[:, None] * scale[None, :])


def build_model(graph: TrueGraph, offdiag: float = OFFDIAG) -> GgmModel:
    """Precision and covariance for a graph, validated on construction."""
    precision = build_precision(graph, offdiag)
    covariance = covariance_from_precision(precision)
    return GgmModel(graph=graph, precision=precision, covariance=covariance)


def sample_gaussian(covariance: SymMatrix, n: int, seed: int) -> DataMatrix:
    """n rows drawn from N(0, covariance) via the Cholesky factor."""
    if n < 2:
        raise DomainError(f"need n >= 2 observations, got {n}")
    L = cholesky(covariance)
    z = substream(seed, _SAMPLE).standard_normal((n, covariance.dim))
    return DataMatrix(z @ L.T, standardized=False)


def contaminate_t2(data: DataMatrix, scale: float, seed: int) -> DataMatrix:
    """Add scale * Z with Z i.i.d. t with 2 degrees of freedom.

    Z is drawn as a standard normal over sqrt(chi^2_2 / 2) from the
    seeded stream.  The result is unstandardized even at scale 0.
    """
    if not np.isfinite(scale) or scale < 0:
        raise DomainError(f"contamination scale must be >= 0, got {scale}")
    rng = substream(seed, _NOISE)
    shape = (data.n, data.p)
    numer = rng.standard_normal(shape)
    denom = np.sqrt(rng.chisquare(2, shape) / 2.0)
    return DataMatrix(data.values + scale * numer / denom, standardized=False)


def _solve_coefficients(cov: np.ndarray, target: int, subset: Sequence[int]) -> np.ndarray:
    p = cov.shape[0]
    theta = np.zeros(p)
    subset = list(subset)
    if subset:
        theta[subset] = np.linalg.solve(
            cov[np.ix_(subset, subset)], cov[subset, target]
        )
    return theta


def population_coefficients(
    covariance: SymMatrix, target: int, subset: Sequence[int]
) -> np.ndarray:
    """Best linear predictor of X_target from X_subset, as a p-vector.

    Solves cov[A, A] theta = cov[A, target]; entries off the subset are
    zero.  With subset = everything else, the vector is -K_ab / K_aa for
    K the inverse covariance, so its support is exactly the target's
    neighborhood in the conditional independence graph.
    """
    p = covariance.dim
    if not 0 <= target < p:
        raise DomainError(f"target {target} out of range for p={p}")
    subset = sorted({int(b) for b in subset})
    for b in subset:
        if b == target or not 0 <= b < p:
            raise DomainError(f"subset index {b} invalid for target {target}, p={p}")
    return _solve_coefficients(covariance.values, target, subset)


def partial_correlation(precision: SymMatrix, a: int, b: int) -> float:
    """-K_ab / sqrt(K_aa K_bb).

    Sign convention: a positive precision entry gives a negative partial
    correlation; on built models every edge has magnitude 0.245.
    """
    k = precision.values
    if a == b:
        raise DomainError("partial correlation needs two distinct nodes")
    return float(-k[a, b] / np.sqrt(k[a, a] * k[b, b]))


def neighborhood_stability(model: GgmModel, a: int, b: int) -> float:
    """Signed overlap between two nodes' projections onto ne(a).

    S_a(b) = sum over k in ne(a) of sign(theta^a_k) * theta^b_k, where
    both coefficient vectors are best linear predictors onto the true
    neighborhood of a.  Values of magnitude below 1 for all non-adjacent
    pairs are what keeps penalized neighborhood estimates from bleeding
    across the graph; across distinct components the value is exactly 0.
    """
    if a == b:
        raise DomainError("stability needs two distinct nodes")
    ne_a = list(model.graph.neighbors(a))
    if not ne_a:
        return 0.0
    cov = model.covariance.values
    theta_a = _solve_coefficients(cov, a, ne_a)
    theta_b = _solve_coefficients(cov, b, ne_a)
    return float(np.sum(np.sign(theta_a[ne_a]) * theta_b[ne_a]))


def population_diagnostics(model: GgmModel) -> PopulationDiagnostics:
    p = model.graph.p
    cov = model.covariance.values
    coef = np.zeros((p, p))
    for a in range(p):
        coef[a] = _solve_coefficients(cov, a, [b for b in range(p) if b != a])
    pcor = np.full((p, p), np.nan)
    for a in range(p):
        for b in range(p):
            if a != b:
                pcor[a, b] = partial_correlation(model.precision, a, b)
    stab = np.full((p, p), np.nan)
    adjacent = model.graph.edges
    for a in range(p):
        for b in range(p):
            key = (a, b) if a < b else (b, a)
            if a != b and key not in adjacent:
                stab[a, b] = neighborhood_stability(model, a, b)
    return PopulationDiagnostics(
        coefficients=coef, partial_correlations=pcor, stability=stab
    )
