"""Desk-scale baselines: graph-constrained Gaussian MLE and greedy search.

`ipf_fit` computes the maximum-likelihood covariance whose inverse is
zero off a given graph, by iterative proportional fitting over the
graph's maximal cliques: each update replaces a clique margin of the
fitted covariance with the sample margin, which is coordinate ascent on
the likelihood and therefore monotone.

`forward_select` grows a graph from empty, one edge per step, always
adding the edge whose constrained MLE has the largest log-likelihood.
Every candidate edge is refit exactly; the refits share almost all of
their work, so they run batched across candidates.  `random_guess_baseline`
is the matching no-information control: a seeded shuffle of all pairs.
"""
from __future__ import annotations

import dataclasses
from typing import Iterable

import numpy as np

from .errors import DomainError, InconsistentP, MaxIterations, MleDoesNotExist
from .graph import EdgeSet
from .numeric import SymMatrix, substream

IPF_TOL = 1e-8
MAX_CYCLES = 10_000
SCORE_TOL = 1e-6  # candidate ranking needs less precision than the refit
MAX_FS_NODES = 50

_SHUFFLE = 5  # substream key, disjoint from the model-generation keys


@dataclasses.dataclass(frozen=True)
class MleFit:
    """Constrained Gaussian MLE for one graph.

    loglik is the average log-likelihood per observation,
    -(p log 2pi - logdet K + tr(S K)) / 2, so fits on the same sample
    covariance are directly comparable; loglik_path records its value
    after every fitting cycle.
    """

    graph: EdgeSet
    fitted_cov: SymMatrix
    fitted_precision: SymMatrix
    loglik: float
    ipf_iterations: int
    loglik_path: tuple[float, ...]


@dataclasses.dataclass(frozen=True)
class ForwardSelection:
    """Greedy path of nested edge sets with their fits.

    path[t] is the state after t + 1 additions; skipped lists candidate
    pairs whose sample margin was singular, which can never be fit.
    """

    path: tuple[tuple[EdgeSet, MleFit], ...]
    skipped: tuple[tuple[int, int], ...]


def maximal_cliques(p: int, edges: Iterable[tuple[int, int]]) -> list[tuple[int, ...]]:
    """All maximal cliques, isolated nodes included as singletons.

    Bron-Kerbosch with a max-degree pivot; candidates are visited in
    index order and the result is sorted, so the output is a pure
    function of the graph.
    """
    adj: list[set[int]] = [set() for _ in range(p)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    out: list[tuple[int, ...]] = []

    def expand(grown: set[int], cand: set[int], excluded: set[int]) -> None:
        if not cand and not excluded:
            out.append(tuple(sorted(grown)))
            return
        pivot = max(cand | excluded, key=lambda u: (len(adj[u] & cand), -u))
        for v in sorted(cand - adj[pivot]):
            expand(grown | {v}, cand & adj[v], excluded & adj[v])
            cand = cand - {v}
            excluded = excluded | {v}

    expand(set(), set(range(p)), set())
    return sorted(out)


def gaussian_loglik(sample_cov: np.ndarray, precision: np.ndarray) -> float:
    """Average Gaussian log-likelihood per observation."""
    p = sample_cov.shape[0]
    sign, logdet = np.linalg.slogdet(precision)
    if sign <= 0:
        raise MleDoesNotExist("precision is not positive-definite")
    trace = float(np.sum(sample_cov * precision))  # tr(S K), both symmetric
    return -0.5 * (p * np.log(2.0 * np.pi) - logdet + trace)


def _clique_inverses(
    s: np.ndarray, cliques: list[tuple[int, ...]]
) -> list[np.ndarray]:
    """Inverses of the sample margins, rejecting non-PD cliques."""
    out = []
    for clique in cliques:
        block = s[np.ix_(clique, clique)]
        try:
            np.linalg.cholesky(block)
        except np.linalg.LinAlgError:
            raise MleDoesNotExist(clique)
        out.append(np.linalg.inv(block))
    return out


def ipf_fit(sample_cov: SymMatrix, graph: EdgeSet, tol: float = IPF_TOL) -> MleFit:
    """Maximum-likelihood fit of the covariance constrained to a graph.

    The fitted covariance agrees with the sample covariance on the
    diagonal and on graph edges within tol, and the fitted precision is
    zero off the graph.  Raises MleDoesNotExist when a sample clique
    margin is singular and MaxIterations when the tolerance is not met
    in 1e4 cycles.
    """
    s = sample_cov.values
    p = graph.p
    if s.shape != (p, p):
        raise InconsistentP(f"covariance is {s.shape[0]}x{s.shape[1]}, graph has p={p}")
    cliques = maximal_cliques(p, graph.edges)
    s_inv = _clique_inverses(s, cliques)

    constrained = np.eye(p, dtype=bool)
    for a, b in graph.edges:
        constrained[a, b] = constrained[b, a] = True

    k = np.diag(1.0 / np.diag(s))
    sig = np.diag(np.diag(s).copy())
    path: list[float] = []
    for cycle in range(1, MAX_CYCLES + 1):
        for clique, s_cl_inv in zip(cliques, s_inv):
            idx = np.ix_(clique, clique)
            w = sig[idx]
            delta = s_cl_inv - np.linalg.inv(w)
            k[idx] += delta
            cols = sig[:, clique]
            core = np.linalg.solve(np.eye(len(clique)) + delta @ w, delta)
            sig -= cols @ core @ cols.T
        sig = np.linalg.inv(k)  # clears accumulated low-rank update drift
        ll = gaussian_loglik(s, k)
        assert not path or ll >= path[-1] - 1e-9 * max(1.0, abs(path[-1]))
        path.append(ll)
        if np.max(np.abs(sig - s)[constrained]) <= tol:
            return MleFit(
                graph=graph,
                fitted_cov=SymMatrix(sig),
                fitted_precision=SymMatrix(k),
                loglik=ll,
                ipf_iterations=cycle,
                loglik_path=tuple(path),
            )
    raise MaxIterations(MAX_CYCLES, "iterative proportional fitting")


def _score_candidates(
    s: np.ndarray,
    parent: MleFit,
    candidates: list[tuple[int, int]],
    tol: float,
) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Constrained-MLE log-likelihood for every one-edge extension.

    The parent's maximal cliques plus the candidate's own pair cover all
    cliques of the extended graph, so cycling over that cover converges
    to the extension's exact MLE; it just may take a few more cycles
    than the maximal-clique cover would.  All candidates share the
    parent warm start and run as one stacked computation.

    Returns a score per candidate (-inf for skipped ones) and the list
    of candidates whose own sample margin is singular.
    """
    p = s.shape[0]
    pairs = np.array(candidates)  # (C, 2)

    # candidates whose 2x2 sample margin is not PD can never be fit
    s_aa = s[pairs[:, 0], pairs[:, 0]]
    s_bb = s[pairs[:, 1], pairs[:, 1]]
    s_ab = s[pairs[:, 0], pairs[:, 1]]
    det = s_aa * s_bb - s_ab * s_ab
    usable = (s_aa > 0) & (det > 0)
    skipped = [candidates[i] for i in np.flatnonzero(~usable)]
    scores = np.full(len(candidates), -np.inf)
    if not usable.any():
        return scores, skipped

    pairs = pairs[usable]
    c = len(pairs)
    own_s = s[pairs[:, :, None], pairs[:, None, :]]  # (C, 2, 2)
    own_s_inv = _inv2(own_s)

    cliques = maximal_cliques(p, parent.graph.edges)
    s_inv = _clique_inverses(s, cliques)
    constrained = np.eye(p, dtype=bool)
    for a, b in parent.graph.edges:
        constrained[a, b] = constrained[b, a] = True

    k = np.repeat(parent.fitted_precision.values[None], c, axis=0)
    sig = np.repeat(parent.fitted_cov.values[None], c, axis=0)
    eye2 = np.eye(2)

    # candidates converge at different speeds; frozen ones drop out of
    # the stacked updates so late cycles only touch the stragglers
    active = np.arange(c)
    for _ in range(MAX_CYCLES):
        if active.size == 0:
            break
        ka, siga, pa = k[active], sig[active], pairs[active]
        aidx = np.arange(active.size)

        # own-pair margin, the only one violated at the warm start
        w = siga[aidx[:, None, None], pa[:, :, None], pa[:, None, :]]
        delta = own_s_inv[active] - _inv2(w)
        ka[aidx[:, None, None], pa[:, :, None], pa[:, None, :]] += delta
        cols = np.take_along_axis(siga, pa[:, None, :], axis=2)  # (A, p, 2)
        core = np.linalg.solve(eye2 + delta @ w, delta)
        siga -= cols @ core @ cols.transpose(0, 2, 1)

        for clique, s_cl_inv in zip(cliques, s_inv):
            w = siga[:, clique][:, :, clique]
            delta = s_cl_inv[None] - np.linalg.inv(w)
            ka[np.ix_(aidx, clique, clique)] += delta
            cols = siga[:, :, clique]
            core = np.linalg.solve(np.eye(len(clique))[None] + delta @ w, delta)
            siga -= cols @ core @ cols.transpose(0, 2, 1)

        siga = np.linalg.inv(ka)
        k[active], sig[active] = ka, siga
        viol = np.abs(siga - s)[:, constrained].max(axis=1)
        own = np.abs(
            siga[aidx[:, None, None], pa[:, :, None], pa[:, None, :]] - own_s[active]
        ).max(axis=(1, 2))
        active = active[np.maximum(viol, own) > tol]
    else:
        raise MaxIterations(MAX_CYCLES, "batched candidate scoring")

    sign, logdet = np.linalg.slogdet(k)
    if np.any(sign <= 0):
        raise MleDoesNotExist("a candidate precision lost positive-definiteness")
    trace = np.einsum("ij,cji->c", s, k)
    scores[np.flatnonzero(usable)] = -0.5 * (
        p * np.log(2.0 * np.pi) - logdet + trace
    )
    return scores, skipped


def _inv2(blocks: np.ndarray) -> np.ndarray:
    """Closed-form inverse of stacked 2x2 symmetric blocks."""
    a = blocks[:, 0, 0]
    b = blocks[:, 0, 1]
    d = blocks[:, 1, 1]
    det = a * d - b * blocks[:, 1, 0]
    out = np.empty_like(blocks)
    out[:, 0, 0] = d
    out[:, 1, 1] = a
    out[:, 0, 1] = -b
    out[:, 1, 0] = -blocks[:, 1, 0]
    return out / det[:, None, None]


def forward_select(
    sample_cov: SymMatrix,
    n: int,
    max_steps: int,
    tol: float = IPF_TOL,
    score_tol: float = SCORE_TOL,
) -> ForwardSelection:
    """Greedy edge addition by exact constrained-MLE refits.

    Each step scores every absent pair, adds the one with the largest
    fitted log-likelihood (ties broken toward the lexicographically
    first pair), and refits it at full tolerance.  Runs max_steps steps
    or until no fittable candidate remains; stopping rules are left to
    the caller, who can cut the returned path anywhere.
    """
    p = sample_cov.dim
    if p < 2 or p > MAX_FS_NODES:
        raise DomainError(f"forward selection supports 2 <= p <= {MAX_FS_NODES}, got {p}")
    if n < 2:
        raise DomainError(f"need n >= 2 observations, got {n}")
    if max_steps < 1:
        raise DomainError(f"need max_steps >= 1, got {max_steps}")

    all_pairs = [(a, b) for a in range(p) for b in range(a + 1, p)]
    current = EdgeSet(p=p, edges=frozenset(), rule="path")
    parent = ipf_fit(sample_cov, current, tol)
    skipped: set[tuple[int, int]] = set()
    path: list[tuple[EdgeSet, MleFit]] = []

    for _ in range(min(max_steps, len(all_pairs))):
        candidates = [
            e for e in all_pairs if e not in current.edges and e not in skipped
        ]
        if not candidates:
            break
        scores, newly_skipped = _score_candidates(
            sample_cov.values, parent, candidates, score_tol
        )
        skipped.update(newly_skipped)
        if not np.isfinite(scores.max()):
            break
        best = candidates[int(np.argmax(scores))]  # first max: lexicographic
        current = EdgeSet(p=p, edges=current.edges | {best}, rule="path")
        parent = ipf_fit(sample_cov, current, tol)
        path.append((current, parent))

    return ForwardSelection(path=tuple(path), skipped=tuple(sorted(skipped)))


def random_guess_baseline(p: int, seed: int) -> list[tuple[int, int]]:
    """All pairs in a seeded uniform random order."""
    if p < 2:
        raise DomainError(f"need p >= 2, got {p}")
    pairs = [(a, b) for a in range(p) for b in range(a + 1, p)]
    order = substream(seed, _SHUFFLE).permutation(len(pairs))
    return [pairs[i] for i in order]
