"""Per-node neighborhood estimation and penalty selection.

A node's neighborhood estimate is the active set of the L1-penalized
regression of its column on all others.  Three penalty rules are
supported:

* a fixed penalty value;
* a significance-driven value lam(alpha) = 2 sigma_hat n^-1/2 * z with
  z the upper-tail Gaussian quantile at alpha / (2 p^2), which bounds
  the probability of connecting two distinct connectivity components
  of the true graph by alpha;
* cross-validated prediction error, which targets prediction rather
  than structure and is known to overselect.
"""
from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .errors import DomainError, FoldTooSmall
from .lasso import GramCache, LassoProblem, full_gram, lambda_max, lasso_fit, lasso_path
from .numeric import DataMatrix, gaussian_tail_quantile, standardize, substream


@dataclasses.dataclass(frozen=True)
class PenaltyValue:
    """A concrete penalty level together with how it was chosen."""

    lam: float
    sigma_hat: float
    rule: str  # "fixed" | "alpha" | "cv"
    alpha: float | None = None
    tail_quantile: float | None = None
    folds: int | None = None

    def __post_init__(self):
        if self.rule not in ("fixed", "alpha", "cv"):
            raise DomainError(f"unknown penalty rule {self.rule!r}")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise DomainError(f"penalty must be finite and >= 0, got {self.lam}")


@dataclasses.dataclass(frozen=True)
class NeighborhoodSet:
    """Estimated neighborhood of one node: members and coefficient signs."""

    node: int
    members: tuple[int, ...]
    signs: tuple[int, ...]
    penalty: PenaltyValue

    def __post_init__(self):
        if len(self.members) != len(self.signs):
            raise DomainError("members and signs must be parallel")
        if any(s not in (-1, 1) for s in self.signs):
            raise DomainError("signs must be -1 or +1")


# Penalty rules for estimate_all_neighborhoods.


@dataclasses.dataclass(frozen=True)
class FixedPenalty:
    lam: float


@dataclasses.dataclass(frozen=True)
class AlphaPenalty:
    alpha: float


@dataclasses.dataclass(frozen=True)
class CvPenalty:
    folds: int = 10
    grid_size: int = 50
    grid_ratio: float = 1000.0


def column_sigma_hat(data: DataMatrix, a: int) -> float:
    """sqrt(n^-1 <X_a, X_a>); identically 1 after standardization."""
    col = data.column(a)
    return float(np.sqrt(np.mean(col * col)))


def lambda_alpha(n: int, p: int, sigma_hat: float, alpha: float) -> PenaltyValue:
    """Penalty at significance level alpha: 2 sigma_hat n^-1/2 * ztail(alpha / 2p^2)."""
    if n < 2 or p < 1:
        raise DomainError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not np.isfinite(sigma_hat) or sigma_hat <= 0:
        raise DomainError(f"sigma_hat must be positive, got {sigma_hat}")
    z = gaussian_tail_quantile(alpha / (2.0 * p * p))
    lam = 2.0 * sigma_hat / np.sqrt(n) * z
    return PenaltyValue(
        lam=float(lam), sigma_hat=float(sigma_hat), rule="alpha",
        alpha=float(alpha), tail_quantile=float(z),
    )


def estimate_neighborhood(
    data: DataMatrix,
    a: int,
    penalty: PenaltyValue,
    gram: GramCache | None = None,
    warm_start: np.ndarray | None = None,
) -> NeighborhoodSet:
    """Active set of the penalized regression of column a on all others."""
    allowed = tuple(b for b in range(data.p) if b != a)
    fit = lasso_fit(
        LassoProblem(data, a, allowed, penalty.lam), warm_start=warm_start, gram=gram
    )
    members = fit.active
    signs = tuple(1 if fit.coefficients[b] > 0 else -1 for b in members)
    return NeighborhoodSet(node=a, members=members, signs=signs, penalty=penalty)


def default_cv_grid(data: DataMatrix, a: int, rule: CvPenalty) -> np.ndarray:
    """Descending log grid from lambda_max down to lambda_max / grid_ratio."""
    allowed = [b for b in range(data.p) if b != a]
    top = lambda_max(data, a, allowed)
    if top <= 0.0:
        raise DomainError("lambda_max is zero; cannot build a cv grid")
    return np.geomspace(top, top / rule.grid_ratio, rule.grid_size)


def cv_lambda(
    data: DataMatrix,
    a: int,
    folds: int,
    grid: Sequence[float],
    seed: int,
) -> PenaltyValue:
    """Penalty minimizing cross-validated prediction error for column a.

    Rows are shuffled once with the seeded stream and split into
    contiguous blocks.  Each training block is restandardized and the
    held-out block is mapped through the training statistics.  The score
    per grid point is the unweighted mean of per-fold mean squared
    errors; exact ties go to the larger penalty.
    """
    n = data.n
    if folds < 2:
        raise DomainError(f"need at least 2 folds, got {folds}")
    if n // folds < 2:
        raise FoldTooSmall(f"{folds} folds over {n} rows leave a fold below 2 rows")
    grid = np.asarray([float(g) for g in grid])
    rng = substream(seed, a)
    perm = rng.permutation(n)
    blocks = np.array_split(perm, folds)
    allowed = [b for b in range(data.p) if b != a]

    errors = np.zeros((folds, len(grid)))
    for f, test_idx in enumerate(blocks):
        train_idx = np.concatenate([b for j, b in enumerate(blocks) if j != f])
        raw_train = data.values[train_idx]
        mu = raw_train.mean(axis=0)
        centered = raw_train - mu
        scale = np.sqrt(np.mean(centered * centered, axis=0))
        train = standardize(DataMatrix(raw_train))
        test = (data.values[test_idx] - mu) / scale
        path = lasso_path(train, a, allowed, grid)
        y = test[:, a]
        for g, fit in enumerate(path):
            pred = test @ fit.coefficients
            errors[f, g] = float(np.mean((y - pred) ** 2))

    curve = errors.mean(axis=0)
    best = int(np.flatnonzero(curve == curve.min())[0])  # grid descends: first = largest
    return PenaltyValue(
        lam=float(grid[best]),
        sigma_hat=column_sigma_hat(data, a),
        rule="cv",
        folds=folds,
    )


def _one_node(args):
    data, a, rule, seed, gram = args
    if isinstance(rule, FixedPenalty):
        pen = PenaltyValue(
            lam=float(rule.lam), sigma_hat=column_sigma_hat(data, a), rule="fixed"
        )
    elif isinstance(rule, AlphaPenalty):
        pen = lambda_alpha(data.n, data.p, column_sigma_hat(data, a), rule.alpha)
    elif isinstance(rule, CvPenalty):
        grid = default_cv_grid(data, a, rule)
        pen = cv_lambda(data, a, rule.folds, grid, seed)
    else:
        raise DomainError(f"unknown penalty rule {rule!r}")
    return estimate_neighborhood(data, a, pen, gram=gram)


def estimate_all_neighborhoods(
    data: DataMatrix,
    rule: FixedPenalty | AlphaPenalty | CvPenalty,
    workers: int = 1,
    seed: int = 0,
) -> list[NeighborhoodSet]:
    """One neighborhood estimate per node, in node order.

    The result depends only on (data, rule, seed): per-node jobs share
    read-only inputs, randomness (cv fold shuffles) is keyed by node, and
    the merge is by node index, so worker count never changes the output.
    """
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    gram = GramCache(data, full=full_gram(data))
    jobs = [(data, a, rule, seed, gram) for a in range(data.p)]
    if workers == 1:
        return [_one_node(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one_node, jobs))
