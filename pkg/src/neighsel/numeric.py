"""Numeric primitives: data matrices, standardization, SPD factorizations,
Gaussian tail quantiles, and seeded random streams.

Conventions used throughout the package:

* data matrices hold n observations in rows and p variables in columns;
* inner products between columns are normalized by n, so a standardized
  column x satisfies n^-1 <x, x> = 1 (denominator n, not n - 1);
* node and column indices are 0-based everywhere in memory; file formats
  are 1-based (see formats.py);
* all randomness derives from a single integer seed through spawn keys,
  so every stream is independent of execution order and worker count.
"""
from __future__ import annotations

import dataclasses

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import ndtri

from .errors import ConstantColumn, DomainError, NotPositiveDefinite

# Numerical tolerances pinned by the module contracts.
MEAN_TOL = 1e-10
SCALE_TOL = 1e-10
VAR_FLOOR = 1e-14
PIVOT_FLOOR = 1e-14


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclasses.dataclass(frozen=True)
class DataMatrix:
    """An n x p data matrix, rows are observations.

    ``standardized`` asserts that every column has mean 0 (within 1e-10)
    and n^-1 <x, x> = 1 (within 1e-10).  The array is copied on
    construction and frozen; instances are safe to share across workers.
    """

    values: np.ndarray
    standardized: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DomainError(f"data must be 2-d, got shape {values.shape}")
        n, p = values.shape
        if n < 2:
            raise DomainError(f"need at least 2 observations, got {n}")
        if p < 1:
            raise DomainError("need at least 1 variable")
        if not np.all(np.isfinite(values)):
            raise DomainError("data contains non-finite entries")
        if self.standardized:
            means = values.mean(axis=0)
            if np.max(np.abs(means)) > MEAN_TOL:
                raise DomainError("standardized data must have zero column means")
            norms = np.mean(values * values, axis=0)
            if np.max(np.abs(norms - 1.0)) > SCALE_TOL:
                raise DomainError("standardized columns must have n^-1 <x, x> = 1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def column(self, a: int) -> np.ndarray:
        return self.values[:, a]


@dataclasses.dataclass(frozen=True)
class SymMatrix:
    """A square symmetric matrix.

    The lower triangle is authoritative: on construction it is mirrored
    onto the upper triangle, so symmetry is exact bit-for-bit.  Inputs
    whose triangles disagree beyond 1e-8 (relative) are rejected.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DomainError(f"matrix must be square, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("matrix contains non-finite entries")
        scale = max(1.0, float(np.max(np.abs(values))))
        if np.max(np.abs(values - values.T)) > 1e-8 * scale:
            raise DomainError("matrix is not symmetric")
        lower = np.tril(values)
        values = lower + np.tril(values, -1).T
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def standardize(data: DataMatrix) -> DataMatrix:
    """Center each column and scale it to n^-1 <x, x> = 1.

    Raises ConstantColumn for the first column whose variance falls below
    1e-14.  Idempotent: standardizing standardized data changes entries
    by at most ~1e-15.
    """
    x = data.values
    centered = x - x.mean(axis=0)
    meansq = np.mean(centered * centered, axis=0)
    bad = np.nonzero(meansq < VAR_FLOOR)[0]
    if bad.size:
        raise ConstantColumn(int(bad[0]))
    return DataMatrix(centered / np.sqrt(meansq), standardized=True)


def cholesky(m: SymMatrix) -> np.ndarray:
    """Lower-triangular L with L L^T = m.

    Raises NotPositiveDefinite with the 0-based pivot index as soon as a
    pivot falls to 1e-14 or below.  Reconstruction error is bounded by
    ~1e-10 * max|m| for well-conditioned inputs.
    """
    a = m.values
    d = a.shape[0]
    L = np.zeros((d, d))
    for j in range(d):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= PIVOT_FLOOR:
            raise NotPositiveDefinite(j)
        L[j, j] = np.sqrt(pivot)
        if j + 1 < d:
            L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def invert_spd(m: SymMatrix) -> SymMatrix:
    """Inverse of a symmetric positive definite matrix via Cholesky."""
    L = cholesky(m)
    linv = solve_triangular(L, np.eye(m.dim), lower=True, check_finite=False)
    return SymMatrix(linv.T @ linv)


def gaussian_tail_quantile(q: float) -> float:
    """Upper-tail standard normal quantile: the z with P(Z > z) = q.

    Domain (0, 0.5]; q = 0.5 maps to 0.  Accurate to well under 1e-9
    absolute error down to q = 1e-300.
    """
    q = float(q)
    if not np.isfinite(q) or not 0.0 < q <= 0.5:
        raise DomainError(f"tail probability must lie in (0, 0.5], got {q}")
    return float(0.0 - ndtri(q))


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent random stream for a (seed, key path) pair.

    Streams with distinct key paths never overlap, and the mapping from
    key to stream does not depend on the order streams are created in.
    """
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *key: int) -> int:
    """A 64-bit integer seed derived deterministically from (seed, key)."""
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    lo, hi = ss.generate_state(2, dtype=np.uint64)[:2]
    return int(lo) ^ (int(hi) << 1) & 0xFFFFFFFFFFFFFFFF
