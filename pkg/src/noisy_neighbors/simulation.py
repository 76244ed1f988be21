"""Seeded Monte Carlo estimates for noisy neighbour relations.

Every replicate draws fresh noise for every point from its own substream
``seed.stream(replicate, point)``. Points are sequences: the noise used at
dimension ``d`` is the length-``d`` prefix of the noise used at the largest
grid dimension, mirroring how the ground-truth vectors are prefixes.
Replicates are grouped in fixed-size blocks, so results do not depend on
the number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .geometry import TripleSignal, noise_std_of_gap, predicted_preservation_prob, triple_stats
from .noise import (
    DomainError,
    InvalidParameter,
    NoiseSpec,
    SeedSpec,
    sample_noise,
    std_normal_cdf,
    std_normal_quantile,
)

DEFAULT_DIMS = (10, 100, 1000, 10000)
Z_95 = 1.959963984540054
BLOCK = 100


@dataclass(frozen=True)
class SimConfig:
    replicates: int = 5000
    seed: SeedSpec = field(default_factory=SeedSpec)
    dims: tuple = DEFAULT_DIMS
    workers: int = 1

    def __post_init__(self):
        if int(self.replicates) < 1:
            raise InvalidParameter("replicates must be >= 1")
        dims = tuple(int(d) for d in self.dims)
        if not dims or dims[0] < 1 or any(b <= a for a, b in zip(dims, dims[1:])):
            raise InvalidParameter(f"dims must be positive and strictly increasing, got {dims}")
        if int(self.workers) < 1:
            raise InvalidParameter("workers must be >= 1")
        if not isinstance(self.seed, SeedSpec):
            object.__setattr__(self, "seed", SeedSpec(int(self.seed)))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "replicates", int(self.replicates))

    def to_json(self) -> dict:
        return {
            "replicates": self.replicates,
            "seed": self.seed.master_seed,
            "dims": list(self.dims),
        }


@dataclass
class DimRecord:
    d: int
    p_hat: float
    ci_half_width: float
    successes: int
    predicted: Optional[float] = None
    y_samples: Optional[np.ndarray] = None
    ks: Optional[float] = None
    qq: Optional[float] = None
    rc_mean: Optional[float] = None
    noise_dist_mean: Optional[float] = None


@dataclass
class SimResult:
    records: list

    def at(self, d: int) -> DimRecord:
        for rec in self.records:
            if rec.d == d:
                return rec
        raise KeyError(d)

    @property
    def dims(self):
        return [r.d for r in self.records]


# --- statistics --------------------------------------------------------------


def wilson_interval(successes: int, n: int, z: float = Z_95):
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise InvalidParameter("n must be >= 1")
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # the bounds are exactly 0 and 1 at the extremes; rounding can miss them
    lo = 0.0 if successes == 0 else max(0.0, min(p, centre - half))
    hi = 1.0 if successes == n else min(1.0, max(p, centre + half))
    return lo, hi


def wilson_half_width(successes: int, n: int) -> float:
    lo, hi = wilson_interval(successes, n)
    return (hi - lo) / 2.0


def ks_statistic_vs_std_normal(samples) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF and Phi."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 8:
        raise InvalidParameter(f"need at least 8 samples, got {n}")
    cdf = std_normal_cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


def qq_correlation(samples) -> float:
    """Pearson correlation of the sorted samples with normal quantiles at (i - 0.5)/n."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 3:
        raise InvalidParameter(f"need at least 3 samples, got {n}")
    q = std_normal_quantile((np.arange(1, n + 1) - 0.5) / n)
    xc = x - x.mean()
    if not np.any(xc):
        raise DomainError("samples have zero variance")
    qc = q - q.mean()
    return float(np.dot(xc, qc) / math.sqrt(np.dot(xc, xc) * np.dot(qc, qc)))


# --- engine ------------------------------------------------------------------


def _block_sq_dists(points, noise, seed, dims, pairs, r0, r1, noise_pair=None):
    k, _ = points.shape
    dmax = dims[-1]
    nrep = r1 - r0
    observed = np.empty((k, nrep, dmax))
    for j in range(k):
        for b, r in enumerate(range(r0, r1)):
            observed[j, b] = sample_noise(noise, dmax, seed.stream(r, j))
    jobs = []
    if noise_pair is not None:
        i, j = noise_pair
        jobs.append(observed[i] - observed[j])
    observed += points[:, None, :dmax]
    jobs = [observed[i] - observed[j] for i, j in pairs] + jobs
    out = np.empty((len(dims), nrep, len(jobs)))
    for p, diff in enumerate(jobs):
        diff *= diff
        for di, d in enumerate(dims):
            out[di, :, p] = diff[:, :d].sum(axis=1)
    return out


def _block_task(args):
    return _block_sq_dists(*args)


def noisy_sq_distances(points, noise: NoiseSpec, cfg: SimConfig, pairs=None, noise_pair=None) -> dict:
    """Squared distances between noisy copies of ``points`` for every replicate.

    Returns ``{d: array of shape (replicates, len(pairs))}``; ``pairs``
    defaults to all unordered pairs in lexicographic order. With
    ``noise_pair=(i, j)`` one more column holds ||n_i - n_j||^2, the
    distance between the two noise vectors alone.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    k, dlen = points.shape
    if k < 2:
        raise InvalidParameter("need at least 2 points")
    if dlen < cfg.dims[-1]:
        raise InvalidParameter(f"points have length {dlen} < largest grid dimension {cfg.dims[-1]}")
    if pairs is None:
        pairs = list(combinations(range(k), 2))
    pairs = [tuple(p) for p in pairs]
    dims = list(cfg.dims)
    tasks = [
        (points, noise, cfg.seed, dims, pairs, r0, min(r0 + BLOCK, cfg.replicates), noise_pair)
        for r0 in range(0, cfg.replicates, BLOCK)
    ]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            blocks = list(pool.map(_block_task, tasks))
    else:
        blocks = [_block_task(t) for t in tasks]
    stacked = np.concatenate(blocks, axis=1)
    return {d: stacked[i] for i, d in enumerate(dims)}


def _check_triple(t: TripleSignal, cfg: SimConfig):
    if t.d < cfg.dims[-1]:
        raise InvalidParameter(f"triple has length {t.d} < largest grid dimension {cfg.dims[-1]}")


def _standardize(t: TripleSignal, noise: NoiseSpec, d: int, sq: np.ndarray) -> np.ndarray:
    stats = triple_stats(t.prefix(d))
    sd = noise_std_of_gap(stats, noise)
    mean = stats.dist_xy_sq - stats.dist_xz_sq
    return (sq[:, 0] - sq[:, 1] - mean) / sd


def simulate_preservation(t: TripleSignal, noise: NoiseSpec, cfg: SimConfig, diagnostics=True) -> SimResult:
    """Empirical P(||x~ - y~|| <= ||x~ - z~||) on every grid dimension.

    With ``diagnostics`` the records also carry the standardized samples
    y(d), their KS distance and Q-Q correlation, and the mean relative
    contrast of the three noisy points and the mean distance between the
    noise vectors of x and y. These come from the same replicates as
    ``p_hat``.
    """
    _check_triple(t, cfg)
    sq_by_d = noisy_sq_distances(
        t.as_points(), noise, cfg, pairs=[(0, 1), (0, 2), (1, 2)], noise_pair=(0, 1) if diagnostics else None
    )
    records = []
    for d in cfg.dims:
        sq = sq_by_d[d]
        successes = int(np.count_nonzero(sq[:, 0] <= sq[:, 1]))
        rec = DimRecord(
            d=d,
            p_hat=successes / cfg.replicates,
            ci_half_width=wilson_half_width(successes, cfg.replicates),
            successes=successes,
        )
        if not noise.is_degenerate:
            rec.predicted = predicted_preservation_prob(triple_stats(t.prefix(d)), noise)
        if diagnostics:
            rec.rc_mean = float(np.mean(_relative_contrast(sq[:, :3])))
            rec.noise_dist_mean = float(np.mean(np.sqrt(sq[:, 3])))
            if not noise.is_degenerate:
                y = _standardize(t, noise, d, sq)
                rec.y_samples = y
                if y.size >= 8:
                    rec.ks = ks_statistic_vs_std_normal(y)
                    rec.qq = qq_correlation(y)
        records.append(rec)
    return SimResult(records)


def standardized_samples(t: TripleSignal, noise: NoiseSpec, cfg: SimConfig) -> dict:
    """Draws of y(d) = (z(d) - mu) / sigma per grid dimension, ``{d: array}``."""
    _check_triple(t, cfg)
    if noise.is_degenerate:
        raise DomainError("standardization needs positive noise variance")
    sq_by_d = noisy_sq_distances(t.as_points(), noise, cfg, pairs=[(0, 1), (0, 2)])
    return {d: _standardize(t, noise, d, sq_by_d[d]) for d in cfg.dims}


def _relative_contrast(sq: np.ndarray) -> np.ndarray:
    lo = sq.min(axis=1)
    if not np.all(lo > 0):
        raise DomainError("coincident noisy points; relative contrast undefined")
    return np.sqrt(sq.max(axis=1) / lo) - 1.0


def relative_contrast_samples(points, noise: NoiseSpec, cfg: SimConfig) -> dict:
    """One relative contrast (max / min pairwise noisy distance - 1) per replicate.

    ``points`` is an (n, D) array of sequences with D >= max(cfg.dims); all
    n(n-1)/2 pairs take part. Returns ``{d: array of length replicates}``.
    """
    sq_by_d = noisy_sq_distances(points, noise, cfg)
    return {d: _relative_contrast(sq) for d, sq in sq_by_d.items()}


def empirical_noise_distance(noise: NoiseSpec, d: int, cfg: SimConfig) -> float:
    """Monte Carlo mean of ||n_1 - n_2|| for two independent noise vectors."""
    d = int(d)
    if d < 1:
        raise InvalidParameter(f"d must be >= 1, got {d}")
    sub = SimConfig(replicates=cfg.replicates, seed=cfg.seed, dims=(d,), workers=cfg.workers)
    sq = noisy_sq_distances(np.zeros((2, d)), noise, sub)[d]
    return float(np.mean(np.sqrt(sq[:, 0])))


def summarize(result: SimResult) -> list:
    """Flat rows ``d, p_hat, ci, ks, qq, rc_mean, noise_dist`` for tabular output."""
    rows = []
    for rec in result.records:
        rows.append(
            {
                "d": rec.d,
                "p_hat": rec.p_hat,
                "ci": rec.ci_half_width,
                "ks": rec.ks,
                "qq": rec.qq,
                "rc_mean": rec.rc_mean,
                "noise_dist": rec.noise_dist_mean,
            }
        )
    return rows
