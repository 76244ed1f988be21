"""Dataset-level diagnostics: diameter, neighbour inversion, growth phase, kNN graphs.

Neighbour ties are broken by the lowest row index everywhere in this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import TripleStats, predicted_preservation_prob
from .noise import DomainError, InvalidParameter, NoiseSpec

RANDOM = "Random"
TRUTHFUL = "Truthful"
CRITICAL = "Critical"
DEFAULT_BAND = (0.45, 0.55)


def as_matrix(m, min_rows=2) -> np.ndarray:
    X = np.asarray(m, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InvalidParameter("data matrix must be 2-d (rows = points)")
    if X.shape[0] < min_rows:
        raise InvalidParameter(f"need at least {min_rows} rows, got {X.shape[0]}")
    if X.shape[1] < 1:
        raise InvalidParameter("data matrix has no columns")
    if not np.isfinite(X).all():
        raise InvalidParameter("data matrix has NaN or infinite entries")
    return X


def pad_columns(m, d: int) -> np.ndarray:
    """Append zero columns up to dimension ``d``."""
    X = as_matrix(m, min_rows=1)
    if d < X.shape[1]:
        raise InvalidParameter(f"cannot pad {X.shape[1]} columns down to {d}")
    return np.hstack([X, np.zeros((X.shape[0], d - X.shape[1]))])


def pairwise_sq_dists(X: np.ndarray) -> np.ndarray:
    """Exactly symmetric matrix of squared Euclidean distances."""
    n = X.shape[0]
    D = np.empty((n, n))
    for i in range(n):
        diff = X - X[i]
        D[i] = np.einsum("ij,ij->i", diff, diff)
    # (a - b)^2 == (b - a)^2 bitwise, but einsum blocking may differ per row
    D = np.minimum(D, D.T)
    np.fill_diagonal(D, 0.0)
    return D


def dataset_diameter(m) -> float:
    X = as_matrix(m)
    return math.sqrt(float(np.max(pairwise_sq_dists(X))))


def _ordered_neighbors(D: np.ndarray, i: int) -> np.ndarray:
    others = np.delete(np.arange(D.shape[0]), i)
    return others[np.argsort(D[i, others], kind="stable")]


@dataclass(frozen=True)
class InversionReport:
    probabilities: np.ndarray
    closest: np.ndarray
    furthest: np.ndarray

    @property
    def max_probability(self) -> float:
        return float(np.max(self.probabilities))


def inversion_probabilities(m, noise: NoiseSpec) -> InversionReport:
    """Predicted chance that each point's true furthest neighbour looks no further than its closest.

    For row i the triple (x_i, furthest, closest) is scored by Phi(zeta).
    Closest and furthest neighbours are chosen with lowest-index tie breaking.
    """
    X = as_matrix(m, min_rows=3)
    n, d = X.shape
    D = pairwise_sq_dists(X)
    probs = np.empty(n)
    closest = np.empty(n, dtype=int)
    furthest = np.empty(n, dtype=int)
    for i in range(n):
        order = _ordered_neighbors(D, i)
        lo = int(order[0])
        # furthest: maximal distance, lowest index among ties
        far_d = D[i, order[-1]]
        hi = int(min(j for j in order if D[i, j] == far_d))
        dy = X[i] - X[hi]
        dz = X[i] - X[lo]
        stats = TripleStats(
            d=d,
            dist_xy_sq=float(D[i, hi]),
            dist_xz_sq=float(D[i, lo]),
            cross_inner=math.fsum((dy * dz).tolist()),
            delta_inf=float(max(np.max(np.abs(dy)), np.max(np.abs(dz)))),
            delta_two=math.hypot(*dy.tolist()),
        )
        probs[i] = predicted_preservation_prob(stats, noise)
        closest[i] = lo
        furthest[i] = hi
    return InversionReport(probs, closest, furthest)


# --- growth phase ------------------------------------------------------------


@dataclass(frozen=True)
class GrowthSeries:
    dims: tuple
    gap: tuple
    delta_inf_sup: float = float("nan")

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        gap = tuple(float(g) for g in self.gap)
        if len(dims) != len(gap):
            raise InvalidParameter("dims and gap must have equal length")
        if any(b <= a for a, b in zip(dims, dims[1:])) or (dims and dims[0] < 1):
            raise InvalidParameter("dims must be positive and strictly increasing")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "gap", gap)


@dataclass(frozen=True)
class PhaseVerdict:
    exponent: float
    band: tuple
    label: str

    def to_json(self) -> dict:
        return {"exponent": self.exponent, "band": list(self.band), "label": self.label}


def classify_exponent(exponent: float, band=DEFAULT_BAND) -> str:
    low, high = band
    if exponent < low:
        return RANDOM
    if exponent > high:
        return TRUTHFUL
    return CRITICAL


def estimate_growth_exponent(s: GrowthSeries, band=DEFAULT_BAND) -> PhaseVerdict:
    """OLS slope of log(gap) on log(d), labelled against the critical band around 1/2."""
    if len(s.dims) < 3:
        raise InvalidParameter("need at least 3 grid points")
    gap = np.asarray(s.gap)
    if np.any(gap <= 0) or not np.isfinite(gap).all():
        raise DomainError("gap values must be positive and finite")
    lx = np.log(np.asarray(s.dims, dtype=float))
    ly = np.log(gap)
    lxc = lx - lx.mean()
    slope = float(np.dot(lxc, ly - ly.mean()) / np.dot(lxc, lxc))
    band = (float(band[0]), float(band[1]))
    return PhaseVerdict(slope, band, classify_exponent(slope, band))


def prefix_diameter_series(m, points=8):
    """Squared diameter of the column prefixes X[:, :d] on a log grid of d.

    Rows are read as sequences, as in the asymptotic setting. A squared
    diameter growing slower than sqrt(d) makes every point's nearest/furthest
    ordering random under noise, so an exponent below the band is conclusive
    for randomness; larger exponents are necessary but not sufficient for
    truthful neighbours. Returns None when fewer than 3 usable prefixes exist.
    """
    X = as_matrix(m)
    d = X.shape[1]
    grid = np.unique(np.round(np.logspace(0, math.log10(d), points)).astype(int)) if d > 1 else np.array([1])
    dims, gaps = [], []
    for k in grid:
        diam_sq = float(np.max(pairwise_sq_dists(X[:, :k])))
        if diam_sq > 0:
            dims.append(int(k))
            gaps.append(diam_sq)
    if len(dims) < 3:
        return None
    spread = float(np.max(X.max(axis=0) - X.min(axis=0)))
    return GrowthSeries(tuple(dims), tuple(gaps), delta_inf_sup=spread)


# --- kNN graphs --------------------------------------------------------------


def knn_graph(m, k: int) -> set:
    """Directed edges (i, j) from each row to its k nearest other rows."""
    X = as_matrix(m)
    n = X.shape[0]
    k = int(k)
    if not 1 <= k < n:
        raise InvalidParameter(f"k must be in [1, {n - 1}], got {k}")
    D = pairwise_sq_dists(X)
    return {(i, int(j)) for i in range(n) for j in _ordered_neighbors(D, i)[:k]}


def knn_agreement(ground, observed, k: int) -> float:
    """Fraction of the ground-truth kNN edges that survive in the observed kNN graph."""
    G = as_matrix(ground)
    O = as_matrix(observed)
    if G.shape != O.shape:
        raise InvalidParameter(f"shape mismatch: {G.shape} vs {O.shape}")
    truth = knn_graph(G, k)
    return len(truth & knn_graph(O, k)) / len(truth)
