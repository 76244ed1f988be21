"""One-dimensional embeddings of a noisy line segment and how well they keep its order.

Ground truth: ``n`` evenly spaced points on the segment from the origin to
``z(alpha)`` in R^d. Each replicate adds fresh noise, embeds the points in
one dimension and scores the embedding by |Spearman| against the true order.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path
from scipy.stats import rankdata

from .diagnostics import as_matrix, pairwise_sq_dists
from .geometry import HyperharmonicSpec, hyperharmonic_z
from .linalg import Degenerate, orient, top_eigenpairs
from .noise import InvalidParameter, NoiseSpec, SeedSpec, make_uniform, sample_noise


class Disconnected(RuntimeError):
    """The Isomap neighbourhood graph has more than one component."""


FAILURES = (Degenerate, Disconnected)


def make_line_points(n: int, alpha, d: int) -> np.ndarray:
    n = int(n)
    if n < 2:
        raise InvalidParameter(f"n must be >= 2, got {n}")
    spec = alpha if isinstance(alpha, HyperharmonicSpec) else HyperharmonicSpec(alpha)
    z = hyperharmonic_z(spec, d)
    t = np.arange(n) / (n - 1)
    return t[:, None] * z[None, :]


def pca_1d(m) -> np.ndarray:
    """Projections of the centred rows onto the leading principal direction."""
    X = as_matrix(m)
    Xc = X - X.mean(axis=0)
    if not np.any(Xc):
        raise Degenerate("all rows are identical")
    n, d = Xc.shape
    if n <= d:
        vals, vecs, _ = top_eigenpairs(Xc @ Xc.T, k=1, psd=True)
        if vals[0] <= 0:
            raise Degenerate("centred data has rank zero")
        scores = math.sqrt(vals[0]) * vecs[:, 0]
    else:
        _, vecs, _ = top_eigenpairs(Xc.T @ Xc, k=1, psd=True)
        scores = Xc @ vecs[:, 0]
    return orient(scores)


def classical_mds_1d(D: np.ndarray) -> np.ndarray:
    """Leading classical-MDS coordinate of a distance matrix."""
    n = D.shape[0]
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    B = -0.5 * J @ (D * D) @ J
    vals, vecs, _ = top_eigenpairs(B, k=1)
    if vals[0] <= 0:
        raise Degenerate("no positive eigenvalue in the double-centred matrix")
    return orient(math.sqrt(vals[0]) * vecs[:, 0])


def isomap_1d(m, k: int = 10) -> np.ndarray:
    X = as_matrix(m)
    n = X.shape[0]
    k = int(k)
    if not 1 <= k < n:
        raise InvalidParameter(f"k must be in [1, {n - 1}], got {k}")
    D = np.sqrt(pairwise_sq_dists(X))
    W = np.full((n, n), np.inf)
    for i in range(n):
        others = np.delete(np.arange(n), i)
        nbrs = others[np.argsort(D[i, others], kind="stable")[:k]]
        W[i, nbrs] = D[i, nbrs]
    W = np.minimum(W, W.T)
    # inf marks a missing edge so zero-length edges between duplicates survive
    geo = shortest_path(csgraph_from_dense(W, null_value=np.inf), method="D", directed=False)
    if not np.isfinite(geo).all():
        raise Disconnected("kNN graph is disconnected")
    return classical_mds_1d(geo)


def median_bandwidth(D: np.ndarray) -> float:
    iu = np.triu_indices(D.shape[0], 1)
    return float(np.median(D[iu])) ** 2


def diffusion_map_1d(m, bandwidth="median") -> np.ndarray:
    """First non-trivial diffusion coordinate of a Gaussian-kernel random walk.

    ``bandwidth`` is the kernel scale eps in exp(-||xi - xj||^2 / eps), or
    ``"median"`` for the squared median pairwise distance.
    """
    X = as_matrix(m, min_rows=3)
    sq = pairwise_sq_dists(X)
    if bandwidth == "median":
        eps = median_bandwidth(np.sqrt(sq))
    else:
        eps = float(bandwidth)
    if not eps > 0:
        raise Degenerate("kernel bandwidth is zero")
    K = np.exp(-sq / eps)
    deg = K.sum(axis=1)
    root = np.sqrt(deg)
    # symmetric conjugate of the row-normalized transition matrix
    S = K / np.outer(root, root)
    _, vecs, _ = top_eigenpairs(S, k=2, psd=True)
    return orient(vecs[:, 1] / root)


def spearman_abs(true_order, scores, method="spearman") -> float:
    """|rank correlation| between scores and the true order (average ranks for ties).

    ``method="pearson"`` correlates the raw scores instead.
    """
    a = np.asarray(true_order, dtype=float)
    b = np.asarray(scores, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidParameter("true_order and scores must be 1-d with equal length")
    if a.size < 3:
        raise InvalidParameter("need at least 3 points")
    if method == "spearman":
        a, b = rankdata(a), rankdata(b)
    elif method != "pearson":
        raise InvalidParameter(f"unknown correlation {method!r}")
    a = a - a.mean()
    b = b - b.mean()
    denom = math.sqrt(float(np.dot(a, a) * np.dot(b, b)))
    if denom == 0:
        raise Degenerate("constant scores")
    return min(1.0, abs(float(np.dot(a, b)) / denom))


# --- experiment --------------------------------------------------------------


@dataclass(frozen=True)
class Method:
    name: str
    param: object = None

    @property
    def label(self) -> str:
        return self.name if self.param is None else f"{self.name}:{self.param}"

    def embed(self, X):
        if self.name == "pca":
            return pca_1d(X)
        if self.name == "isomap":
            return isomap_1d(X, self.param)
        if self.name == "diffusion":
            return diffusion_map_1d(X, self.param)
        raise InvalidParameter(f"unknown method {self.name!r}")

    @classmethod
    def parse(cls, text: str) -> "Method":
        name, _, param = text.strip().lower().partition(":")
        if name == "pca":
            return cls("pca")
        if name == "isomap":
            return cls("isomap", int(param) if param else 10)
        if name in ("diffusion", "diffusionmap", "dm"):
            return cls("diffusion", float(param) if param and param != "median" else "median")
        raise InvalidParameter(f"unknown method {text!r}")


DEFAULT_METHODS = (Method("pca"), Method("isomap", 10), Method("diffusion", "median"))


@dataclass(frozen=True)
class LineExperimentConfig:
    n: int = 25
    alpha: float = math.inf
    dims: tuple = (100, 1000, 10000)
    noise: NoiseSpec = field(default_factory=lambda: make_uniform(1.25))
    replicates: int = 100
    methods: tuple = DEFAULT_METHODS
    seed: SeedSpec = field(default_factory=SeedSpec)
    correlation: str = "spearman"
    workers: int = 1

    def __post_init__(self):
        if int(self.n) < 3:
            raise InvalidParameter("n must be >= 3")
        if int(self.replicates) < 1:
            raise InvalidParameter("replicates must be >= 1")
        spec = HyperharmonicSpec(self.alpha) if not isinstance(self.alpha, HyperharmonicSpec) else self.alpha
        object.__setattr__(self, "alpha", spec.alpha)
        methods = tuple(Method.parse(m) if isinstance(m, str) else m for m in self.methods)
        for m in methods:
            if m.name == "isomap" and not 1 <= m.param < self.n:
                raise InvalidParameter(f"isomap k={m.param} must be < n={self.n}")
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not isinstance(self.seed, SeedSpec):
            object.__setattr__(self, "seed", SeedSpec(int(self.seed)))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": "inf" if math.isinf(self.alpha) else self.alpha,
            "dims": list(self.dims),
            "noise": self.noise.to_json(),
            "replicates": self.replicates,
            "methods": [m.label for m in self.methods],
            "seed": self.seed.master_seed,
            "correlation": self.correlation,
        }


@dataclass(frozen=True)
class BenchCell:
    method: str
    d: int
    mean_abs_spearman: float
    stderr: float
    failures: int
    valid: bool


@dataclass
class BenchResult:
    cells: list

    def cell(self, method: str, d: int) -> BenchCell:
        for c in self.cells:
            if c.method == method and c.d == d:
                return c
        raise KeyError((method, d))

    def rows(self):
        return [
            {
                "method": c.method,
                "d": c.d,
                "mean_abs_spearman": c.mean_abs_spearman,
                "stderr": c.stderr,
                "failures": c.failures,
            }
            for c in self.cells
        ]


def noisy_copy(X: np.ndarray, noise: NoiseSpec, seed: SeedSpec, replicate: int) -> np.ndarray:
    n, d = X.shape
    N = np.empty_like(X)
    for i in range(n):
        N[i] = sample_noise(noise, d, seed.stream(replicate, i))
    return X + N


def _replicate_scores(args):
    cfg, d, r = args
    X = make_line_points(cfg.n, cfg.alpha, d)
    Y = noisy_copy(X, cfg.noise, cfg.seed, r)
    order = np.arange(cfg.n)
    out = []
    for m in cfg.methods:
        try:
            out.append(spearman_abs(order, m.embed(Y), cfg.correlation))
        except FAILURES:
            out.append(float("nan"))
    return out


def line_experiment(cfg: LineExperimentConfig) -> BenchResult:
    tasks = [(cfg, d, r) for d in cfg.dims for r in range(cfg.replicates)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            scores = list(pool.map(_replicate_scores, tasks, chunksize=8))
    else:
        scores = [_replicate_scores(t) for t in tasks]
    scores = np.asarray(scores).reshape(len(cfg.dims), cfg.replicates, len(cfg.methods))
    cells = []
    for mi, m in enumerate(cfg.methods):
        for di, d in enumerate(cfg.dims):
            s = scores[di, :, mi]
            ok = s[np.isfinite(s)]
            failures = cfg.replicates - ok.size
            mean = float(ok.mean()) if ok.size else float("nan")
            se = float(ok.std(ddof=1) / math.sqrt(ok.size)) if ok.size > 1 else float("nan")
            cells.append(BenchCell(m.label, d, mean, se, failures, failures <= cfg.replicates / 2))
    return BenchResult(cells)
