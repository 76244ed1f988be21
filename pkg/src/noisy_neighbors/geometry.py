"""Ground-truth geometry of a query triple and the predicted preservation probability.

A triple is a query point ``x`` with two candidate neighbours ``y`` and ``z``.
Under i.i.d. symmetric additive noise the squared-distance difference
``||x~ - y~||^2 - ||x~ - z~||^2`` is asymptotically normal, so the chance that
the noisy ``x`` stays at least as close to ``y`` as to ``z`` is ``Phi(zeta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise import DomainError, InvalidParameter, NoiseSpec, std_normal_cdf


def _fsum_sq(v: np.ndarray) -> float:
    return math.fsum((v * v).tolist())


def _as_finite_vector(v, name) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidParameter(f"{name} must be a nonempty 1-d vector")
    if not np.isfinite(arr).all():
        raise InvalidParameter(f"{name} has NaN or infinite entries")
    return arr


@dataclass(frozen=True, eq=False)
class TripleSignal:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = _as_finite_vector(self.x, "x")
        y = _as_finite_vector(self.y, "y")
        z = _as_finite_vector(self.z, "z")
        if not (x.size == y.size == z.size):
            raise InvalidParameter(f"length mismatch: {x.size}, {y.size}, {z.size}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    @property
    def d(self) -> int:
        return self.x.size

    def prefix(self, d: int) -> "TripleSignal":
        if not 1 <= d <= self.d:
            raise InvalidParameter(f"prefix length {d} outside [1, {self.d}]")
        return TripleSignal(self.x[:d], self.y[:d], self.z[:d])

    def swapped(self) -> "TripleSignal":
        return TripleSignal(self.x, self.z, self.y)

    def as_points(self) -> np.ndarray:
        return np.vstack([self.x, self.y, self.z])


@dataclass(frozen=True)
class TripleStats:
    d: int
    dist_xy_sq: float
    dist_xz_sq: float
    cross_inner: float
    delta_inf: float
    delta_two: float

    @property
    def gap(self) -> float:
        """Signal gap ||x - z||^2 - ||x - y||^2."""
        return self.dist_xz_sq - self.dist_xy_sq


def triple_stats(t: TripleSignal) -> TripleStats:
    dy = t.x - t.y
    dz = t.x - t.z
    dxy = _fsum_sq(dy)
    dxz = _fsum_sq(dz)
    cross = math.fsum((dy * dz).tolist())
    delta_inf = float(max(np.max(np.abs(dy)), np.max(np.abs(dz))))
    return TripleStats(
        d=t.d,
        dist_xy_sq=dxy,
        dist_xz_sq=dxz,
        cross_inner=cross,
        delta_inf=delta_inf,
        # hypot scales internally, so tiny gaps do not underflow to 0
        delta_two=max(math.hypot(*dy.tolist()), math.hypot(*dz.tolist())),
    )


def noise_std_of_gap(stats: TripleStats, noise: NoiseSpec) -> float:
    """Standard deviation of the noisy squared-distance difference."""
    s2 = noise.variance
    var = 2.0 * stats.d * (noise.fourth_moment + 3.0 * s2 * s2) + 8.0 * s2 * (
        stats.dist_xy_sq + stats.dist_xz_sq - stats.cross_inner
    )
    if not var > 0.0:
        raise DomainError("noise variance of the distance difference is not positive")
    return math.sqrt(var)


def zeta(stats: TripleStats, noise: NoiseSpec) -> float:
    return stats.gap / noise_std_of_gap(stats, noise)


def predicted_preservation_prob(stats: TripleStats, noise: NoiseSpec) -> float:
    """Asymptotic P(noisy x is at least as close to noisy y as to noisy z)."""
    return min(1.0, max(0.0, std_normal_cdf(zeta(stats, noise))))


# --- hyperharmonic sequences -------------------------------------------------


@dataclass(frozen=True)
class HyperharmonicSpec:
    """Growth parameter of ``z_k = k^(-1/alpha)``; ``math.inf`` gives all ones.

    alpha = 2 (the harmonic case) is accepted because the experiments sweep it;
    anything below 2 is rejected.
    """

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if math.isnan(a) or a < 2.0:
            raise InvalidParameter(f"alpha must be >= 2 or inf, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.alpha)

    @property
    def growth_exponent(self) -> float:
        return 1.0 - 2.0 / self.alpha

    @classmethod
    def parse(cls, text) -> "HyperharmonicSpec":
        s = str(text).strip().lower()
        if s in ("inf", "infinity", "oo", "∞"):
            return cls(math.inf)
        try:
            return cls(float(s))
        except ValueError:
            raise InvalidParameter(f"bad alpha {text!r}") from None


def _spec(spec) -> HyperharmonicSpec:
    return spec if isinstance(spec, HyperharmonicSpec) else HyperharmonicSpec(spec)


def hyperharmonic_z(spec, d: int) -> np.ndarray:
    spec = _spec(spec)
    d = int(d)
    if d < 1:
        raise InvalidParameter(f"d must be >= 1, got {d}")
    if spec.is_infinite:
        return np.ones(d)
    k = np.arange(1, d + 1, dtype=float)
    return k ** (-1.0 / spec.alpha)


def hyperharmonic_norm_sq(spec, d: int, mode: str = "exact") -> float:
    spec = _spec(spec)
    d = int(d)
    if d < 1:
        raise InvalidParameter(f"d must be >= 1, got {d}")
    if spec.is_infinite:
        return float(d)
    if mode == "exact":
        return _fsum_sq(hyperharmonic_z(spec, d))
    if mode == "approx":
        a = spec.alpha
        if a == 2.0:
            # limit of the integral approximation as alpha -> 2
            return math.log(d)
        return (a / (a - 2.0)) * (d ** (1.0 - 2.0 / a) - 1.0)
    raise InvalidParameter(f"mode must be 'exact' or 'approx', got {mode!r}")


def limiting_probability(spec, noise: NoiseSpec) -> float:
    """d -> inf limit of the preservation probability for x = y = 0, z = z(alpha)."""
    spec = _spec(spec)
    if spec.alpha < 4.0:
        return 0.5
    if spec.alpha > 4.0:
        return 1.0
    s2 = noise.variance
    return std_normal_cdf(math.sqrt(2.0 / (noise.fourth_moment + 3.0 * s2 * s2)))


# --- builtin triples ---------------------------------------------------------


def builtin_triple(name: str, d: int) -> TripleSignal:
    """Named ground-truth triples with x = y = 0.

    ``set1``: z = e_1; ``set2``: z = all ones; ``set3``: z_k = k^(1/4 - 0.01);
    ``hyper:<alpha>``: z = z(alpha).
    """
    d = int(d)
    if d < 1:
        raise InvalidParameter(f"d must be >= 1, got {d}")
    zero = np.zeros(d)
    key = name.strip().lower()
    if key == "set1":
        z = np.zeros(d)
        z[0] = 1.0
    elif key == "set2":
        z = np.ones(d)
    elif key == "set3":
        z = np.arange(1, d + 1, dtype=float) ** (0.25 - 0.01)
    elif key.startswith("hyper:"):
        z = hyperharmonic_z(HyperharmonicSpec.parse(key.split(":", 1)[1]), d)
    else:
        raise InvalidParameter(f"unknown builtin triple {name!r}")
    return TripleSignal(zero, zero.copy(), z)
