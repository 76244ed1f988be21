"""Marginal noise laws, seeded substreams and the standard normal CDF."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special


class InvalidParameter(ValueError):
    pass


class DomainError(ArithmeticError):
    pass


UNIFORM = "uniform"
GAUSSIAN = "gaussian"
ZERO = "zero"


@dataclass(frozen=True)
class NoiseSpec:
    """Symmetric marginal noise law with its variance and raw fourth moment.

    Build instances with :func:`make_uniform`, :func:`make_gaussian` or
    :func:`make_zero_noise`; the moments are derived from ``param``.
    """

    family: str
    param: float
    variance: float
    fourth_moment: float

    def __post_init__(self):
        if self.family not in (UNIFORM, GAUSSIAN, ZERO):
            raise InvalidParameter(f"unknown noise family {self.family!r}")
        # Jensen; small slack for rounding in the derived moments
        if self.fourth_moment < self.variance**2 * (1 - 1e-12):
            raise InvalidParameter("fourth moment below squared variance")

    @property
    def is_degenerate(self) -> bool:
        return self.variance == 0.0

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "param": self.param,
            "variance": self.variance,
            "fourth_moment": self.fourth_moment,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NoiseSpec":
        return parse_noise(f"{obj['family']}:{obj['param']}")

    def __str__(self):
        return f"{self.family}:{self.param!r}"


def _positive(value, name):
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise InvalidParameter(f"{name} must be a positive finite real, got {value!r}")
    return value


def make_uniform(half_width) -> NoiseSpec:
    a = _positive(half_width, "half_width")
    return NoiseSpec(UNIFORM, a, a**2 / 3.0, a**4 / 5.0)


def make_gaussian(std) -> NoiseSpec:
    s = _positive(std, "std")
    return NoiseSpec(GAUSSIAN, s, s**2, 3.0 * s**4)


def make_zero_noise() -> NoiseSpec:
    """Point mass at 0. Only used to run noiseless reference experiments."""
    return NoiseSpec(ZERO, 0.0, 0.0, 0.0)


def parse_noise(text: str) -> NoiseSpec:
    """Parse ``uniform:0.75``, ``gaussian:1.0`` or ``none``."""
    text = text.strip().lower()
    if text in ("none", "zero", "zero:0", "zero:0.0"):
        return make_zero_noise()
    family, sep, param = text.partition(":")
    if not sep:
        raise InvalidParameter(f"noise must look like family:param, got {text!r}")
    try:
        value = float(param)
    except ValueError:
        raise InvalidParameter(f"bad noise parameter {param!r}") from None
    if family == UNIFORM:
        return make_uniform(value)
    if family == GAUSSIAN:
        return make_gaussian(value)
    raise InvalidParameter(f"unknown noise family {family!r}")


@dataclass(frozen=True)
class SeedSpec:
    """Master seed from which every (replicate, point) substream is derived.

    Substreams depend only on the triple ``(master_seed, replicate, point)``,
    never on the order in which they are requested.
    """

    master_seed: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise InvalidParameter("master_seed must be a 64-bit unsigned integer")

    def stream(self, replicate: int, point: int) -> np.random.Generator:
        seq = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(replicate), int(point)))
        return np.random.Generator(np.random.PCG64(seq))


def sample_noise(spec: NoiseSpec, d: int, stream: np.random.Generator) -> np.ndarray:
    d = int(d)
    if d < 1:
        raise InvalidParameter(f"d must be >= 1, got {d}")
    if spec.family == UNIFORM:
        return spec.param * (2.0 * stream.random(d) - 1.0)
    if spec.family == GAUSSIAN:
        return spec.param * stream.standard_normal(d)
    return np.zeros(d)


def std_normal_cdf(t):
    """Phi(t), for a scalar or an array. Infinite arguments map to 0 or 1."""
    arr = np.asarray(t, dtype=float)
    if np.isnan(arr).any():
        raise InvalidParameter("std_normal_cdf got NaN")
    out = special.ndtr(arr)
    if out.ndim == 0:
        return float(out)
    return out


def std_normal_quantile(p):
    return special.ndtri(np.asarray(p, dtype=float))


def expected_noise_sq_distance(spec: NoiseSpec, d: int) -> float:
    """E||n_x - n_y||^2 for two independent noise vectors of length d."""
    d = int(d)
    if d < 1:
        raise InvalidParameter(f"d must be >= 1, got {d}")
    return 2.0 * d * spec.variance
