"""Canned experiment configurations and their tabular outputs."""
from __future__ import annotations

import math

from .dimred import LineExperimentConfig, line_experiment
from .geometry import (
    HyperharmonicSpec,
    builtin_triple,
    hyperharmonic_norm_sq,
    limiting_probability,
)
from .noise import SeedSpec, expected_noise_sq_distance, make_uniform
from .simulation import SimConfig, simulate_preservation

NORMALITY_SETS = ("set1", "set2", "set3")
NORMALITY_DIMS = (2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000)
ALPHAS = (2.0, 3.0, 4.0, 5.0, 6.0, math.inf)
ALPHA_DIMS = (10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000)
DIMRED_DIMS = (10, 100, 1000, 10000)
DEFAULT_SEED = 20240917

NORMALITY_COLUMNS = ("triple", "d", "ks", "qq", "p_hat", "ci")
ALPHA_COLUMNS = (
    "alpha", "d", "p_hat", "ci", "predicted", "limit", "rc_mean",
    "noise_dist", "noise_dist_expected", "truth_norm",
)
DIMRED_COLUMNS = ("alpha", "method", "d", "mean_abs_spearman", "stderr", "failures")


def alpha_label(alpha) -> str:
    return "inf" if math.isinf(alpha) else repr(float(alpha))


def normality_sweep(seed=DEFAULT_SEED, replicates=5000, dims=NORMALITY_DIMS, workers=1,
                    sets=NORMALITY_SETS):
    """KS distance and Q-Q correlation of y(d) for the three growth-rate triples."""
    noise = make_uniform(0.75)
    cfg = SimConfig(replicates=replicates, seed=SeedSpec(seed), dims=dims, workers=workers)
    rows = []
    for name in sets:
        res = simulate_preservation(builtin_triple(name, dims[-1]), noise, cfg)
        for rec in res.records:
            rows.append({"triple": name, "d": rec.d, "ks": rec.ks, "qq": rec.qq,
                         "p_hat": rec.p_hat, "ci": rec.ci_half_width})
    return rows


def alpha_sweep(seed=DEFAULT_SEED, replicates=5000, dims=ALPHA_DIMS, workers=1, alphas=ALPHAS):
    """Noise distance, relative contrast and preservation probability per alpha."""
    noise = make_uniform(1.25)
    cfg = SimConfig(replicates=replicates, seed=SeedSpec(seed), dims=dims, workers=workers)
    rows = []
    for alpha in alphas:
        spec = HyperharmonicSpec(alpha)
        t = builtin_triple(f"hyper:{alpha_label(alpha)}", dims[-1])
        res = simulate_preservation(t, noise, cfg)
        for rec in res.records:
            rows.append({
                "alpha": alpha_label(alpha),
                "d": rec.d,
                "p_hat": rec.p_hat,
                "ci": rec.ci_half_width,
                "predicted": rec.predicted,
                "limit": limiting_probability(spec, noise),
                "rc_mean": rec.rc_mean,
                "noise_dist": rec.noise_dist_mean,
                "noise_dist_expected": math.sqrt(expected_noise_sq_distance(noise, rec.d)),
                "truth_norm": math.sqrt(hyperharmonic_norm_sq(spec, rec.d)),
            })
    return rows


def dimred_sweep(seed=DEFAULT_SEED, replicates=100, dims=DIMRED_DIMS, workers=1, alphas=ALPHAS,
                 n=25, methods=None):
    rows = []
    for alpha in alphas:
        kwargs = {} if methods is None else {"methods": methods}
        cfg = LineExperimentConfig(n=n, alpha=alpha, dims=dims, noise=make_uniform(1.25),
                                   replicates=replicates, seed=SeedSpec(seed), workers=workers,
                                   **kwargs)
        for row in line_experiment(cfg).rows():
            rows.append({"alpha": alpha_label(alpha), **row})
    return rows


TARGETS = {
    "figure3": (normality_sweep, NORMALITY_COLUMNS),
    "figure5-left": (alpha_sweep, ("alpha", "d", "noise_dist", "noise_dist_expected", "truth_norm")),
    "figure5-middle": (alpha_sweep, ("alpha", "d", "rc_mean")),
    "figure5-right": (alpha_sweep, ("alpha", "d", "p_hat", "ci", "predicted", "limit")),
    "figure5": (alpha_sweep, ALPHA_COLUMNS),
    "figure7": (dimred_sweep, DIMRED_COLUMNS),
}
