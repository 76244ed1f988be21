"""When do nearest-neighbour relations in noisy high-dimensional data stay truthful?

Predictions come from the normal approximation of the noisy squared-distance
difference (:mod:`.geometry`), checked by seeded Monte Carlo
(:mod:`.simulation`), lifted to datasets (:mod:`.diagnostics`) and to
dimensionality reductions (:mod:`.dimred`).
"""
__version__ = "0.1.0"

from .diagnostics import (
    GrowthSeries,
    PhaseVerdict,
    dataset_diameter,
    estimate_growth_exponent,
    inversion_probabilities,
    knn_agreement,
    knn_graph,
)
from .dimred import (
    LineExperimentConfig,
    diffusion_map_1d,
    isomap_1d,
    line_experiment,
    make_line_points,
    pca_1d,
    spearman_abs,
)
from .geometry import (
    HyperharmonicSpec,
    TripleSignal,
    TripleStats,
    builtin_triple,
    hyperharmonic_norm_sq,
    hyperharmonic_z,
    limiting_probability,
    predicted_preservation_prob,
    triple_stats,
    zeta,
)
from .noise import (
    DomainError,
    InvalidParameter,
    NoiseSpec,
    SeedSpec,
    expected_noise_sq_distance,
    make_gaussian,
    make_uniform,
    make_zero_noise,
    sample_noise,
    std_normal_cdf,
)
from .simulation import (
    SimConfig,
    SimResult,
    empirical_noise_distance,
    ks_statistic_vs_std_normal,
    qq_correlation,
    relative_contrast_samples,
    simulate_preservation,
    standardized_samples,
    wilson_interval,
)
