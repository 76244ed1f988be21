"""Closed-form vs exact squared norms, fitted growth exponents and limiting probabilities per alpha."""
import math

from _common import emit, parser

from noisy_neighbors import make_uniform
from noisy_neighbors.diagnostics import GrowthSeries, estimate_growth_exponent
from noisy_neighbors.experiments import ALPHAS, alpha_label
from noisy_neighbors.geometry import HyperharmonicSpec, hyperharmonic_norm_sq, limiting_probability

GRID = (100, 1000, 10000)

if __name__ == "__main__":
    args = parser(__doc__, 0).parse_args()
    noise = make_uniform(1.25)
    rows = []
    for a in ALPHAS:
        spec = HyperharmonicSpec(a)
        exact = [hyperharmonic_norm_sq(spec, d) for d in GRID]
        v = estimate_growth_exponent(GrowthSeries(GRID, exact))
        rows.append({
            "alpha": alpha_label(a),
            "exact_1e4": exact[-1],
            "approx_1e4": hyperharmonic_norm_sq(spec, GRID[-1], "approx"),
            "exponent_fit": v.exponent,
            "exponent_theory": spec.growth_exponent,
            "label": v.label,
            "limit": limiting_probability(spec, noise),
        })
    emit(rows, tuple(rows[0]), args.out)
