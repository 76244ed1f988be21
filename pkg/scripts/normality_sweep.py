"""KS distance and Q-Q correlation of the standardized statistic for the three growth-rate triples."""
from _common import emit, parser

from noisy_neighbors.experiments import NORMALITY_COLUMNS, normality_sweep

if __name__ == "__main__":
    args = parser(__doc__, 5000).parse_args()
    rows = normality_sweep(seed=args.seed, replicates=args.replicates, workers=args.workers)
    emit(rows, NORMALITY_COLUMNS, args.out)
