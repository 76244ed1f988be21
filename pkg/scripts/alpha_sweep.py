"""Noise distance, relative contrast and preservation probability across alpha and d."""
from _common import emit, parser

from noisy_neighbors.experiments import ALPHA_COLUMNS, alpha_sweep

if __name__ == "__main__":
    args = parser(__doc__, 5000).parse_args()
    rows = alpha_sweep(seed=args.seed, replicates=args.replicates, workers=args.workers)
    emit(rows, ALPHA_COLUMNS, args.out)
