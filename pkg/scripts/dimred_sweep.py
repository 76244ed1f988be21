"""|Spearman| of PCA, Isomap and diffusion-map embeddings of a noisy segment, per alpha and d."""
from _common import emit, parser

from noisy_neighbors.experiments import DIMRED_COLUMNS, dimred_sweep

if __name__ == "__main__":
    p = parser(__doc__, 100)
    p.add_argument("--n", type=int, default=25)
    args = p.parse_args()
    rows = dimred_sweep(seed=args.seed, replicates=args.replicates, workers=args.workers, n=args.n)
    emit(rows, DIMRED_COLUMNS, args.out)
