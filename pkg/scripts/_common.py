import argparse
import sys
from pathlib import Path

from noisy_neighbors.experiments import DEFAULT_SEED
from noisy_neighbors.io import table_csv


def parser(description, replicates):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--replicates", type=int, default=replicates)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=None, help="CSV path; stdout if omitted")
    return p


def emit(rows, columns, out):
    text = table_csv(rows, columns)
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        print(f"wrote {len(rows)} rows to {out}", file=sys.stderr)
