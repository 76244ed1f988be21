"""Command-line entry point: ``noisy-neighbors <verb> [options]``.

Exit status: 0 on success, 1 on usage errors, 2 on runtime or domain errors.
With ``--out DIR`` data files are written there together with a ``run.json``
manifest; otherwise results go to stdout.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import (
    DEFAULT_BAND,
    GrowthSeries,
    dataset_diameter,
    estimate_growth_exponent,
    inversion_probabilities,
    knn_graph,
    pad_columns,
    prefix_diameter_series,
)
from .dimred import LineExperimentConfig, Method, line_experiment
from .experiments import DEFAULT_SEED, DIMRED_COLUMNS, TARGETS
from .geometry import (
    HyperharmonicSpec,
    TripleSignal,
    builtin_triple,
    hyperharmonic_z,
    predicted_preservation_prob,
    triple_stats,
    zeta,
)
from .io import ParseError, config_hash, dumps, load_gap_series, load_matrix, load_vector, sha256_file, table_csv
from .noise import DomainError, InvalidParameter, SeedSpec, parse_noise
from .simulation import SimConfig, relative_contrast_samples, simulate_preservation, summarize

SEED_ENV = "NOISY_NEIGHBORS_SEED"
MANIFEST = "run.json"
SIM_COLUMNS = ("d", "p_hat", "ci", "ks", "qq", "rc_mean", "noise_dist")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _int_list(text: str):
    try:
        return tuple(int(float(v)) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _vector(spec: str, d):
    """A vector from a file or a builtin: zeros, ones, e1, hyper:<alpha>, power:<p>."""
    key = spec.strip().lower()
    if key in ("zeros", "ones", "e1") or key.startswith(("hyper:", "power:")):
        if d is None:
            raise UsageError(f"--d is required for builtin vector {spec!r}")
        if key == "zeros":
            return np.zeros(d)
        if key == "ones":
            return np.ones(d)
        if key == "e1":
            v = np.zeros(d)
            v[0] = 1.0
            return v
        if key.startswith("hyper:"):
            return hyperharmonic_z(HyperharmonicSpec.parse(key[6:]), d)
        return np.arange(1, d + 1, dtype=float) ** float(key[6:])
    v = load_vector(spec)
    if d is not None:
        if d > v.size:
            raise InvalidParameter(f"{spec} has {v.size} values, fewer than --d {d}")
        v = v[:d]
    return v


def _triple(args, d) -> TripleSignal:
    if args.triple:
        if d is None:
            raise UsageError("--d is required with --triple")
        return builtin_triple(args.triple, d)
    if not (args.x and args.y and args.z):
        raise UsageError("give --triple or all of --x, --y, --z")
    return TripleSignal(_vector(args.x, d), _vector(args.y, d), _vector(args.z, d))


# --- verbs -------------------------------------------------------------------


def cmd_predict(args):
    t = _triple(args, args.d)
    noise = parse_noise(args.noise)
    stats = triple_stats(t)
    out = {
        "d": stats.d,
        "zeta": zeta(stats, noise),
        "probability": predicted_preservation_prob(stats, noise),
        "noise": noise.to_json(),
        "stats": {
            "dist_xy_sq": stats.dist_xy_sq,
            "dist_xz_sq": stats.dist_xz_sq,
            "cross_inner": stats.cross_inner,
            "delta_inf": stats.delta_inf,
            "delta_two": stats.delta_two,
        },
    }
    return {"predict.json": dumps(out)}, {"noise": str(noise)}


def cmd_simulate(args):
    dims = _int_list(args.dims)
    t = _triple(args, args.d or (dims[-1] if dims else None))
    noise = parse_noise(args.noise)
    cfg = SimConfig(replicates=args.replicates, seed=SeedSpec(args.seed), dims=dims, workers=args.workers)
    res = simulate_preservation(t, noise, cfg)
    config = {"noise": noise.to_json(), **cfg.to_json(), "emit": args.emit}
    if args.emit == "prob":
        rows = summarize(res)
        cols = SIM_COLUMNS
    elif args.emit == "y-samples":
        rows = [{"d": r.d, "replicate": i, "y": y} for r in res.records for i, y in enumerate(r.y_samples)]
        cols = ("d", "replicate", "y")
    else:
        rc = relative_contrast_samples(t.as_points(), noise, cfg)
        rows = [{"d": d, "replicate": i, "rc": v} for d, vals in rc.items() for i, v in enumerate(vals)]
        cols = ("d", "replicate", "rc")
    if args.format == "json":
        return {"simulate.json": dumps(rows)}, config
    return {"simulate.csv": table_csv(rows, cols)}, config


def cmd_phase(args):
    dims, gaps = load_gap_series(args.gaps)
    band = (args.band_low, args.band_high)
    verdict = estimate_growth_exponent(GrowthSeries(dims, gaps), band=band)
    return {"phase.json": dumps(verdict.to_json())}, {"band": list(band)}


def cmd_diagnose(args):
    X = load_matrix(args.matrix)
    if args.pad is not None:
        X = pad_columns(X, args.pad)
    noise = parse_noise(args.noise)
    report = inversion_probabilities(X, noise)
    edges = knn_graph(X, args.k)
    points = []
    for i in range(X.shape[0]):
        points.append({
            "index": i,
            "closest": int(report.closest[i]),
            "furthest": int(report.furthest[i]),
            "inversion_prob": float(report.probabilities[i]),
            "knn": sorted(j for (a, j) in edges if a == i),
        })
    phase = None
    series = prefix_diameter_series(X)
    if series is not None:
        phase = estimate_growth_exponent(series).to_json()
    summary = {
        "n": X.shape[0],
        "d": X.shape[1],
        "diameter": dataset_diameter(X),
        "max_inversion_prob": report.max_probability,
        "phase": phase,
    }
    out = {"points": points, "summary": summary}
    return {"diagnose.json": dumps(out)}, {"noise": noise.to_json(), "k": args.k}


def cmd_dimred(args):
    cfg = LineExperimentConfig(
        n=args.n,
        alpha=HyperharmonicSpec.parse(args.alpha).alpha,
        dims=_int_list(args.dims),
        noise=parse_noise(args.noise),
        replicates=args.replicates,
        methods=tuple(Method.parse(m) for m in args.methods.split(",") if m.strip()),
        seed=SeedSpec(args.seed),
        correlation=args.correlation,
        workers=args.workers,
    )
    rows = line_experiment(cfg).rows()
    cols = [c for c in DIMRED_COLUMNS if c != "alpha"]
    if args.format == "json":
        return {"dimred.json": dumps(rows)}, cfg.to_json()
    return {"dimred.csv": table_csv(rows, cols)}, cfg.to_json()


def cmd_repro(args):
    target = args.target
    if target in TARGETS:
        fn, cols = TARGETS[target]
        kwargs = {"seed": args.seed, "workers": args.workers}
        if args.replicates is not None:
            kwargs["replicates"] = args.replicates
        if args.dims:
            kwargs["dims"] = _int_list(args.dims)
        rows = fn(**kwargs)
        name = f"{target}.csv"
        return {name: table_csv(rows, cols)}, {"target": target, **{k: v for k, v in kwargs.items() if k != "workers"}}
    path = Path(target)
    if not path.is_file():
        raise UsageError(f"unknown repro target {target!r} (not a canned target or a manifest file)")
    return _replay_manifest(path, args)


def _replay_manifest(path: Path, args):
    try:
        manifest = json.loads(path.read_text())
        argv = list(manifest["argv"])
        expected = dict(manifest["outputs"])
    except (ValueError, KeyError) as exc:
        raise ParseError(f"{path}: not a run manifest ({exc})") from None
    out_dir = Path(args.out) if args.out else path.parent / "repro"
    argv = _strip_out(argv) + ["--out", str(out_dir)]
    if manifest.get("seed") is not None and not any(a == "--seed" or a.startswith("--seed=") for a in argv):
        # the original run took its seed from the environment; pin it
        argv += ["--seed", str(manifest["seed"])]
    status = main(argv)
    if status != 0:
        return status
    actual = {name: sha256_file(out_dir / name) for name in expected}
    mismatched = sorted(n for n in expected if expected[n] != actual[n])
    report = {"manifest": str(path), "replayed_into": str(out_dir), "identical": not mismatched,
              "mismatched": mismatched}
    sys.stdout.write(dumps(report))
    return 0 if not mismatched else 2


def _strip_out(argv):
    out = []
    skip = False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--out":
            skip = True
            continue
        if a.startswith("--out="):
            continue
        out.append(a)
    return out


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="noisy-neighbors", description="Neighbour stability of noisy high-dimensional data.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)

    def common(sp, seed=True, fmt=True, workers=True):
        sp.add_argument("--out", help="output directory (files + run.json); stdout if omitted")
        if seed:
            sp.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or {DEFAULT_SEED})")
        if fmt:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")
        if workers:
            sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    def triple_args(sp):
        sp.add_argument("--triple", help="builtin triple: set1, set2, set3, hyper:<alpha>")
        sp.add_argument("--x", help="file (one real per line) or builtin vector")
        sp.add_argument("--y")
        sp.add_argument("--z")
        sp.add_argument("--d", type=int, default=None, help="dimension (prefix length)")

    sp = sub.add_parser("predict", help="evaluate zeta and Phi(zeta) for a triple")
    triple_args(sp)
    sp.add_argument("--noise", default="uniform:0.75")
    common(sp, seed=False, fmt=False, workers=False)

    sp = sub.add_parser("simulate", help="Monte Carlo preservation probability and diagnostics")
    triple_args(sp)
    sp.add_argument("--noise", default="uniform:0.75")
    sp.add_argument("--replicates", type=int, default=5000)
    sp.add_argument("--dims", default="10,100,1000,10000")
    sp.add_argument("--emit", choices=("prob", "y-samples", "rc"), default="prob")
    common(sp)

    sp = sub.add_parser("phase", help="classify the growth exponent of a gap series")
    sp.add_argument("--gaps", required=True, help="CSV with columns d,gap")
    sp.add_argument("--band-low", type=float, default=DEFAULT_BAND[0])
    sp.add_argument("--band-high", type=float, default=DEFAULT_BAND[1])
    common(sp, seed=False, fmt=False, workers=False)

    sp = sub.add_parser("diagnose", help="diameter, inversion probabilities and kNN graph of a dataset")
    sp.add_argument("--matrix", required=True, help="CSV, rows = points")
    sp.add_argument("--noise", default="uniform:1.25")
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--pad", type=int, default=None, help="pad rows with zeros up to this dimension")
    common(sp, seed=False, fmt=False, workers=False)

    sp = sub.add_parser("dimred", help="line-segment dimensionality-reduction benchmark")
    sp.add_argument("--n", type=int, default=25)
    sp.add_argument("--alpha", default="inf")
    sp.add_argument("--dims", default="100,1000,10000")
    sp.add_argument("--noise", default="uniform:1.25")
    sp.add_argument("--replicates", type=int, default=100)
    sp.add_argument("--methods", default="pca,isomap:10,diffusion")
    sp.add_argument("--correlation", choices=("spearman", "pearson"), default="spearman")
    common(sp)

    sp = sub.add_parser("repro", help="run a canned experiment or replay a run.json manifest")
    sp.add_argument("target", help=", ".join(TARGETS) + ", or a path to run.json")
    sp.add_argument("--replicates", type=int, default=None)
    sp.add_argument("--dims", default=None)
    common(sp, fmt=False)
    return p


VERBS = {
    "predict": cmd_predict,
    "simulate": cmd_simulate,
    "phase": cmd_phase,
    "diagnose": cmd_diagnose,
    "dimred": cmd_dimred,
    "repro": cmd_repro,
}


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def run(argv):
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    args = parser.parse_args(argv)
    if args.verb is None:
        parser.print_usage(sys.stderr)
        return 1
    if getattr(args, "seed", "absent") is None:
        args.seed = _default_seed()
    started = _now()
    result = VERBS[args.verb](args)
    if isinstance(result, int):
        return result
    outputs, config = result
    if args.out is None:
        for text in outputs.values():
            sys.stdout.write(text)
        return 0
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    digests = {}
    for name, text in outputs.items():
        (out_dir / name).write_text(text)
        digests[name] = sha256_file(out_dir / name)
    manifest = {
        "tool": "noisy_neighbors",
        "version": __version__,
        "verb": args.verb,
        "argv": list(argv),
        "config": config,
        "config_hash": config_hash(config),
        "seed": getattr(args, "seed", None),
        "started": started,
        "finished": _now(),
        "outputs": digests,
    }
    (out_dir / MANIFEST).write_text(dumps(manifest))
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        return run(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input error: cannot read {exc.filename}", file=sys.stderr)
        return 2
    except (InvalidParameter, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
