"""Command-line interface: ``cotkit <command> ...``.

Exit codes: 0 success, 2 usage or parse error, 3 invalid measure or other
domain error. The special input name ``uniform`` stands for the uniform
measure discretized on ``--grid`` cells.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .analysis import (
    BENCH_METHODS,
    bench_pairwise,
    classical_mds,
    experiment_barycenter,
    experiment_families,
    experiment_translations,
    von_mises_grid,
)
from .cot import CostSpec, UnsupportedInverseError, cot_distance
from .lcot import (
    ReferenceMismatchError,
    barycenter,
    embed,
    embed_general,
    interpolate_cot,
    interpolate_lcot,
    inverse_embed,
    lcot_distance,
    pairwise_matrix,
)
from .measures import UNIFORM, DiscreteMeasure, GridDensity, InvalidMeasureError, to_discrete

EXPERIMENTS = ("translations", "families", "barycenter-demo")


class UsageError(ValueError):
    pass


def _floats_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints_list(text):
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return vals


def _methods_list(text):
    vals = [t.strip() for t in text.split(",") if t.strip()]
    bad = [v for v in vals if v not in BENCH_METHODS]
    if bad or not vals:
        raise argparse.ArgumentTypeError(f"unknown method(s) {bad}; choose from {', '.join(BENCH_METHODS)}")
    return vals


def _seed(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _load(name, args):
    if name == "uniform":
        return DiscreteMeasure.uniform_grid(args.grid)
    return io.read_measure(name)


def _discrete(name, args):
    return to_discrete(_load(name, args))


def _header(args, extra=()):
    return [f"seed={args.seed}", *extra]


def _fields(measures, p):
    if p == 2:
        return [embed(m) for m in measures]
    return [embed_general(m, UNIFORM, CostSpec(p)) for m in measures]


def cmd_embed(args):
    f = embed(_discrete(args.input, args))
    io.write_embedding(args.out, f)
    return 0


def cmd_inverse_embed(args):
    io.write_measure(args.out, inverse_embed(io.read_embedding(args.input)))
    return 0


def _distance(a, b, method, p):
    if method == "cot":
        return cot_distance(a, b, CostSpec(p))
    fa, fb = _fields([a, b], p)
    return lcot_distance(fa, fb, p)


def cmd_dist(args):
    a, b = _discrete(args.a, args), _discrete(args.b, args)
    v = _distance(a, b, args.method, args.p)
    print(f"{v:.12g}\t{v ** (1.0 / args.p):.12g}")
    return 0


def _inputs(paths):
    files = []
    for p in paths:
        path = Path(p)
        files.extend(sorted(path.glob("*.csv")) if path.is_dir() else [p])
    return [str(f) for f in files]


def cmd_pairwise(args):
    files = _inputs(args.inputs)
    if len(files) < 2:
        raise UsageError("pairwise needs at least two measure files")
    measures = [_discrete(f, args) for f in files]
    labels = [Path(f).stem for f in files]
    K = len(measures)
    if args.method == "lcot":
        D = pairwise_matrix(_fields(measures, args.p), args.p, parallel=args.parallel)
    else:
        D = np.zeros((K, K))
        for i in range(K):
            for j in range(i + 1, K):
                D[i, j] = D[j, i] = cot_distance(measures[i], measures[j], CostSpec(args.p))
    io.write_matrix(args.out, D, labels, _header(args, [f"method={args.method}", f"p={args.p!r}"]))
    return 0


def _reference(args):
    if args.reference == "uniform":
        return UNIFORM
    ref = io.read_measure(args.reference)
    if not isinstance(ref, GridDensity):
        raise UsageError("the LCOT reference must be a density file")
    return ref


def cmd_interpolate(args):
    ts = args.t
    if not ts or any(not 0.0 <= t <= 1.0 for t in ts):
        raise UsageError(f"t values must lie in [0, 1], got {ts}")
    a, b = _discrete(args.a, args), _discrete(args.b, args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.method == "lcot":
        ref = _reference(args)
        fa, fb = embed_general(a, ref), embed_general(b, ref)
    for t in ts:
        rho = interpolate_lcot(fa, fb, t) if args.method == "lcot" else interpolate_cot(a, b, t)
        io.write_measure(out / f"{args.prefix}_t{t:g}.csv", rho, [f"method={args.method}", f"t={t!r}"])
    return 0


def cmd_barycenter(args):
    measures = [_discrete(f, args) for f in args.inputs]
    w = np.full(len(measures), 1.0 / len(measures)) if args.weights is None else np.asarray(args.weights)
    if w.shape != (len(measures),):
        raise UsageError(f"{len(measures)} inputs but {w.size} weights")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise UsageError("weights must be non-negative and sum to 1")
    io.write_measure(args.out, barycenter([embed(m) for m in measures], w))
    return 0


def _emit_matrices(out, labels, mats, args, extra=()):
    for name, D in mats.items():
        io.write_matrix(out / f"{name}.csv", D, labels, _header(args, extra))
        mds = classical_mds(np.sqrt(D), 2)
        io.write_mds(out / f"mds_{name}.csv", labels, mds.coordinates,
                     _header(args, [*extra, f"stress1={mds.stress:.6g}"]))


def cmd_experiment(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    if args.name == "translations":
        res = experiment_translations(von_mises_grid(0.5, args.kappa, args.grid), args.n_rot)
        _emit_matrices(out, res.labels, res.matrices(), args, [f"kappa={args.kappa!r}", f"grid={args.grid}"])
    elif args.name == "families":
        res = experiment_families(rng, n_sets=args.n_sets, M=args.grid, with_cot=not args.no_cot)
        _emit_matrices(out, res.labels, res.matrices, args, [f"grid={args.grid}"])
    else:
        for name, (grids, euclid, bary) in experiment_barycenter(rng, M=args.grid).items():
            for j, g in enumerate(grids):
                io.write_density(out / f"{name}_input{j:02d}.csv", g, _header(args))
            io.write_density(out / f"{name}_euclidean.csv", euclid, _header(args))
            io.write_measure(out / f"{name}_lcot.csv", bary, _header(args))
    return 0


def cmd_bench(args):
    records = bench_pairwise(args.Ks, args.Ns, args.methods, seed=args.seed,
                             repeats=args.repeats, parallel=args.parallel)
    io.write_bench(args.out, records, _header(args))
    return 0


def build_parser():
    env_seed = os.environ.get("COTKIT_SEED")
    p = argparse.ArgumentParser(prog="cotkit", description="Circular and linear circular optimal transport.")
    p.add_argument("--grid", type=int, default=1000, help="cells used to discretize the uniform measure")
    p.add_argument("--seed", type=_seed, default=_seed(env_seed) if env_seed else 0,
                   help="random seed (default: $COTKIT_SEED or 0)")
    p.add_argument("-v", "--verbose", action="store_true")
    # the same flags after the subcommand; SUPPRESS keeps the top-level defaults
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, default=argparse.SUPPRESS)
    common.add_argument("--seed", type=_seed, default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    s = add("embed", help="LCOT embedding of a measure (uniform reference)")
    s.add_argument("input")
    s.add_argument("-o", "--out", required=True)
    s.set_defaults(func=cmd_embed)

    s = add("inverse-embed", help="measure from an embedding file")
    s.add_argument("input")
    s.add_argument("-o", "--out", required=True)
    s.set_defaults(func=cmd_inverse_embed)

    s = add("dist", help="distance between two measures (p-th power and root)")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--method", choices=("lcot", "cot"), default="lcot")
    s.set_defaults(func=cmd_dist)

    s = add("pairwise", help="pairwise distance matrix of measure files or directories")
    s.add_argument("inputs", nargs="+")
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--method", choices=("lcot", "cot"), default="lcot")
    s.add_argument("--parallel", action="store_true")
    s.add_argument("-o", "--out", required=True)
    s.set_defaults(func=cmd_pairwise)

    s = add("interpolate", help="COT or LCOT interpolation at several times")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--t", type=_floats_list, required=True, help="comma-separated times in [0, 1]")
    s.add_argument("--method", choices=("lcot", "cot"), default="lcot")
    s.add_argument("--reference", default="uniform", help="'uniform' or a density file (LCOT only)")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--prefix", default="interp")
    s.set_defaults(func=cmd_interpolate)

    s = add("barycenter", help="LCOT barycenter of measure files")
    s.add_argument("inputs", nargs="+")
    s.add_argument("--weights", type=_floats_list)
    s.add_argument("-o", "--out", required=True)
    s.set_defaults(func=cmd_barycenter)

    s = add("experiment", help="emit the CSVs of a named experiment")
    s.add_argument("name", choices=EXPERIMENTS)
    s.add_argument("--out", required=True)
    s.add_argument("--n-rot", type=int, default=20)
    s.add_argument("--kappa", type=float, default=10.0)
    s.add_argument("--n-sets", type=int, default=20)
    s.add_argument("--no-cot", action="store_true", help="skip the COT matrix in 'families'")
    s.set_defaults(func=cmd_experiment)

    s = add("bench", help="time pairwise distance pipelines")
    s.add_argument("--Ks", type=_ints_list, default=[2, 4, 8, 16])
    s.add_argument("--Ns", type=_ints_list, default=[500, 1000, 2000])
    s.add_argument("--methods", type=_methods_list, default=list(BENCH_METHODS))
    s.add_argument("--repeats", type=int, default=5)
    s.add_argument("--parallel", action="store_true")
    s.add_argument("-o", "--out", required=True)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="cotkit: %(message)s")
    if args.grid < 1:
        print("cotkit: --grid must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (io.MeasureParseError, UsageError, FileNotFoundError) as e:
        print(f"cotkit: {e}", file=sys.stderr)
        return 2
    except (InvalidMeasureError, ReferenceMismatchError, UnsupportedInverseError, ValueError) as e:
        print(f"cotkit: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
