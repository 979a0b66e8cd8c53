"""Rotations of one von Mises density: distance matrices, MDS and a neighbour check.

    python scripts/run_translations.py --out runs/translations
"""

import argparse
from pathlib import Path

import numpy as np

from cotkit import io
from cotkit.analysis import classical_mds, experiment_translations, von_mises_grid


def adjacency_exceptions(D):
    n = D.shape[0]
    L = D.copy()
    np.fill_diagonal(L, np.inf)
    return sum(set(np.argsort(L[i])[:2]) != {(i - 1) % n, (i + 1) % n} for i in range(n))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs/translations"))
    ap.add_argument("--n-rot", type=int, default=20)
    ap.add_argument("--kappa", type=float, default=10.0)
    ap.add_argument("--grid", type=int, default=500)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    res = experiment_translations(von_mises_grid(0.5, args.kappa, args.grid), args.n_rot)
    meta = [f"kappa={args.kappa!r}", f"grid={args.grid}"]
    print(f"{'metric':<6} {'exceptions':>10} {'stress1':>8}")
    for name, D in res.matrices().items():
        # every matrix holds squared costs; MDS runs on the metric root
        mds = classical_mds(np.sqrt(D), 2)
        io.write_matrix(args.out / f"{name}.csv", D, res.labels, meta)
        io.write_mds(args.out / f"mds_{name}.csv", res.labels, mds.coordinates, meta + [f"stress1={mds.stress!r}"])
        print(f"{name:<6} {adjacency_exceptions(D):>10d} {mds.stress:>8.4f}")


if __name__ == "__main__":
    main()
