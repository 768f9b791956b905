#!/usr/bin/env python3
"""Desk-scale arity-exponent sweep.

Builds variable-arity trees for a range of alpha values on synthetic
vectors, runs a calibrated workload, and writes one CSV row per
configuration.  Distance evaluations should fall and table entries rise
as alpha grows.

Example:
    python scripts/alpha_sweep.py --n 10000 --dim 12 --out alpha.csv
"""

import argparse

from gnatty import ExperimentSpec, emit_csv, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--dim", type=int, default=12)
    parser.add_argument("--queries", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--alphas", type=float, nargs="+", default=[0.3, 0.4, 0.5, 0.6, 0.7])
    parser.add_argument("--gamma", type=float, default=0.9)
    parser.add_argument("--target-k", type=int, default=10)
    parser.add_argument("--out", default="alpha_sweep.csv")
    args = parser.parse_args()

    spec = ExperimentSpec(
        n=args.n + args.queries, dim=args.dim, queries=args.queries,
        seeds=(args.seed,), indexes=("gnatty",), partitions=("ball",),
        alphas=tuple(args.alphas), gammas=(args.gamma,),
        target_ks=(args.target_k,))
    rows = run_experiment(spec)
    emit_csv(rows, args.out)
    print(f"{'alpha':>8} {'median evals':>14} {'entries':>10}")
    for row in rows:
        print(f"{row.arity.split(':')[1]:>8} {row.median_distance_evals:>14.0f} {row.entries:>10}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
