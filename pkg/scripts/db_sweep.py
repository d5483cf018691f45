#!/usr/bin/env python3
"""K-means + Davies-Bouldin sweep on seeded synthetic summary lengths, over several data seeds."""

import argparse
import sys

from compcredit.cli import cluster_table
from compcredit.granularity import db_sweep, synthetic_lengths


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--sigma", type=float, default=60.0)
    ap.add_argument("--data-seeds", type=int, default=10)
    ap.add_argument("--table", action="store_true", help="print the full table for data seed 0")
    args = ap.parse_args()

    if args.table:
        sys.stdout.write(cluster_table(synthetic_lengths(args.n, sigma=args.sigma, seed=0), 2, 8))
        return
    print("data_seed,argmin_k," + ",".join(f"db_k{k}" for k in range(2, 9)))
    for s in range(args.data_seeds):
        reports = db_sweep(synthetic_lengths(args.n, sigma=args.sigma, seed=s), range(2, 9))
        best = min(reports, key=lambda r: r.db_index).k
        print(f"{s},{best}," + ",".join(f"{r.db_index:.6f}" for r in reports))


if __name__ == "__main__":
    main()
