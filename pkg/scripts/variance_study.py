#!/usr/bin/env python3
"""Cross-seed spread of the per-turn-index mean advantage, GRPO broadcast vs reshaped."""

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from compcredit.config import load_config
from compcredit.experiments import variance_study

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(ROOT / "configs/explorer.json"))
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--w", type=float, nargs="*", default=[0.2])
    args = ap.parse_args()

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["w", "turn_index", "grpo_std", "hrr_std", "hrr_minus_grpo"])
    base = load_config(args.config)
    for w in args.w:
        study = variance_study(replace(base, w=w), seeds=range(args.seeds))
        for row in study.rows():
            g, h = row["grpo_std"], row["hrr_std"]
            writer.writerow([w, row["turn_index"], f"{g:.9f}", f"{h:.9f}", f"{h - g:+.9f}"])
        print(f"w={w}: holds={study.holds} strictly better at {study.strict_improvements}", file=sys.stderr)


if __name__ == "__main__":
    main()
