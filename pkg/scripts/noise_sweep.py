#!/usr/bin/env python3
"""Gold-document recall and oracle reward under injected retrieval noise.

Prints a CSV with one row per noise level.
"""

import argparse
import csv
import sys

from compcredit.experiments import NOISE_LEVELS, noise_recall_curve
from compcredit.sim import Corpus, EpisodeSettings, behavior_stats, run_group


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--searches", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--top-k", type=int, default=20)
    args = ap.parse_args()

    corpus = Corpus.load()
    recall = noise_recall_curve(corpus, n_searches=args.searches, top_k=args.top_k, seed=args.seed)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["noise", "gold_recall", "explorer_reward", "explorer_avg_turns", "oracle_reward"])
    for p in NOISE_LEVELS:
        settings = EpisodeSettings(top_k=args.top_k, noise_fraction=p)
        explorer = [
            t
            for qa in corpus.qa_items
            for t in run_group(corpus, qa.query_id, "explorer", 8, args.seed, settings).trajectories
        ]
        oracle = [
            t
            for qa in corpus.qa_items
            for t in run_group(corpus, qa.query_id, "oracle", 2, args.seed, settings).trajectories
        ]
        mean = lambda ts: sum(t.final_reward for t in ts) / len(ts)  # noqa: E731
        writer.writerow(
            [p, f"{recall[p]:.6f}", f"{mean(explorer):.6f}", f"{behavior_stats(explorer).avg_turns:.4f}",
             f"{mean(oracle):.6f}"]
        )


if __name__ == "__main__":
    main()
