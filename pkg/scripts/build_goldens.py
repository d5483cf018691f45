#!/usr/bin/env python3
"""Regenerate the regression goldens under tests/golden/.

Run after an intentional behaviour change, then review the diff. The scoring
goldens come from build_scoring_fixtures.py instead.
"""

import json
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"

from compcredit.granularity import synthetic_lengths  # noqa: E402
from compcredit.sim import Corpus, EpisodeSettings, run_group  # noqa: E402

EXPLORER_SEED = 2024

ADVANTAGE_GROUPS = [
    {
        "query_id": "worked",
        "trajectories": [
            {"trajectory_id": "worked/0", "final_reward": 1.0,
             "turns": [{"q_com": 0.8}, {"q_com": 0.6}, {"q_com": 0.7}]},
            {"trajectory_id": "worked/1", "final_reward": -1.0, "turns": [{"q_com": 0.5}, {"q_com": 0.5}]},
        ],
    },
    {
        "query_id": "one-success",
        "trajectories": [
            {"trajectory_id": f"one-success/{i}", "final_reward": r,
             "turns": [{"q_com": q} for q in qs]}
            for i, (r, qs) in enumerate([(1.0, [0.9, 0.5]), (0.0, [0.4]), (0.0, [0.2, 0.6, 0.7]), (0.0, [0.3])])
        ],
    },
]


def cli(*args):
    subprocess.run([sys.executable, "-m", "compcredit", *map(str, args)], check=True, cwd=ROOT)


def main():
    (GOLDEN / "advantage").mkdir(parents=True, exist_ok=True)
    (GOLDEN / "cluster").mkdir(parents=True, exist_ok=True)
    (GOLDEN / "simulate").mkdir(parents=True, exist_ok=True)

    corpus = Corpus.load()
    rewards = {
        qa.query_id: run_group(corpus, qa.query_id, "explorer", group_size=8, master_seed=EXPLORER_SEED,
                               settings=EpisodeSettings(top_k=5)).rewards
        for qa in corpus.qa_items
    }
    lines = ",\n".join(f"    {json.dumps(q)}: {json.dumps(r)}" for q, r in rewards.items())
    (GOLDEN / "explorer_rewards.json").write_text(
        f'{{\n  "master_seed": {EXPLORER_SEED},\n  "top_k": 5,\n  "rewards": {{\n{lines}\n  }}\n}}\n'
    )

    groups = GOLDEN / "advantage" / "groups.jsonl"
    groups.write_text("".join(json.dumps(g) + "\n" for g in ADVANTAGE_GROUPS))
    cli("advantage", groups, "--w", "0.2", "-o", GOLDEN / "advantage" / "report.jsonl")

    points = GOLDEN / "cluster" / "points.txt"
    points.write_text("".join(f"{x:.6f}\n" for x in synthetic_lengths()))
    cli("cluster", points, "--k-min", 2, "--k-max", 8, "-o", GOLDEN / "cluster" / "db_table.csv")

    cli("simulate", "--config", "configs/fixture.json", "--output-dir", GOLDEN / "simulate")
    cli("verify-theorem", "configs/theorem_sqrt.json", "-o", GOLDEN / "theorem.json")
    print("goldens rebuilt under", GOLDEN)


if __name__ == "__main__":
    main()
