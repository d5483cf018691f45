"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) or through pytest, which
repeats the lines in its terminal summary.
"""

import json
import math
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_LINES  # noqa: E402

from compcredit.advantage import (  # noqa: E402
    AdvantageReport,
    TokenBatch,
    Trajectory,
    TrajectoryGroup,
    Turn,
    TurnTokens,
    grpo_advantages,
    hrr_reshape,
    surrogate_objective,
)
from compcredit.config import load_config  # noqa: E402
from compcredit.experiments import noise_recall_curve, variance_study  # noqa: E402
from compcredit.formats import read_jsonl, record_from_dict  # noqa: E402
from compcredit.granularity import db_sweep, synthetic_lengths, utility_spec_from_dict, verify_utility_theorem  # noqa: E402
from compcredit.scoring import ratio_score, score_composite, word_score  # noqa: E402
from compcredit.sim import Corpus, run_group  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"


@contextmanager
def criterion(number: int, title: str, budget_s: float):
    """Time the body, print one PASS/FAIL line, then re-raise any failure."""
    start = time.perf_counter()
    detail = {"text": ""}
    error = None
    try:
        yield detail
    except AssertionError as exc:
        error = exc
    elapsed = time.perf_counter() - start
    if error is None and elapsed > budget_s:
        error = AssertionError(f"runtime {elapsed:.2f}s exceeds {budget_s}s")
    status = "PASS" if error is None else "FAIL"
    msg = f"[{status}] {number:2d}. {title} ({elapsed:.2f}s / {budget_s}s)"
    if detail["text"]:
        msg += f" :: {detail['text']}"
    if error is not None and str(error):
        msg += f" :: {str(error).splitlines()[0]}"
    print(msg)
    ACCEPTANCE_LINES.append(msg)
    if error is not None:
        raise error


def fuzz_group(rng, n_traj=None, max_turns=10):
    n_traj = n_traj or int(rng.integers(2, 9))
    rewards = rng.choice([0.0, 1.0, 0.5, -1.0], size=n_traj) if rng.random() < 0.5 else rng.normal(size=n_traj)
    trajs = [
        Trajectory(f"t{i}", float(r), [Turn(j, float(q)) for j, q in enumerate(rng.random(int(rng.integers(1, max_turns + 1))))])
        for i, r in enumerate(rewards)
    ]
    return TrajectoryGroup("fuzz", trajs)


def test_c01_scoring_oracle_equivalence():
    with criterion(1, "scoring matches the frozen oracle on 30 records to 1e-9", 1.0) as d:
        records = [obj for _, obj in read_jsonl(ROOT / "tests/fixtures/scoring_records.jsonl")]
        oracle = [obj for _, obj in read_jsonl(ROOT / "tests/fixtures/scoring_oracle.jsonl")]
        assert len(records) == len(oracle) == 30
        worst = 0.0
        for rec, ref in zip(records, oracle):
            got = score_composite(record_from_dict(rec)).as_tuple()
            want = tuple(ref[k] for k in ("q_ratio", "q_level", "q_info", "q_sem", "q_com"))
            worst = max(worst, max(abs(a - b) for a, b in zip(got, want)))
        d["text"] = f"max abs error {worst:.1e}"
        assert worst <= 1e-9, f"max abs error {worst}"


def test_c02_piecewise_branches():
    with criterion(2, "ratio and word-count branches hit their worked values exactly", 1.0):
        ratio_cases = {1500: 1.0, 500: 0.4, 2500: 0.85, 6000: 0.15}
        for n, want in ratio_cases.items():
            assert ratio_score(n, 1000, 2000) == want, (n, ratio_score(n, 1000, 2000))
        word_cases = {300: 1.0, 100: 0.5, 500: 0.7, 700: 0.3}
        for n, want in word_cases.items():
            assert word_score(n, 200, 400) == want, (n, word_score(n, 200, 400))


def test_c03_grpo_reduction():
    with criterion(3, "w=0 reshaping is bitwise GRPO on 1,000 fuzzed groups", 5.0):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            g = fuzz_group(rng)
            base = grpo_advantages(g)
            rep = hrr_reshape(g, w=0.0)
            for a, row, traj in zip(base, rep.per_turn, g.trajectories):
                assert row == [a] * len(traj.turns)


def test_c04_zero_sum():
    with criterion(4, "reshaped per-trajectory mean equals GRPO to 1e-12 on 10,000 trajectories", 5.0) as d:
        rng = np.random.default_rng(4)
        seen, worst = 0, 0.0
        while seen < 10_000:
            g = fuzz_group(rng, n_traj=8, max_turns=20)
            rep = hrr_reshape(g, w=float(rng.uniform(0, 2)))
            for a, row in zip(rep.per_trajectory, rep.per_turn):
                worst = max(worst, abs(math.fsum(row) / len(row) - a))
            seen += len(g.trajectories)
        d["text"] = f"{seen} trajectories, max deviation {worst:.1e}"
        assert worst <= 1e-12


def test_c05_utility_theorem():
    with criterion(5, "adaptive allocation beats uniform (sqrt and log families)", 10.0) as d:
        spec = json.loads((ROOT / "configs/theorem_sqrt.json").read_text())
        rep = verify_utility_theorem(utility_spec_from_dict(spec), samples=100_000, seed=spec["seed"])
        closed = (math.sqrt(0.5) + 2.0 + 3.0 * math.sqrt(1.5)) / 3.0
        assert f"{rep.expected_uniform:.9f}" == "2.000000000"
        assert abs(rep.expected_adaptive - closed) <= 1e-6
        assert round(rep.expected_adaptive, 5) == 2.12711
        assert abs(rep.mc_adaptive - rep.expected_adaptive) <= 3 * rep.mc_adaptive_stderr
        assert abs(rep.mc_uniform - rep.expected_uniform) <= 3 * rep.mc_uniform_stderr
        assert rep.conclusive and rep.gap > 0
        log_spec = json.loads((ROOT / "configs/theorem_log.json").read_text())
        log_rep = verify_utility_theorem(utility_spec_from_dict(log_spec), samples=100_000, seed=0)
        assert log_rep.conclusive and log_rep.gap > 0
        d["text"] = f"adaptive {rep.expected_adaptive:.9f}, gap {rep.gap:.6f}, log gap {log_rep.gap:.6f}"


def test_c06_db_minimum():
    with criterion(6, "Davies-Bouldin sweep k=2..8 is minimised at k=5", 10.0) as d:
        reports = db_sweep(synthetic_lengths(), range(2, 9))
        db = {r.k: r.db_index for r in reports}
        d["text"] = " ".join(f"k{k}={v:.4f}" for k, v in db.items())
        assert min(db, key=db.get) == 5


def test_c07_simulator_golden(tmp_path):
    from compcredit.cli import main

    with criterion(7, "fixture simulation reproduces goldens byte-for-byte", 10.0):
        assert main(["simulate", "--config", str(ROOT / "configs/fixture.json"), "--output-dir", str(tmp_path)]) == 0
        for name in ("trajectories.jsonl", "advantages.jsonl", "stats.json"):
            assert (tmp_path / name).read_bytes() == (GOLDEN / "simulate" / name).read_bytes(), name
        g = run_group(Corpus.load(), "q1", ["oracle", "null", "null", "null"], master_seed=7)
        assert g.rewards == [1.0, 0.0, 0.0, 0.0]
        adv = grpo_advantages(g)
        assert adv == pytest.approx([1.73205, -0.57735, -0.57735, -0.57735], abs=1e-5)


def test_c08_noise_monotonicity():
    with criterion(8, "gold recall non-increasing in noise, zero at p=1", 10.0) as d:
        curve = noise_recall_curve(n_searches=200)
        values = list(curve.values())
        d["text"] = " ".join(f"p={p}:{v:.4f}" for p, v in curve.items())
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert curve[1.0] == 0.0


def test_c09_variance_direction():
    with criterion(9, "reshaped per-turn-index advantage spread <= GRPO across 20 seeds", 30.0) as d:
        study = variance_study(load_config(ROOT / "configs/explorer.json"), seeds=range(20))
        worse = [j for j, g, h in zip(study.indices, study.grpo_std, study.hrr_std) if h > g + 1e-12]
        d["text"] = (
            f"indices {study.indices[0]}..{study.indices[-1]}, "
            f"strictly better at {study.strict_improvements}, worse at {worse}"
        )
        assert study.holds, f"reshaped spread exceeds GRPO at turn indices {worse}"


def test_c10_surrogate_cases():
    with criterion(10, "clipped surrogate hits the three hand cases to 1e-12", 1.0):
        def objective(log_ratio, adv):
            rep = AdvantageReport("g", ["t"], [adv], [[adv]], [0.0], 0.0)
            batch = TokenBatch({"t": [TurnTokens((0.0,), (log_ratio,), (log_ratio,))]})
            return surrogate_objective(batch, rep, clip_epsilon=0.2, beta_kl=0.0)

        assert abs(objective(0.0, 1.0) - 1.0) <= 1e-12
        assert abs(objective(math.log(1.5), 1.0) - 1.2) <= 1e-12
        assert abs(objective(math.log(1.5), -1.0) - (-1.5)) <= 1e-12


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
