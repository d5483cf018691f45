"""Experiment drivers shared by the scripts and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from compcredit.config import RunConfig
from compcredit.sim import Corpus, SearchEnvironment
from compcredit.text import default_stopwords

NOISE_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)


def noise_recall_curve(
    corpus: Corpus | None = None, levels=NOISE_LEVELS, n_searches: int = 200, top_k: int = 20, seed: int = 0
) -> dict[float, float]:
    """Mean fraction of gold documents returned by a question search, per noise level.

    Searches cycle through the QA items; search i uses environment seed seed + i
    at every level, so the curves share their random draws.
    """
    corpus = corpus or Corpus.load()
    stop = default_stopwords()
    items = corpus.qa_items
    curve = {}
    for p in levels:
        total = 0.0
        for i in range(n_searches):
            qa = items[i % len(items)]
            env = SearchEnvironment(corpus, qa.query_id, seed + i, noise_fraction=p, stopwords=stop)
            ids = {h.doc_id for h in env.search(qa.question, top_k)}
            total += len(ids & set(qa.gold_doc_ids)) / len(qa.gold_doc_ids)
        curve[p] = total / n_searches
    return curve


@dataclass
class VarianceStudy:
    indices: list[int]
    grpo_std: list[float]
    hrr_std: list[float]
    seeds: list[int]

    @property
    def holds(self) -> bool:
        return all(h <= g + 1e-12 for g, h in zip(self.grpo_std, self.hrr_std))

    @property
    def strict_improvements(self) -> list[int]:
        return [j for j, g, h in zip(self.indices, self.grpo_std, self.hrr_std) if h < g - 1e-12]

    def rows(self):
        return [
            {"turn_index": j, "grpo_std": g, "hrr_std": h}
            for j, g, h in zip(self.indices, self.grpo_std, self.hrr_std)
        ]


def _per_index_means(groups, reports, use_hrr: bool) -> dict[int, float]:
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    for g, rep in zip(groups, reports):
        for traj, a, row in zip(g.trajectories, rep.per_trajectory, rep.per_turn):
            for turn, reshaped in zip(traj.turns, row):
                j = turn.turn_index
                sums[j] = sums.get(j, 0.0) + (reshaped if use_hrr else a)
                counts[j] = counts.get(j, 0) + 1
    return {j: sums[j] / counts[j] for j in sums}


def variance_study(cfg: RunConfig, seeds=range(20)) -> VarianceStudy:
    """Cross-seed spread of the per-turn-index mean advantage, GRPO broadcast vs reshaped.

    Only turn indices reached in every repetition are compared.
    """
    from compcredit.cli import simulate

    grpo_runs, hrr_runs = [], []
    for s in seeds:
        groups, reports, _ = simulate(replace(cfg, seed=int(s)))
        grpo_runs.append(_per_index_means(groups, reports, use_hrr=False))
        hrr_runs.append(_per_index_means(groups, reports, use_hrr=True))
    common = sorted(set.intersection(*(set(r) for r in grpo_runs)))
    grpo = [float(np.std([r[j] for r in grpo_runs])) for j in common]
    hrr = [float(np.std([r[j] for r in hrr_runs])) for j in common]
    return VarianceStudy(common, grpo, hrr, [int(s) for s in seeds])
