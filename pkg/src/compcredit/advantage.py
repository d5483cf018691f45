"""Group-relative advantages, hindsight turn-level reshaping and the clipped surrogate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from compcredit.scoring import CompressionRecord

DEFAULT_W = 0.2
DEFAULT_EPSILON_STD = 1e-8
DEFAULT_CLIP_EPSILON = 0.2
DEFAULT_BETA_KL = 1e-3


class InvalidGroupError(ValueError):
    pass


class InvalidTrajectoryError(ValueError):
    pass


class AlignmentError(ValueError):
    pass


@dataclass
class Turn:
    turn_index: int
    q_com: float
    level: int = 0
    token_count: int = 0
    tool: str | None = None
    payload: str | None = None
    record: CompressionRecord | None = field(default=None, repr=False, compare=False)


@dataclass
class Trajectory:
    trajectory_id: str
    final_reward: float
    turns: list[Turn]
    finished: bool = True

    def __post_init__(self):
        if not self.turns:
            raise InvalidTrajectoryError(f"trajectory {self.trajectory_id!r} has no turns")

    @property
    def turn_scores(self) -> list[float]:
        return [t.q_com for t in self.turns]

    def count_tool(self, kind: str) -> int:
        return sum(1 for t in self.turns if t.tool == kind)


@dataclass
class TrajectoryGroup:
    query_id: str
    trajectories: list[Trajectory]

    @property
    def rewards(self) -> list[float]:
        return [t.final_reward for t in self.trajectories]


@dataclass
class AdvantageReport:
    query_id: str
    trajectory_ids: list[str]
    per_trajectory: list[float]
    per_turn: list[list[float]]
    baseline: list[float]
    reshaping_weight: float


def grpo_advantages(group: TrajectoryGroup | Sequence[float], epsilon_std: float = DEFAULT_EPSILON_STD) -> list[float]:
    """(R_i - mean) / (population std + epsilon_std) over the group's final rewards.

    A group whose rewards are all equal gets zero advantages.
    """
    rewards = group.rewards if isinstance(group, TrajectoryGroup) else list(group)
    if len(rewards) < 2:
        raise InvalidGroupError(f"advantage normalisation needs at least 2 trajectories, got {len(rewards)}")
    r = np.asarray(rewards, dtype=float)
    mu = r.mean()
    sigma = r.std()
    if sigma == 0.0:
        return [0.0] * len(rewards)
    return ((r - mu) / (sigma + epsilon_std)).tolist()


def trajectory_baseline(traj: Trajectory | Sequence[float]) -> float:
    scores = traj.turn_scores if isinstance(traj, Trajectory) else list(traj)
    if not scores:
        raise InvalidTrajectoryError("trajectory has no turn scores")
    return math.fsum(scores) / len(scores)


def hrr_reshape(
    group: TrajectoryGroup,
    w: float = DEFAULT_W,
    epsilon_std: float = DEFAULT_EPSILON_STD,
) -> AdvantageReport:
    """Turn-level advantages A_ij = A_i + w * (q_ij - mean_j q_ij).

    The deviation term sums to zero within each trajectory, so the trajectory's
    mean turn advantage is still its group-relative advantage.
    """
    if w < 0:
        raise ValueError("reshaping weight w must be non-negative")
    per_traj = grpo_advantages(group, epsilon_std)
    baselines = []
    per_turn = []
    for adv, traj in zip(per_traj, group.trajectories):
        qbar = trajectory_baseline(traj)
        baselines.append(qbar)
        per_turn.append([adv + w * (q - qbar) for q in traj.turn_scores])
    return AdvantageReport(
        query_id=group.query_id,
        trajectory_ids=[t.trajectory_id for t in group.trajectories],
        per_trajectory=per_traj,
        per_turn=per_turn,
        baseline=baselines,
        reshaping_weight=w,
    )


# -- surrogate objective -----------------------------------------------------


@dataclass(frozen=True)
class TurnTokens:
    old_logprobs: tuple[float, ...]
    new_logprobs: tuple[float, ...]
    ref_logprobs: tuple[float, ...]

    def __post_init__(self):
        n = len(self.old_logprobs)
        if n < 1 or len(self.new_logprobs) != n or len(self.ref_logprobs) != n:
            raise AlignmentError("old/new/ref log-prob lists must have equal length >= 1")


@dataclass
class TokenBatch:
    """Per-trajectory, per-turn token log-probabilities, keyed by trajectory id."""

    turns: dict[str, list[TurnTokens]]


def kl_estimate(new_logprob, ref_logprob):
    """Per-token unbiased KL(pi || pi_ref) estimator exp(d) - d - 1 with d = ref - new."""
    d = np.asarray(ref_logprob, dtype=float) - np.asarray(new_logprob, dtype=float)
    return np.exp(d) - d - 1.0


def clipped_term(ratio, advantage, clip_epsilon: float = DEFAULT_CLIP_EPSILON):
    ratio = np.asarray(ratio, dtype=float)
    return np.minimum(ratio * advantage, np.clip(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon) * advantage)


def surrogate_objective(
    batch: TokenBatch,
    advantages: AdvantageReport,
    clip_epsilon: float = DEFAULT_CLIP_EPSILON,
    beta_kl: float = DEFAULT_BETA_KL,
) -> float:
    """Clipped policy-gradient objective averaged over the group.

    Each trajectory's token sum is normalised by its total token count over
    all turns; the KL penalty sits inside the same per-token sum.
    """
    if not 0.0 < clip_epsilon < 1.0:
        raise ValueError("clip_epsilon must lie in (0, 1)")
    total = 0.0
    for traj_id, turn_advs in zip(advantages.trajectory_ids, advantages.per_turn):
        turns = batch.turns.get(traj_id)
        if turns is None:
            raise AlignmentError(f"no token batch for trajectory {traj_id!r}")
        if len(turns) != len(turn_advs):
            raise AlignmentError(
                f"trajectory {traj_id!r}: {len(turns)} token turns vs {len(turn_advs)} advantage turns"
            )
        n_tokens = 0
        acc = 0.0
        for tok, adv in zip(turns, turn_advs):
            ratio = np.exp(np.asarray(tok.new_logprobs) - np.asarray(tok.old_logprobs))
            per_token = clipped_term(ratio, adv, clip_epsilon) - beta_kl * kl_estimate(
                tok.new_logprobs, tok.ref_logprobs
            )
            acc += float(per_token.sum())
            n_tokens += len(tok.old_logprobs)
        total += acc / n_tokens
    return total / len(advantages.trajectory_ids)
