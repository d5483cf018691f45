"""Episode and group rollouts, plus behaviour statistics over finished trajectories."""

from __future__ import annotations

import hashlib
import string
from dataclasses import dataclass

from compcredit.advantage import Trajectory, TrajectoryGroup, Turn
from compcredit.scoring import DEFAULT_LEVELS, CompressionRecord, ScoringWeights, score_composite
from compcredit.sim.env import Corpus, SearchEnvironment, SimConfigurationError
from compcredit.sim.policies import Observation, make_policy
from compcredit.text import default_stopwords, tokenize


@dataclass(frozen=True)
class EpisodeSettings:
    max_turns: int = 20
    top_k: int = 20
    noise_fraction: float = 0.0
    strict: bool = True
    level_table: tuple = DEFAULT_LEVELS
    weights: ScoringWeights = ScoringWeights()
    stopwords: frozenset | None = None


def normalize_answer(text: str) -> str:
    return text.strip().lower().strip(string.punctuation + " \t\n").strip()


def exact_match(prediction: str, gold: str) -> bool:
    return normalize_answer(prediction) == normalize_answer(gold)


def derive_seed(master_seed: int, query_id: str, index: int) -> int:
    digest = hashlib.sha256(f"{master_seed}:{query_id}:{index}".encode()).digest()
    return int.from_bytes(digest[:4], "big")


def _observation_text(kind: str, result, env: SearchEnvironment, answer: str) -> str:
    if kind == "search":
        if not result:
            return "No results."
        return "\n".join(f"{h.title}. {h.snippet}" for h in result)
    if kind == "open_page":
        return result
    context = " ".join(env.state.compressed_context)
    return f"{context} Final answer: {answer}.".strip()


def run_episode(
    corpus: Corpus,
    query_id: str,
    policy: str,
    seed: int,
    settings: EpisodeSettings = EpisodeSettings(),
    trajectory_id: str | None = None,
) -> Trajectory:
    """Run one scripted episode; every tool call is followed by a scored compression."""
    if settings.max_turns < 1:
        raise SimConfigurationError("max_turns must be at least 1")
    stopwords = default_stopwords() if settings.stopwords is None else settings.stopwords
    qa = corpus.qa(query_id)
    agent = make_policy(policy, qa, corpus, seed, stopwords)
    env = SearchEnvironment(
        corpus,
        query_id,
        seed,
        noise_fraction=settings.noise_fraction,
        max_turns=settings.max_turns,
        strict=settings.strict,
        stopwords=stopwords,
    )
    obs = Observation(qa.question, 0, [], [], {}, "")
    turns = []
    while not env.state.finished and env.state.turn_index < settings.max_turns:
        call = agent.act(obs)
        hits = obs.hits
        if call.kind == "search":
            result = hits = env.search(call.payload, settings.top_k)
        elif call.kind == "open_page":
            result = env.open_page(call.payload)
            obs.opened[call.payload] = result
        elif call.kind == "finish":
            result = env.finish(call.payload)
        else:
            raise SimConfigurationError(f"policy {policy!r} emitted unknown tool {call.kind!r}")

        text = _observation_text(call.kind, result, env, call.payload)
        level, summary = agent.compress(text, settings.level_table)
        record = CompressionRecord(qa.question, text, summary, level)
        score = score_composite(record, settings.weights, stopwords)
        env.state.compressed_context.append(summary)
        turns.append(
            Turn(
                turn_index=env.state.turn_index,
                q_com=score.q_com,
                level=level.level,
                token_count=tokenize(summary).word_count + tokenize(call.payload).word_count,
                tool=call.kind,
                payload=call.payload,
                record=record,
            )
        )
        env.state.turn_index += 1
        obs = Observation(
            qa.question, env.state.turn_index, hits, env.state.retrieved_ids, obs.opened, text
        )

    finished = env.state.finished
    reward = 1.0 if finished and exact_match(env.state.answer or "", qa.gold_answer) else 0.0
    return Trajectory(
        trajectory_id=trajectory_id or f"{query_id}/{policy}/{seed}",
        final_reward=reward,
        turns=turns,
        finished=finished,
    )


def run_group(
    corpus: Corpus,
    query_id: str,
    policies: str | list[str],
    group_size: int | None = None,
    master_seed: int = 0,
    settings: EpisodeSettings = EpisodeSettings(),
    seeds: list[int] | None = None,
) -> TrajectoryGroup:
    """G independent episodes for one query.

    ``policies`` is either one policy name used for every rollout or one name
    per rollout. Seeds are derived from the master seed unless given.
    """
    if isinstance(policies, str):
        if group_size is None:
            raise SimConfigurationError("group_size is required with a single policy")
        policies = [policies] * group_size
    group_size = len(policies) if group_size is None else group_size
    if len(policies) != group_size:
        raise SimConfigurationError("one policy per rollout is required")
    if group_size < 2:
        raise SimConfigurationError("a group needs at least 2 rollouts")
    if seeds is None:
        seeds = [derive_seed(master_seed, query_id, i) for i in range(group_size)]
    elif len(seeds) != group_size:
        raise SimConfigurationError("one seed per rollout is required")
    trajs = [
        run_episode(corpus, query_id, pol, s, settings, trajectory_id=f"{query_id}/{i}")
        for i, (pol, s) in enumerate(zip(policies, seeds))
    ]
    return TrajectoryGroup(query_id, trajs)


@dataclass(frozen=True)
class BehaviorStats:
    avg_turns: float
    avg_search_per_query: float
    avg_open_per_query: float
    finish_rate: float


def behavior_stats(trajectories: list[Trajectory]) -> BehaviorStats:
    if not trajectories:
        raise ValueError("behavior_stats needs at least one trajectory")
    n = len(trajectories)
    return BehaviorStats(
        avg_turns=sum(len(t.turns) for t in trajectories) / n,
        avg_search_per_query=sum(t.count_tool("search") for t in trajectories) / n,
        avg_open_per_query=sum(t.count_tool("open_page") for t in trajectories) / n,
        finish_rate=sum(1 for t in trajectories if t.count_tool("finish")) / n,
    )
