from compcredit.sim.env import (
    Corpus,
    Document,
    EnvState,
    EpisodeTerminatedError,
    NotFoundError,
    QAItem,
    SearchEnvironment,
    SearchHit,
    SimConfigurationError,
)
from compcredit.sim.policies import POLICIES, ToolCall, extractive_summary
from compcredit.sim.rollout import (
    BehaviorStats,
    EpisodeSettings,
    behavior_stats,
    derive_seed,
    exact_match,
    normalize_answer,
    run_episode,
    run_group,
)
