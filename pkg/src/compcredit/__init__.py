"""Compression-quality scoring and turn-level credit assignment for multi-turn search agents."""

from compcredit.advantage import (
    AdvantageReport,
    TokenBatch,
    Trajectory,
    TrajectoryGroup,
    Turn,
    TurnTokens,
    grpo_advantages,
    hrr_reshape,
    surrogate_objective,
    trajectory_baseline,
)
from compcredit.scoring import (
    DEFAULT_LEVELS,
    CompressionLevel,
    CompressionRecord,
    QualityScore,
    ScoringWeights,
    score_composite,
)
from compcredit.text import extract_keywords, keyword_overlap, tokenize

__version__ = "0.1.0"
