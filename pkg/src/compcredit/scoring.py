"""Compression-quality sub-scores and their weighted composite."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from compcredit.text import (
    TokenizedText,
    default_stopwords,
    extract_keywords,
    keyword_overlap,
    tokenize,
)


@dataclass(frozen=True)
class CompressionLevel:
    level: int
    char_low: int
    char_high: int
    word_min: int
    word_max: int
    sentence_max: int

    def __post_init__(self):
        if not (0 < self.char_low < self.char_high):
            raise ValueError(f"level {self.level}: need 0 < char_low < char_high")
        if not (0 < self.word_min < self.word_max):
            raise ValueError(f"level {self.level}: need 0 < word_min < word_max")
        if self.sentence_max < 1:
            raise ValueError(f"level {self.level}: sentence_max must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


# Word bounds assume roughly five characters per word.
DEFAULT_LEVELS: tuple[CompressionLevel, ...] = (
    CompressionLevel(1, 100, 500, 20, 100, 3),
    CompressionLevel(2, 500, 1000, 100, 200, 6),
    CompressionLevel(3, 1000, 2000, 200, 400, 12),
    CompressionLevel(4, 2000, 3000, 400, 600, 20),
    CompressionLevel(5, 3000, 6000, 600, 1200, 40),
)


def level_by_number(level: int, table=DEFAULT_LEVELS) -> CompressionLevel:
    for entry in table:
        if entry.level == level:
            return entry
    raise KeyError(f"no compression level {level} in table")


@dataclass(frozen=True)
class ScoringWeights:
    alpha_ratio: float = 0.3
    alpha_level: float = 0.1
    alpha_info: float = 0.4
    alpha_sem: float = 0.2
    lambda_key: float = 0.7
    lambda_gen: float = 0.3
    epsilon: float = 1e-6

    def __post_init__(self):
        alphas = (self.alpha_ratio, self.alpha_level, self.alpha_info, self.alpha_sem)
        if any(a < 0 for a in alphas) or abs(math.fsum(alphas) - 1.0) > 1e-9:
            raise ValueError(f"alpha weights must be non-negative and sum to 1, got {alphas}")
        if self.lambda_key < 0 or self.lambda_gen < 0 or abs(self.lambda_key + self.lambda_gen - 1.0) > 1e-9:
            raise ValueError("lambda_key + lambda_gen must equal 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class CompressionRecord:
    query: str
    original: str
    compressed: str
    level: CompressionLevel

    def __post_init__(self):
        if not self.original:
            raise ValueError("original text must be non-empty")


@dataclass(frozen=True)
class QualityScore:
    q_ratio: float
    q_level: float
    q_info: float
    q_sem: float
    q_com: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.q_ratio, self.q_level, self.q_info, self.q_sem, self.q_com)


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


# -- length / structure ------------------------------------------------------


def ratio_score(length: int, char_low: float, char_high: float) -> float:
    if char_low <= length <= char_high:
        return 1.0
    if length < char_low:
        return 0.8 * length / char_low
    if length <= 1.5 * char_high:
        return 1.0 - 0.3 * (length - char_high) / (0.5 * char_high)
    return 0.3 * (1.5 * char_high) / length


def word_score(words: int, word_min: float, word_max: float) -> float:
    if word_min <= words <= word_max:
        return 1.0
    if words < word_min:
        return words / word_min
    if words <= 1.5 * word_max:
        return 0.7
    return 0.3


def sentence_score(sentences: int, sentence_max: float) -> float:
    # No sentences at all sits at the floor instead of dividing by zero.
    if sentences == 0:
        return 0.3
    return min(1.0, max(0.3, sentence_max / sentences))


def score_ratio(record: CompressionRecord, compressed: TokenizedText | None = None) -> float:
    y = compressed if compressed is not None else tokenize(record.compressed)
    return ratio_score(y.char_length, record.level.char_low, record.level.char_high)


def score_level(record: CompressionRecord, compressed: TokenizedText | None = None) -> float:
    y = compressed if compressed is not None else tokenize(record.compressed)
    lv = record.level
    s_word = word_score(y.word_count, lv.word_min, lv.word_max)
    s_sent = sentence_score(len(y.sentences), lv.sentence_max)
    return 0.7 * s_word + 0.3 * s_sent


# -- semantic ----------------------------------------------------------------


def score_sem(record: CompressionRecord, compressed: TokenizedText | None = None) -> float:
    """Multiplicative penalties for fragmentary structure, length and punctuation."""
    y = compressed if compressed is not None else tokenize(record.compressed)
    n_sent = len(y.sentences)
    if n_sent == 0:
        p_str = 0.3
    elif n_sent == 1 and record.level.level != 1:
        p_str = 0.7
    else:
        p_str = 1.0

    if y.word_count < 20:
        p_len = 0.5
    elif y.word_count > 1200:
        p_len = 0.9
    else:
        p_len = 1.0

    p_punc = 1.0 if y.has_terminator else 0.8
    return 1.0 * p_str * p_len * p_punc


def info_components(
    record: CompressionRecord,
    weights: ScoringWeights = ScoringWeights(),
    stopwords=None,
    compressed: TokenizedText | None = None,
) -> dict:
    """Raw quantities behind the information-retention score."""
    stopwords = default_stopwords() if stopwords is None else stopwords
    y = compressed if compressed is not None else tokenize(record.compressed)
    x = tokenize(record.original)
    k_q = extract_keywords(tokenize(record.query), stopwords)
    k_x = extract_keywords(x, stopwords)
    eps = weights.epsilon

    q_in_x = keyword_overlap(k_q, x)
    q_in_y = keyword_overlap(k_q, y)
    s_key = q_in_y / (q_in_x + eps)
    s_gen = 0.6 * keyword_overlap(k_x, y) / (len(k_x) + eps) + 0.4 * min(
        1.0, 2.0 * y.char_length / x.char_length
    )
    return {
        "query_keywords_in_original": q_in_x,
        "query_keywords_in_compressed": q_in_y,
        "s_key": s_key,
        "s_gen": s_gen,
    }


def score_info(
    record: CompressionRecord,
    weights: ScoringWeights = ScoringWeights(),
    stopwords=None,
    compressed: TokenizedText | None = None,
) -> float:
    c = info_components(record, weights, stopwords, compressed)
    if c["query_keywords_in_original"] == 0:
        return _clamp(c["s_gen"])
    return _clamp(weights.lambda_key * c["s_key"] + weights.lambda_gen * c["s_gen"])


def combine(
    q_ratio: float, q_level: float, q_info: float, q_sem: float, weights: ScoringWeights = ScoringWeights()
) -> QualityScore:
    q_com = (
        weights.alpha_ratio * q_ratio
        + weights.alpha_level * q_level
        + weights.alpha_info * q_info
        + weights.alpha_sem * q_sem
    )
    return QualityScore(q_ratio, q_level, q_info, q_sem, _clamp(q_com))


def score_composite(
    record: CompressionRecord, weights: ScoringWeights = ScoringWeights(), stopwords=None
) -> QualityScore:
    y = tokenize(record.compressed)
    return combine(
        score_ratio(record, y),
        score_level(record, y),
        score_info(record, weights, stopwords, y),
        score_sem(record, y),
        weights,
    )
