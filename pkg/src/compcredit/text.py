"""Deterministic text primitives shared by the scoring formulas and the simulator."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

TERMINATORS = ".!?。！？"

_TOKEN_RE = re.compile(r"[^\W_]+")
_SEGMENT_RE = re.compile(rf"[^{TERMINATORS}]+[{TERMINATORS}]*|[{TERMINATORS}]+")
_TERMINATOR_RUN_RE = re.compile(rf"[{TERMINATORS}\s]+")

MIN_KEYWORD_LENGTH = 4


@dataclass(frozen=True)
class TokenizedText:
    raw: str
    tokens: tuple[str, ...]
    sentences: tuple[str, ...]

    @property
    def char_length(self) -> int:
        return len(self.raw)

    @property
    def word_count(self) -> int:
        return len(self.tokens)

    @property
    def has_terminator(self) -> bool:
        return any(ch in TERMINATORS for ch in self.raw)


def split_sentences(text: str) -> tuple[str, ...]:
    """Split on terminator runs, keeping each terminator with its sentence.

    Segments consisting only of whitespace and terminators are dropped; a
    trailing segment without a terminator still counts as a sentence.
    """
    out = []
    for segment in _SEGMENT_RE.findall(text):
        if _TERMINATOR_RUN_RE.fullmatch(segment):
            continue
        out.append(segment.strip())
    return tuple(out)


def tokenize(text: str) -> TokenizedText:
    tokens = tuple(m.lower() for m in _TOKEN_RE.findall(text))
    return TokenizedText(raw=text, tokens=tokens, sentences=split_sentences(text))


KeywordSet = frozenset


def extract_keywords(text: TokenizedText, stopwords: frozenset[str] | set[str]) -> frozenset[str]:
    return frozenset(
        t for t in text.tokens if len(t) >= MIN_KEYWORD_LENGTH and t not in stopwords
    )


def keyword_overlap(keys: frozenset[str] | set[str], text: TokenizedText) -> int:
    """Number of keywords that occur as whole tokens of ``text``."""
    if not keys:
        return 0
    return len(keys.intersection(text.tokens))


def parse_stopwords(lines) -> frozenset[str]:
    words = set()
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return frozenset(words)


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    data = resources.files("compcredit.data").joinpath("stopwords.txt")
    return parse_stopwords(data.read_text(encoding="utf-8").splitlines())


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    if path is None:
        return default_stopwords()
    return parse_stopwords(Path(path).read_text(encoding="utf-8").splitlines())
