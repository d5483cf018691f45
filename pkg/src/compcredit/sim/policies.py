"""Scripted policies and the extractive compressor they use on every turn."""

from __future__ import annotations

import random
from dataclasses import dataclass

from compcredit.granularity import select_level
from compcredit.scoring import CompressionLevel
from compcredit.text import extract_keywords, keyword_overlap, tokenize


@dataclass(frozen=True)
class ToolCall:
    kind: str
    payload: str


@dataclass
class Observation:
    """What a policy sees before choosing its next call."""

    question: str
    turn_index: int
    hits: list  # SearchHit from the latest search
    retrieved_ids: list[str]
    opened: dict  # doc_id -> full text
    last_text: str


# -- compression -------------------------------------------------------------


def relevance(question: str, text: str, stopwords) -> float:
    keys = extract_keywords(tokenize(question), stopwords)
    if not keys:
        return 0.0
    return keyword_overlap(keys, tokenize(text)) / len(keys)


def choose_level(question: str, text: str, level_table, stopwords) -> CompressionLevel:
    """Relevance band picks the level, capped at the finest level the text can fill."""
    level = select_level(relevance(question, text, stopwords), level_table)
    idx = list(level_table).index(level)
    while idx > 0 and level_table[idx].char_low > len(text):
        idx -= 1
    return level_table[idx]


def extractive_summary(question: str, text: str, level: CompressionLevel, stopwords) -> str:
    """Highest-overlap sentences that fit in the level's character ceiling, in source order."""
    sentences = tokenize(text).sentences
    if not sentences:
        return ""
    keys = extract_keywords(tokenize(question), stopwords)
    scored = sorted(
        range(len(sentences)),
        key=lambda i: (-keyword_overlap(keys, tokenize(sentences[i])), i),
    )
    chosen, used = [], 0
    for i in scored:
        extra = len(sentences[i]) + (1 if chosen else 0)
        if used + extra <= level.char_high:
            chosen.append(i)
            used += extra
    if not chosen:
        return sentences[scored[0]][: level.char_high]
    return " ".join(sentences[i] for i in sorted(chosen))


# -- policies ----------------------------------------------------------------


class Policy:
    name = "base"

    def __init__(self, qa, corpus, rng: random.Random, stopwords):
        self.qa = qa
        self.corpus = corpus
        self.rng = rng
        self.stopwords = stopwords

    def act(self, obs: Observation) -> ToolCall:
        raise NotImplementedError

    def compress(self, text: str, level_table) -> tuple[CompressionLevel, str]:
        level = choose_level(self.qa.question, text, level_table, self.stopwords)
        return level, extractive_summary(self.qa.question, text, level, self.stopwords)

    def read_answer(self, text: str) -> str | None:
        """Perfect reader: the gold answer is recoverable iff it is written in ``text``."""
        if self.qa.gold_answer.lower() in text.lower():
            return self.qa.gold_answer
        return None


class NullPolicy(Policy):
    """Gives up immediately."""

    name = "null"

    def act(self, obs):
        return ToolCall("finish", "")


class OraclePolicy(Policy):
    """Searches the answer document's key entity, opens it, answers from what it read.

    If the gold document is missing from the results it opens the top hit
    instead and answers with that page's title.
    """

    name = "oracle"

    def _target(self):
        for doc_id in self.qa.gold_doc_ids:
            if self.read_answer(self.corpus.by_id[doc_id].text):
                return self.corpus.by_id[doc_id]
        return self.corpus.by_id[self.qa.gold_doc_ids[0]]

    def act(self, obs):
        if obs.turn_index == 0:
            target = self._target()
            tag = target.entity_tags[0] if target.entity_tags else target.title
            return ToolCall("search", tag)
        if not obs.opened:
            ids = [h.doc_id for h in obs.hits]
            gold = [d for d in self.qa.gold_doc_ids if d in ids]
            target = self._target().doc_id
            if target in ids:
                return ToolCall("open_page", target)
            if gold:
                return ToolCall("open_page", gold[0])
            if ids:
                return ToolCall("open_page", ids[0])
            return ToolCall("finish", "")
        for doc_id, text in obs.opened.items():
            ans = self.read_answer(text)
            if ans:
                return ToolCall("finish", ans)
        first = next(iter(obs.opened))
        return ToolCall("finish", self.corpus.by_id[first].title)


class ExplorerPolicy(Policy):
    """Stochastic searcher: reformulates queries, opens hits with a top-rank bias,
    and sometimes gives up or misreads a page that holds the answer."""

    name = "explorer"
    open_prob = 0.7
    read_prob = 0.8
    give_up_prob = 0.1
    drop_keyword_prob = 0.3
    level_jitter_prob = 0.25

    def compress(self, text, level_table):
        # occasionally commits to a granularity the text cannot support
        if self.rng.random() < self.level_jitter_prob:
            level = level_table[self.rng.randrange(len(level_table))]
            return level, extractive_summary(self.qa.question, text, level, self.stopwords)
        return super().compress(text, level_table)

    def _query(self, first: bool) -> str:
        keys = sorted(extract_keywords(tokenize(self.qa.question), self.stopwords))
        if first and self.rng.random() >= self.drop_keyword_prob:
            return self.qa.question
        kept = [k for k in keys if self.rng.random() >= 0.5]
        return " ".join(kept or keys[:1])

    def act(self, obs):
        if obs.turn_index == 0:
            return ToolCall("search", self._query(first=True))
        if obs.opened:
            last_id = next(reversed(obs.opened))
            ans = self.read_answer(obs.opened[last_id])
            if ans and obs.last_text == obs.opened[last_id] and self.rng.random() < self.read_prob:
                return ToolCall("finish", ans)
        if self.rng.random() < self.give_up_prob:
            guess = self.corpus.by_id[obs.retrieved_ids[0]].title if obs.retrieved_ids else ""
            return ToolCall("finish", guess)
        unopened = [h.doc_id for h in obs.hits if h.doc_id not in obs.opened]
        if unopened and self.rng.random() < self.open_prob:
            for doc_id in unopened:
                if self.rng.random() < 0.5:
                    return ToolCall("open_page", doc_id)
            return ToolCall("open_page", unopened[-1])
        return ToolCall("search", self._query(first=False))


POLICIES = {cls.name: cls for cls in (NullPolicy, OraclePolicy, ExplorerPolicy)}


def make_policy(name: str, qa, corpus, seed: int, stopwords) -> Policy:
    from compcredit.sim.env import SimConfigurationError

    try:
        cls = POLICIES[name]
    except KeyError:
        raise SimConfigurationError(f"unknown policy {name!r}; known: {sorted(POLICIES)}") from None
    return cls(qa, corpus, random.Random(f"policy:{seed}"), stopwords)
