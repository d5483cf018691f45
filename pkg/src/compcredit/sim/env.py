"""Simulated search environment: search, open-page and finish tools over a fixed corpus."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from compcredit.text import default_stopwords, tokenize


class EpisodeTerminatedError(RuntimeError):
    pass


class NotFoundError(LookupError):
    pass


class SimConfigurationError(ValueError):
    pass


SNIPPET_CHARS = 200
TOOLS = ("search", "open_page", "finish")


@dataclass(frozen=True)
class Document:
    doc_id: str
    url: str
    title: str
    text: str
    entity_tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class QAItem:
    query_id: str
    question: str
    gold_answer: str
    gold_doc_ids: tuple[str, ...]


class Corpus:
    def __init__(self, documents: list[Document], qa_items: list[QAItem]):
        self.documents = tuple(sorted(documents, key=lambda d: d.doc_id))
        self.qa_items = tuple(qa_items)
        self.by_id = {d.doc_id: d for d in self.documents}
        if len(self.by_id) != len(self.documents):
            raise SimConfigurationError("duplicate doc_id in corpus")
        self.qa_by_id = {q.query_id: q for q in self.qa_items}
        for qa in self.qa_items:
            missing = [d for d in qa.gold_doc_ids if d not in self.by_id]
            if missing:
                raise SimConfigurationError(f"{qa.query_id}: unknown gold doc ids {missing}")
        # index once; title and body both count for retrieval
        self._doc_tokens = {d.doc_id: frozenset(tokenize(f"{d.title}. {d.text}").tokens) for d in self.documents}

    @classmethod
    def from_dict(cls, data: dict) -> "Corpus":
        docs = [
            Document(d["doc_id"], d.get("url", ""), d.get("title", ""), d["text"], tuple(d.get("entity_tags", ())))
            for d in data["documents"]
        ]
        items = [
            QAItem(q["query_id"], q["question"], q["gold_answer"], tuple(q["gold_doc_ids"]))
            for q in data["qa_items"]
        ]
        return cls(docs, items)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Corpus":
        if path is None:
            text = resources.files("compcredit.data").joinpath("fixture_corpus.json").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        return cls.from_dict(json.loads(text))

    def qa(self, query_id: str) -> QAItem:
        try:
            return self.qa_by_id[query_id]
        except KeyError:
            raise SimConfigurationError(f"unknown query id {query_id!r}") from None

    def doc_tokens(self, doc_id: str) -> frozenset[str]:
        return self._doc_tokens[doc_id]

    def distractors(self, qa: QAItem) -> list[Document]:
        gold = set(qa.gold_doc_ids)
        return [d for d in self.documents if d.doc_id not in gold]


@dataclass(frozen=True)
class SearchHit:
    doc_id: str
    url: str
    title: str
    snippet: str


@dataclass
class EnvState:
    qa: QAItem
    rng_seed: int
    noise_fraction: float = 0.0
    max_turns: int = 20
    turn_index: int = 0
    retrieved_history: list[tuple[str, str]] = field(default_factory=list)
    compressed_context: list[str] = field(default_factory=list)
    opened: list[str] = field(default_factory=list)
    search_count: int = 0
    open_count: int = 0
    finished: bool = False
    answer: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.noise_fraction <= 1.0:
            raise SimConfigurationError("noise_fraction must lie in [0, 1]")

    @property
    def retrieved_ids(self) -> list[str]:
        seen = []
        for doc_id, _ in self.retrieved_history:
            if doc_id not in seen:
                seen.append(doc_id)
        return seen


class SearchEnvironment:
    """One episode's tool surface. The corpus is shared; the state is not."""

    def __init__(
        self,
        corpus: Corpus,
        query_id: str,
        seed: int,
        noise_fraction: float = 0.0,
        max_turns: int = 20,
        strict: bool = True,
        stopwords=None,
        snippet_chars: int = SNIPPET_CHARS,
    ):
        self.corpus = corpus
        self.state = EnvState(corpus.qa(query_id), seed, noise_fraction, max_turns)
        self.strict = strict
        self.stopwords = default_stopwords() if stopwords is None else stopwords
        self.snippet_chars = snippet_chars
        self.rng = random.Random(f"env:{seed}")

    def _check_open(self):
        if self.state.finished:
            raise EpisodeTerminatedError("episode already finished")

    def rank(self, query: str) -> list[tuple[int, str]]:
        """(overlap, doc_id) for documents sharing at least one non-stopword query token."""
        q = {t for t in tokenize(query).tokens if t not in self.stopwords}
        scored = []
        for doc in self.corpus.documents:
            overlap = len(q & self.corpus.doc_tokens(doc.doc_id))
            if overlap:
                scored.append((overlap, doc.doc_id))
        scored.sort(key=lambda s: (-s[0], s[1]))
        return scored

    def search(self, query: str, top_k: int = 20) -> list[SearchHit]:
        """Top-k overlap ranking; each slot is swapped for a distractor with probability noise_fraction.

        Every slot consumes the same random draws whatever the noise level, so
        runs with a shared seed differ only in which slots get replaced.
        """
        self._check_open()
        self.state.search_count += 1
        ranked = [doc_id for _, doc_id in self.rank(query)[:top_k]]
        pool = self.corpus.distractors(self.state.qa)
        p = self.state.noise_fraction
        hits = []
        for doc_id in ranked:
            u = self.rng.random()
            replacement = pool[self.rng.randrange(len(pool))] if pool else None
            if replacement is not None and u < p:
                doc_id = replacement.doc_id
            doc = self.corpus.by_id[doc_id]
            hits.append(SearchHit(doc.doc_id, doc.url, doc.title, doc.text[: self.snippet_chars]))
        for h in hits:
            self.state.retrieved_history.append((h.doc_id, h.snippet))
        return hits

    def open_page(self, doc_id: str) -> str:
        self._check_open()
        if doc_id not in self.corpus.by_id:
            raise NotFoundError(f"unknown document {doc_id!r}")
        if self.strict and doc_id not in self.state.retrieved_ids:
            raise NotFoundError(f"document {doc_id!r} was not returned by any search")
        self.state.open_count += 1
        self.state.opened.append(doc_id)
        return self.corpus.by_id[doc_id].text

    def finish(self, answer: str) -> None:
        self._check_open()
        self.state.finished = True
        self.state.answer = answer
