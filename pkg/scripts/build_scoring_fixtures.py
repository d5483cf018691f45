#!/usr/bin/env python3
"""Regenerate the 30-record scoring fixture and its oracle-derived expected values.

Writes:
  tests/fixtures/scoring_records.jsonl   input records
  tests/fixtures/scoring_oracle.jsonl    input hash + five scores at full precision
  tests/golden/score_output.jsonl        the same scores as `compcredit score` prints them

Expected values come from tests/oracle_scoring.py only; the package is never imported.
"""

import hashlib
import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracle_scoring import oracle_scores, read_stopwords  # noqa: E402

WORDS = (
    "tower iron lattice engineer paris exhibition visitors summit platform elevator "
    "gustave eiffel construction rivets girders paint height metres century beacon "
    "antenna radio broadcast restaurant tourists stairs structure wind design"
).split()


def sentence(rng, n_words, end="."):
    words = [rng.choice(WORDS) for _ in range(n_words)]
    words[0] = words[0].capitalize()
    return " ".join(words) + end


def text_of_length(rng, target, words_per_sentence=12, end="."):
    parts, total = [], 0
    while total < target:
        s = sentence(rng, words_per_sentence, end)
        parts.append(s)
        total += len(s) + 1
    text = " ".join(parts)
    return text[:target] if len(text) > target else text


ORIGINAL = (
    "The Eiffel Tower is a wrought iron lattice tower in Paris. It was designed by the engineering "
    "company of Gustave Eiffel and built for the 1889 World's Fair. The tower is 330 metres tall and "
    "was the tallest structure in the world for forty-one years. Visitors climb stairs or ride "
    "elevators to three platforms, and the summit hosts radio antennas. Painting the tower takes "
    "sixty tonnes of paint every seven years. "
) * 6


def build_records():
    rng = random.Random(20240917)
    q = "Who designed the Eiffel Tower in Paris?"
    recs = []

    def add(query, original, compressed, level):
        recs.append({"query": query, "original": original, "compressed": compressed, "level": level})

    # ratio branches at level 3 (1000-2000 chars)
    add(q, ORIGINAL, text_of_length(rng, 1500), 3)
    add(q, ORIGINAL, text_of_length(rng, 500), 3)
    add(q, ORIGINAL, text_of_length(rng, 2500), 3)
    add(q, ORIGINAL, text_of_length(rng, 6000), 3)
    add(q, ORIGINAL, text_of_length(rng, 1000), 3)
    add(q, ORIGINAL, text_of_length(rng, 3000), 3)
    # degenerate outputs
    add(q, ORIGINAL, "", 2)
    add(q, ORIGINAL, "tower designed by gustave eiffel for paris fair in iron lattice", 1)
    add(q, ORIGINAL, "   ...   ", 1)
    add(q, ORIGINAL, sentence(rng, 25), 3)
    add(q, ORIGINAL, sentence(rng, 25), 1)
    # information retention paths
    add("What colour is the river Seine at night?", ORIGINAL, "The tower is iron. Paris hosts it.", 1)
    add("Describe quantum chromodynamics briefly", "Gluons bind quarks. Colour charge is conserved.",
        "Gluons bind quarks.", 1)
    add("eiffel paris gustave", "A short note about towers.", "Gustave Eiffel built it in Paris. It is tall.", 1)
    add("EIFFEL Tower PARIS", ORIGINAL, "The eiffel tower stands in paris. Gustave designed it! Visitors love it?", 1)
    add(q, ORIGINAL, ORIGINAL, 5)
    # word/sentence structure branches
    add(q, ORIGINAL, " ".join(sentence(rng, 3) for _ in range(30)), 1)
    add(q, ORIGINAL, " ".join(sentence(rng, 5) for _ in range(26)), 1)
    add(q, ORIGINAL, " ".join(sentence(rng, 40) for _ in range(4)), 1)
    add(q, ORIGINAL, text_of_length(rng, 7000, words_per_sentence=60), 5)
    add(q, ORIGINAL, text_of_length(rng, 5800, words_per_sentence=4), 5)
    # tokenisation edge cases
    add(q, ORIGINAL, "Gustave Eiffel's well-known tower。Paris！Iron？ Lattice", 1)
    add(q, ORIGINAL, "Tour Eiffel: conçue par Gustave Eiffel à Paris. Structure métallique élégante.", 1)
    add(q, ORIGINAL, "Line one about the tower\nline two about paris\nline three about eiffel", 2)
    # random mixes across levels
    for level in (1, 2, 3, 4, 5, 2):
        lo_hi = {1: (100, 500), 2: (500, 1000), 3: (1000, 2000), 4: (2000, 3000), 5: (3000, 6000)}[level]
        target = rng.randint(int(lo_hi[0] * 0.4), int(lo_hi[1] * 1.8))
        add(q, ORIGINAL, text_of_length(rng, target, words_per_sentence=rng.randint(3, 20)), level)
    assert len(recs) == 30, len(recs)
    return recs


def input_hash(rec):
    canonical = json.dumps(rec, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def main():
    stop = read_stopwords(ROOT / "src/compcredit/data/stopwords.txt")
    records = build_records()
    fixtures = ROOT / "tests/fixtures"
    golden = ROOT / "tests/golden"
    fixtures.mkdir(parents=True, exist_ok=True)
    golden.mkdir(parents=True, exist_ok=True)
    names = ("q_ratio", "q_level", "q_info", "q_sem", "q_com")
    with open(fixtures / "scoring_records.jsonl", "w", encoding="utf-8") as rf, open(
        fixtures / "scoring_oracle.jsonl", "w", encoding="utf-8"
    ) as of, open(golden / "score_output.jsonl", "w", encoding="utf-8") as gf:
        for rec in records:
            h = input_hash(rec)
            scores = oracle_scores(rec, stop)
            rf.write(json.dumps(rec, ensure_ascii=False) + "\n")
            of.write(json.dumps({"input_hash": h, **dict(zip(names, scores))}) + "\n")
            rounded = {n: round(v, 9) + 0.0 for n, v in zip(names, scores)}
            gf.write(json.dumps({"input_hash": h, **rounded}, ensure_ascii=False) + "\n")
    print(f"wrote {len(records)} records")


if __name__ == "__main__":
    main()
