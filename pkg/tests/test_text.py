from hypothesis import given, strategies as st

from compcredit.text import (
    default_stopwords,
    extract_keywords,
    keyword_overlap,
    load_stopwords,
    parse_stopwords,
    tokenize,
)

texts = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=200)


def test_tokenize_two_sentences():
    t = tokenize("The cat sat. The dog ran!")
    assert list(t.tokens) == ["the", "cat", "sat", "the", "dog", "ran"]
    assert t.sentences == ("The cat sat.", "The dog ran!")
    # counted by hand: 12 + 13 characters
    assert t.char_length == 25
    assert t.word_count == 6


def test_tokenize_empty():
    t = tokenize("")
    assert t.tokens == () and t.sentences == () and t.char_length == 0


def test_unterminated_segment_is_a_sentence():
    t = tokenize("word")
    assert t.tokens == ("word",) and t.sentences == ("word",) and t.char_length == 4


def test_hyphen_and_apostrophe_split_tokens():
    assert tokenize("well-known Eiffel's").tokens == ("well", "known", "eiffel", "s")


def test_full_width_terminators():
    t = tokenize("一つ目。二つ目！三つ目？ tail")
    assert len(t.sentences) == 4
    assert t.has_terminator


def test_terminator_only_segments_dropped():
    assert tokenize("... !! ?").sentences == ()
    assert tokenize("Hi!! There.").sentences == ("Hi!!", "There.")


def test_char_length_counts_characters_not_bytes():
    assert tokenize("café").char_length == 4


def test_extract_keywords_filters():
    t = tokenize("the eiffel tower is tall")
    assert extract_keywords(t, {"the", "is"}) == {"eiffel", "tower", "tall"}
    assert extract_keywords(tokenize("a an of"), set()) == frozenset()
    assert extract_keywords(tokenize("paris paris paris"), set()) == {"paris"}


def test_keyword_overlap_is_token_equality():
    assert keyword_overlap({"eiffel", "tower"}, tokenize("the eiffel tower")) == 2
    assert keyword_overlap(frozenset(), tokenize("anything")) == 0
    assert keyword_overlap({"tower"}, tokenize("towers")) == 0


def test_stopword_file_format(tmp_path):
    p = tmp_path / "stop.txt"
    p.write_text("# comment\nThe\n  and  # trailing\n\n", encoding="utf-8")
    assert load_stopwords(p) == {"the", "and"}
    assert parse_stopwords(["x # y"]) == {"x"}


def test_default_stopwords_size():
    words = default_stopwords()
    assert 140 <= len(words) <= 170
    assert all(w == w.lower() for w in words)


@given(texts)
def test_tokenize_deterministic_and_idempotent(s):
    a = tokenize(s)
    assert tokenize(a.raw) == a
    assert a.word_count == len(a.tokens)
    assert a.char_length == len(s)


@given(texts)
def test_keywords_subset_and_filtered(s):
    t = tokenize(s)
    stop = default_stopwords()
    keys = extract_keywords(t, stop)
    assert keys <= set(t.tokens)
    assert all(len(k) >= 4 and k not in stop for k in keys)


@given(texts, texts)
def test_overlap_bounds(a, b):
    keys = extract_keywords(tokenize(a), set())
    t = tokenize(b)
    n = keyword_overlap(keys, t)
    assert n <= len(keys) and n <= t.word_count


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz .!?", max_size=80))
def test_keywords_case_insensitive(s):
    stop = default_stopwords()
    assert extract_keywords(tokenize(s.upper()), stop) == extract_keywords(tokenize(s), stop)
