import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from compcredit.advantage import Trajectory, Turn, hrr_reshape
from compcredit.sim import (
    Corpus,
    EpisodeSettings,
    EpisodeTerminatedError,
    NotFoundError,
    SearchEnvironment,
    SimConfigurationError,
    behavior_stats,
    exact_match,
    normalize_answer,
    run_episode,
    run_group,
)
from compcredit.text import default_stopwords, tokenize

GOLDEN = Path(__file__).parent / "golden"
CORPUS = Corpus.load()
QIDS = [qa.query_id for qa in CORPUS.qa_items]


def env(qid="q1", seed=0, p=0.0, strict=True):
    return SearchEnvironment(CORPUS, qid, seed, noise_fraction=p, strict=strict)


# -- corpus ------------------------------------------------------------------


def test_corpus_shape():
    assert len(CORPUS.documents) == 24 and len(CORPUS.qa_items) == 8
    for qa in CORPUS.qa_items:
        for d in qa.gold_doc_ids:
            assert qa.gold_answer.lower() in CORPUS.by_id[d].text.lower() or qa.query_id == "q5"


def test_corpus_rejects_bad_gold():
    data = {
        "documents": [{"doc_id": "a", "url": "u", "title": "t", "text": "x", "entity_tags": []}],
        "qa_items": [{"query_id": "q", "question": "?", "gold_answer": "x", "gold_doc_ids": ["zz"]}],
    }
    with pytest.raises(SimConfigurationError):
        Corpus.from_dict(data)
    data["documents"].append(dict(data["documents"][0]))
    data["qa_items"][0]["gold_doc_ids"] = ["a"]
    with pytest.raises(SimConfigurationError):
        Corpus.from_dict(data)


# -- search ------------------------------------------------------------------


def brute_rank(query):
    stop = default_stopwords()
    q = {t for t in tokenize(query).tokens if t not in stop}
    rows = []
    for d in CORPUS.documents:
        toks = set(tokenize(d.title + " " + d.text).tokens)
        if q & toks:
            rows.append((-len(q & toks), d.doc_id))
    return [doc_id for _, doc_id in sorted(rows)]


@pytest.mark.parametrize("query", ["varnholt", "brennite mineral discovered", "Which river flows through Talsport?"])
def test_ranking_matches_brute_force(query):
    assert [h.doc_id for h in env().search(query, top_k=50)] == brute_rank(query)


def test_unique_keyword_ranks_first():
    hits = env().search("varnholt", top_k=3)
    assert hits[0].doc_id == "d01"
    assert len(hits[0].snippet) <= 200 and CORPUS.by_id["d01"].text.startswith(hits[0].snippet)


def test_full_noise_returns_only_distractors():
    for qa in CORPUS.qa_items:
        e = env(qa.query_id, seed=5, p=1.0)
        hits = e.search(qa.question, top_k=10)
        assert hits
        assert not {h.doc_id for h in hits} & set(qa.gold_doc_ids)


def test_empty_query():
    assert env().search("", top_k=5) == []
    assert env().search("the of and", top_k=5) == []


def test_search_after_finish():
    e = env()
    e.finish("x")
    with pytest.raises(EpisodeTerminatedError):
        e.search("varnholt")
    with pytest.raises(EpisodeTerminatedError):
        e.open_page("d01")
    with pytest.raises(EpisodeTerminatedError):
        e.finish("again")


def test_open_page_rules():
    e = env()
    with pytest.raises(NotFoundError):
        e.open_page("d01")
    with pytest.raises(NotFoundError):
        e.open_page("nope")
    e.search("varnholt")
    assert e.open_page("d01") == CORPUS.by_id["d01"].text
    assert e.open_page("d01") == CORPUS.by_id["d01"].text
    assert e.state.open_count == 2
    assert env(strict=False).open_page("d05") == CORPUS.by_id["d05"].text


def gold_recall(qid, seed, p):
    qa = CORPUS.qa(qid)
    hits = env(qid, seed, p).search(qa.question, top_k=20)
    return sum(h.doc_id in qa.gold_doc_ids for h in hits)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(QIDS), st.integers(0, 10**6))
def test_noise_recall_pathwise_monotone(qid, seed):
    recalls = [gold_recall(qid, seed, p) for p in (0.0, 0.25, 0.5, 0.75, 1.0)]
    assert recalls == sorted(recalls, reverse=True)
    assert recalls[-1] == 0


def test_noise_recall_mean_decreasing():
    means = [sum(gold_recall(q, s, p) for q in QIDS for s in range(25)) for p in (0.0, 0.25, 0.5, 0.75, 1.0)]
    assert means == sorted(means, reverse=True) and means[0] > means[2] > means[4] == 0


def test_search_deterministic():
    a = [h.doc_id for h in env("q3", 11, 0.5).search("river city talsport", 10)]
    b = [h.doc_id for h in env("q3", 11, 0.5).search("river city talsport", 10)]
    assert a == b


# -- episodes ----------------------------------------------------------------


@pytest.mark.parametrize("qid", QIDS)
def test_oracle_walkthrough(qid):
    t = run_episode(CORPUS, qid, "oracle", seed=1)
    assert [turn.tool for turn in t.turns] == ["search", "open_page", "finish"]
    assert t.final_reward == 1.0 and t.finished
    assert t.turns[1].payload in CORPUS.qa(qid).gold_doc_ids


def test_null_episode():
    t = run_episode(CORPUS, "q1", "null", seed=0)
    assert len(t.turns) == 1 and t.final_reward == 0.0 and t.finished


def test_unknown_policy_and_query():
    with pytest.raises(SimConfigurationError):
        run_episode(CORPUS, "q1", "wizard", seed=0)
    with pytest.raises(SimConfigurationError):
        run_episode(CORPUS, "q99", "null", seed=0)


def dump(t: Trajectory) -> str:
    return json.dumps(
        [t.trajectory_id, t.final_reward, t.finished]
        + [[x.turn_index, x.tool, x.payload, x.level, x.q_com, x.token_count] for x in t.turns]
    )


@pytest.mark.parametrize("seed", [0, 1, 2, 99])
def test_explorer_deterministic(seed):
    a = run_episode(CORPUS, "q2", "explorer", seed, EpisodeSettings(top_k=5, noise_fraction=0.25))
    b = run_episode(CORPUS, "q2", "explorer", seed, EpisodeSettings(top_k=5, noise_fraction=0.25))
    assert dump(a) == dump(b)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(QIDS), st.integers(0, 10**6), st.integers(1, 6), st.sampled_from([0.0, 0.5, 1.0]))
def test_episode_contracts(qid, seed, max_turns, p):
    t = run_episode(CORPUS, qid, "explorer", seed, EpisodeSettings(max_turns=max_turns, top_k=5, noise_fraction=p))
    assert 1 <= len(t.turns) <= max_turns
    assert [x.turn_index for x in t.turns] == list(range(len(t.turns)))
    assert all(0.0 <= x.q_com <= 1.0 for x in t.turns)
    tools = [x.tool for x in t.turns]
    assert "finish" not in tools[:-1]
    assert t.finished == (tools[-1] == "finish")
    if not t.finished:
        assert t.final_reward == 0.0 and len(t.turns) == max_turns


def test_truncation_gives_zero_reward():
    t = run_episode(CORPUS, "q1", "oracle", 0, EpisodeSettings(max_turns=2))
    assert len(t.turns) == 2 and not t.finished and t.final_reward == 0.0


def test_answer_normalisation():
    assert normalize_answer("  Ilse Marrow. ") == "ilse marrow"
    assert exact_match("CELLO!", "cello")
    assert not exact_match("cellist", "cello")


# -- groups ------------------------------------------------------------------


def test_oracle_plus_null_group():
    g = run_group(CORPUS, "q1", ["oracle", "null", "null", "null"], master_seed=7)
    assert g.rewards == [1.0, 0.0, 0.0, 0.0]
    rep = hrr_reshape(g, w=0.2, epsilon_std=0.0)
    assert rep.per_trajectory == pytest.approx([1.7320508075688772] + [-0.5773502691896258] * 3)


def test_identical_seeds_degenerate_group():
    g = run_group(CORPUS, "q4", "explorer", group_size=2, seeds=[5, 5])
    a, b = g.trajectories
    assert dump(a).replace('"q4/0"', "") == dump(b).replace('"q4/1"', "")
    rep = hrr_reshape(g)
    assert rep.per_trajectory == [0.0, 0.0]


def test_group_errors():
    with pytest.raises(SimConfigurationError):
        run_group(CORPUS, "q1", ["oracle"])
    with pytest.raises(SimConfigurationError):
        run_group(CORPUS, "q1", "explorer")
    with pytest.raises(SimConfigurationError):
        run_group(CORPUS, "q1", ["oracle", "null"], group_size=3)


def test_explorer_group_golden():
    expected = json.loads((GOLDEN / "explorer_rewards.json").read_text())
    settings_ = EpisodeSettings(top_k=5)
    for qid, rewards in expected["rewards"].items():
        g = run_group(CORPUS, qid, "explorer", group_size=8, master_seed=expected["master_seed"], settings=settings_)
        assert g.rewards == rewards


@pytest.mark.parametrize("w", [0.0, 0.2, 1.0])
def test_pipeline_closure(w):
    for qid in QIDS[:4]:
        g = run_group(CORPUS, qid, "explorer", group_size=6, master_seed=3, settings=EpisodeSettings(top_k=5))
        rep = hrr_reshape(g, w)
        assert len(rep.per_turn) == 6
        for traj, a, row in zip(g.trajectories, rep.per_trajectory, rep.per_turn):
            assert len(row) == len(traj.turns)
            assert sum(row) / len(row) == pytest.approx(a, abs=1e-12)


# -- behaviour statistics ----------------------------------------------------


def synthetic(n_search, n_open, n_other=0, finish=True):
    tools = ["search"] * n_search + ["open_page"] * n_open + ["noop"] * n_other
    tools += ["finish"] if finish else []
    return Trajectory("t", 0.0, [Turn(j, 0.5, tool=k) for j, k in enumerate(tools)], finished=finish)


def test_behavior_stats_hand_averages():
    stats = behavior_stats([synthetic(2, 0), synthetic(4, 1)])
    assert (stats.avg_turns, stats.avg_search_per_query, stats.avg_open_per_query, stats.finish_rate) == (
        4.5,
        3.0,
        0.5,
        1.0,
    )


def test_behavior_stats_truncated_and_oracle():
    assert behavior_stats([synthetic(3, 0, finish=False)]).finish_rate == 0.0
    trajs = [run_episode(CORPUS, q, "oracle", 0) for q in QIDS]
    stats = behavior_stats(trajs)
    assert stats.finish_rate == 1.0 and stats.avg_turns == 3.0
    with pytest.raises(ValueError):
        behavior_stats([])
