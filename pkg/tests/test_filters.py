import math

import pytest
from hypothesis import given, strategies as st

from tsforge.corpus import DataError, ParallelPair
from tsforge.filters import (
    DualCEScorer,
    LengthBounds,
    LexicalCEModel,
    NgramLM,
    dual_ce_combine,
    dual_ce_score,
    language_id_filter,
    length_filter,
    ngram_mean_nll,
)


def pair(ns, nr):
    return ParallelPair(tuple(f"s{i}" for i in range(ns)), tuple(f"r{i}" for i in range(nr)))


@pytest.mark.parametrize("ns,nr,keep", [
    (19, 50, False), (20, 80, True), (50, 81, False), (20, 20, True), (80, 80, True),
    (50, 19, False), (81, 50, False),
])
def test_length_filter_boundaries(ns, nr, keep):
    assert length_filter(pair(ns, nr), LengthBounds()) is keep


def test_length_bounds_validation():
    with pytest.raises(ValueError):
        LengthBounds(0, 5)
    with pytest.raises(ValueError):
        LengthBounds(10, 5)


@given(st.integers(1, 120), st.integers(1, 120), st.integers(1, 60), st.integers(0, 60),
       st.integers(0, 30), st.integers(0, 30))
def test_length_filter_monotone_in_bounds(ns, nr, lo, width, widen_lo, widen_hi):
    narrow = LengthBounds(lo, lo + width)
    wide = LengthBounds(max(1, lo - widen_lo), lo + width + widen_hi)
    if length_filter(pair(ns, nr), narrow):
        assert length_filter(pair(ns, nr), wide)


def test_language_id_basic():
    assert language_id_filter(["系统", "的", "所有", "收入"], "zh")
    assert not language_id_filter(["All", "revenue"], "zh")
    assert language_id_filter(["All", "revenue"], "en")
    assert not language_id_filter([], "en")
    assert not language_id_filter(["123", "..."], "en")


def test_language_id_mixed_ratio():
    # 6 Latin letters, 4 CJK ideographs, digits/punctuation ignored -> Latin ratio 0.6
    seq = ["abc,", "def", "42", "系统中国"]
    assert language_id_filter(seq, "en")
    assert language_id_filter(seq, "de")
    assert not language_id_filter(seq, "zh")
    assert language_id_filter(seq, "zh", threshold=0.4)


def test_language_id_unknown_tag():
    with pytest.raises(ValueError):
        language_id_filter(["x"], "xx")


# --- n-gram LM ----------------------------------------------------------------

def test_uniform_unigram_is_ln4():
    # vocab {a,b,c} + UNK; training maps "zzz" to UNK, so all four slots have count 1
    lm = NgramLM(order=1, k=0.1, vocab=["a", "b", "c"]).train([["a", "b", "c", "zzz"]])
    assert lm.vocab_size == 4
    assert ngram_mean_nll(lm, ["a", "c", "b"]) == pytest.approx(math.log(4), abs=1e-12)
    assert ngram_mean_nll(lm, ["a", "qq", "b"]) == pytest.approx(math.log(4), abs=1e-12)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_certain_event_tends_to_zero(order):
    lm = NgramLM(order=order, k=1e-9).train([["a", "a", "a"]])
    assert ngram_mean_nll(lm, ["a"]) == pytest.approx(0.0, abs=1e-6)


def test_bigram_hand_computed():
    # counts: <s>->a 2, <s>->b 1, a->b 1, a->c 1, b->a 1; V = 3 + UNK; k = 0.1
    lm = NgramLM(order=2, k=0.1).train([["a", "b"], ["a", "c"], ["b", "a"]])
    oracle = -(math.log(2.1 / 3.4) + math.log(1.1 / 2.4) + math.log(1.1 / 1.4)) / 3
    assert oracle == pytest.approx(0.5010529004197337, abs=1e-15)
    assert lm.mean_nll(["a", "b", "a"]) == pytest.approx(oracle, abs=1e-12)
    assert lm.perplexity(["a", "b", "a"]) == pytest.approx(math.exp(oracle))


def test_ngram_distribution_sums_to_one():
    lm = NgramLM(order=2, k=0.3).train([["a", "b", "c"], ["c", "b"], ["b", "b", "a"]])
    for ctx in (["<s>"], ["a"], ["b"], ["c"], ["never-seen"]):
        total = sum(lm.prob(w, ctx) for w in ["a", "b", "c", "<unk>"])
        assert total == pytest.approx(1.0, abs=1e-12)


def test_ngram_empty_query_errors():
    lm = NgramLM().train([["a"]])
    with pytest.raises(ValueError):
        lm.mean_nll([])
    with pytest.raises(ValueError):
        NgramLM().mean_nll(["a"])


sent_st = st.lists(st.sampled_from("abcde"), min_size=1, max_size=8)


def _all_events_frequent(lm, sentence):
    # shrinking k lowers P(w|h) exactly when c(h,w)/c(h) < 1/V
    for ctx, w in lm._events(sentence):
        if lm.ngram_counts[ctx + (w,)] * lm.vocab_size < lm.context_counts[ctx]:
            return False
    return True


@given(st.lists(sent_st, min_size=1, max_size=5), st.integers(1, 3),
       st.floats(1e-3, 2.0), st.floats(0.1, 1.0))
def test_ngram_nll_nonneg_and_monotone_in_k(corpus, order, k, shrink):
    big = NgramLM(order, k).train(corpus)
    small = NgramLM(order, k * shrink).train(corpus)
    for s in corpus:
        a, b = big.mean_nll(s), small.mean_nll(s)
        assert a >= 0 and b >= 0
        assert big.mean_nll(s) == a  # pure
        if _all_events_frequent(big, s):
            assert b <= a + 1e-12


def test_smaller_k_can_raise_nll_of_rare_seen_token():
    corpus = [["b"], ["a", "a", "a"]]
    big, small = NgramLM(1, 1.0).train(corpus), NgramLM(1, 0.5).train(corpus)
    # P(b) = 2/7 at k=1 but 1.5/5.5 at k=0.5
    assert small.mean_nll(["b"]) == pytest.approx(-math.log(1.5 / 5.5))
    assert small.mean_nll(["b"]) > big.mean_nll(["b"])


def test_ngram_save_load_roundtrip(tmp_path):
    lm = NgramLM(order=3, k=0.25).train([["a", "b", "c"], ["c", "b"], ["ü", "b", "a"]])
    path = tmp_path / "lm.txt"
    lm.save(str(path))
    text = path.read_text(encoding="utf-8")
    assert text.startswith("#tsforge-ngram\t1\norder\t3\nk\t0.25\nvocab_size\t5\n")
    back = NgramLM.load(str(path))
    for s in (["a", "b"], ["c", "x", "ü"], ["b"]):
        assert back.mean_nll(s) == lm.mean_nll(s)
    path.write_text("garbage\n", encoding="utf-8")
    with pytest.raises(DataError):
        NgramLM.load(str(path))


# --- dual conditional cross-entropy ------------------------------------------

def test_dual_ce_combination():
    assert dual_ce_combine(1.7, 1.7) == 1.7
    assert dual_ce_combine(1.0, 3.0) == 4.0
    assert dual_ce_combine(3.0, 1.0) == 4.0


@given(st.floats(0, 50), st.floats(0, 50))
def test_dual_ce_algebra(hf, hb):
    s = dual_ce_combine(hf, hb)
    assert s >= max(hf, hb) - min(hf, hb) - 1e-12
    assert s >= min(hf, hb) - 1e-12


FWD = {"the": {"das": 0.6, "die": 0.3}, "house": {"Haus": 0.8, "Heim": 0.1}}
BWD = {"das": {"the": 0.5, "that": 0.4}, "Haus": {"house": 0.9}}


def test_lexical_dual_ce_hand_computed():
    scorer = DualCEScorer(LexicalCEModel(FWD), LexicalCEModel(BWD))
    # forward: das <- the 0.6, Haus <- house 0.8; backward: the <- das 0.5, house <- Haus 0.9
    hf = -(math.log(0.6) + math.log(0.8)) / 2
    hb = -(math.log(0.5) + math.log(0.9)) / 2
    assert scorer.directional(["the", "house"], ["das", "Haus"]) == pytest.approx((hf, hb))
    score = dual_ce_score(scorer, ("the", "house"), ("das", "Haus"))
    assert score == pytest.approx(0.4153884783932785, abs=1e-12)
    assert score == scorer.score(("the", "house"), ("das", "Haus"))


def test_lexical_unknown_tokens_and_floor():
    m = LexicalCEModel(FWD, floor=1e-4)
    # unknown target -> row remainder: the 0.1, house 0.1
    assert m.cross_entropy(["the", "house"], ["Zebra"]) == pytest.approx(-math.log(0.1))
    # known target unreachable from these sources -> floor
    assert m.cross_entropy(["house"], ["die"]) == pytest.approx(-math.log(1e-4))
    # source without a row puts everything on UNK
    assert m.cross_entropy(["cat"], ["Zebra"]) == 0.0
    with pytest.raises(ValueError):
        m.cross_entropy([], ["das"])


def test_lexical_table_file(tmp_path):
    p = tmp_path / "lex.tsv"
    p.write_text("the\tdas\t0.6\nthe\tdie\t0.3\nhouse\tHaus\t0.8\n", encoding="utf-8")
    m = LexicalCEModel.load(str(p))
    assert m.token_prob("das", "the") == 0.6
    p.write_text("the\tdas\t0.8\nthe\tdie\t0.3\n", encoding="utf-8")
    with pytest.raises(DataError):
        LexicalCEModel.load(str(p))
    p.write_text("the\tdas\n", encoding="utf-8")
    with pytest.raises(DataError, match=":1:"):
        LexicalCEModel.load(str(p))


def test_dual_ce_requires_nonempty():
    scorer = DualCEScorer(LexicalCEModel(FWD), LexicalCEModel(BWD))
    with pytest.raises(ValueError):
        scorer.score((), ("das",))
