import math
import random

import pytest
from hypothesis import given, strategies as st

from tsforge.corpus import DataError, tokenize
from tsforge.evaluation import brevity_penalty, corpus_bleu, evaluate_topk, sentence_bleu

CAT_HYP = tokenize("the cat sat on the mat")
CAT_REF = tokenize("the cat is on the mat")
ABC = tokenize("a b c d e")


def test_identical_is_100():
    assert corpus_bleu([CAT_REF, ABC], [CAT_REF, ABC]).score == pytest.approx(100.0, abs=1e-9)


def test_zero_unigram_overlap():
    assert corpus_bleu([tokenize("x y z w")], [CAT_REF]).score == 0.0


def test_single_pair_hand_counts():
    b = corpus_bleu([CAT_HYP], [CAT_REF])
    # clipped matches 5/6, 3/5, 1/4, 0/3
    assert b.matches == (5, 3, 1, 0) and b.totals == (6, 5, 4, 3)
    assert b.score == 0.0
    assert b.brevity_penalty == 1.0


def test_pooled_toy_corpus():
    b = corpus_bleu([CAT_HYP, ABC], [CAT_REF, ABC])
    # pooled: 10/11, 7/9, 4/7, 2/5; hyp_len = ref_len = 11
    oracle = 100 * (10 / 11 * 7 / 9 * 4 / 7 * 2 / 5) ** 0.25
    assert oracle == pytest.approx(63.40466277046861, abs=1e-12)
    assert b.score == pytest.approx(oracle, abs=1e-6)
    assert b.precisions == pytest.approx((10 / 11, 7 / 9, 4 / 7, 2 / 5))


def test_brevity_penalty():
    assert brevity_penalty(10, 10) == 1.0
    assert brevity_penalty(12, 10) == 1.0
    assert brevity_penalty(5, 10) == pytest.approx(math.exp(-1))
    short = corpus_bleu([tokenize("a b c d")], [ABC])
    assert short.brevity_penalty == pytest.approx(math.exp(1 - 5 / 4))
    assert short.score == pytest.approx(100 * math.exp(1 - 5 / 4))


def test_length_mismatch_and_empty():
    with pytest.raises(ValueError):
        corpus_bleu([ABC], [ABC, ABC])
    with pytest.raises(ValueError):
        corpus_bleu([], [])


def test_permutation_invariance():
    rng = random.Random(0)
    words = "a b c d e f g".split()
    hyps = [tuple(rng.choice(words) for _ in range(rng.randint(3, 12))) for _ in range(20)]
    refs = [tuple(rng.choice(words) for _ in range(rng.randint(3, 12))) for _ in range(20)]
    base = corpus_bleu(hyps, refs).score
    assert base > 0
    idx = list(range(20))
    for _ in range(100):
        rng.shuffle(idx)
        assert corpus_bleu([hyps[i] for i in idx], [refs[i] for i in idx]).score == \
            pytest.approx(base, abs=1e-9)


seg = st.lists(st.sampled_from("abcde"), min_size=1, max_size=15).map(tuple)


@given(st.lists(st.tuples(seg, seg), min_size=1, max_size=6))
def test_bleu_ranges(pairs):
    hyps, refs = zip(*pairs)
    b = corpus_bleu(hyps, refs)
    assert 0.0 <= b.score <= 100.0 + 1e-9
    assert 0.0 < b.brevity_penalty <= 1.0
    if b.hyp_len >= b.ref_len:
        assert b.brevity_penalty == 1.0
    # self-BLEU is 100 once some segment has a 4-gram, else 0 (no smoothing)
    self_bleu = corpus_bleu(hyps, hyps).score
    if any(len(h) >= 4 for h in hyps):
        assert self_bleu == pytest.approx(100.0, abs=1e-9)
    else:
        assert self_bleu == 0.0


def test_sentence_bleu_smoothing():
    s = sentence_bleu(CAT_HYP, CAT_REF)
    # p1 unsmoothed, p2..p4 add-one
    assert s.precisions == pytest.approx((5 / 6, 4 / 6, 2 / 5, 1 / 4))
    assert s.score > 0


def test_evaluate_topk(tmp_path):
    hyp = tmp_path / "h.txt"
    gold = tmp_path / "g.txt"
    hyp.write_text("the cat sat on the mat ||| other\na b c d e ||| x\n", encoding="utf-8")
    gold.write_text("the cat is on the mat\na b c d e\n", encoding="utf-8")
    assert evaluate_topk(str(hyp), str(gold)).score == pytest.approx(63.40466277046861, abs=1e-6)
    gold.write_text("the cat is on the mat\n", encoding="utf-8")
    with pytest.raises(DataError, match="2 hypothesis rows, 1 gold"):
        evaluate_topk(str(hyp), str(gold))
    hyp.write_text(" ||| x\n", encoding="utf-8")
    with pytest.raises(DataError, match="empty candidate"):
        evaluate_topk(str(hyp), str(gold))
