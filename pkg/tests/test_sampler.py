import collections
import os

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from tsforge.corpus import Origin, ParallelPair, Span, read_examples, read_parallel, tokenize
from tsforge.sampler import (
    SamplerConfig,
    apply_mask,
    make_golden_example,
    make_pseudo_example,
    sample_examples,
    sample_span,
    shard_rng,
)

DATA = os.path.join(os.path.dirname(__file__), "data")
MASK = "<MASK_REP>"


def test_sample_span_n1():
    rng = shard_rng(0)
    assert all(sample_span(1, rng) == Span(0, 1) for _ in range(50))


def test_sample_span_n2_outcome_domain():
    rng = shard_rng(1)
    seen = {sample_span(2, rng) for _ in range(500)}
    assert seen == {Span(0, 1), Span(1, 1), Span(0, 2)}


def test_sample_span_rejects_empty():
    with pytest.raises(ValueError):
        sample_span(0, shard_rng(0))


@settings(max_examples=300)
@given(st.integers(1, 200), st.integers(0, 2**32))
def test_sample_span_bounds(n, seed):
    rng = shard_rng(seed)
    for _ in range(5):
        s = sample_span(n, rng)
        assert 1 <= s.length <= n
        assert 0 <= s.start <= n - s.length


def test_sample_span_max_len_cap():
    rng = shard_rng(3)
    assert max(sample_span(30, rng, max_len=4).length for _ in range(300)) == 4


@pytest.mark.parametrize("n", [4, 10])
def test_sample_span_length_and_start_uniform(n):
    rng = shard_rng(2024, n)
    draws = [sample_span(n, rng) for _ in range(40_000)]
    lengths = collections.Counter(s.length for s in draws)
    assert chisquare([lengths[k] for k in range(1, n + 1)]).pvalue > 0.001
    for l in range(1, n):
        starts = collections.Counter(s.start for s in draws if s.length == l)
        assert chisquare([starts[i] for i in range(n - l + 1)]).pvalue > 0.001


def test_apply_mask_revenue_tokens():
    m = apply_mask(tokenize("All revenue of the system"), Span(1, 2))
    assert m.masked == ("All", MASK, "the", "system")
    assert m.label == ("revenue", "of")
    assert m.unmask() == tokenize("All revenue of the system")


def test_apply_mask_full_and_errors():
    seq = ("a", "b", "c")
    m = apply_mask(seq, Span(0, 3))
    assert m.masked == (MASK,) and m.label == seq
    with pytest.raises(ValueError):
        apply_mask(seq, Span(0, 0))
    with pytest.raises(IndexError):
        apply_mask(seq, Span(2, 2))
    with pytest.raises(ValueError):
        apply_mask(("a", MASK), Span(0, 1))
    assert apply_mask(("a", MASK), Span(0, 1), "<M>").masked == ("<M>", MASK)


tok_st = st.sampled_from(["a", "b", "c", "der", "Haus", "系统", "."])


@given(st.lists(tok_st, min_size=1, max_size=40), st.data())
def test_mask_unmask_roundtrip(seq, data):
    start = data.draw(st.integers(0, len(seq) - 1))
    length = data.draw(st.integers(1, len(seq) - start))
    m = apply_mask(seq, Span(start, length))
    assert m.unmask() == tuple(seq)
    assert m.masked.count(MASK) == 1


PAIR = ParallelPair(tokenize("Alle Einnahmen des Systems"), tokenize("All revenues from the system"))


def test_golden_example_single_token_reference():
    ex = make_golden_example(ParallelPair(("x",), ("y",)), SamplerConfig(), shard_rng(0))
    assert ex.masked_target == (MASK,) and ex.label == ("y",) and ex.origin is Origin.GOLDEN


def test_golden_example_mask_collision():
    with pytest.raises(ValueError):
        make_golden_example(ParallelPair(("x",), ("y", MASK)), SamplerConfig(), shard_rng(0))


def test_pseudo_matches_golden_procedure():
    cfg = SamplerConfig(seed=5)
    g = make_golden_example(PAIR, cfg, shard_rng(5))
    p = make_pseudo_example(PAIR, cfg, shard_rng(5))
    assert (g.masked_target, g.label) == (p.masked_target, p.label)
    assert p.origin is Origin.PSEUDO


def test_repeat_factor_and_determinism():
    cfg = SamplerConfig(seed=9, repeat=3)
    a = list(sample_examples([PAIR, PAIR], cfg, shard_rng(9)))
    b = list(sample_examples([PAIR, PAIR], cfg, shard_rng(9)))
    assert len(a) == 6 and a == b
    for ex in a:
        assert ex.unmask() == PAIR.reference


def test_golden_seed42_matches_committed_file():
    # produced by: tsforge sample-golden tests/data/sample_pairs.tsv --seed 42
    pairs = list(read_parallel(os.path.join(DATA, "sample_pairs.tsv")))
    expected = list(read_examples(os.path.join(DATA, "sample_golden_seed42.tsv")))
    got = list(sample_examples(pairs, SamplerConfig(seed=42), shard_rng(42, 1, 0)))
    assert got == expected
    assert expected[0].source == PAIR.source


def test_pseudo_seed7_matches_committed_file():
    # produced by: tsforge sample-pseudo tests/data/toy/pseudo.tsv --seed 7 --shard-size 1000
    pairs = list(read_parallel(os.path.join(DATA, "toy", "pseudo.tsv")))
    expected = list(read_examples(os.path.join(DATA, "sample_pseudo_seed7.tsv")))
    got = list(sample_examples(pairs, SamplerConfig(seed=7), shard_rng(7, 2, 0), Origin.PSEUDO))
    assert got == expected


def test_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(mask_token="")
    with pytest.raises(ValueError):
        SamplerConfig(mask_token="two words")
    with pytest.raises(ValueError):
        SamplerConfig(repeat=0)
