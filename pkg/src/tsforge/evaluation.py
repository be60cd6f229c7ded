"""Corpus BLEU over whitespace tokens and the top-1 suggestion harness.

Scores are not SacreBLEU-signature compatible: no detokenization or
internal tokenizer is applied, tokens are compared exactly.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import DataError, TokenSeq, tokenize

MAX_ORDER = 4
CANDIDATE_SEP = " ||| "


@dataclass(frozen=True)
class BleuScore:
    score: float
    precisions: tuple
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    matches: tuple = ()
    totals: tuple = ()

    def __str__(self) -> str:
        ps = "/".join(f"{100 * p:.1f}" for p in self.precisions)
        return (f"BLEU = {self.score:.2f} {ps} (BP = {self.brevity_penalty:.3f} "
                f"hyp_len = {self.hyp_len} ref_len = {self.ref_len})")


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def sentence_stats(hyp: Sequence[str], ref: Sequence[str], max_order: int = MAX_ORDER):
    """Clipped matches and totals per order for one pair."""
    matches = [0] * max_order
    totals = [0] * max_order
    for n in range(1, max_order + 1):
        h = ngram_counts(hyp, n)
        r = ngram_counts(ref, n)
        matches[n - 1] = sum(min(c, r[g]) for g, c in h.items())
        totals[n - 1] = max(0, len(hyp) - n + 1)
    return matches, totals


def brevity_penalty(hyp_len: int, ref_len: int) -> float:
    if hyp_len == 0:
        return 0.0
    return math.exp(min(0.0, 1.0 - ref_len / hyp_len))


def _score(matches, totals, hyp_len, ref_len, smooth: bool) -> BleuScore:
    precisions = []
    for n, (m, t) in enumerate(zip(matches, totals), 1):
        if smooth and n > 1:
            precisions.append((m + 1) / (t + 1))
        else:
            precisions.append(m / t if t else 0.0)
    bp = brevity_penalty(hyp_len, ref_len)
    if min(precisions) <= 0:
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions) / len(precisions))
    return BleuScore(score, tuple(precisions), bp, hyp_len, ref_len, tuple(matches), tuple(totals))


def corpus_bleu(hyps: Sequence[Sequence[str]], refs: Sequence[Sequence[str]],
                max_order: int = MAX_ORDER) -> BleuScore:
    """Unsmoothed corpus BLEU: n-gram statistics are pooled before the geometric mean."""
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses but {len(refs)} references")
    if not hyps:
        raise ValueError("corpus_bleu needs at least one segment")
    matches = [0] * max_order
    totals = [0] * max_order
    hyp_len = ref_len = 0
    for h, r in zip(hyps, refs):
        m, t = sentence_stats(h, r, max_order)
        matches = [a + b for a, b in zip(matches, m)]
        totals = [a + b for a, b in zip(totals, t)]
        hyp_len += len(h)
        ref_len += len(r)
    return _score(matches, totals, hyp_len, ref_len, smooth=False)


def sentence_bleu(hyp: Sequence[str], ref: Sequence[str], max_order: int = MAX_ORDER) -> BleuScore:
    """Diagnostic sentence BLEU with add-one smoothing on orders 2 and up."""
    m, t = sentence_stats(hyp, ref, max_order)
    return _score(m, t, len(hyp), len(ref), smooth=True)


def read_top1(path: str) -> list[TokenSeq]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            toks = tokenize(line.split(CANDIDATE_SEP.strip(), 1)[0])
            if not toks:
                raise DataError("empty candidate row", path, lineno)
            out.append(toks)
    return out


def read_gold(path: str) -> list[TokenSeq]:
    with open(path, encoding="utf-8") as fh:
        return [tokenize(line) for line in fh]


def evaluate_topk(hyp_file: str, gold_file: str) -> BleuScore:
    """BLEU of the first candidate on each hypothesis row against the gold labels."""
    hyps = read_top1(hyp_file)
    gold = read_gold(gold_file)
    if len(hyps) != len(gold):
        raise DataError(f"row-count mismatch: {len(hyps)} hypothesis rows, {len(gold)} gold rows")
    return corpus_bleu(hyps, gold)
