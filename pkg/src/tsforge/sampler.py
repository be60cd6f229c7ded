"""Random span masking for the golden and pseudo-parallel routes.

The span length ``l`` is drawn uniformly from ``1..n`` and the start from
``0..n-l``. Randomness comes from :class:`numpy.random.Generator` (PCG64)
seeded through ``SeedSequence([seed, shard])``, so a given shard always
sees the same stream no matter how many worker threads process it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .corpus import DEFAULT_MASK, Origin, ParallelPair, Span, TokenSeq, TSExample


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    mask_token: str = DEFAULT_MASK
    repeat: int = 1
    max_span: int | None = None

    def __post_init__(self):
        if not self.mask_token or self.mask_token.split() != [self.mask_token]:
            raise ValueError("mask token must be a single non-empty token")
        if self.repeat < 1:
            raise ValueError("repeat must be >= 1")
        if self.max_span is not None and self.max_span < 1:
            raise ValueError("max_span must be >= 1")


@dataclass(frozen=True)
class MaskedSentence:
    masked: TokenSeq
    label: TokenSeq
    span: Span
    mask_token: str = DEFAULT_MASK

    def unmask(self) -> TokenSeq:
        k = self.span.start
        return self.masked[:k] + self.label + self.masked[k + 1:]


def shard_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent PCG64 stream for ``(seed, *keys)``, e.g. ``(seed, route, shard)``."""
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), *keys]))


def sample_span(n: int, rng: np.random.Generator, max_len: int | None = None) -> Span:
    """Draw ``l ~ U{1..n}`` then ``start ~ U{0..n-l}``."""
    if n < 1:
        raise ValueError("cannot sample a span from an empty sequence")
    hi = n if max_len is None else min(n, max_len)
    length = int(rng.integers(1, hi + 1))
    start = int(rng.integers(0, n - length + 1))
    return Span(start, length)


def apply_mask(seq: Sequence[str], span: Span, mask_token: str = DEFAULT_MASK) -> MaskedSentence:
    seq = tuple(seq)
    if span.length < 1:
        raise ValueError("empty mask span")
    span.check(len(seq))
    if mask_token in seq:
        raise ValueError(f"mask token {mask_token!r} already present in sequence")
    masked = seq[:span.start] + (mask_token,) + seq[span.end:]
    return MaskedSentence(masked, seq[span.start:span.end], span, mask_token)


def _make_example(pair: ParallelPair, cfg: SamplerConfig, rng, origin: Origin) -> TSExample:
    span = sample_span(len(pair.reference), rng, cfg.max_span)
    m = apply_mask(pair.reference, span, cfg.mask_token)
    return TSExample(pair.source, m.masked, m.label, origin, cfg.mask_token)


def make_golden_example(pair: ParallelPair, cfg: SamplerConfig, rng) -> TSExample:
    return _make_example(pair, cfg, rng, Origin.GOLDEN)


def make_pseudo_example(pair: ParallelPair, cfg: SamplerConfig, rng) -> TSExample:
    """Same procedure as the golden route; ``pair.reference`` is ingested MT output."""
    return _make_example(pair, cfg, rng, Origin.PSEUDO)


def sample_examples(pairs: Iterable[ParallelPair], cfg: SamplerConfig, rng,
                    origin: Origin = Origin.GOLDEN) -> Iterator[TSExample]:
    """``cfg.repeat`` independently sampled examples per pair, in input order."""
    for pair in pairs:
        for _ in range(cfg.repeat):
            yield _make_example(pair, cfg, rng, origin)
