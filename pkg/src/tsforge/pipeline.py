"""Candidate construction, threshold acceptance and the three-route pipeline.

Routes:

golden
    parallel pairs -> length filter -> quality filter -> random span mask
pseudo
    (monolingual source, MT) pairs -> language ID -> same as golden
aligned
    (source, MT, reference) triplets + MT->reference alignments ->
    phrase extraction -> candidate scoring -> masked MT examples

Inputs are streamed in fixed-size shards. Each shard draws randomness from
its own sub-seed and results are written back in input order, so output is
identical for any thread count.
"""
from __future__ import annotations

import itertools
import logging
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .config import ConfigError, RunConfig
from .corpus import (
    Alignment,
    DataError,
    Origin,
    TokenSeq,
    Triplet,
    TSExample,
    format_example,
    parse_alignment,
    parse_parallel_line,
    parse_triplet_line,
)
from .filters import (
    DualCEScorer,
    LanguageModel,
    LengthBounds,
    LexicalCEModel,
    NgramLM,
    QualityScorer,
    language_id_filter,
    length_filter,
)
from .phrase_align import PhrasePair, extract_phrases, splice
from .sampler import SamplerConfig, sample_examples, shard_rng

log = logging.getLogger(__name__)

ROUTE_STREAMS = {"golden": 1, "pseudo": 2, "aligned": 3}


@dataclass(frozen=True)
class Thresholds:
    beta1: float = 2.5
    beta2: float = 0.05

    def __post_init__(self):
        if not (math.isfinite(self.beta1) and math.isfinite(self.beta2)):
            raise ValueError("thresholds must be finite")


@dataclass
class Candidate:
    source: TokenSeq
    mt: TokenSeq
    corrected: TokenSeq
    pair: PhrasePair
    quality: float | None = None
    nll_mt: float | None = None
    nll_corrected: float | None = None

    @property
    def replacement(self) -> TokenSeq:
        start = self.pair.y_span.start
        return self.corrected[start:start + self.pair.r_span.length]

    @property
    def nll_reduction(self) -> float | None:
        if self.nll_mt is None or self.nll_corrected is None:
            return None
        return self.nll_mt - self.nll_corrected


def build_candidate(triplet: Triplet, pair: PhrasePair) -> Candidate:
    """Replace the MT phrase with the reference phrase."""
    pair.y_span.check(len(triplet.mt))
    repl = pair.r_span.of(triplet.reference)
    return Candidate(triplet.source, triplet.mt, splice(triplet.mt, pair.y_span, repl), pair)


def accept_candidate(c: Candidate, scorer: QualityScorer, lm: LanguageModel,
                     t: Thresholds = Thresholds()) -> bool:
    """Accept when quality(x, y_hat) < beta1 and nll(y) - nll(y_hat) >= beta2.

    Scorer failures reject the candidate and are logged.
    """
    try:
        c.quality = float(scorer.score(c.source, c.corrected))
        c.nll_mt = float(lm.mean_nll(c.mt))
        c.nll_corrected = float(lm.mean_nll(c.corrected))
    except Exception as exc:
        log.warning("candidate rejected, scorer failed: %s", exc)
        return False
    return c.quality < t.beta1 and (c.nll_mt - c.nll_corrected) >= t.beta2


def make_aligned_example(c: Candidate, mask_token: str, allow_empty_label: bool = False
                         ) -> TSExample | None:
    """Mask the MT phrase; the reference phrase becomes the label."""
    y = c.pair.y_span
    masked = c.mt[:y.start] + (mask_token,) + c.mt[y.end:]
    label = c.replacement
    try:
        return TSExample(c.source, masked, label, Origin.ALIGNED, mask_token, allow_empty_label)
    except ValueError as exc:
        log.warning("aligned example skipped: %s", exc)
        return None


# --- statistics ---------------------------------------------------------------

STAGES = {
    "golden": ("read", "length_kept", "quality_kept", "examples_emitted"),
    "pseudo": ("read", "lang_kept", "length_kept", "quality_kept", "examples_emitted"),
    "aligned": ("read", "with_phrases", "phrases_extracted", "candidates_accepted",
                "examples_emitted", "skipped"),
}

# chains whose counts must be non-increasing
_CHAINS = {
    "golden": [("read", "length_kept", "quality_kept")],
    "pseudo": [("read", "lang_kept", "length_kept", "quality_kept")],
    "aligned": [("read", "with_phrases"),
                ("phrases_extracted", "candidates_accepted", "examples_emitted")],
}


@dataclass
class PipelineStats:
    counts: Counter = field(default_factory=Counter)
    repeat: int = 1

    def add(self, route: str, stage: str, n: int = 1) -> None:
        self.counts[f"{route}.{stage}"] += n

    def get(self, route: str, stage: str) -> int:
        return self.counts.get(f"{route}.{stage}", 0)

    def merge(self, other: Counter) -> None:
        self.counts.update(other)

    def routes(self) -> list[str]:
        return [r for r in STAGES if any(k.startswith(r + ".") for k in self.counts)]

    def is_monotone(self) -> bool:
        for route in self.routes():
            for chain in _CHAINS[route]:
                vals = [self.get(route, s) for s in chain]
                if any(a < b for a, b in zip(vals, vals[1:])):
                    return False
            if route in ("golden", "pseudo"):
                if self.get(route, "examples_emitted") > self.repeat * self.get(route, "quality_kept"):
                    return False
        return True

    def total_emitted(self) -> int:
        return sum(self.get(r, "examples_emitted") for r in STAGES)

    def to_kv(self) -> str:
        lines = []
        for route in self.routes():
            for stage in STAGES[route]:
                lines.append(f"{route}.{stage}={self.get(route, stage)}")
        lines.append(f"total.examples_emitted={self.total_emitted()}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_kv(cls, text: str) -> "PipelineStats":
        st = cls()
        for line in text.splitlines():
            key, eq, val = line.partition("=")
            if eq and not key.startswith("total."):
                st.counts[key.strip()] = int(val)
        return st

    def table(self) -> str:
        rows = []
        for route in self.routes():
            for stage in STAGES[route]:
                rows.append((route, stage, self.get(route, stage)))
        width = max((len(r) + len(s) + 1 for r, s, _ in rows), default=10)
        out = [f"{'stage':<{width}}  {'count':>10}", "-" * (width + 12)]
        out += [f"{r + '/' + s:<{width}}  {n:>10}" for r, s, n in rows]
        out.append(f"{'total/examples_emitted':<{width}}  {self.total_emitted():>10}")
        return "\n".join(out)


# --- shard processing -------------------------------------------------------

def chunked(iterable: Iterable, size: int) -> Iterator[list]:
    it = iter(iterable)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield chunk


def map_ordered(fn: Callable, items: Iterable, threads: int = 1) -> Iterator:
    """``map`` with at most ``2 * threads`` items in flight; yields in input order."""
    if threads <= 1:
        yield from map(fn, items)
        return
    window = 2 * threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = []
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= window:
                yield pending.pop(0).result()
        for fut in pending:
            yield fut.result()


@dataclass
class Scorers:
    quality: QualityScorer | None = None
    corpus_quality: QualityScorer | None = None
    lm: LanguageModel | None = None


def load_scorers(cfg: RunConfig) -> Scorers:
    sc = Scorers()
    if cfg.lex_forward and cfg.lex_backward:
        sc.quality = DualCEScorer(LexicalCEModel.load(cfg.lex_forward, cfg.lex_floor),
                                  LexicalCEModel.load(cfg.lex_backward, cfg.lex_floor))
    if cfg.filter_lex_forward or cfg.filter_lex_backward:
        fwd = cfg.filter_lex_forward or cfg.lex_forward
        bwd = cfg.filter_lex_backward or cfg.lex_backward
        if fwd and bwd:
            sc.corpus_quality = DualCEScorer(LexicalCEModel.load(fwd, cfg.lex_floor),
                                             LexicalCEModel.load(bwd, cfg.lex_floor))
    else:
        sc.corpus_quality = sc.quality
    if cfg.lm:
        sc.lm = NgramLM.load(cfg.lm)
    elif cfg.lm_train:
        with open(cfg.lm_train, encoding="utf-8") as fh:
            sc.lm = NgramLM(cfg.lm_order, cfg.lm_k).train(line.split() for line in fh)
    return sc


def _corpus_shard(route: str, cfg: RunConfig, scorers: Scorers, path: str):
    bounds = LengthBounds(cfg.min_len, cfg.max_len)
    sampler = SamplerConfig(cfg.seed, cfg.mask_token, cfg.repeat)

    def work(job):
        shard, rows = job
        stats = Counter()
        kept = []
        for lineno, line in rows:
            pair = parse_parallel_line(line, lineno, path)
            stats[f"{route}.read"] += 1
            if route == "pseudo":
                if cfg.pseudo_lang and not language_id_filter(pair.source, cfg.pseudo_lang,
                                                              cfg.lid_threshold):
                    continue
                stats["pseudo.lang_kept"] += 1
            if not length_filter(pair, bounds):
                continue
            stats[f"{route}.length_kept"] += 1
            if scorers.corpus_quality is not None:
                try:
                    q = scorers.corpus_quality.score(pair.source, pair.reference)
                except Exception as exc:
                    log.warning("%s:%d: quality scoring failed: %s", path, lineno, exc)
                    continue
                if not q < cfg.quality_threshold:
                    continue
            stats[f"{route}.quality_kept"] += 1
            kept.append((lineno, pair))
        rng = shard_rng(cfg.seed, ROUTE_STREAMS[route], shard)
        origin = Origin(route)
        lines = []
        for lineno, pair in kept:
            try:
                for ex in sample_examples([pair], sampler, rng, origin):
                    lines.append(format_example(ex))
            except ValueError as exc:
                log.warning("%s:%d: skipped: %s", path, lineno, exc)
        stats[f"{route}.examples_emitted"] += len(lines)
        return lines, stats

    return work


def _aligned_shard(cfg: RunConfig, scorers: Scorers):
    thresholds = Thresholds(cfg.beta1, cfg.beta2)

    def work(job):
        _, rows = job
        stats = Counter()
        lines = []
        for lineno, tline, aline in rows:
            triplet = parse_triplet_line(tline, lineno, cfg.triplets)
            alignment = parse_alignment(aline, lineno, cfg.alignments)
            stats["aligned.read"] += 1
            examples, st = aligned_examples(triplet, alignment, scorers.quality, scorers.lm,
                                            thresholds, cfg.mask_token, cfg.keep_partial,
                                            where=f"{cfg.triplets}:{lineno}")
            lines.extend(format_example(ex) for ex in examples)
            stats.update(st)
        return lines, stats

    return work


def aligned_examples(triplet: Triplet, alignment: Alignment, scorer: QualityScorer,
                     lm: LanguageModel, thresholds: Thresholds = Thresholds(),
                     mask_token: str = "<MASK_REP>", keep_partial: bool = False,
                     where: str = "") -> tuple[list[TSExample], Counter]:
    """Accepted examples and per-stage counts for one triplet."""
    stats = Counter()
    try:
        pairs = extract_phrases(triplet.mt, triplet.reference, alignment, keep_partial)
    except (IndexError, ValueError) as exc:
        log.warning("%s: triplet skipped: %s", where, exc)
        stats["aligned.skipped"] += 1
        return [], stats
    out = []
    if pairs:
        stats["aligned.with_phrases"] += 1
    for pair in pairs:
        stats["aligned.phrases_extracted"] += 1
        cand = build_candidate(triplet, pair)
        if not accept_candidate(cand, scorer, lm, thresholds):
            continue
        stats["aligned.candidates_accepted"] += 1
        ex = make_aligned_example(cand, mask_token, allow_empty_label=keep_partial)
        if ex is None:
            continue
        stats["aligned.examples_emitted"] += 1
        out.append(ex)
    return out, stats


# --- driver -----------------------------------------------------------------

def _numbered(path: str) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8", newline="\n") as fh:
        yield from enumerate(fh, 1)


def _aligned_rows(cfg: RunConfig) -> Iterator[tuple[int, str, str]]:
    with open(cfg.triplets, encoding="utf-8", newline="\n") as tf, \
            open(cfg.alignments, encoding="utf-8", newline="\n") as af:
        n = 0
        for n, (tline, aline) in enumerate(itertools.zip_longest(tf, af), 1):
            if tline is None or aline is None:
                short = cfg.triplets if tline is None else cfg.alignments
                raise DataError("row-count mismatch between triplets and alignments "
                                f"({short} ends first)", short, n)
            yield n, tline, aline


def route_outputs(route: str, cfg: RunConfig, scorers: Scorers) -> Iterator[tuple[list, Counter]]:
    """Per-shard (formatted example lines, stats) for one route, in input order."""
    if route == "aligned":
        rows = _aligned_rows(cfg)
        work = _aligned_shard(cfg, scorers)
    else:
        path = cfg.golden if route == "golden" else cfg.pseudo
        rows = _numbered(path)
        work = _corpus_shard(route, cfg, scorers, path)
    jobs = enumerate(chunked(rows, cfg.shard_size))
    yield from map_ordered(work, jobs, cfg.threads)


OUTPUT_FILES = ("examples.tsv", "stats.txt")


def run_pipeline(cfg: RunConfig, progress_every: int = 100_000) -> PipelineStats:
    """Run the configured routes and write ``examples.tsv`` and ``stats.txt`` into ``cfg.out``."""
    cfg.validate()
    os.makedirs(cfg.out, exist_ok=True)
    targets = [os.path.join(cfg.out, name) for name in OUTPUT_FILES]
    if not cfg.force:
        for t in targets:
            if os.path.exists(t):
                raise ConfigError(f"refusing to overwrite {t} (use --force)")
    scorers = load_scorers(cfg)
    stats = PipelineStats(repeat=cfg.repeat)
    with open(targets[0], "w", encoding="utf-8", newline="\n") as out:
        for route in cfg.routes:
            done = 0
            for lines, st in route_outputs(route, cfg, scorers):
                out.writelines(lines)
                stats.merge(st)
                before, done = done, stats.get(route, "read")
                if progress_every and done // progress_every > before // progress_every:
                    log.info("%s: %d records read", route, done)
            log.info("%s: done, %d examples", route, stats.get(route, "examples_emitted"))
    with open(targets[1], "w", encoding="utf-8", newline="\n") as fh:
        fh.write(stats.to_kv())
    return stats
