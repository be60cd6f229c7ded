"""Corpus filters and scorer contracts.

Scorers follow two small protocols:

``QualityScorer.score(source, target)``
    lower is better; finite for non-empty inputs.
``LanguageModel.mean_nll(sentence)``
    mean per-token negative log-likelihood in nats.

:class:`NgramLM` and :class:`DualCEScorer` (backed by
:class:`LexicalCEModel`) are small, exactly hand-checkable reference
implementations of those protocols. Anything with the same methods can be
plugged into the pipeline instead.
"""
from __future__ import annotations

import math
import unicodedata
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Protocol, Sequence

from .corpus import DataError, ParallelPair, TokenSeq

__all__ = [
    "LengthBounds",
    "length_filter",
    "script_class",
    "language_id_filter",
    "QualityScorer",
    "LanguageModel",
    "NgramLM",
    "ngram_mean_nll",
    "LexicalCEModel",
    "DualCEScorer",
    "dual_ce_combine",
    "dual_ce_score",
]


@dataclass(frozen=True)
class LengthBounds:
    min_tokens: int = 20
    max_tokens: int = 80

    def __post_init__(self):
        if not 1 <= self.min_tokens <= self.max_tokens:
            raise ValueError(f"invalid length bounds {self.min_tokens}..{self.max_tokens}")

    def accepts(self, n: int) -> bool:
        return self.min_tokens <= n <= self.max_tokens


def length_filter(pair: ParallelPair, bounds: LengthBounds = LengthBounds()) -> bool:
    """Keep a pair only if both sides lie within the inclusive token bounds."""
    return bounds.accepts(len(pair.source)) and bounds.accepts(len(pair.reference))


# --- language identification -------------------------------------------------

_SCRIPT_FOR_LANG = {"en": "latin", "de": "latin", "fr": "latin", "zh": "cjk"}


def script_class(ch: str) -> str | None:
    """Coarse script of an alphabetic/ideographic character, else None."""
    if not ch.isalpha():
        return None
    name = unicodedata.name(ch, "")
    if name.startswith("LATIN"):
        return "latin"
    if name.startswith(("CJK UNIFIED IDEOGRAPH", "CJK COMPATIBILITY IDEOGRAPH")):
        return "cjk"
    return "other"


def language_id_filter(seq: Sequence[str], expected: str, threshold: float = 0.5) -> bool:
    """Script-ratio heuristic standing in for a real language identifier.

    Keeps ``seq`` iff at least ``threshold`` of its alphabetic characters
    belong to the script of ``expected`` (Latin for en/de, CJK for zh).
    Sequences without any alphabetic character are rejected.
    """
    try:
        want = _SCRIPT_FOR_LANG[expected]
    except KeyError:
        raise ValueError(f"unsupported language tag {expected!r}") from None
    total = hits = 0
    for tok in seq:
        for ch in tok:
            cls = script_class(ch)
            if cls is None:
                continue
            total += 1
            hits += cls == want
    return total > 0 and hits / total >= threshold


# --- scorer contracts -------------------------------------------------------

class QualityScorer(Protocol):
    def score(self, source: Sequence[str], target: Sequence[str]) -> float: ...


class LanguageModel(Protocol):
    def mean_nll(self, sentence: Sequence[str]) -> float: ...


# --- add-k n-gram LM --------------------------------------------------------

BOS = "<s>"
UNK = "<unk>"
_NGRAM_MAGIC = "#tsforge-ngram"
_NGRAM_VERSION = 1


class NgramLM:
    """Add-k smoothed n-gram LM.

    P(w | h) = (c(h, w) + k) / (c(h) + k * V) where V counts the vocabulary
    plus one UNK slot, so every context distributes exactly one unit of
    mass. Sentence starts are padded with ``<s>``; no end symbol is
    predicted. Tokens outside the vocabulary are mapped to UNK both in
    training and at query time.
    """

    def __init__(self, order: int = 2, k: float = 0.1, vocab: Iterable[str] | None = None):
        if order < 1:
            raise ValueError("order must be >= 1")
        if not k > 0:
            raise ValueError("k must be > 0")
        self.order = order
        self.k = float(k)
        self.fixed_vocab = vocab is not None
        self.vocab: set[str] = set(vocab) if vocab is not None else set()
        self.vocab.discard(UNK)
        self.ngram_counts: Counter = Counter()
        self.context_counts: Counter = Counter()
        self.n_sentences = 0

    @property
    def vocab_size(self) -> int:
        return len(self.vocab) + 1

    def _map(self, tok: str) -> str:
        return tok if tok in self.vocab else UNK

    def _events(self, sentence: Sequence[str]):
        hist = [BOS] * (self.order - 1)
        for tok in sentence:
            w = self._map(tok)
            ctx = tuple(hist[len(hist) - self.order + 1:]) if self.order > 1 else ()
            yield ctx, w
            hist.append(w)

    def train(self, sentences: Iterable[Sequence[str]]) -> "NgramLM":
        sentences = [tuple(s) for s in sentences]
        if not self.fixed_vocab:
            for s in sentences:
                self.vocab.update(s)
            self.vocab.discard(UNK)
        for s in sentences:
            for ctx, w in self._events(s):
                self.ngram_counts[ctx + (w,)] += 1
                self.context_counts[ctx] += 1
            self.n_sentences += 1
        return self

    def prob(self, word: str, context: Sequence[str] = ()) -> float:
        ctx: tuple = ()
        if self.order > 1:
            hist = [BOS] * (self.order - 1) + [t if t == BOS else self._map(t) for t in context]
            ctx = tuple(hist[-(self.order - 1):])
        w = self._map(word)
        num = self.ngram_counts.get(ctx + (w,), 0) + self.k
        return num / (self.context_counts.get(ctx, 0) + self.k * self.vocab_size)

    def mean_nll(self, sentence: Sequence[str]) -> float:
        if not sentence:
            raise ValueError("mean_nll of an empty sentence")
        if self.n_sentences == 0:
            raise ValueError("language model has not been trained")
        kv = self.k * self.vocab_size
        total = 0.0
        for ctx, w in self._events(sentence):
            num = self.ngram_counts.get(ctx + (w,), 0) + self.k
            total -= math.log(num / (self.context_counts.get(ctx, 0) + kv))
        return total / len(sentence)

    def perplexity(self, sentence: Sequence[str]) -> float:
        return math.exp(self.mean_nll(sentence))

    # persistence

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{_NGRAM_MAGIC}\t{_NGRAM_VERSION}\n")
            fh.write(f"order\t{self.order}\n")
            fh.write(f"k\t{self.k!r}\n")
            fh.write(f"vocab_size\t{self.vocab_size}\n")
            fh.write(f"sentences\t{self.n_sentences}\n")
            fh.write("\\vocab\n")
            for w in sorted(self.vocab):
                fh.write(w + "\n")
            fh.write("\\ngrams\n")
            for gram, c in sorted(self.ngram_counts.items()):
                fh.write(f"{' '.join(gram)}\t{c}\n")

    @classmethod
    def load(cls, path: str) -> "NgramLM":
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
        if not lines or not lines[0].startswith(_NGRAM_MAGIC + "\t"):
            raise DataError("not an n-gram model file", path, 1)
        version = int(lines[0].split("\t")[1])
        if version != _NGRAM_VERSION:
            raise DataError(f"unsupported n-gram model version {version}", path, 1)
        header: dict[str, str] = {}
        i = 1
        while i < len(lines) and lines[i] != "\\vocab":
            key, _, val = lines[i].partition("\t")
            header[key] = val
            i += 1
        lm = cls(int(header["order"]), float(header["k"]), vocab=())
        lm.n_sentences = int(header.get("sentences", "1"))
        i += 1
        while i < len(lines) and lines[i] != "\\ngrams":
            if lines[i]:
                lm.vocab.add(lines[i])
            i += 1
        if lm.vocab_size != int(header["vocab_size"]):
            raise DataError("vocabulary size does not match header", path)
        for lineno in range(i + 1, len(lines)):
            line = lines[lineno]
            if not line:
                continue
            gram_text, _, count = line.partition("\t")
            gram = tuple(gram_text.split(" "))
            if len(gram) != lm.order or not count.isdigit():
                raise DataError(f"bad n-gram line {line!r}", path, lineno + 1)
            lm.ngram_counts[gram] = int(count)
            lm.context_counts[gram[:-1]] += int(count)
        return lm


def ngram_mean_nll(lm: NgramLM, seq: Sequence[str]) -> float:
    return lm.mean_nll(seq)


# --- dual conditional cross-entropy ------------------------------------------

class LexicalCEModel:
    """Per-token conditional cross-entropy from a lexical translation table.

    Each target token is explained by its best source token::

        H(t | s) = -1/|t| * sum_j ln max(floor, max_i P(t_j | s_i))

    Target tokens never listed in the table are treated as UNK and receive
    the row remainder ``1 - sum_t P(t | s_i)``; source tokens without a row
    put all their mass on UNK.
    """

    def __init__(self, table: Mapping[str, Mapping[str, float]], floor: float = 1e-6):
        self.table = {s: dict(row) for s, row in table.items()}
        self.floor = floor
        self.targets = {t for row in self.table.values() for t in row}
        self.remainder = {}
        for s, row in self.table.items():
            mass = sum(row.values())
            if mass > 1 + 1e-9 or any(p < 0 for p in row.values()):
                raise ValueError(f"lexical row for {s!r} is not a sub-distribution")
            self.remainder[s] = max(0.0, 1.0 - mass)

    @classmethod
    def load(cls, path: str, floor: float = 1e-6) -> "LexicalCEModel":
        table: dict[str, dict[str, float]] = defaultdict(dict)
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                cols = line.split("\t")
                if len(cols) != 3:
                    raise DataError(f"expected 3 columns, got {len(cols)}", path, lineno)
                try:
                    table[cols[0]][cols[1]] = float(cols[2])
                except ValueError:
                    raise DataError(f"bad probability {cols[2]!r}", path, lineno) from None
        try:
            return cls(table, floor)
        except ValueError as exc:
            raise DataError(str(exc), path) from None

    def token_prob(self, t: str, s: str) -> float:
        row = self.table.get(s)
        if row is None:
            return 1.0 if t not in self.targets else 0.0
        if t in row:
            return row[t]
        return self.remainder[s] if t not in self.targets else 0.0

    def cross_entropy(self, source: Sequence[str], target: Sequence[str]) -> float:
        if not source or not target:
            raise ValueError("cross-entropy needs non-empty source and target")
        total = 0.0
        for t in target:
            best = max(self.token_prob(t, s) for s in source)
            total -= math.log(max(best, self.floor))
        return total / len(target)


def dual_ce_combine(h_forward: float, h_backward: float) -> float:
    """Average cross-entropy plus the absolute disagreement between directions."""
    return (h_forward + h_backward) / 2 + abs(h_forward - h_backward)


class DualCEScorer:
    """Quality score from a forward H(target|source) and backward H(source|target) model.

    Both models only need a ``cross_entropy(given, predicted)`` method.
    """

    def __init__(self, forward, backward):
        self.forward = forward
        self.backward = backward

    def directional(self, source: Sequence[str], target: Sequence[str]) -> tuple[float, float]:
        return (self.forward.cross_entropy(source, target),
                self.backward.cross_entropy(target, source))

    def score(self, source: Sequence[str], target: Sequence[str]) -> float:
        if not source or not target:
            raise ValueError("dual cross-entropy needs non-empty sides")
        return dual_ce_combine(*self.directional(source, target))


def dual_ce_score(scorer: DualCEScorer, source: TokenSeq, target: TokenSeq) -> float:
    return scorer.score(source, target)
