"""Aligned phrase-pair extraction between an MT output and its reference.

Extraction runs in three pure stages:

1. enumerate span pairs that are *consistent* (no link leaves the pair)
   and *fully covered* (every token inside has a link inside);
2. keep only containment-maximal pairs;
3. trim identical leading/trailing tokens from each survivor.

Stage 1-2 run in a compiled kernel when available (``BACKEND == "cython"``)
and otherwise in pure Python. Set ``TSFORGE_PURE=1`` to force the fallback.
:func:`brute_force_extract` is an independent quartic enumeration used as
a test oracle.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _kernels_py
from .corpus import Alignment, Span, TokenSeq

if os.environ.get("TSFORGE_PURE"):
    _kernel = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _kernel  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _kernel = _kernels_py
        BACKEND = "python"


@dataclass(frozen=True)
class PhrasePair:
    y_span: Span
    r_span: Span

    @classmethod
    def inclusive(cls, i: int, j: int, a: int, b: int) -> "PhrasePair":
        return cls(Span.inclusive(i, j), Span.inclusive(a, b))

    def sort_key(self):
        return (self.y_span.start, self.y_span.length, self.r_span.start, self.r_span.length)

    def contains(self, other: "PhrasePair") -> bool:
        return self.y_span.contains(other.y_span) and self.r_span.contains(other.r_span)

    def dump(self, mt: Sequence[str], ref: Sequence[str]) -> str:
        """Debug line ``y[i..j] TAB r[a..b] TAB mt phrase TAB ref phrase``."""
        return "\t".join((f"y[{self.y_span}]", f"r[{self.r_span}]",
                          " ".join(self.y_span.of(mt)), " ".join(self.r_span.of(ref))))


def _link_maps(alignment: Alignment):
    y2r: dict[int, list[int]] = {}
    r2y: dict[int, list[int]] = {}
    for a, b in alignment.links:
        y2r.setdefault(a, []).append(b)
        r2y.setdefault(b, []).append(a)
    return y2r, r2y


def is_consistent(alignment: Alignment, y_span: Span, r_span: Span) -> bool:
    """No link touching either span leaves the other span."""
    for a, b in alignment.links:
        in_y = y_span.start <= a < y_span.end
        in_r = r_span.start <= b < r_span.end
        if in_y != in_r:
            return False
    return True


def has_full_coverage(alignment: Alignment, y_span: Span, r_span: Span) -> bool:
    """Every token of both spans has at least one link into the other span."""
    rows = set()
    cols = set()
    for a, b in alignment.links:
        if y_span.start <= a < y_span.end and r_span.start <= b < r_span.end:
            rows.add(a)
            cols.add(b)
    return len(rows) == y_span.length and len(cols) == r_span.length


def trim_phrase(mt: Sequence[str], ref: Sequence[str], pair: PhrasePair,
                keep_partial: bool = False) -> PhrasePair | None:
    """Strip equal leading token pairs, then equal trailing token pairs.

    Returns None when both sides are consumed, or when one side is consumed
    and ``keep_partial`` is false.
    """
    pair.y_span.check(len(mt))
    pair.r_span.check(len(ref))
    i, j = pair.y_span.start, pair.y_span.end
    a, b = pair.r_span.start, pair.r_span.end
    while i < j and a < b and mt[i] == ref[a]:
        i += 1
        a += 1
    while i < j and a < b and mt[j - 1] == ref[b - 1]:
        j -= 1
        b -= 1
    if i == j and a == b:
        return None
    if (i == j or a == b) and not keep_partial:
        return None
    return PhrasePair(Span(i, j - i), Span(a, b - a))


def maximal_pairs(mt_len: int, ref_len: int, alignment: Alignment) -> list[PhrasePair]:
    """Untrimmed containment-maximal pairs, sorted by MT span."""
    alignment.check_bounds(mt_len, ref_len)
    return [PhrasePair.inclusive(*c) for c in _kernel.maximal_pairs(mt_len, ref_len, alignment.links)]


def _finish(mt, ref, pairs: Iterable[PhrasePair], keep_partial: bool) -> list[PhrasePair]:
    seen = set()
    for p in pairs:
        t = trim_phrase(mt, ref, p, keep_partial)
        if t is not None:
            seen.add(t)
    return sorted(seen, key=PhrasePair.sort_key)


def extract_phrases(mt: Sequence[str], ref: Sequence[str], alignment: Alignment,
                    keep_partial: bool = False) -> list[PhrasePair]:
    """Trimmed, deduplicated maximal aligned phrase pairs."""
    return _finish(mt, ref, maximal_pairs(len(mt), len(ref), alignment), keep_partial)


def brute_force_candidates(mt_len: int, ref_len: int, alignment: Alignment) -> list[PhrasePair]:
    """Every span pair passing both predicates, by direct four-fold enumeration."""
    alignment.check_bounds(mt_len, ref_len)
    y2r, r2y = _link_maps(alignment)
    out = []
    for i in range(mt_len):
        for j in range(i, mt_len):
            for a in range(ref_len):
                for b in range(a, ref_len):
                    if _is_match(y2r, r2y, i, j, a, b) and _covered(y2r, r2y, i, j, a, b):
                        out.append(PhrasePair.inclusive(i, j, a, b))
    return out


def _is_match(y2r, r2y, i, j, a, b) -> bool:
    for ii in range(i, j + 1):
        for t in y2r.get(ii, ()):
            if t < a or t > b:
                return False
    for aa in range(a, b + 1):
        for t in r2y.get(aa, ()):
            if t < i or t > j:
                return False
    return True


def _covered(y2r, r2y, i, j, a, b) -> bool:
    for ii in range(i, j + 1):
        if not any(a <= t <= b for t in y2r.get(ii, ())):
            return False
    for aa in range(a, b + 1):
        if not any(i <= t <= j for t in r2y.get(aa, ())):
            return False
    return True


def brute_force_maximal(mt_len: int, ref_len: int, alignment: Alignment) -> list[PhrasePair]:
    cands = brute_force_candidates(mt_len, ref_len, alignment)
    keep = [c for c in cands if not any(o != c and o.contains(c) for o in cands)]
    return sorted(keep, key=PhrasePair.sort_key)


def brute_force_extract(mt: Sequence[str], ref: Sequence[str], alignment: Alignment,
                        keep_partial: bool = False) -> list[PhrasePair]:
    return _finish(mt, ref, brute_force_maximal(len(mt), len(ref), alignment), keep_partial)


def splice(tokens: Sequence[str], span: Span, replacement: Sequence[str]) -> TokenSeq:
    span.check(len(tokens))
    tokens = tuple(tokens)
    return tokens[:span.start] + tuple(replacement) + tokens[span.end:]
