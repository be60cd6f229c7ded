"""Core value types, tokenization and the TSV/alignment file formats.

Token sequences are plain tuples of strings. Spans are half-open
``[start, start + length)``; the inclusive ``i..j`` notation only appears in
the human-readable phrase dump.
"""
from __future__ import annotations

import enum
import re
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Sequence, Tuple

TokenSeq = Tuple[str, ...]

DEFAULT_MASK = "<MASK_REP>"
DEFAULT_SEP = "[SEP]"

_WS = re.compile(r"\s")


class DataError(ValueError):
    """Malformed input data. Carries an optional path and 1-based line number."""

    def __init__(self, message: str, path: str | None = None, lineno: int | None = None):
        self.path = path
        self.lineno = lineno
        where = ""
        if path is not None:
            where = f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class Origin(str, enum.Enum):
    GOLDEN = "golden"
    PSEUDO = "pseudo"
    ALIGNED = "aligned"


def tokenize(text: str) -> TokenSeq:
    """Split on runs of Unicode whitespace; never yields empty tokens."""
    return tuple(text.split())


def detokenize(tokens: Iterable[str]) -> str:
    return " ".join(tokens)


def check_tokens(tokens: Sequence[str], what: str = "sequence") -> TokenSeq:
    tokens = tuple(tokens)
    try:
        # fast path: a clean sequence survives join + split unchanged
        if tuple(" ".join(tokens).split()) == tokens:
            return tokens
    except TypeError:
        pass
    for tok in tokens:
        if not isinstance(tok, str) or not tok or _WS.search(tok):
            raise ValueError(f"invalid token {tok!r} in {what}")
    return tokens


@dataclass(frozen=True)
class Span:
    start: int
    length: int

    def __post_init__(self):
        if self.start < 0 or self.length < 0:
            raise ValueError(f"negative span {self.start},{self.length}")

    @property
    def end(self) -> int:
        return self.start + self.length

    @classmethod
    def inclusive(cls, i: int, j: int) -> "Span":
        """Build from an inclusive ``i..j`` range (``j = i - 1`` gives an empty span)."""
        return cls(i, j - i + 1)

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end

    def check(self, n: int) -> None:
        if self.end > n:
            raise IndexError(f"span [{self.start},{self.end}) out of bounds for length {n}")

    def of(self, tokens: Sequence[str]) -> TokenSeq:
        self.check(len(tokens))
        return tuple(tokens[self.start:self.end])

    def __str__(self) -> str:
        return f"{self.start}..{self.end - 1}"


@dataclass(frozen=True)
class Alignment:
    """Set of (mt_index, ref_index) token links."""

    links: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "links", frozenset((int(a), int(b)) for a, b in self.links))
        for a, b in self.links:
            if a < 0 or b < 0:
                raise ValueError(f"negative alignment index {a}-{b}")

    def __len__(self) -> int:
        return len(self.links)

    def __iter__(self):
        return iter(sorted(self.links))

    def check_bounds(self, mt_len: int, ref_len: int) -> None:
        for a, b in self.links:
            if a >= mt_len or b >= ref_len:
                raise IndexError(
                    f"alignment link {a}-{b} out of bounds for lengths {mt_len}/{ref_len}"
                )

    def to_line(self) -> str:
        return " ".join(f"{a}-{b}" for a, b in sorted(self.links))


def parse_alignment(line: str, lineno: int | None = None, path: str | None = None) -> Alignment:
    links = set()
    for tok in line.split():
        a, dash, b = tok.partition("-")
        if not dash or not a.isdigit() or not b.isdigit():
            raise DataError(f"malformed alignment token {tok!r}", path, lineno)
        links.add((int(a), int(b)))
    return Alignment(frozenset(links))


@dataclass(frozen=True)
class ParallelPair:
    source: TokenSeq
    reference: TokenSeq

    def __post_init__(self):
        object.__setattr__(self, "source", check_tokens(self.source, "source"))
        object.__setattr__(self, "reference", check_tokens(self.reference, "reference"))
        if not self.source or not self.reference:
            raise ValueError("parallel pair sides must be non-empty")


@dataclass(frozen=True)
class Triplet:
    source: TokenSeq
    mt: TokenSeq
    reference: TokenSeq

    def __post_init__(self):
        for name in ("source", "mt", "reference"):
            toks = check_tokens(getattr(self, name), name)
            if not toks:
                raise ValueError(f"triplet {name} must be non-empty")
            object.__setattr__(self, name, toks)


@dataclass(frozen=True)
class TSExample:
    """One Translation Suggestion training example."""

    source: TokenSeq
    masked_target: TokenSeq
    label: TokenSeq
    origin: Origin
    mask_token: str = DEFAULT_MASK
    allow_empty_label: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "source", check_tokens(self.source, "source"))
        object.__setattr__(self, "masked_target", check_tokens(self.masked_target, "masked target"))
        object.__setattr__(self, "label", check_tokens(self.label, "label"))
        object.__setattr__(self, "origin", Origin(self.origin))
        m = self.mask_token
        if self.masked_target.count(m) != 1:
            raise ValueError(f"masked target must contain {m!r} exactly once")
        if m in self.source or m in self.label:
            raise ValueError(f"mask token {m!r} occurs in source or label")
        if not self.label and not self.allow_empty_label:
            raise ValueError("empty label")

    def unmask(self, fill: Sequence[str] | None = None) -> TokenSeq:
        """Replace the mask with ``fill`` (the label by default)."""
        fill = self.label if fill is None else tuple(fill)
        k = self.masked_target.index(self.mask_token)
        return self.masked_target[:k] + tuple(fill) + self.masked_target[k + 1:]


def render_model_input(example: TSExample, sep_token: str = DEFAULT_SEP) -> TokenSeq:
    """``source + [sep] + masked_target``, the encoder input for a TS model."""
    if example.masked_target.count(example.mask_token) != 1:
        raise ValueError("masked target must hold exactly one mask token")
    if sep_token in example.source or sep_token in example.masked_target:
        raise ValueError(f"separator {sep_token!r} collides with example tokens")
    return example.source + (sep_token,) + example.masked_target


# --- file formats -----------------------------------------------------------

@contextmanager
def open_text(path: str, mode: str = "r") -> Iterator[IO[str]]:
    """Open a UTF-8 text file; ``-`` means stdin/stdout."""
    if path == "-":
        yield sys.stdin if "r" in mode else sys.stdout
        return
    with open(path, mode, encoding="utf-8", newline="\n") as fh:
        yield fh


def _columns(line: str, n: int, path: str | None, lineno: int) -> list[str]:
    cols = line.rstrip("\n").rstrip("\r").split("\t")
    if len(cols) != n:
        raise DataError(f"expected {n} tab-separated columns, got {len(cols)}", path, lineno)
    return cols


def parse_parallel_line(line: str, lineno: int = 0, path: str | None = None) -> ParallelPair:
    src, ref = _columns(line, 2, path, lineno)
    try:
        return ParallelPair(tokenize(src), tokenize(ref))
    except ValueError as exc:
        raise DataError(str(exc), path, lineno) from None


def parse_triplet_line(line: str, lineno: int = 0, path: str | None = None) -> Triplet:
    src, mt, ref = _columns(line, 3, path, lineno)
    try:
        return Triplet(tokenize(src), tokenize(mt), tokenize(ref))
    except ValueError as exc:
        raise DataError(str(exc), path, lineno) from None


def parse_example_line(line: str, lineno: int = 0, path: str | None = None,
                       mask_token: str = DEFAULT_MASK,
                       allow_empty_label: bool = False) -> TSExample:
    src, masked, label, origin = _columns(line, 4, path, lineno)
    try:
        return TSExample(tokenize(src), tokenize(masked), tokenize(label), Origin(origin),
                         mask_token, allow_empty_label)
    except ValueError as exc:
        raise DataError(str(exc), path, lineno) from None


def format_parallel(pair: ParallelPair) -> str:
    return f"{detokenize(pair.source)}\t{detokenize(pair.reference)}\n"


def format_triplet(t: Triplet) -> str:
    return f"{detokenize(t.source)}\t{detokenize(t.mt)}\t{detokenize(t.reference)}\n"


def format_example(e: TSExample) -> str:
    return "\t".join((detokenize(e.source), detokenize(e.masked_target),
                      detokenize(e.label), e.origin.value)) + "\n"


def _read(path_or_lines, parse, **kw):
    if isinstance(path_or_lines, str):
        with open_text(path_or_lines) as fh:
            name = "<stdin>" if path_or_lines == "-" else path_or_lines
            for lineno, line in enumerate(fh, 1):
                yield parse(line, lineno, name, **kw)
    else:
        for lineno, line in enumerate(path_or_lines, 1):
            yield parse(line, lineno, None, **kw)


def read_parallel(path_or_lines) -> Iterator[ParallelPair]:
    return _read(path_or_lines, parse_parallel_line)


def read_triplets(path_or_lines) -> Iterator[Triplet]:
    return _read(path_or_lines, parse_triplet_line)


def read_examples(path_or_lines, mask_token: str = DEFAULT_MASK,
                  allow_empty_label: bool = False) -> Iterator[TSExample]:
    return _read(path_or_lines, parse_example_line, mask_token=mask_token,
                 allow_empty_label=allow_empty_label)


def read_alignments(path_or_lines) -> Iterator[Alignment]:
    def parse(line, lineno, path):
        return parse_alignment(line, lineno, path)
    return _read(path_or_lines, parse)


def write_lines(fh: IO[str], records: Iterable, fmt) -> int:
    n = 0
    for rec in records:
        fh.write(fmt(rec))
        n += 1
    return n
