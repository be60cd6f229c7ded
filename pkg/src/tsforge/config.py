"""Run configuration: a flat ``key = value`` file overridden by CLI flags."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from typing import Any

from .corpus import DEFAULT_MASK, DEFAULT_SEP


class ConfigError(ValueError):
    pass


_PATH_KEYS = ("golden", "pseudo", "triplets", "alignments", "lex_forward", "lex_backward",
              "filter_lex_forward", "filter_lex_backward", "lm", "lm_train")


@dataclass(frozen=True)
class RunConfig:
    # inputs; a route runs when its input is set
    golden: str | None = None
    pseudo: str | None = None
    triplets: str | None = None
    alignments: str | None = None
    out: str | None = None
    force: bool = False
    allow_empty: bool = False
    # corpus filters
    min_len: int = 20
    max_len: int = 80
    quality_threshold: float | None = None
    pseudo_lang: str | None = None
    lid_threshold: float = 0.5
    # scorers
    lex_forward: str | None = None
    lex_backward: str | None = None
    filter_lex_forward: str | None = None
    filter_lex_backward: str | None = None
    lex_floor: float = 1e-6
    lm: str | None = None
    lm_train: str | None = None
    lm_order: int = 2
    lm_k: float = 0.1
    # candidate acceptance
    beta1: float = 2.5
    beta2: float = 0.05
    keep_partial: bool = False
    # sampling
    seed: int = 0
    mask_token: str = DEFAULT_MASK
    sep_token: str = DEFAULT_SEP
    repeat: int = 1
    # execution
    threads: int = 1
    shard_size: int = 1000

    @property
    def routes(self) -> list[str]:
        out = []
        if self.golden:
            out.append("golden")
        if self.pseudo:
            out.append("pseudo")
        if self.triplets:
            out.append("aligned")
        return out

    def validate(self, need_out: bool = True) -> "RunConfig":
        if not self.routes:
            raise ConfigError("no route selected: set golden, pseudo and/or triplets")
        if self.triplets and not self.alignments:
            raise ConfigError("aligned route needs an alignments file")
        if need_out and not self.out:
            raise ConfigError("no output directory (out)")
        for key in _PATH_KEYS:
            path = getattr(self, key)
            if path and path != "-" and not os.path.exists(path):
                raise ConfigError(f"{key}: no such file {path!r}")
        if not 1 <= self.min_len <= self.max_len:
            raise ConfigError("need 1 <= min_len <= max_len")
        if self.repeat < 1 or self.threads < 1 or self.shard_size < 1:
            raise ConfigError("repeat, threads and shard_size must be >= 1")
        if self.triplets:
            if not (self.lex_forward and self.lex_backward):
                raise ConfigError("aligned route needs lex_forward and lex_backward")
            if not (self.lm or self.lm_train):
                raise ConfigError("aligned route needs lm or lm_train")
        corpus_scorer = (self.filter_lex_forward or self.lex_forward) and \
            (self.filter_lex_backward or self.lex_backward)
        if (self.golden or self.pseudo) and corpus_scorer and self.quality_threshold is None:
            raise ConfigError("a quality scorer is configured: quality_threshold is required")
        if not self.mask_token or len(self.mask_token.split()) != 1:
            raise ConfigError("mask_token must be a single token")
        if not self.sep_token or len(self.sep_token.split()) != 1:
            raise ConfigError("sep_token must be a single token")
        return self

    def merged(self, overrides: dict[str, Any]) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = _TYPES[key]
    if "bool" in kind:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: not a boolean: {raw!r}")
    if kind.startswith("int"):
        return int(raw)
    if kind.startswith("float"):
        return float(raw)
    return raw


def load_config(path: str) -> RunConfig:
    """Parse a ``key = value`` file; ``#`` starts a comment. Relative paths
    are resolved against the config file's directory."""
    base = os.path.dirname(os.path.abspath(path))
    values: dict[str, Any] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, raw = line.partition("=")
            key, raw = key.strip(), raw.strip()
            if not eq or key not in _TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown or malformed setting {line!r}")
            try:
                val = _coerce(key, raw)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {raw!r}") from None
            if (key in _PATH_KEYS or key == "out") and val != "-" and not os.path.isabs(val):
                val = os.path.join(base, val)
            values[key] = val
    return RunConfig(**values)
