"""Command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
Verbosity is read from the ``TSFORGE_LOG`` environment variable
(``DEBUG``, ``INFO``, ``WARNING``, ...).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from collections import Counter
from contextlib import contextmanager
from dataclasses import replace

from .config import ConfigError, RunConfig, load_config
from .corpus import (
    DataError,
    format_parallel,
    open_text,
    parse_alignment,
    parse_parallel_line,
    parse_triplet_line,
    read_examples,
)
from .evaluation import evaluate_topk
from .filters import LengthBounds, NgramLM, language_id_filter, length_filter
from .phrase_align import extract_phrases
from .pipeline import (
    PipelineStats,
    _aligned_rows,
    chunked,
    load_scorers,
    map_ordered,
    route_outputs,
    run_pipeline,
)

log = logging.getLogger("tsforge")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
PROGRESS_EVERY = 100_000


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _setup_logging() -> None:
    level = os.environ.get("TSFORGE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


@contextmanager
def _output(path: str, force: bool):
    if path != "-" and os.path.exists(path) and not force:
        raise ConfigError(f"refusing to overwrite {path} (use --force)")
    with open_text(path, "w") as fh:
        yield fh


def _common(p: argparse.ArgumentParser, output: bool = True) -> None:
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--threads", type=int)
    p.add_argument("--shard-size", type=int)
    if output:
        p.add_argument("-o", "--output", default="-", help="output path ('-' = stdout)")
        p.add_argument("--force", action="store_true", default=None,
                       help="overwrite existing outputs")


def _sampling(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int)
    p.add_argument("--mask-token")
    p.add_argument("--repeat", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tsforge", description="Translation Suggestion data augmentation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("filter", help="length / language / quality filter a parallel corpus")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--min", type=int, dest="min_len")
    p.add_argument("--max", type=int, dest="max_len")
    p.add_argument("--lang-src", help="keep only sources passing language ID for this tag")
    p.add_argument("--lang-tgt", help="keep only targets passing language ID for this tag")
    p.add_argument("--quality-threshold", type=float)
    p.add_argument("--lex-forward")
    p.add_argument("--lex-backward")
    _common(p)

    for name, route in (("sample-golden", "golden"), ("sample-pseudo", "pseudo")):
        p = sub.add_parser(name, help=f"mask random spans ({route} route)")
        p.add_argument("input", nargs="?", default="-")
        _sampling(p)
        if route == "pseudo":
            p.add_argument("--lang", dest="pseudo_lang", help="language ID filter on the source")
        _common(p)
        p.set_defaults(route=route)

    p = sub.add_parser("align-extract", help="dump aligned phrase pairs")
    p.add_argument("--triplets", required=True)
    p.add_argument("--alignments", required=True)
    p.add_argument("--keep-partial", action="store_true", default=None)
    p.add_argument("--with-index", action="store_true",
                   help="prefix each line with the 1-based triplet row")
    _common(p)

    p = sub.add_parser("augment", help="run the full pipeline")
    p.add_argument("--golden")
    p.add_argument("--pseudo")
    p.add_argument("--triplets")
    p.add_argument("--alignments")
    p.add_argument("--out", help="output directory")
    p.add_argument("--min", type=int, dest="min_len")
    p.add_argument("--max", type=int, dest="max_len")
    p.add_argument("--beta1", type=float)
    p.add_argument("--beta2", type=float)
    p.add_argument("--quality-threshold", type=float)
    p.add_argument("--allow-empty", action="store_true", default=None)
    _sampling(p)
    _common(p, output=False)
    p.add_argument("--force", action="store_true", default=None)

    p = sub.add_parser("evaluate", help="top-1 BLEU of suggestions against gold labels")
    p.add_argument("--hyp", required=True)
    p.add_argument("--gold", required=True)

    p = sub.add_parser("stats", help="summarize an example file or a stats file")
    p.add_argument("input")

    p = sub.add_parser("train-lm", help="train and save the reference n-gram LM")
    p.add_argument("input")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--k", type=float, default=0.1)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--force", action="store_true")
    return parser


_FLAG_KEYS = ("golden", "pseudo", "triplets", "alignments", "out", "min_len", "max_len",
              "beta1", "beta2", "quality_threshold", "allow_empty", "seed", "mask_token",
              "repeat", "threads", "shard_size", "force", "pseudo_lang", "keep_partial",
              "lex_forward", "lex_backward")


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    return cfg.merged({k: getattr(args, k, None) for k in _FLAG_KEYS})


def cmd_filter(args) -> int:
    cfg = _config(args)
    if not (1 <= cfg.min_len <= cfg.max_len):
        raise ConfigError("need 1 <= --min <= --max")
    bounds = LengthBounds(cfg.min_len, cfg.max_len)
    scorer = None
    if cfg.lex_forward or cfg.lex_backward:
        if not (cfg.lex_forward and cfg.lex_backward and cfg.quality_threshold is not None):
            raise ConfigError("quality filtering needs --lex-forward, --lex-backward "
                              "and --quality-threshold")
        scorer = load_scorers(cfg).quality
    path = args.input

    def work(rows):
        st = Counter()
        kept = []
        for lineno, line in rows:
            pair = parse_parallel_line(line, lineno, path)
            st["read"] += 1
            if args.lang_src and not language_id_filter(pair.source, args.lang_src):
                continue
            if args.lang_tgt and not language_id_filter(pair.reference, args.lang_tgt):
                continue
            st["lang_kept"] += 1
            if not length_filter(pair, bounds):
                continue
            st["length_kept"] += 1
            if scorer is not None and not scorer.score(pair.source, pair.reference) < \
                    cfg.quality_threshold:
                continue
            st["quality_kept"] += 1
            kept.append(format_parallel(pair))
        return kept, st

    total = Counter()
    with open_text(path) as src, _output(args.output, bool(args.force)) as out:
        for kept, st in map_ordered(work, chunked(enumerate(src, 1), cfg.shard_size), cfg.threads):
            before = total["read"]
            out.writelines(kept)
            total.update(st)
            if total["read"] // PROGRESS_EVERY > before // PROGRESS_EVERY:
                log.info("filter: %d pairs read", total["read"])
    for key in ("read", "lang_kept", "length_kept", "quality_kept"):
        print(f"filter.{key}={total[key]}", file=sys.stderr)
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = _config(args)
    # sampling subcommands apply no length or quality filter
    cfg = replace(cfg, golden=None, pseudo=None, triplets=None, min_len=1, max_len=sys.maxsize,
                  lex_forward=None, lex_backward=None, filter_lex_forward=None,
                  filter_lex_backward=None)
    if args.input == "-":
        raise ConfigError("sampling needs a file path (stdin is not supported)")
    cfg = replace(cfg, **{args.route: args.input})
    cfg.validate(need_out=False)
    stats = PipelineStats(repeat=cfg.repeat)
    with _output(args.output, bool(cfg.force)) as out:
        for lines, st in route_outputs(args.route, cfg, load_scorers(cfg)):
            out.writelines(lines)
            stats.merge(st)
    sys.stderr.write(stats.to_kv())
    return EXIT_OK


def cmd_align_extract(args) -> int:
    cfg = replace(_config(args), triplets=args.triplets, alignments=args.alignments)
    keep_partial = bool(cfg.keep_partial)

    def work(rows):
        lines = []
        for lineno, tline, aline in rows:
            t = parse_triplet_line(tline, lineno, cfg.triplets)
            a = parse_alignment(aline, lineno, cfg.alignments)
            try:
                pairs = extract_phrases(t.mt, t.reference, a, keep_partial)
            except (IndexError, ValueError) as exc:
                log.warning("%s:%d: skipped: %s", cfg.triplets, lineno, exc)
                continue
            prefix = f"{lineno}\t" if args.with_index else ""
            lines.extend(prefix + p.dump(t.mt, t.reference) + "\n" for p in pairs)
        return lines

    with _output(args.output, bool(cfg.force)) as out:
        for lines in map_ordered(work, chunked(_aligned_rows(cfg), cfg.shard_size), cfg.threads):
            out.writelines(lines)
    return EXIT_OK


def cmd_augment(args) -> int:
    cfg = _config(args)
    stats = run_pipeline(cfg)
    print(stats.table(), file=sys.stderr)
    sys.stderr.write(stats.to_kv())
    if stats.total_emitted() == 0 and not cfg.allow_empty:
        log.error("no examples emitted (use --allow-empty to accept)")
        return EXIT_DATA
    return EXIT_OK


def cmd_evaluate(args) -> int:
    score = evaluate_topk(args.hyp, args.gold)
    print(f"{score.score:.2f}")
    print(score, file=sys.stderr)
    return EXIT_OK


def cmd_stats(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        head = fh.readline()
    if "\t" not in head and "=" in head:
        with open(args.input, encoding="utf-8") as fh:
            print(PipelineStats.from_kv(fh.read()).table())
        return EXIT_OK
    counts = Counter()
    label_tokens = Counter()
    for ex in read_examples(args.input, allow_empty_label=True):
        counts[ex.origin.value] += 1
        label_tokens[ex.origin.value] += len(ex.label)
    for origin in ("golden", "pseudo", "aligned"):
        n = counts[origin]
        mean = label_tokens[origin] / n if n else 0.0
        print(f"{origin}.examples={n}")
        print(f"{origin}.mean_label_tokens={mean:.3f}")
    print(f"total.examples={sum(counts.values())}")
    return EXIT_OK


def cmd_train_lm(args) -> int:
    if os.path.exists(args.output) and not args.force:
        raise ConfigError(f"refusing to overwrite {args.output} (use --force)")
    with open_text(args.input) as fh:
        lm = NgramLM(args.order, args.k).train(line.split() for line in fh)
    lm.save(args.output)
    return EXIT_OK


COMMANDS = {
    "filter": cmd_filter,
    "sample-golden": cmd_sample,
    "sample-pseudo": cmd_sample,
    "align-extract": cmd_align_extract,
    "augment": cmd_augment,
    "evaluate": cmd_evaluate,
    "stats": cmd_stats,
    "train-lm": cmd_train_lm,
}


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"tsforge: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"tsforge: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"tsforge: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
