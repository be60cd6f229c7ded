#!/usr/bin/env python3
"""Regenerate the bundled toy corpus under tests/data/toy/.

The corpus is synthetic English -> German built from a small word-for-word
dictionary, so lexical tables and alignments are known by construction.

    python scripts/make_toy_corpus.py [OUTDIR]
"""
import os
import random
import sys

LEXICON = [
    ("the", "die"), ("old", "alte"), ("man", "Mann"), ("woman", "Frau"), ("child", "Kind"),
    ("sees", "sieht"), ("buys", "kauft"), ("reads", "liest"), ("a", "ein"), ("big", "grosses"),
    ("small", "kleines"), ("house", "Haus"), ("book", "Buch"), ("car", "Auto"), ("in", "in"),
    ("city", "Stadt"), ("today", "heute"), ("and", "und"), ("then", "dann"), ("goes", "geht"),
    ("home", "heim"), ("quickly", "schnell"), ("very", "sehr"), ("good", "gut"), ("new", "neues"),
    ("red", "rotes"), ("friend", "Freund"), ("with", "mit"), ("her", "ihrem"), ("dog", "Hund"),
    ("every", "jeden"), ("morning", "Morgen"), ("evening", "Abend"), ("also", "auch"),
    ("often", "oft"), ("there", "dort"), ("beautiful", "schoenes"), ("garden", "Garten"),
    ("system", "System"), ("revenue", "Einnahmen"), ("all", "alle"), ("of", "des"),
    ("teacher", "Lehrer"), ("writes", "schreibt"), ("letter", "Brief"), ("long", "langen"),
]
# MT errors: wrong German word for a correct one (mostly unseen by the LM)
CONFUSIONS = {
    "sieht": "sah", "kauft": "verkauft", "grosses": "grossen", "Haus": "Maus",
    "Buch": "Bach", "Stadt": "Staat", "schnell": "schnelle", "Freund": "Feind",
    "Hund": "Hand", "Garten": "Karten", "Brief": "Brie", "Morgen": "Sorgen",
    "liest": "laest", "heute": "heut",
}
# MT errors spanning two tokens where the reference has one
SPLITS = {"schnell": ("sehr", "rasch"), "gut": ("nicht", "schlecht")}

EN2DE = dict(LEXICON)


def sentence(rng, lo, hi):
    n = rng.randint(lo, hi)
    words = []
    while len(words) < n:
        clause = rng.sample([e for e, _ in LEXICON], rng.randint(4, 7))
        words.extend(clause)
        words.append(",")
    words = words[:n]
    if words[-1] == ",":
        words[-1] = "."
    else:
        words.append(".")
    return words


def translate(words):
    return [EN2DE.get(w, w) for w in words]


def corrupt(rng, ref, n_errors):
    """MT tokens and MT->ref links for a corrupted copy of ``ref``.

    Punctuation is left unaligned so phrase extraction splits at clause
    boundaries.
    """
    positions = [i for i, w in enumerate(ref) if w in CONFUSIONS or w in SPLITS]
    chosen = set(rng.sample(positions, min(n_errors, len(positions))))
    mt, links = [], []
    for r, w in enumerate(ref):
        tok = w
        if r in chosen:
            if w in SPLITS and (w not in CONFUSIONS or rng.random() < 0.5):
                for tok in SPLITS[w]:
                    links.append((len(mt), r))
                    mt.append(tok)
                continue
            tok = CONFUSIONS[w]
        if w not in (",", "."):
            links.append((len(mt), r))
        mt.append(tok)
    return mt, links


def main(outdir):
    rng = random.Random(2022)
    os.makedirs(outdir, exist_ok=True)

    def write(name, lines):
        with open(os.path.join(outdir, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(line + "\n" for line in lines)

    # golden parallel corpus: mostly 20..30 tokens, some too short/long, some noisy
    golden = []
    for k in range(50):
        if k % 10 == 3:
            src = sentence(rng, 8, 15)
        elif k == 27:
            src = sentence(rng, 85, 90)
        else:
            src = sentence(rng, 19, 30)
        tgt = translate(src)
        if k % 10 == 7:
            tgt = rng.sample(tgt, len(tgt))
            tgt = ["Unsinn" if w in ("die", "und") else w for w in tgt]
            tgt = [w + "x" for w in tgt]
        golden.append(" ".join(src) + "\t" + " ".join(tgt))
    write("golden.tsv", golden)

    # pseudo corpus: monolingual English sources with "MT" outputs; a few non-English sources
    pseudo = []
    for k in range(50):
        src = sentence(rng, 20, 28)
        mt = translate(src)
        if k % 12 == 5:
            src = ["系统", "的", "所有", "收入", "都", "很", "好"] * 3
        pseudo.append(" ".join(src) + "\t" + " ".join(mt))
    write("pseudo.tsv", pseudo)

    # triplets with alignments
    triplets, aligns = [], []
    for k in range(50):
        src = sentence(rng, 12, 24)
        ref = translate(src)
        mt, links = corrupt(rng, ref, rng.choice([0, 1, 1, 2, 3]))
        triplets.append("\t".join((" ".join(src), " ".join(mt), " ".join(ref))))
        aligns.append(" ".join(f"{a}-{b}" for a, b in links))
    write("triplets.tsv", triplets)
    write("alignments.txt", aligns)

    # lexical tables: P(de|en) and P(en|de)
    fwd, bwd = [], []
    for en, de in LEXICON + [(",", ","), (".", ".")]:
        fwd.append(f"{en}\t{de}\t0.9")
        bwd.append(f"{de}\t{en}\t0.9")
    for de, wrong in CONFUSIONS.items():
        en = next(e for e, d in LEXICON if d == de)
        fwd.append(f"{en}\t{wrong}\t0.05")
        bwd.append(f"{wrong}\t{en}\t0.5")
    write("lex_forward.tsv", fwd)
    write("lex_backward.tsv", bwd)

    # target-side LM training text (clean German)
    write("lm_train.txt", [" ".join(translate(sentence(rng, 10, 30))) for _ in range(400)])


if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "..", "tests", "data", "toy"))
