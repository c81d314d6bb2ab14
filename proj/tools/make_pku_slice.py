#!/usr/bin/env python3
"""Build the desk-scale training/held-out slices from People's Daily (Jan 1998).

The source is the character-tagged copy of the PKU training material shipped in
the `snownlp` sdist (snownlp/seg/data.txt, one sentence per line, tokens of the
form `<char>/<b|m|e|s>`). Output files use the Bakeoff layout: one sentence per
line, words separated by two ASCII spaces.

    pip download --no-deps --no-binary :all: snownlp==0.12.3
    tar xzf snownlp-0.12.3.tar.gz
    python3 tools/make_pku_slice.py snownlp-0.12.3/snownlp/seg/data.txt tests/data
"""
import argparse
import pathlib


def to_words(line):
    words, cur = [], ""
    for tok in line.split():
        ch, _, tag = tok.rpartition("/")
        if not ch:
            continue
        if tag in ("b", "s") and cur:
            words.append(cur)
            cur = ""
        cur += ch
        if tag in ("e", "s"):
            words.append(cur)
            cur = ""
    if cur:
        words.append(cur)
    return words


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("source")
    ap.add_argument("outdir")
    ap.add_argument("--train", type=int, default=3000)
    ap.add_argument("--heldout", type=int, default=500)
    ap.add_argument("--toy", type=int, default=100)
    ap.add_argument("--toy-max-chars", type=int, default=40)
    args = ap.parse_args()

    sents = []
    with open(args.source, encoding="utf-8") as f:
        for line in f:
            words = to_words(line)
            if words:
                sents.append(words)

    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    train = sents[: args.train]
    heldout = sents[args.train : args.train + args.heldout]
    toy = [s for s in train if sum(map(len, s)) <= args.toy_max_chars][: args.toy]

    for name, data in (("pku_train_3000.utf8", train),
                       ("pku_heldout_500.utf8", heldout),
                       ("toy_100.utf8", toy)):
        with open(out / name, "w", encoding="utf-8") as f:
            for s in data:
                f.write("  ".join(s) + "\n")
        print(name, len(data), "sentences", sum(sum(map(len, s)) for s in data), "chars")


if __name__ == "__main__":
    main()
