#!/usr/bin/env python3
"""Cross-checks `gloss-smt stats` against an independent recount.

Usage: recount_stats.py <corpus.tsv> <gloss-smt-binary>
Exits nonzero when any reported line differs from the recount.
"""
import subprocess
import sys

PUNCT = set("?!.,")


def tokenize(line, lower):
    """Whitespace split, edge punctuation detached, optional lowercasing."""
    out = []
    for chunk in line.split():
        lead = []
        while chunk and chunk[0] in PUNCT:
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail = []
        while chunk and chunk[-1] in PUNCT:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(lead)
        if chunk:
            out.append(chunk.lower() if lower else chunk)
        out.extend(reversed(trail))
    return out


def load_pairs(path):
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            en, gl = line.split("\t", 1)
            pairs.append((tokenize(en, True), tokenize(gl, False)))
    return pairs


def expected_lines(pairs):
    lines = [
        "pairs %d" % len(pairs),
        "source tokens %d types %d" % (
            sum(len(f) for f, _ in pairs),
            len({w for f, _ in pairs for w in f}),
        ),
        "target tokens %d types %d" % (
            sum(len(e) for _, e in pairs),
            len({w for _, e in pairs for w in e}),
        ),
    ]
    for k in (1, 2, 3):
        grams = set()
        for _, e in pairs:
            padded = ["<s>"] * (k - 1) + e + ["</s>"]
            for i in range(len(padded) - k + 1):
                grams.add(tuple(padded[i:i + k]))
        lines.append("ngram-types %d %d" % (k, len(grams)))
    return lines


def main():
    if len(sys.argv) != 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    corpus_path, binary = sys.argv[1], sys.argv[2]
    expect = expected_lines(load_pairs(corpus_path))
    proc = subprocess.run(
        [binary, "stats", corpus_path], capture_output=True, text=True, check=True
    )
    got = proc.stdout.splitlines()
    if got != expect:
        print("stats recount mismatch:", file=sys.stderr)
        print("  expected: " + " | ".join(expect), file=sys.stderr)
        print("  reported: " + " | ".join(got), file=sys.stderr)
        return 1
    print("stats recount: all %d lines match" % len(expect))
    return 0


if __name__ == "__main__":
    sys.exit(main())
