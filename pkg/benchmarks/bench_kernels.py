#!/usr/bin/env python3
"""Benchmark the compiled text kernel against the pure-Python fallback.

Generates a synthetic caption corpus, then times singularize,
tokenize_spans, and extract on each available implementation and prints
per-call timings with the speedup ratio.

Usage:
    python3 benchmarks/bench_kernels.py [--captions N] [--repeats K]
"""

import argparse
import random
import statistics
import time

from chairkit import _pykernel
from chairkit.vocab import coco_synonyms_path, load_synonym_lexicon

try:
    from chairkit import _speedups
except ImportError:
    _speedups = None

WORD_POOL = [
    "a", "the", "on", "next", "to", "dog", "hot", "dining", "table", "cat",
    "person", "frisbee", "wine", "glass", "fire", "hydrant", "red", "small",
    "sitting", "park", "bench", "horses", "cars", "buses", "sandwiches",
]


def build_corpus(n_captions: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    corpus = []
    for _ in range(n_captions):
        n_words = rng.randint(6, 16)
        corpus.append(" ".join(rng.choice(WORD_POOL) for _ in range(n_words)))
    return corpus


def time_call(fn, repeats: int) -> float:
    """Best-of-N wall time in seconds."""
    best = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best.append(time.perf_counter() - start)
    return min(best)


def bench_impl(impl, corpus, phrases, max_len, repeats):
    words = [w for caption in corpus for w in caption.split()]
    return {
        "singularize": time_call(
            lambda: [impl.singularize(w) for w in words], repeats
        ),
        "tokenize_spans": time_call(
            lambda: [impl.tokenize_spans(c) for c in corpus], repeats
        ),
        "extract": time_call(
            lambda: [impl.extract(c, phrases, max_len) for c in corpus], repeats
        ),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--captions", type=int, default=20000,
                        help="corpus size (default: %(default)s)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="repeats per timing, best is kept (default: %(default)s)")
    parser.add_argument("--seed", type=int, default=1234)
    args = parser.parse_args()

    corpus = build_corpus(args.captions, args.seed)
    vocab = load_synonym_lexicon(coco_synonyms_path())
    phrases = vocab.phrase_table()
    max_len = vocab.max_phrase_len()

    impls = {"python": _pykernel}
    if _speedups is not None:
        impls["cython"] = _speedups
    else:
        print("compiled extension not built; timing the fallback only")

    results = {
        name: bench_impl(impl, corpus, phrases, max_len, args.repeats)
        for name, impl in impls.items()
    }

    n_words = sum(len(c.split()) for c in corpus)
    print(f"corpus: {args.captions} captions, {n_words} words, "
          f"best of {args.repeats} runs\n")
    header = f"{'kernel':<22}" + "".join(f"{name:>12}" for name in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for op in ("singularize", "tokenize_spans", "extract"):
        row = f"{op:<22}"
        for name in impls:
            row += f"{results[name][op] * 1000:>10.1f}ms"
        if len(impls) == 2:
            ratio = results["python"][op] / results["cython"][op]
            row += f"{ratio:>9.1f}x"
        print(row)

    if len(impls) == 2:
        mean_ratio = statistics.geometric_mean(
            results["python"][op] / results["cython"][op]
            for op in ("singularize", "tokenize_spans", "extract")
        )
        print(f"\ngeometric-mean speedup: {mean_ratio:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
