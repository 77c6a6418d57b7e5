"""Pure-Python text kernel: tokenize, singularize, greedy phrase matching.

This is the fallback for the compiled kernel in ``_speedups.pyx``; both
must stay behaviourally identical (enforced by the kernel parity tests).
The hot path is :func:`extract`, which runs once per caption over the
whole corpus.
"""

from __future__ import annotations

from ._rules import (
    ES_STEM_ENDINGS,
    IRREGULAR_SINGULARS,
    KEEP_S_ENDINGS,
    VES_SINGULARS,
)

KERNEL_NAME = "python"

_SINGULAR_CACHE: dict[str, str] = {}


def singularize(word: str) -> str:
    """Deterministic rule-based singular of a lowercase token."""
    w = word.lower()
    cached = _SINGULAR_CACHE.get(w)
    if cached is not None:
        return cached
    out = IRREGULAR_SINGULARS.get(w)
    if out is None:
        out = VES_SINGULARS.get(w)
    if out is None:
        if w.endswith("ies") and len(w) > 3:
            out = w[:-3] + "y"
        elif w.endswith("es") and len(w) > 2 and w[:-2].endswith(ES_STEM_ENDINGS):
            out = w[:-2]
        elif w.endswith("s") and len(w) > 1 and not w.endswith(KEEP_S_ENDINGS):
            out = w[:-1]
        else:
            out = w
    _SINGULAR_CACHE[w] = out
    return out


def tokenize_spans(caption: str) -> list[tuple[int, int, str]]:
    """Token spans of a caption: ``(start, end, singular)`` triples.

    Tokens are maximal runs of alphanumeric characters; everything else
    (whitespace, punctuation, hyphens) separates.  Offsets are code-point
    indices into the original caption.
    """
    tokens: list[tuple[int, int, str]] = []
    n = len(caption)
    i = 0
    while i < n:
        if caption[i].isalnum():
            j = i + 1
            while j < n and caption[j].isalnum():
                j += 1
            tokens.append((i, j, singularize(caption[i:j])))
            i = j
        else:
            i += 1
    return tokens


def extract(
    caption: str, phrases: dict[str, str], max_len: int
) -> tuple[list[tuple[int, int, str]], list[tuple[str, int, int]]]:
    """Tokenize and match category phrases against the singular stream.

    ``phrases`` maps space-joined singularized surface forms to coarse
    category names.  Matching is longest-first: every n-gram length from
    ``max_len`` down to 1 is scanned left to right, greedily claiming
    non-overlapping token windows.  Returns ``(tokens, mentions)`` where
    mentions are ``(category, first_token, last_token)`` sorted by
    position.
    """
    tokens = tokenize_spans(caption)
    nt = len(tokens)
    if nt == 0 or max_len <= 0:
        return tokens, []
    singulars = [t[2] for t in tokens]
    taken = [False] * nt
    found: list[tuple[str, int, int]] = []
    for length in range(min(max_len, nt), 0, -1):
        i = 0
        limit = nt - length
        while i <= limit:
            free = True
            for k in range(i, i + length):
                if taken[k]:
                    free = False
                    break
            if not free:
                i += 1
                continue
            key = singulars[i] if length == 1 else " ".join(singulars[i : i + length])
            category = phrases.get(key)
            if category is None:
                i += 1
                continue
            found.append((category, i, i + length - 1))
            for k in range(i, i + length):
                taken[k] = True
            i += length
    found.sort(key=lambda m: m[1])
    return tokens, found
