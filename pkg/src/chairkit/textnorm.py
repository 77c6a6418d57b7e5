"""Caption normalization and object-mention extraction.

Captions are tokenized on whitespace/punctuation boundaries, each token is
singularized, and category surface forms (longest phrases first) are
matched against the singular stream.  All functions are pure; a shared
immutable vocabulary can be used from any number of workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import kernel

if TYPE_CHECKING:
    from .vocab import CategorySet

singularize = kernel.singularize


@dataclass(frozen=True)
class Token:
    """One caption token.

    ``surface`` is the original word as written; ``singular`` its
    lowercased singular form.  ``char_span`` is the ``[start, end)``
    code-point offset of the token in the original caption.
    """

    surface: str
    singular: str
    char_span: tuple[int, int]


@dataclass(frozen=True)
class ObjectMention:
    """One matched object occurrence in a caption.

    ``token_span`` is the inclusive ``[first, last]`` token-index range of
    the match; ``surface`` is the matched text sliced from the original
    caption.
    """

    category: str
    surface: str
    token_span: tuple[int, int]
    n_tokens: int


def tokenize(caption: str) -> list[Token]:
    """Split a caption into tokens, dropping punctuation.

    Tokens are maximal alphanumeric runs; hyphens and apostrophes
    separate.  The empty caption yields an empty list.
    """
    return [
        Token(surface=caption[start:end], singular=singular, char_span=(start, end))
        for start, end, singular in kernel.tokenize_spans(caption)
    ]


def extract_objects(caption: str, vocab: "CategorySet") -> list[ObjectMention]:
    """Extract coarse-category object mentions from a caption.

    Longest surface forms win: n-gram lengths from the vocabulary's
    longest phrase down to unigrams are each scanned left to right,
    greedily claiming non-overlapping token windows, so "hot dog" never
    additionally fires "dog".  Every occurrence is reported; deduplication
    is the scorer's concern.
    """
    tokens, raw = kernel.extract(caption, vocab.phrase_table(), vocab.max_phrase_len())
    mentions = []
    for category, first, last in raw:
        start = tokens[first][0]
        end = tokens[last][1]
        mentions.append(
            ObjectMention(
                category=category,
                surface=caption[start:end],
                token_span=(first, last),
                n_tokens=last - first + 1,
            )
        )
    return mentions


def normalized_words(caption: str) -> list[str]:
    """Lowercased token surfaces of a caption (its canonical word form)."""
    return [caption[start:end].lower() for start, end, _ in kernel.tokenize_spans(caption)]
