"""Masked-corpus emission.

Two transforms over reference captions: object masking replaces every
extracted object mention with exactly one mask token (a multi-word
mention still collapses to a single token); standard masking hits each
word independently at a configured rate.  Both store enough target
information to reconstruct the normalized caption exactly, and both are
deterministic for a fixed seed regardless of record order or worker
count.
"""

from __future__ import annotations

import enum
import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Any, IO, Iterable, Sequence

from .errors import ConfigError
from .ingest import (
    CaptionRecord,
    GtPolicy,
    ImageId,
    ground_truth_objects,
    id_sort_key,
)
from .textnorm import extract_objects, tokenize
from .vocab import CategorySet


class MaskMode(enum.Enum):
    OBJMLM = "objmlm"
    STANDARD = "standard"


@dataclass(frozen=True)
class MaskingConfig:
    mode: MaskMode
    mlm_rate: float = 0.15
    restrict_to_image_objects: bool = False
    mask_token: str = "[MASK]"
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.mlm_rate <= 1:
            raise ConfigError(f"mlm_rate must be in (0, 1], got {self.mlm_rate}")
        if not self.mask_token:
            raise ConfigError("mask_token must be non-empty")


@dataclass(frozen=True)
class MaskedExample:
    """A masked caption plus the (word-position, original text) pairs
    needed to invert the masking."""

    image_id: ImageId
    masked_text: str
    targets: tuple[tuple[int, str], ...]
    n_masked_units: int


def normalize_caption(caption: str) -> str:
    """The text masking operates on: lowercased tokens joined by single
    spaces, punctuation dropped."""
    return " ".join(t.surface.lower() for t in tokenize(caption))


def reconstruct(example: MaskedExample) -> str:
    """Reinsert the targets; inverse of masking on the normalized text."""
    words = example.masked_text.split(" ") if example.masked_text else []
    for position, surface in example.targets:
        words[position] = surface
    return " ".join(" ".join(words).split())


def mask_objmlm(
    record: CaptionRecord,
    caption: str,
    vocab: CategorySet,
    cfg: MaskingConfig,
) -> MaskedExample:
    """Mask every object mention in ``caption`` with one mask token.

    With ``restrict_to_image_objects`` and instance labels present on the
    record, only mentions whose category is among the image's objects are
    masked; without labels the restriction is a no-op (reference captions
    are presumed image-grounded).
    """
    if cfg.mode is not MaskMode.OBJMLM:
        raise ConfigError(f"mask_objmlm called with mode {cfg.mode.value!r}")
    allowed: frozenset[str] | None = None
    if cfg.restrict_to_image_objects and record.instance_objects is not None:
        allowed = ground_truth_objects(record, vocab, GtPolicy.INSTANCES_ONLY).objects
    tokens = tokenize(caption)
    mentions = extract_objects(caption, vocab)
    starts = {
        m.token_span[0]: m
        for m in mentions
        if allowed is None or m.category in allowed
    }
    words: list[str] = []
    targets: list[tuple[int, str]] = []
    i = 0
    while i < len(tokens):
        mention = starts.get(i)
        if mention is None:
            words.append(tokens[i].surface.lower())
            i += 1
            continue
        first, last = mention.token_span
        original = " ".join(t.surface.lower() for t in tokens[first : last + 1])
        targets.append((len(words), original))
        words.append(cfg.mask_token)
        i = last + 1
    return MaskedExample(
        image_id=record.image_id,
        masked_text=" ".join(words),
        targets=tuple(targets),
        n_masked_units=len(targets),
    )


def _example_rng(cfg: MaskingConfig, image_id: ImageId, caption: str) -> random.Random:
    # Seed from (global seed, image id, caption) so output is independent
    # of record order and worker scheduling.
    digest = hashlib.blake2b(
        f"{cfg.seed}\x1f{type(image_id).__name__}:{image_id}\x1f{caption}".encode(),
        digest_size=8,
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


def mask_standard(
    caption: str,
    cfg: MaskingConfig,
    image_id: ImageId = "",
) -> MaskedExample:
    """Mask each word independently with probability ``cfg.mlm_rate``."""
    if cfg.mode is not MaskMode.STANDARD:
        raise ConfigError(f"mask_standard called with mode {cfg.mode.value!r}")
    rng = _example_rng(cfg, image_id, caption)
    words: list[str] = []
    targets: list[tuple[int, str]] = []
    for token in tokenize(caption):
        word = token.surface.lower()
        if rng.random() < cfg.mlm_rate:
            targets.append((len(words), word))
            words.append(cfg.mask_token)
        else:
            words.append(word)
    return MaskedExample(
        image_id=image_id,
        masked_text=" ".join(words),
        targets=tuple(targets),
        n_masked_units=len(targets),
    )


def mask_caption(
    record: CaptionRecord,
    caption: str,
    vocab: CategorySet,
    cfg: MaskingConfig,
) -> MaskedExample:
    if cfg.mode is MaskMode.OBJMLM:
        return mask_objmlm(record, caption, vocab, cfg)
    return mask_standard(caption, cfg, image_id=record.image_id)


def iter_examples(
    records: Sequence[CaptionRecord],
    vocab: CategorySet,
    cfg: MaskingConfig,
) -> Iterable[MaskedExample]:
    """One masked example per reference caption, in image_id order so
    emitted bytes are reproducible."""
    for record in sorted(records, key=lambda r: id_sort_key(r.image_id)):
        for caption in record.references:
            yield mask_caption(record, caption, vocab, cfg)


def example_to_dict(example: MaskedExample) -> dict[str, Any]:
    return {
        "image_id": example.image_id,
        "masked_text": example.masked_text,
        "targets": [[position, surface] for position, surface in example.targets],
    }


def example_from_dict(data: dict[str, Any]) -> MaskedExample:
    targets = tuple((int(p), str(s)) for p, s in data["targets"])
    return MaskedExample(
        image_id=data["image_id"],
        masked_text=data["masked_text"],
        targets=targets,
        n_masked_units=len(targets),
    )


def emit_corpus(
    records: Sequence[CaptionRecord],
    vocab: CategorySet,
    cfg: MaskingConfig,
    out: str | Path | IO[str],
) -> dict[str, Any]:
    """Write one JSON line per reference caption to ``out`` (path or open
    text stream); returns summary statistics."""
    n_examples = 0
    n_units = 0

    def _write(fh: IO[str]) -> None:
        nonlocal n_examples, n_units
        for example in iter_examples(records, vocab, cfg):
            fh.write(json.dumps(example_to_dict(example), ensure_ascii=False) + "\n")
            n_examples += 1
            n_units += example.n_masked_units

    if hasattr(out, "write"):
        _write(out)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            _write(fh)
    return {
        "n_examples": n_examples,
        "n_masked_units": n_units,
        "units_per_example": (n_units / n_examples) if n_examples else 0.0,
    }
