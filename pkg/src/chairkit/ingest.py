"""Dataset and prediction loading.

Turns COCO-style caption/instance files, NoCaps-style annotation files,
generic record JSON, and prediction files into immutable
:class:`CaptionRecord` objects, and derives each image's ground-truth
object set under a configurable policy.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, IO, Iterable, Mapping, Sequence, Union

from .errors import (
    ConfigError,
    FormatError,
    IntegrityError,
    MappingError,
    ValidationError,
)
from .textnorm import extract_objects
from .vocab import CategorySet, normalize_name

ImageId = Union[int, str]

_EVAL_SPLITS = ("val", "test")


def id_sort_key(image_id: ImageId) -> tuple[int, int, str]:
    """Total order over mixed int/str image ids (ints first)."""
    if isinstance(image_id, int):
        return (0, image_id, "")
    return (1, 0, str(image_id))


class DomainTag(enum.Enum):
    IN_DOMAIN = "in-domain"
    NEAR_DOMAIN = "near-domain"
    OUT_OF_DOMAIN = "out-of-domain"

    @classmethod
    def parse(cls, value: str) -> "DomainTag":
        canon = value.strip().lower().replace("_", "-").replace(" ", "-")
        try:
            return cls(canon)
        except ValueError:
            raise FormatError(f"unknown domain tag {value!r}") from None


class GtPolicy(enum.Enum):
    REFERENCES_ONLY = "references"
    INSTANCES_ONLY = "instances"
    UNION = "union"


class Provenance(enum.Enum):
    FROM_REFERENCES = "references"
    FROM_INSTANCES = "instances"
    BOTH = "both"


@dataclass(frozen=True)
class CaptionRecord:
    """One image: its reference captions, optional prediction, optional
    instance-label object names, optional domain tag."""

    image_id: ImageId
    references: tuple[str, ...]
    prediction: str | None = None
    instance_objects: frozenset[str] | None = None
    domain_tag: DomainTag | None = None


@dataclass(frozen=True)
class GroundTruthObjects:
    """Per-image set of coarse categories a caption may legitimately
    mention, with the source of each category."""

    image_id: ImageId
    objects: frozenset[str]
    provenance: Mapping[str, Provenance]


def _load_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from exc


def _image_caption_records(
    data: Mapping[str, Any],
    path: str | Path,
    keep: "set[ImageId] | None" = None,
    require_references: bool = True,
) -> list[CaptionRecord]:
    # Shared COCO/NoCaps shape: images[] declares ids, annotations[] carry
    # (image_id, caption) pairs that must reference a declared image.
    images = data.get("images")
    annotations = data.get("annotations")
    if not isinstance(images, list) or not isinstance(annotations, list):
        raise FormatError(f"{path}: expected 'images' and 'annotations' arrays")
    domains: dict[ImageId, DomainTag | None] = {}
    order: list[ImageId] = []
    for entry in images:
        if not isinstance(entry, Mapping) or "id" not in entry:
            raise FormatError(f"{path}: image entry without an 'id'")
        image_id = entry["id"]
        if image_id not in domains:
            order.append(image_id)
        tag = entry.get("domain")
        domains[image_id] = DomainTag.parse(tag) if isinstance(tag, str) else None
    refs: dict[ImageId, list[str]] = {i: [] for i in domains}
    for ann in annotations:
        if not isinstance(ann, Mapping):
            raise FormatError(f"{path}: annotation entry is not an object")
        image_id, caption = ann.get("image_id"), ann.get("caption")
        if not isinstance(caption, str):
            raise FormatError(f"{path}: annotation for {image_id!r} lacks a caption string")
        if image_id not in refs:
            raise IntegrityError(
                f"{path}: annotation references unknown image {image_id!r}"
            )
        refs[image_id].append(caption)
    records = []
    for image_id in order:
        if keep is not None and image_id not in keep:
            continue
        if require_references and not refs[image_id]:
            raise IntegrityError(f"{path}: image {image_id!r} has no reference captions")
        records.append(
            CaptionRecord(
                image_id=image_id,
                references=tuple(refs[image_id]),
                domain_tag=domains[image_id],
            )
        )
    return records


def _load_split_ids(split_path: str | Path, split: str) -> set[ImageId]:
    data = _load_json(split_path)
    wanted: set[ImageId] = set()
    if isinstance(data, Mapping) and isinstance(data.get("images"), list):
        # Karpathy release shape: images[{cocoid, split}]
        for entry in data["images"]:
            if not isinstance(entry, Mapping):
                raise FormatError(f"{split_path}: split image entry is not an object")
            if entry.get("split") == split:
                image_id = entry.get("cocoid", entry.get("id"))
                if image_id is None:
                    raise FormatError(f"{split_path}: split entry lacks cocoid/id")
                wanted.add(image_id)
    elif isinstance(data, Mapping):
        # flat {"<image_id>": "<split>"} map; JSON keys are strings
        for key, value in data.items():
            if value == split:
                wanted.add(int(key) if key.lstrip("-").isdigit() else key)
    else:
        raise FormatError(f"{split_path}: unrecognized split file shape")
    return wanted


def load_coco_captions(
    annotations_path: str | Path,
    split_path: str | Path | None = None,
    split: str = "test",
) -> list[CaptionRecord]:
    """Load COCO-format captions, optionally filtered to one split.

    ``split_path`` accepts the Karpathy split release shape
    (``images[{cocoid, split}]``) or a flat ``{image_id: split}`` object.
    Without it every image in the file is returned.  Zero-reference images
    are rejected in the val/test splits.
    """
    keep = None
    if split_path is not None:
        keep = _load_split_ids(split_path, split)
    return _image_caption_records(
        _load_json(annotations_path),
        annotations_path,
        keep=keep,
        require_references=(split_path is None or split in _EVAL_SPLITS),
    )


def load_nocaps_captions(path: str | Path) -> list[CaptionRecord]:
    """Load NoCaps-format captions; image ``domain`` metadata becomes
    :class:`DomainTag` when present."""
    return _image_caption_records(_load_json(path), path)


def load_instances(
    instances_path: str | Path, vocab: CategorySet
) -> dict[ImageId, frozenset[str]]:
    """Per-image coarse object sets from COCO-format instance annotations.

    Category names pass through ``vocab.fine_to_coarse``; an annotation
    with a ``category_id`` missing from ``categories`` is an integrity
    error, a name the vocabulary cannot map is a mapping error.
    """
    data = _load_json(instances_path)
    categories = data.get("categories")
    annotations = data.get("annotations")
    if not isinstance(categories, list) or not isinstance(annotations, list):
        raise FormatError(
            f"{instances_path}: expected 'categories' and 'annotations' arrays"
        )
    names: dict[Any, str] = {}
    for entry in categories:
        if not isinstance(entry, Mapping) or "id" not in entry or "name" not in entry:
            raise FormatError(f"{instances_path}: category entry lacks id/name")
        names[entry["id"]] = normalize_name(str(entry["name"]))
    out: dict[ImageId, set[str]] = {}
    for ann in annotations:
        if not isinstance(ann, Mapping):
            raise FormatError(f"{instances_path}: annotation entry is not an object")
        image_id, cat_id = ann.get("image_id"), ann.get("category_id")
        if cat_id not in names:
            raise IntegrityError(
                f"{instances_path}: annotation on image {image_id!r} uses "
                f"unknown category_id {cat_id!r}"
            )
        name = names[cat_id]
        coarse = vocab.fine_to_coarse.get(name)
        if coarse is None:
            raise MappingError(
                f"{instances_path}: category {name!r} is not in the vocabulary"
            )
        out.setdefault(image_id, set()).add(coarse)
    return {i: frozenset(objs) for i, objs in out.items()}


def load_predictions(path: str | Path, jsonl: bool = False) -> dict[ImageId, str]:
    """Load predictions: a JSON array of ``{image_id, caption}`` objects,
    or one such object per line with ``jsonl=True``.  Duplicate image ids
    and non-string captions are format errors."""
    entries: Iterable[Any]
    if jsonl:
        with open(path, encoding="utf-8") as fh:
            entries = []
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entries.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise FormatError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
    else:
        entries = _load_json(path)
        if isinstance(entries, Mapping) and isinstance(entries.get("annotations"), list):
            entries = entries["annotations"]
        if not isinstance(entries, list):
            raise FormatError(f"{path}: expected a JSON array of predictions")
    out: dict[ImageId, str] = {}
    for entry in entries:
        if not isinstance(entry, Mapping) or "image_id" not in entry:
            raise FormatError(f"{path}: prediction entry lacks an image_id")
        image_id, caption = entry["image_id"], entry.get("caption")
        if not isinstance(caption, str):
            raise FormatError(f"{path}: caption for image {image_id!r} is not a string")
        if image_id in out:
            raise FormatError(f"{path}: duplicate prediction for image {image_id!r}")
        out[image_id] = caption
    return out


def load_records(source: str | Path | IO[str]) -> list[CaptionRecord]:
    """Load self-contained records: a JSON array of objects with
    ``image_id``, ``references`` and optional ``prediction``,
    ``instance_objects``, ``domain`` fields.  ``source`` may be a path or
    an open text stream (for stdin piping)."""
    if hasattr(source, "read"):
        try:
            data = json.load(source)
        except json.JSONDecodeError as exc:
            raise FormatError(f"records stream: not valid JSON: {exc}") from exc
        label = "records stream"
    else:
        data = _load_json(source)
        label = str(source)
    if isinstance(data, Mapping) and isinstance(data.get("records"), list):
        data = data["records"]
    if not isinstance(data, list):
        raise FormatError(f"{label}: expected a JSON array of records")
    records = []
    seen: set[ImageId] = set()
    for idx, entry in enumerate(data):
        if not isinstance(entry, Mapping) or "image_id" not in entry:
            raise FormatError(f"{label}: record #{idx} lacks an image_id")
        image_id = entry["image_id"]
        if image_id in seen:
            raise FormatError(f"{label}: duplicate record for image {image_id!r}")
        seen.add(image_id)
        references = entry.get("references", [])
        if not isinstance(references, list) or not all(
            isinstance(r, str) for r in references
        ):
            raise FormatError(f"{label}: record {image_id!r} references must be strings")
        prediction = entry.get("prediction")
        if prediction is not None and not isinstance(prediction, str):
            raise FormatError(f"{label}: record {image_id!r} prediction must be a string")
        instances = entry.get("instance_objects")
        if instances is not None:
            if not isinstance(instances, list) or not all(
                isinstance(o, str) for o in instances
            ):
                raise FormatError(
                    f"{label}: record {image_id!r} instance_objects must be strings"
                )
            instances = frozenset(normalize_name(o) for o in instances)
        tag = entry.get("domain", entry.get("domain_tag"))
        records.append(
            CaptionRecord(
                image_id=image_id,
                references=tuple(references),
                prediction=prediction,
                instance_objects=instances,
                domain_tag=DomainTag.parse(tag) if isinstance(tag, str) else None,
            )
        )
    return records


def attach_instances(
    records: Sequence[CaptionRecord], instances: Mapping[ImageId, frozenset[str]]
) -> list[CaptionRecord]:
    return [
        replace(r, instance_objects=instances.get(r.image_id, frozenset()))
        for r in records
    ]


def attach_predictions(
    records: Sequence[CaptionRecord], predictions: Mapping[ImageId, str]
) -> list[CaptionRecord]:
    """Join predictions onto records; prediction ids with no matching
    record are reported as a set difference."""
    known = {r.image_id for r in records}
    orphans = [i for i in predictions if i not in known]
    if orphans:
        shown = ", ".join(repr(i) for i in sorted(orphans, key=repr)[:10])
        more = "" if len(orphans) <= 10 else f" (+{len(orphans) - 10} more)"
        raise ValidationError(
            f"{len(orphans)} prediction image ids not in the record set: {shown}{more}"
        )
    return [
        replace(r, prediction=predictions[r.image_id])
        if r.image_id in predictions
        else r
        for r in records
    ]


def ground_truth_objects(
    record: CaptionRecord, vocab: CategorySet, policy: GtPolicy
) -> GroundTruthObjects:
    """Derive the record's ground-truth coarse object set under ``policy``.

    References contribute by extraction; instance objects pass through
    ``vocab.fine_to_coarse``.  Union with absent instance labels degrades
    to references alone.
    """
    from_refs: set[str] = set()
    if policy in (GtPolicy.REFERENCES_ONLY, GtPolicy.UNION):
        if not record.references:
            raise ValidationError(
                f"image {record.image_id!r} has no reference captions "
                f"(required by policy {policy.value!r})"
            )
        for ref in record.references:
            from_refs.update(m.category for m in extract_objects(ref, vocab))
    from_inst: set[str] = set()
    if policy in (GtPolicy.INSTANCES_ONLY, GtPolicy.UNION):
        if record.instance_objects is None:
            if policy is GtPolicy.INSTANCES_ONLY:
                raise ConfigError(
                    f"image {record.image_id!r} has no instance objects "
                    f"(required by policy {policy.value!r})"
                )
        else:
            for name in record.instance_objects:
                coarse = vocab.fine_to_coarse.get(normalize_name(name))
                if coarse is None:
                    raise MappingError(
                        f"image {record.image_id!r}: instance object {name!r} "
                        f"is not in the vocabulary"
                    )
                from_inst.add(coarse)
    objects = from_refs | from_inst
    provenance = {}
    for obj in objects:
        if obj in from_refs and obj in from_inst:
            provenance[obj] = Provenance.BOTH
        elif obj in from_refs:
            provenance[obj] = Provenance.FROM_REFERENCES
        else:
            provenance[obj] = Provenance.FROM_INSTANCES
    return GroundTruthObjects(
        image_id=record.image_id,
        objects=frozenset(objects),
        provenance=provenance,
    )
