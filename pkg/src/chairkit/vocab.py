"""Coarse-grained object vocabularies.

A :class:`CategorySet` is the immutable lookup structure shared by
extraction, scoring and masking: an ordered list of coarse category names
plus a fine-grained surface form -> coarse category mapping.  It is built
either from a synonym lexicon file (COCO style, 80 categories) or by
coarsening a class hierarchy (Open Images style, 600 classes -> 139
categories), and two sets can be merged for masking corpora that span
both datasets.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import (
    ConflictError,
    FormatError,
    MappingError,
    ParseError,
    StructureError,
    ValidationError,
)
from .textnorm import singularize

_DATA_DIR = Path(__file__).parent / "data"


def coco_synonyms_path() -> Path:
    """Path of the bundled 80-category COCO synonym lexicon."""
    return _DATA_DIR / "coco_synonyms.txt"


def normalize_name(name: str) -> str:
    """Canonical form of a category/surface name: lowercase, single spaces."""
    return " ".join(name.lower().split())


class VocabSource(enum.Enum):
    COCO_SYNONYMS = "coco_synonyms"
    OPENIMAGES_HIERARCHY = "openimages_hierarchy"
    MERGED = "merged"


@dataclass(frozen=True)
class CategorySet:
    """Immutable coarse vocabulary; safe to share across workers.

    ``categories`` preserves construction order.  ``fine_to_coarse`` maps
    every known fine-grained surface form (including each category itself)
    to its coarse category.  Construct via :meth:`build`, which validates
    the invariants and precomputes the singularized phrase table used by
    extraction.
    """

    categories: tuple[str, ...]
    fine_to_coarse: dict[str, str]
    source: VocabSource
    warnings: tuple[str, ...] = ()
    _phrase_table: dict[str, str] = field(default_factory=dict, repr=False, compare=False)
    _max_phrase_len: int = field(default=0, repr=False, compare=False)

    @classmethod
    def build(
        cls,
        categories: Iterable[str],
        fine_to_coarse: Mapping[str, str],
        source: VocabSource,
        warnings: Iterable[str] = (),
    ) -> "CategorySet":
        cats = tuple(normalize_name(c) for c in categories)
        if any(not c for c in cats):
            raise ValidationError("category names must be non-empty")
        if len(set(cats)) != len(cats):
            dupes = sorted({c for c in cats if cats.count(c) > 1})
            raise ValidationError(f"duplicate category names: {', '.join(dupes)}")
        cat_set = set(cats)
        mapping = {}
        for fine, coarse in fine_to_coarse.items():
            fine_n, coarse_n = normalize_name(fine), normalize_name(coarse)
            if not fine_n:
                raise ValidationError("fine-grained names must be non-empty")
            if coarse_n not in cat_set:
                raise ValidationError(
                    f"mapping target {coarse_n!r} for {fine_n!r} is not a category"
                )
            mapping[fine_n] = coarse_n
        for c in cats:
            existing = mapping.setdefault(c, c)
            if existing != c:
                raise ValidationError(
                    f"category {c!r} maps to {existing!r} instead of itself"
                )
        warn = list(warnings)
        table, max_len = _build_phrase_table(cats, mapping, warn)
        return cls(
            categories=cats,
            fine_to_coarse=mapping,
            source=source,
            warnings=tuple(warn),
            _phrase_table=table,
            _max_phrase_len=max_len,
        )

    def phrase_table(self) -> dict[str, str]:
        """Singularized phrase -> coarse category table used by matching."""
        return self._phrase_table

    def max_phrase_len(self) -> int:
        return self._max_phrase_len

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": self.source.value,
            "categories": list(self.categories),
            "fine_to_coarse": dict(self.fine_to_coarse),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CategorySet":
        try:
            source = VocabSource(data.get("source", VocabSource.MERGED.value))
            return cls.build(
                data["categories"],
                data["fine_to_coarse"],
                source,
                data.get("warnings", ()),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise FormatError(f"malformed vocabulary JSON: {exc}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "CategorySet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _build_phrase_table(
    categories: tuple[str, ...],
    mapping: dict[str, str],
    warnings: list[str],
) -> tuple[dict[str, str], int]:
    # Keys are singularized word-by-word so plural heads ("dining tables",
    # "sports balls") land on the same key as the lexicon entry.
    table: dict[str, str] = {}
    max_len = 0
    for fine, coarse in mapping.items():
        words = fine.split()
        key = " ".join(singularize(w) for w in words)
        prior = table.get(key)
        if prior is not None and prior != coarse:
            warnings.append(
                f"phrase {key!r} already matches {prior!r}; ignoring mapping to {coarse!r}"
            )
            continue
        table[key] = coarse
        max_len = max(max_len, len(words))
    return table, max_len


def load_synonym_lexicon(path: str | Path) -> CategorySet:
    """Load a COCO-style synonym lexicon.

    One coarse category per line followed by its comma-separated
    fine-grained synonyms; ``#`` starts a comment.  Names may contain
    spaces ("hot dog"), so a line without commas is a category with no
    synonyms.  A synonym claimed by two different categories is a
    :class:`ConflictError`.
    """
    categories: list[str] = []
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            names = [normalize_name(p) for p in line.split(",")]
            if not names or not names[0]:
                raise ParseError(f"{path}:{lineno}: empty coarse category name")
            coarse = names[0]
            if coarse in categories:
                raise ConflictError(f"{path}:{lineno}: duplicate category {coarse!r}")
            categories.append(coarse)
            for name in names:
                if not name:
                    raise ParseError(f"{path}:{lineno}: empty synonym for {coarse!r}")
                prior = mapping.get(name)
                if prior is not None and prior != coarse:
                    raise ConflictError(
                        f"{path}:{lineno}: synonym {name!r} already maps to "
                        f"{prior!r}, cannot also map to {coarse!r}"
                    )
                mapping[name] = coarse
    return CategorySet.build(categories, mapping, VocabSource.COCO_SYNONYMS)


@dataclass
class HierarchyNode:
    """One class in an object hierarchy."""

    name: str
    children: list["HierarchyNode"] = field(default_factory=list)


def parse_hierarchy(data: Any) -> HierarchyNode:
    """Parse hierarchy JSON into a tree.

    Accepts the Open Images shape (``LabelName`` + nested ``Subcategory``
    arrays, a single root object) and the simplified fixture shape
    (``name`` + ``children``).  A top-level array is wrapped under a
    synthetic ``entity`` root.
    """
    if isinstance(data, list):
        return HierarchyNode("entity", [_parse_node(n) for n in data])
    return _parse_node(data)


def _parse_node(data: Any) -> HierarchyNode:
    if not isinstance(data, Mapping):
        raise FormatError(f"hierarchy node must be an object, got {type(data).__name__}")
    name = data.get("LabelName", data.get("name"))
    if not isinstance(name, str) or not name.strip():
        raise FormatError("hierarchy node lacks a LabelName/name string")
    children = data.get("Subcategory", data.get("children", []))
    if children is None:
        children = []
    if not isinstance(children, list):
        raise FormatError(f"children of {name!r} must be an array")
    return HierarchyNode(normalize_name(name), [_parse_node(c) for c in children])


def load_hierarchy(path: str | Path) -> HierarchyNode:
    with open(path, encoding="utf-8") as fh:
        return parse_hierarchy(json.load(fh))


def build_coarse_categories(hierarchy: HierarchyNode) -> CategorySet:
    """Coarsen a class hierarchy into a CategorySet.

    Two rules decide which classes are kept: (1) classes with at least one
    subclass, and (2) classes with neither a superclass nor subclasses
    (direct leaf children of the root).  The root itself is never a
    category.  Every leaf maps to its nearest retained ancestor; retained
    classes map to themselves.  A class listed under several parents keeps
    its first document-order position; later occurrences are recorded as
    warnings.
    """
    warnings: list[str] = []
    # (name, parent chain root->parent, has_children) at first occurrence,
    # in document order
    first: dict[str, tuple[tuple[str, ...], bool]] = {}
    order: list[str] = []

    stack: list[tuple[HierarchyNode, tuple[str, ...], frozenset[int]]] = [
        (hierarchy, (), frozenset())
    ]
    while stack:
        node, chain, on_path = stack.pop()
        if id(node) in on_path:
            raise StructureError(f"hierarchy contains a cycle through {node.name!r}")
        name = normalize_name(node.name)
        if not name:
            raise FormatError("hierarchy node has an empty name")
        if chain:  # skip the synthetic root
            if name in first:
                warnings.append(
                    f"duplicate class {name!r} under {chain[-1]!r} ignored "
                    f"(first occurrence kept)"
                )
            else:
                first[name] = (chain, bool(node.children))
                order.append(name)
        child_path = on_path | {id(node)}
        child_chain = chain + (name,)
        for child in reversed(node.children):
            stack.append((child, child_chain, child_path))

    retained: list[str] = []
    for name in order:
        chain, has_children = first[name]
        if has_children or len(chain) == 1:  # rule (1) / rule (2)
            retained.append(name)
    retained_set = set(retained)

    mapping: dict[str, str] = {}
    orphans: list[str] = []
    for name in order:
        chain, has_children = first[name]
        if name in retained_set:
            mapping[name] = name
            continue
        # leaf below the top level: nearest retained ancestor
        target = next(
            (anc for anc in reversed(chain) if anc in retained_set), None
        )
        if target is None:
            orphans.append(name)
        else:
            mapping[name] = target
    if orphans:
        raise MappingError(
            f"classes with no retained ancestor: {', '.join(sorted(orphans))}"
        )
    return CategorySet.build(
        retained, mapping, VocabSource.OPENIMAGES_HIERARCHY, warnings
    )


def merge(a: CategorySet, b: CategorySet) -> tuple[CategorySet, list[str]]:
    """Union of two vocabularies; ``a`` wins on conflicting mappings.

    Returns the merged set plus the list of conflict warnings.  A category
    of ``b`` whose self-mapping loses to an ``a`` mapping is coarsened into
    ``a``'s scheme and dropped from the merged category list so that every
    remaining category still maps to itself.
    """
    conflicts: list[str] = []
    mapping = dict(a.fine_to_coarse)
    for fine, coarse in b.fine_to_coarse.items():
        prior = mapping.get(fine)
        if prior is None:
            mapping[fine] = coarse
        elif prior != coarse:
            conflicts.append(
                f"fine-grained {fine!r}: keeping {prior!r}, dropping {coarse!r}"
            )
    categories = list(a.categories)
    for cat in b.categories:
        if cat in a.categories:
            continue
        if mapping.get(cat) != cat:
            conflicts.append(
                f"category {cat!r} coarsened to {mapping.get(cat)!r}; "
                f"not kept as a category"
            )
            continue
        categories.append(cat)
    # drop mappings that point at b-categories we did not keep
    kept = set(categories)
    dropped_targets = {
        fine: coarse for fine, coarse in mapping.items() if coarse not in kept
    }
    for fine, coarse in dropped_targets.items():
        replacement = mapping.get(coarse)
        if replacement is not None and replacement in kept:
            mapping[fine] = replacement
        else:
            del mapping[fine]
            conflicts.append(
                f"dropping {fine!r} -> {coarse!r}: target category was not kept"
            )
    merged = CategorySet.build(
        categories,
        mapping,
        VocabSource.MERGED,
        tuple(a.warnings) + tuple(b.warnings) + tuple(conflicts),
    )
    return merged, conflicts
