"""Hallucination scoring.

Instance-level rate: hallucinated predicted objects over all predicted
objects.  Sentence-level rate: captions containing at least one
hallucinated object over all captions.  Objects are deduplicated per
caption before counting, ratios accumulate as exact rationals, and
reports render percentages at one decimal.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .errors import FormatError, MissingPredictionsError, ValidationError
from .ingest import (
    CaptionRecord,
    DomainTag,
    GroundTruthObjects,
    GtPolicy,
    ImageId,
    ground_truth_objects,
    id_sort_key,
)
from .textnorm import extract_objects
from .vocab import CategorySet


@dataclass(frozen=True)
class ImageEval:
    """Scoring diagnostics for one prediction."""

    image_id: ImageId
    predicted_objects: frozenset[str]
    hallucinated: frozenset[str]
    gt_objects: frozenset[str]
    n_mentions: int


@dataclass(frozen=True)
class ChairReport:
    chair_i: Fraction
    chair_s: Fraction
    n_sentences: int
    n_objects_total: int
    n_hallucinated_objects: int
    n_hallucinated_sentences: int
    mean_objects_per_caption: Fraction
    per_image: tuple[ImageEval, ...]
    slice: DomainTag | None = None
    n_skipped_missing: int = 0
    zero_object_corpus: bool = False


@dataclass(frozen=True)
class ComparisonReport:
    baseline: ChairReport
    candidate: ChairReport
    delta_chair_i: Fraction
    delta_chair_s: Fraction
    relative_reduction_chair_s: Fraction | None
    warnings: tuple[str, ...] = ()


def evaluate_image(
    prediction: str, gt: GroundTruthObjects, vocab: CategorySet
) -> ImageEval:
    """Extract and deduplicate the prediction's coarse objects; anything
    outside the ground-truth set is hallucinated."""
    mentions = extract_objects(prediction, vocab)
    predicted = frozenset(m.category for m in mentions)
    return ImageEval(
        image_id=gt.image_id,
        predicted_objects=predicted,
        hallucinated=predicted - gt.objects,
        gt_objects=gt.objects,
        n_mentions=len(mentions),
    )


# Worker-process state for parallel scoring.  Set once per worker by the
# pool initializer; records are the only per-task payload.
_WORKER: dict[str, Any] = {}


def _init_worker(vocab: CategorySet, policy: GtPolicy) -> None:
    _WORKER["vocab"] = vocab
    _WORKER["policy"] = policy


def _eval_record(record: CaptionRecord) -> ImageEval:
    vocab, policy = _WORKER["vocab"], _WORKER["policy"]
    gt = ground_truth_objects(record, vocab, policy)
    assert record.prediction is not None
    return evaluate_image(record.prediction, gt, vocab)


def score_corpus(
    records: Sequence[CaptionRecord],
    vocab: CategorySet,
    policy: GtPolicy = GtPolicy.UNION,
    slice_filter: DomainTag | None = None,
    allow_missing: bool = False,
    workers: int = 1,
) -> ChairReport:
    """Score a corpus of prediction-bearing records.

    Records missing a prediction abort scoring unless ``allow_missing``,
    in which case they are dropped from every numerator and denominator
    and counted in ``n_skipped_missing``.  The report is identical for any
    ``workers`` value: evaluation is pure per-record and aggregation is
    commutative.
    """
    scope = [
        r for r in records if slice_filter is None or r.domain_tag == slice_filter
    ]
    missing = [r.image_id for r in scope if r.prediction is None]
    if missing and not allow_missing:
        raise MissingPredictionsError(missing)
    scored = [r for r in scope if r.prediction is not None]
    if not scored:
        raise ValidationError(
            "empty corpus: no records with predictions"
            + (f" in slice {slice_filter.value!r}" if slice_filter else "")
        )

    if workers > 1 and len(scored) > 1:
        with multiprocessing.Pool(
            processes=workers, initializer=_init_worker, initargs=(vocab, policy)
        ) as pool:
            evals = pool.map(_eval_record, scored)
    else:
        _init_worker(vocab, policy)
        evals = [_eval_record(r) for r in scored]

    n_objects_total = sum(len(e.predicted_objects) for e in evals)
    n_hallucinated_objects = sum(len(e.hallucinated) for e in evals)
    n_hallucinated_sentences = sum(1 for e in evals if e.hallucinated)
    n_sentences = len(evals)
    zero_objects = n_objects_total == 0
    chair_i = (
        Fraction(0) if zero_objects else Fraction(n_hallucinated_objects, n_objects_total)
    )
    return ChairReport(
        chair_i=chair_i,
        chair_s=Fraction(n_hallucinated_sentences, n_sentences),
        n_sentences=n_sentences,
        n_objects_total=n_objects_total,
        n_hallucinated_objects=n_hallucinated_objects,
        n_hallucinated_sentences=n_hallucinated_sentences,
        mean_objects_per_caption=Fraction(n_objects_total, n_sentences),
        per_image=tuple(sorted(evals, key=lambda e: id_sort_key(e.image_id))),
        slice=slice_filter,
        n_skipped_missing=len(missing),
        zero_object_corpus=zero_objects,
    )


def compare(baseline: ChairReport, candidate: ChairReport) -> ComparisonReport:
    """Signed metric deltas plus the relative sentence-level reduction
    (baseline minus candidate, as a share of baseline)."""
    warnings = []
    if baseline.n_sentences != candidate.n_sentences:
        warnings.append(
            f"corpora differ in size: baseline {baseline.n_sentences} vs "
            f"candidate {candidate.n_sentences} sentences"
        )
    if baseline.chair_s == 0:
        warnings.append("baseline sentence-level rate is 0; relative reduction undefined")
        relative = None
    else:
        relative = (baseline.chair_s - candidate.chair_s) / baseline.chair_s
    return ComparisonReport(
        baseline=baseline,
        candidate=candidate,
        delta_chair_i=candidate.chair_i - baseline.chair_i,
        delta_chair_s=candidate.chair_s - baseline.chair_s,
        relative_reduction_chair_s=relative,
        warnings=tuple(warnings),
    )


def object_count_stats(baseline: ChairReport, candidate: ChairReport) -> Fraction:
    """How many fewer objects per caption the candidate generates."""
    if baseline.n_sentences == 0 or candidate.n_sentences == 0:
        raise ValidationError("object count statistics need non-empty corpora")
    return baseline.mean_objects_per_caption - candidate.mean_objects_per_caption


def percent(value: Fraction) -> float:
    """Exact rational -> percentage with one decimal."""
    return float(round(value * 100, 1))


def report_to_dict(report: ChairReport, per_image: bool = True) -> dict[str, Any]:
    """JSON-shaped report.  ``chair_i``/``chair_s`` are percentages at one
    decimal; ``*_ratio`` fields carry the underlying ratios as floats; the
    counts allow exact reconstruction via :func:`report_from_dict`."""
    out: dict[str, Any] = {
        "chair_i": percent(report.chair_i),
        "chair_s": percent(report.chair_s),
        "chair_i_ratio": float(report.chair_i),
        "chair_s_ratio": float(report.chair_s),
        "n_sentences": report.n_sentences,
        "n_objects_total": report.n_objects_total,
        "n_hallucinated_objects": report.n_hallucinated_objects,
        "n_hallucinated_sentences": report.n_hallucinated_sentences,
        "mean_objects_per_caption": float(report.mean_objects_per_caption),
        "n_skipped_missing": report.n_skipped_missing,
        "zero_object_corpus": report.zero_object_corpus,
        "slice": report.slice.value if report.slice else None,
    }
    if per_image:
        out["per_image"] = [
            {
                "image_id": e.image_id,
                "predicted_objects": sorted(e.predicted_objects),
                "hallucinated": sorted(e.hallucinated),
                "gt_objects": sorted(e.gt_objects),
                "n_mentions": e.n_mentions,
            }
            for e in report.per_image
        ]
    return out


def _fraction_from_number(value: Any) -> Fraction:
    # JSON numbers arrive as int/float; str() of a float keeps the literal
    # the file carried, so Fraction("10.9")/1 stays exact.
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"expected a number, got {value!r}")
    return Fraction(str(value))


def report_from_dict(data: Mapping[str, Any]) -> ChairReport:
    """Rebuild a report from its JSON form.

    Prefers exact counts; falls back to the percentage fields so that
    hand-written minimal reports (just ``chair_i``/``chair_s``) can feed
    :func:`compare`.
    """
    if not isinstance(data, Mapping):
        raise FormatError("report JSON must be an object")
    n_sentences = int(data.get("n_sentences", 0))
    have_counts = "n_hallucinated_sentences" in data and n_sentences > 0

    def rate(count_key: str, total: int, percent_key: str) -> Fraction:
        if have_counts and count_key in data:
            return Fraction(int(data[count_key]), total) if total else Fraction(0)
        if percent_key in data:
            return _fraction_from_number(data[percent_key]) / 100
        ratio_key = percent_key + "_ratio"
        if ratio_key in data:
            return _fraction_from_number(data[ratio_key])
        raise FormatError(f"report lacks both {count_key!r} and {percent_key!r}")

    n_objects_total = int(data.get("n_objects_total", 0))
    chair_i = rate("n_hallucinated_objects", n_objects_total, "chair_i")
    chair_s = rate("n_hallucinated_sentences", n_sentences, "chair_s")
    per_image = []
    for entry in data.get("per_image", []):
        per_image.append(
            ImageEval(
                image_id=entry["image_id"],
                predicted_objects=frozenset(entry["predicted_objects"]),
                hallucinated=frozenset(entry["hallucinated"]),
                gt_objects=frozenset(entry["gt_objects"]),
                n_mentions=int(entry["n_mentions"]),
            )
        )
    mean = (
        Fraction(n_objects_total, n_sentences)
        if n_sentences
        else Fraction(0)
    )
    if "mean_objects_per_caption" in data and not n_objects_total:
        mean = _fraction_from_number(data["mean_objects_per_caption"])
    tag = data.get("slice")
    return ChairReport(
        chair_i=chair_i,
        chair_s=chair_s,
        n_sentences=n_sentences,
        n_objects_total=n_objects_total,
        n_hallucinated_objects=int(data.get("n_hallucinated_objects", 0)),
        n_hallucinated_sentences=int(data.get("n_hallucinated_sentences", 0)),
        mean_objects_per_caption=mean,
        per_image=tuple(per_image),
        slice=DomainTag(tag) if tag else None,
        n_skipped_missing=int(data.get("n_skipped_missing", 0)),
        zero_object_corpus=bool(data.get("zero_object_corpus", False)),
    )


def comparison_to_dict(comparison: ComparisonReport) -> dict[str, Any]:
    relative = comparison.relative_reduction_chair_s
    return {
        "baseline": report_to_dict(comparison.baseline, per_image=False),
        "candidate": report_to_dict(comparison.candidate, per_image=False),
        "delta_chair_i": percent(comparison.delta_chair_i),
        "delta_chair_s": percent(comparison.delta_chair_s),
        "relative_reduction_chair_s": None if relative is None else percent(relative),
        "delta_mean_objects_per_caption": float(
            comparison.baseline.mean_objects_per_caption
            - comparison.candidate.mean_objects_per_caption
        ),
        "warnings": list(comparison.warnings),
    }


def report_to_csv(report: ChairReport) -> str:
    """Two-column summary CSV of the scalar report fields."""
    rows = [
        ("chair_i", percent(report.chair_i)),
        ("chair_s", percent(report.chair_s)),
        ("chair_i_ratio", float(report.chair_i)),
        ("chair_s_ratio", float(report.chair_s)),
        ("n_sentences", report.n_sentences),
        ("n_objects_total", report.n_objects_total),
        ("n_hallucinated_objects", report.n_hallucinated_objects),
        ("n_hallucinated_sentences", report.n_hallucinated_sentences),
        ("mean_objects_per_caption", float(report.mean_objects_per_caption)),
        ("n_skipped_missing", report.n_skipped_missing),
        ("zero_object_corpus", report.zero_object_corpus),
        ("slice", report.slice.value if report.slice else ""),
    ]
    lines = ["metric,value"]
    lines.extend(f"{name},{value}" for name, value in rows)
    return "\n".join(lines) + "\n"
