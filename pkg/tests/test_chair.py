import json
import random
from dataclasses import replace
from fractions import Fraction

import pytest

from chairkit import (
    CaptionRecord,
    ChairReport,
    DomainTag,
    GroundTruthObjects,
    GtPolicy,
    MissingPredictionsError,
    ValidationError,
    compare,
    comparison_to_dict,
    evaluate_image,
    object_count_stats,
    percent,
    report_from_dict,
    report_to_csv,
    report_to_dict,
    score_corpus,
)

from oracles import oracle_chair


def gt(image_id, objects):
    return GroundTruthObjects(image_id, frozenset(objects), {})


class TestEvaluateImage:
    def test_hallucinated_frisbee(self, coco_vocab):
        ev = evaluate_image("a dog catches a frisbee", gt(1, {"dog"}), coco_vocab)
        assert ev.predicted_objects == frozenset({"dog", "frisbee"})
        assert ev.hallucinated == frozenset({"frisbee"})

    def test_dedup_keeps_mention_count(self, coco_vocab):
        ev = evaluate_image("a dog and a dog", gt(1, {"dog"}), coco_vocab)
        assert ev.predicted_objects == frozenset({"dog"})
        assert ev.hallucinated == frozenset()
        assert ev.n_mentions == 2

    def test_no_vocab_words(self, coco_vocab):
        ev = evaluate_image("sunset over water", gt(1, {"dog"}), coco_vocab)
        assert ev.predicted_objects == frozenset()
        assert ev.hallucinated == frozenset()
        assert ev.n_mentions == 0

    def test_invariants(self, coco_vocab):
        ev = evaluate_image("a dog, a cat and a zebra", gt(1, {"cat"}), coco_vocab)
        assert ev.hallucinated <= ev.predicted_objects
        assert not (ev.hallucinated & ev.gt_objects)


class TestScoreCorpus:
    def test_three_image_fixture(self, three_image_records, coco_vocab):
        report = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY
        )
        assert report.chair_i == Fraction(1, 5)
        assert report.chair_s == Fraction(1, 3)
        assert percent(report.chair_i) == 20.0
        assert percent(report.chair_s) == 33.3
        assert report.n_objects_total == 5
        assert report.n_hallucinated_objects == 1
        assert report.n_hallucinated_sentences == 1
        assert report.mean_objects_per_caption == Fraction(5, 3)

    def test_echoed_predictions_score_zero(self, coco_vocab):
        records = [
            CaptionRecord(i, (caption,), caption)
            for i, caption in enumerate(["a dog", "a cat and a car", "two people"])
        ]
        report = score_corpus(records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY)
        assert report.chair_i == 0
        assert report.chair_s == 0

    def test_object_free_corpus_convention(self, coco_vocab):
        records = [CaptionRecord(1, ("blue sky",), "sunset over water")]
        report = score_corpus(records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY)
        assert report.chair_i == 0
        assert report.chair_s == 0
        assert report.zero_object_corpus

    def test_missing_prediction_rejected(self, coco_vocab):
        records = [CaptionRecord(1, ("a dog",), "a dog"), CaptionRecord(2, ("a cat",))]
        with pytest.raises(MissingPredictionsError) as err:
            score_corpus(records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY)
        assert 2 in err.value.image_ids

    def test_allow_missing_excludes_and_counts(self, coco_vocab):
        records = [CaptionRecord(1, ("a dog",), "a dog"), CaptionRecord(2, ("a cat",))]
        report = score_corpus(
            records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY, allow_missing=True
        )
        assert report.n_sentences == 1
        assert report.n_skipped_missing == 1

    def test_empty_corpus_rejected(self, coco_vocab):
        with pytest.raises(ValidationError):
            score_corpus([], coco_vocab)

    def test_permutation_invariance(self, three_image_records, coco_vocab):
        shuffled = list(three_image_records)
        random.Random(3).shuffle(shuffled)
        a = score_corpus(three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY)
        b = score_corpus(shuffled, coco_vocab, policy=GtPolicy.REFERENCES_ONLY)
        assert a == b

    def test_parallel_equals_serial(self, three_image_records, coco_vocab):
        serial = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY, workers=1
        )
        parallel = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY, workers=4
        )
        assert serial == parallel
        assert json.dumps(report_to_dict(serial)) == json.dumps(report_to_dict(parallel))

    def test_slice_filter_and_additivity(self, coco_vocab):
        def rec(i, tag, pred):
            return CaptionRecord(
                i, ("a dog",), pred, domain_tag=tag
            )

        records = [
            rec(1, DomainTag.IN_DOMAIN, "a dog"),
            rec(2, DomainTag.IN_DOMAIN, "a cat"),
            rec(3, DomainTag.OUT_OF_DOMAIN, "a zebra"),
            rec(4, DomainTag.OUT_OF_DOMAIN, "a dog"),
        ]
        whole = score_corpus(records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY)
        parts = [
            score_corpus(
                records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY, slice_filter=tag
            )
            for tag in (DomainTag.IN_DOMAIN, DomainTag.OUT_OF_DOMAIN)
        ]
        assert parts[0].slice is DomainTag.IN_DOMAIN
        assert whole.n_hallucinated_sentences == sum(
            p.n_hallucinated_sentences for p in parts
        )
        assert whole.n_sentences == sum(p.n_sentences for p in parts)

    def test_monotonic_in_hallucinated_word(self, three_image_records, coco_vocab):
        base = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY
        )
        bumped = list(three_image_records)
        bumped[1] = replace(bumped[1], prediction=bumped[1].prediction + " and a zebra")
        after = score_corpus(bumped, coco_vocab, policy=GtPolicy.REFERENCES_ONLY)
        assert after.chair_i >= base.chair_i
        assert after.chair_s >= base.chair_s

    def test_gt_word_never_increases_rates(self, three_image_records, coco_vocab):
        base = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY
        )
        bumped = list(three_image_records)
        # image 3's ground truth contains person and car; repeat "car"
        bumped[2] = replace(bumped[2], prediction=bumped[2].prediction + " near a car")
        after = score_corpus(bumped, coco_vocab, policy=GtPolicy.REFERENCES_ONLY)
        assert after.n_hallucinated_objects == base.n_hallucinated_objects
        assert after.chair_s <= base.chair_s
        assert after.chair_i <= base.chair_i


def _random_corpus(rng: random.Random, vocab_words):
    records = []
    truth = []
    for image_id in range(rng.randint(1, 20)):
        n_pred = rng.randint(0, 8)
        pred_words = [rng.choice(vocab_words) for _ in range(n_pred)]
        gt_words = {rng.choice(vocab_words) for _ in range(rng.randint(0, 5))}
        prediction = " ".join(pred_words) if pred_words else "nothing here"
        reference = " ".join(sorted(gt_words)) if gt_words else "empty scene"
        records.append(CaptionRecord(image_id, (reference,), prediction))
        truth.append((set(pred_words), set(gt_words)))
    return records, truth


def test_matches_brute_force_oracle_on_random_corpora(tiny_vocab):
    # single-word categories only, so predictions map 1:1 onto the oracle
    words = [c for c in tiny_vocab.categories if " " not in c]
    rng = random.Random(99)
    for _ in range(200):
        records, truth = _random_corpus(rng, words)
        report = score_corpus(records, tiny_vocab, policy=GtPolicy.REFERENCES_ONLY)
        chair_i, chair_s, n_obj, n_hall, n_bad = oracle_chair(truth)
        assert report.chair_i == chair_i
        assert report.chair_s == chair_s
        assert report.n_objects_total == n_obj
        assert report.n_hallucinated_objects == n_hall
        assert report.n_hallucinated_sentences == n_bad
        assert 0 <= report.chair_i <= 1
        assert 0 <= report.chair_s <= 1
        assert (report.chair_s == 0) == all(
            not e.hallucinated for e in report.per_image
        )


class TestCompare:
    def test_reduction_17_4_percent(self):
        baseline = report_from_dict({"chair_i": 0, "chair_s": 10.9})
        candidate = report_from_dict({"chair_i": 0, "chair_s": 9.0})
        result = compare(baseline, candidate)
        assert percent(result.relative_reduction_chair_s) == 17.4

    def test_negative_reduction_when_candidate_worse(self):
        baseline = report_from_dict({"chair_i": 0, "chair_s": 13.0})
        candidate = report_from_dict({"chair_i": 0, "chair_s": 13.5})
        assert percent(compare(baseline, candidate).relative_reduction_chair_s) == -3.8

    def test_identical_reports(self, three_image_records, coco_vocab):
        report = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY
        )
        result = compare(report, report)
        assert result.delta_chair_i == 0
        assert result.delta_chair_s == 0
        assert result.relative_reduction_chair_s == 0

    def test_zero_baseline_reduction_undefined(self):
        baseline = report_from_dict({"chair_i": 0, "chair_s": 0})
        candidate = report_from_dict({"chair_i": 0, "chair_s": 5.0})
        result = compare(baseline, candidate)
        assert result.relative_reduction_chair_s is None
        assert result.warnings
        assert comparison_to_dict(result)["relative_reduction_chair_s"] is None

    def test_size_mismatch_warns(self, three_image_records, coco_vocab):
        full = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY
        )
        partial = score_corpus(
            three_image_records[:2], coco_vocab, policy=GtPolicy.REFERENCES_ONLY
        )
        assert any("differ" in w for w in compare(full, partial).warnings)


class TestObjectCountStats:
    def _report_with_mean(self, mean: Fraction) -> ChairReport:
        return ChairReport(
            chair_i=Fraction(0),
            chair_s=Fraction(0),
            n_sentences=100,
            n_objects_total=int(mean * 100),
            n_hallucinated_objects=0,
            n_hallucinated_sentences=0,
            mean_objects_per_caption=mean,
            per_image=(),
        )

    def test_mean_object_count_differences(self):
        # 2.30 - 2.22 = 0.08 and 2.30 - 2.06 = 0.24, exactly
        base = self._report_with_mean(Fraction(230, 100))
        assert float(object_count_stats(base, self._report_with_mean(Fraction(222, 100)))) == 0.08
        assert float(object_count_stats(base, self._report_with_mean(Fraction(206, 100)))) == 0.24

    def test_identical_corpora(self, three_image_records, coco_vocab):
        report = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY
        )
        assert object_count_stats(report, report) == 0
        assert report.mean_objects_per_caption == Fraction(5, 3)


class TestReportSerialization:
    def test_round_trip_exact(self, three_image_records, coco_vocab):
        report = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY
        )
        rebuilt = report_from_dict(json.loads(json.dumps(report_to_dict(report))))
        assert rebuilt == report

    def test_percent_fields(self, three_image_records, coco_vocab):
        report = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY
        )
        data = report_to_dict(report)
        assert data["chair_i"] == 20.0
        assert data["chair_s"] == 33.3
        assert data["chair_i_ratio"] == 0.2
        assert abs(data["chair_s_ratio"] - 1 / 3) < 1e-12

    def test_csv_summary(self, three_image_records, coco_vocab):
        report = score_corpus(
            three_image_records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY
        )
        lines = report_to_csv(report).splitlines()
        assert lines[0] == "metric,value"
        assert "chair_i,20.0" in lines
        assert "n_sentences,3" in lines

    def test_per_image_sorted_by_image_id(self, coco_vocab):
        records = [
            CaptionRecord("zzz", ("a dog",), "a dog"),
            CaptionRecord(5, ("a cat",), "a cat"),
            CaptionRecord("aaa", ("a car",), "a car"),
            CaptionRecord(2, ("a dog",), "a dog"),
        ]
        report = score_corpus(records, coco_vocab, policy=GtPolicy.REFERENCES_ONLY)
        assert [e.image_id for e in report.per_image] == [2, 5, "aaa", "zzz"]
