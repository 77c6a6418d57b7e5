import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from chairkit import CaptionRecord, CategorySet, VocabSource, load_synonym_lexicon
from chairkit.vocab import coco_synonyms_path

DATA_DIR = Path(__file__).parent / "data"
OI_FIXTURE = DATA_DIR / "oi_hierarchy_600.json"


@pytest.fixture(scope="session")
def coco_vocab() -> CategorySet:
    return load_synonym_lexicon(coco_synonyms_path())


@pytest.fixture(scope="session")
def tiny_vocab() -> CategorySet:
    """Small hand-checkable vocabulary with a multi-word category and a
    unigram prefix of it ('dog' inside 'hot dog')."""
    return CategorySet.build(
        categories=("dog", "cat", "person", "car", "frisbee", "hot dog", "dining table"),
        fine_to_coarse={
            "puppy": "dog",
            "kitten": "cat",
            "automobile": "car",
            "table": "dining table",
        },
        source=VocabSource.COCO_SYNONYMS,
    )


def fixture_records() -> list[CaptionRecord]:
    """The 3-image corpus used across scoring tests: predicted object
    sets {dog, frisbee} / {cat} / {person, car} against matching ground
    truth except the frisbee."""
    return [
        CaptionRecord(
            image_id=1,
            references=("a dog catches a frisbee",),
            prediction="a dog catches a frisbee",
        ),
        CaptionRecord(
            image_id=2,
            references=("a cat",),
            prediction="a cat",
        ),
        CaptionRecord(
            image_id=3,
            references=("a person and a car",),
            prediction="a person and a car",
        ),
    ]


def scoring_fixture() -> list[CaptionRecord]:
    """fixture_records with ground truth narrowed so image 1's frisbee is
    hallucinated: chair_i = 1/5, chair_s = 1/3."""
    records = fixture_records()
    return [
        CaptionRecord(
            image_id=1,
            references=("a dog in a park",),
            prediction=records[0].prediction,
        ),
        records[1],
        records[2],
    ]


@pytest.fixture
def three_image_records() -> list[CaptionRecord]:
    return scoring_fixture()


def write_json(path: Path, payload) -> Path:
    path.write_text(json.dumps(payload, indent=1), encoding="utf-8")
    return path
