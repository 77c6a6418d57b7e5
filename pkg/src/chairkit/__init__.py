"""chairkit: object hallucination scoring for image captions.

Measures how often generated captions mention objects absent from the
image (instance-level and sentence-level rates), builds the coarse
object vocabularies the protocol needs (synonym lexicon, hierarchy
coarsening), and emits whole-object-masked training corpora.
"""

__version__ = "0.1.0"

from .chair import (
    ChairReport,
    ComparisonReport,
    ImageEval,
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
from .errors import (
    ChairkitError,
    ConfigError,
    ConflictError,
    FormatError,
    IntegrityError,
    MappingError,
    MissingPredictionsError,
    ParseError,
    StructureError,
    ValidationError,
)
from .ingest import (
    CaptionRecord,
    DomainTag,
    GroundTruthObjects,
    GtPolicy,
    ImageId,
    Provenance,
    attach_instances,
    attach_predictions,
    ground_truth_objects,
    load_coco_captions,
    load_instances,
    load_nocaps_captions,
    load_predictions,
    load_records,
)
from .kernel import KERNEL_NAME
from .masking import (
    MaskedExample,
    MaskingConfig,
    MaskMode,
    emit_corpus,
    example_from_dict,
    example_to_dict,
    iter_examples,
    mask_caption,
    mask_objmlm,
    mask_standard,
    normalize_caption,
    reconstruct,
)
from .textnorm import ObjectMention, Token, extract_objects, singularize, tokenize
from .vocab import (
    CategorySet,
    HierarchyNode,
    VocabSource,
    build_coarse_categories,
    coco_synonyms_path,
    load_hierarchy,
    load_synonym_lexicon,
    merge,
    parse_hierarchy,
)

__all__ = [
    "__version__",
    "KERNEL_NAME",
    # vocab
    "CategorySet",
    "HierarchyNode",
    "VocabSource",
    "build_coarse_categories",
    "coco_synonyms_path",
    "load_hierarchy",
    "load_synonym_lexicon",
    "merge",
    "parse_hierarchy",
    # textnorm
    "ObjectMention",
    "Token",
    "extract_objects",
    "singularize",
    "tokenize",
    # ingest
    "CaptionRecord",
    "DomainTag",
    "GroundTruthObjects",
    "GtPolicy",
    "ImageId",
    "Provenance",
    "attach_instances",
    "attach_predictions",
    "ground_truth_objects",
    "load_coco_captions",
    "load_instances",
    "load_nocaps_captions",
    "load_predictions",
    "load_records",
    # chair
    "ChairReport",
    "ComparisonReport",
    "ImageEval",
    "compare",
    "comparison_to_dict",
    "evaluate_image",
    "object_count_stats",
    "percent",
    "report_from_dict",
    "report_to_csv",
    "report_to_dict",
    "score_corpus",
    # masking
    "MaskMode",
    "MaskingConfig",
    "MaskedExample",
    "emit_corpus",
    "example_from_dict",
    "example_to_dict",
    "iter_examples",
    "mask_caption",
    "mask_objmlm",
    "mask_standard",
    "normalize_caption",
    "reconstruct",
    # errors
    "ChairkitError",
    "ConfigError",
    "ConflictError",
    "FormatError",
    "IntegrityError",
    "MappingError",
    "MissingPredictionsError",
    "ParseError",
    "StructureError",
    "ValidationError",
]
