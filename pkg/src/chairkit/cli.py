"""Command-line interface.

Subcommands: build-vocab, extract-objects, score, compare, mask.
Reports go to stdout (or --output); logs and errors go to stderr.  Exit
codes: 0 success, 1 validation/usage error, 2 I/O error.  Every failure
prints one machine-parseable ``error[<code>]: <message>`` line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, NoReturn, Sequence

from . import __version__
from .chair import (
    ChairReport,
    compare as compare_reports,
    comparison_to_dict,
    report_from_dict,
    report_to_csv,
    report_to_dict,
    score_corpus,
)
from .errors import ChairkitError, ConfigError, FormatError
from .ingest import (
    CaptionRecord,
    DomainTag,
    GtPolicy,
    attach_instances,
    attach_predictions,
    load_coco_captions,
    load_instances,
    load_nocaps_captions,
    load_predictions,
    load_records,
)
from .masking import MaskingConfig, MaskMode, emit_corpus
from .textnorm import extract_objects
from .vocab import (
    CategorySet,
    build_coarse_categories,
    coco_synonyms_path,
    load_hierarchy,
    load_synonym_lexicon,
    merge,
)

_DATA_DIR_ENV = "CHAIRKIT_DATA_DIR"


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2 (2 is reserved for I/O)
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print(f"error[usage]: {message}", file=sys.stderr)
        raise SystemExit(1)


def _resolve_path(path: str) -> str:
    """Fall back to $CHAIRKIT_DATA_DIR for relative paths that do not
    resolve from the working directory."""
    if path == "-" or os.path.exists(path) or os.path.isabs(path):
        return path
    base = os.environ.get(_DATA_DIR_ENV)
    if base:
        candidate = Path(base) / path
        if candidate.exists():
            return str(candidate)
    return path


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _add_vocab_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("vocabulary")
    group.add_argument("--vocab", help="vocabulary JSON produced by build-vocab")
    group.add_argument(
        "--synonyms",
        help="synonym lexicon file ('builtin' for the bundled 80-category list)",
    )
    group.add_argument("--hierarchy", help="class hierarchy JSON to coarsen")


def _build_vocab(args: argparse.Namespace) -> CategorySet:
    if args.vocab:
        if args.synonyms or args.hierarchy:
            raise ConfigError("--vocab excludes --synonyms/--hierarchy")
        return CategorySet.load(_resolve_path(args.vocab))
    parts: list[CategorySet] = []
    if args.synonyms:
        path = (
            coco_synonyms_path()
            if args.synonyms == "builtin"
            else _resolve_path(args.synonyms)
        )
        parts.append(load_synonym_lexicon(path))
    if args.hierarchy:
        parts.append(build_coarse_categories(load_hierarchy(_resolve_path(args.hierarchy))))
    if not parts:
        return load_synonym_lexicon(coco_synonyms_path())
    if len(parts) == 1:
        return parts[0]
    merged, conflicts = merge(parts[0], parts[1])
    for conflict in conflicts:
        _log(f"warning: {conflict}")
    return merged


def _emit(payload: str, output: str | None) -> None:
    if output and output != "-":
        Path(output).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)


def _json_payload(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _meta() -> dict[str, str]:
    return {"tool": "chairkit", "version": __version__}


def _add_dataset_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("dataset")
    group.add_argument(
        "--records",
        help="self-contained records JSON ('-' reads stdin)",
    )
    group.add_argument(
        "--dataset", choices=("coco", "nocaps", "generic"), default="generic"
    )
    group.add_argument("--annotations", help="caption annotations JSON")
    group.add_argument("--instances", help="instance annotations JSON")
    group.add_argument("--split-file", help="split definition JSON")
    group.add_argument("--split", default="test", help="split name (default: test)")


def _load_dataset(args: argparse.Namespace, vocab: CategorySet) -> list[CaptionRecord]:
    if args.records:
        if args.records == "-":
            records = load_records(sys.stdin)
        else:
            records = load_records(_resolve_path(args.records))
    elif args.annotations:
        annotations = _resolve_path(args.annotations)
        if args.dataset == "nocaps":
            records = load_nocaps_captions(annotations)
        else:
            split_file = (
                _resolve_path(args.split_file) if args.split_file else None
            )
            records = load_coco_captions(annotations, split_file, args.split)
    else:
        raise ConfigError("provide --records or --annotations")
    if args.instances:
        records = attach_instances(
            records, load_instances(_resolve_path(args.instances), vocab)
        )
    return records


def _gt_policy(args: argparse.Namespace, records: Sequence[CaptionRecord]) -> GtPolicy:
    if args.gt_policy:
        return GtPolicy(args.gt_policy)
    if args.dataset == "nocaps":
        if args.instances:
            _log(
                "warning: --instances given but the nocaps default policy is "
                "'references'; pass --gt-policy union or instances to use them"
            )
        return GtPolicy.REFERENCES_ONLY
    if args.dataset == "coco":
        if not args.instances:
            _log(
                "warning: no --instances; union policy falls back to "
                "reference captions alone"
            )
        return GtPolicy.UNION
    has_instances = any(r.instance_objects is not None for r in records)
    return GtPolicy.UNION if has_instances else GtPolicy.REFERENCES_ONLY


def _cmd_build_vocab(args: argparse.Namespace) -> int:
    if not args.synonyms and not args.hierarchy and not args.vocab:
        raise ConfigError("build-vocab needs --synonyms and/or --hierarchy")
    vocab = _build_vocab(args)
    for warning in vocab.warnings:
        _log(f"warning: {warning}")
    payload = vocab.to_dict()
    payload["n_categories"] = len(vocab.categories)
    _log(f"{len(vocab.categories)} categories ({vocab.source.value})")
    _emit(_json_payload(payload), args.output)
    return 0


def _cmd_extract_objects(args: argparse.Namespace) -> int:
    vocab = _build_vocab(args)
    mentions = extract_objects(args.caption, vocab)
    payload = {
        "caption": args.caption,
        "mentions": [
            {
                "category": m.category,
                "surface": m.surface,
                "token_span": list(m.token_span),
                "n_tokens": m.n_tokens,
            }
            for m in mentions
        ],
    }
    _emit(_json_payload(payload), args.output)
    return 0


def _score(args: argparse.Namespace, predictions_path: str | None) -> ChairReport:
    vocab = _build_vocab(args)
    records = _load_dataset(args, vocab)
    if predictions_path:
        predictions = load_predictions(
            _resolve_path(predictions_path), jsonl=args.predictions_jsonl
        )
        records = attach_predictions(records, predictions)
    policy = _gt_policy(args, records)
    args.resolved_gt_policy = policy
    return score_corpus(
        records,
        vocab,
        policy=policy,
        slice_filter=DomainTag(args.slice) if args.slice else None,
        allow_missing=args.allow_missing,
        workers=args.workers,
    )


def _cmd_score(args: argparse.Namespace) -> int:
    report = _score(args, args.predictions)
    if args.format == "csv":
        _emit(report_to_csv(report), args.output)
    else:
        payload = report_to_dict(report, per_image=not args.summary_only)
        payload["gt_policy"] = args.resolved_gt_policy.value
        payload["meta"] = _meta()
        _emit(_json_payload(payload), args.output)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    raw = bool(args.predictions_baseline or args.predictions_candidate)
    if raw:
        if not (args.predictions_baseline and args.predictions_candidate):
            raise ConfigError(
                "raw mode needs both --predictions-baseline and --predictions-candidate"
            )
        if args.baseline or args.candidate:
            raise ConfigError("report and prediction inputs are mutually exclusive")
        if args.records == "-":
            raise ConfigError(
                "raw compare scores twice; stdin records cannot be re-read, "
                "use a file path"
            )
        baseline = _score(args, args.predictions_baseline)
        candidate = _score(args, args.predictions_candidate)
    else:
        if not (args.baseline and args.candidate):
            raise ConfigError("compare needs --baseline and --candidate report files")

        def _read(path: str) -> dict[str, Any]:
            with open(_resolve_path(path), encoding="utf-8") as fh:
                try:
                    return json.load(fh)
                except json.JSONDecodeError as exc:
                    raise FormatError(f"{path}: not valid JSON: {exc}") from exc

        baseline = report_from_dict(_read(args.baseline))
        candidate = report_from_dict(_read(args.candidate))
    comparison = compare_reports(baseline, candidate)
    for warning in comparison.warnings:
        _log(f"warning: {warning}")
    payload = comparison_to_dict(comparison)
    payload["meta"] = _meta()
    _emit(_json_payload(payload), args.output)
    reduction = payload["relative_reduction_chair_s"]
    if reduction is None:
        _log("relative reduction in sentence-level rate: undefined (baseline 0)")
    else:
        _log(f"relative reduction in sentence-level rate: {reduction}%")
    return 0


def _cmd_mask(args: argparse.Namespace) -> int:
    vocab = _build_vocab(args)
    records = _load_dataset(args, vocab)
    cfg = MaskingConfig(
        mode=MaskMode(args.mode),
        mlm_rate=args.mlm_rate,
        restrict_to_image_objects=args.restrict_to_image_objects,
        mask_token=args.mask_token,
        seed=args.seed,
    )
    if args.output and args.output != "-":
        summary = emit_corpus(records, vocab, cfg, args.output)
        _emit(_json_payload(summary), None)
    else:
        summary = emit_corpus(records, vocab, cfg, sys.stdout)
        _log(_json_payload(summary).rstrip("\n"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="chairkit",
        description=(
            "Object hallucination scoring for image captions, plus the "
            "vocabulary construction and object-masked corpus emission "
            "the protocol needs."
        ),
    )
    parser.add_argument("--version", action="version", version=f"chairkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_vocab = sub.add_parser(
        "build-vocab", help="build a vocabulary from a lexicon and/or hierarchy"
    )
    _add_vocab_flags(p_vocab)
    p_vocab.add_argument("--output", "-o", help="write JSON here instead of stdout")
    p_vocab.set_defaults(func=_cmd_build_vocab)

    p_extract = sub.add_parser(
        "extract-objects", help="show the object mentions one caption produces"
    )
    p_extract.add_argument("caption", help="caption text")
    _add_vocab_flags(p_extract)
    p_extract.add_argument("--output", "-o")
    p_extract.set_defaults(func=_cmd_extract_objects)

    def _scoring_flags(p: argparse.ArgumentParser) -> None:
        _add_vocab_flags(p)
        _add_dataset_flags(p)
        p.add_argument(
            "--gt-policy",
            choices=tuple(policy.value for policy in GtPolicy),
            help="ground-truth source (default: union for coco, references "
            "for nocaps, inferred for generic records)",
        )
        p.add_argument(
            "--slice",
            choices=tuple(tag.value for tag in DomainTag),
            help="score only records with this domain tag",
        )
        p.add_argument(
            "--allow-missing",
            action="store_true",
            help="skip records without predictions instead of failing",
        )
        p.add_argument(
            "--workers",
            type=int,
            default=os.cpu_count() or 1,
            help="parallel scoring processes (default: CPU count)",
        )
        p.add_argument(
            "--predictions-jsonl",
            action="store_true",
            help="prediction files hold one JSON object per line",
        )

    p_score = sub.add_parser("score", help="score predictions against ground truth")
    _scoring_flags(p_score)
    p_score.add_argument("--predictions", help="predictions JSON array")
    p_score.add_argument("--format", choices=("json", "csv"), default="json")
    p_score.add_argument(
        "--summary-only",
        action="store_true",
        help="omit the per-image block from JSON output",
    )
    p_score.add_argument("--output", "-o")
    p_score.set_defaults(func=_cmd_score)

    p_compare = sub.add_parser(
        "compare", help="compare two score reports or two prediction files"
    )
    p_compare.add_argument("--baseline", help="baseline report JSON")
    p_compare.add_argument("--candidate", help="candidate report JSON")
    p_compare.add_argument(
        "--predictions-baseline", help="baseline predictions (raw mode)"
    )
    p_compare.add_argument(
        "--predictions-candidate", help="candidate predictions (raw mode)"
    )
    _scoring_flags(p_compare)
    p_compare.add_argument("--output", "-o")
    p_compare.set_defaults(func=_cmd_compare)

    p_mask = sub.add_parser(
        "mask", help="emit a masked corpus from reference captions"
    )
    _add_vocab_flags(p_mask)
    _add_dataset_flags(p_mask)
    p_mask.add_argument(
        "--mode",
        choices=tuple(mode.value for mode in MaskMode),
        default=MaskMode.OBJMLM.value,
    )
    p_mask.add_argument(
        "--mlm-rate",
        type=float,
        default=0.15,
        help="per-word masking probability (standard mode)",
    )
    p_mask.add_argument(
        "--restrict-to-image-objects",
        action="store_true",
        help="only mask mentions backed by instance labels (objmlm mode)",
    )
    p_mask.add_argument("--mask-token", default="[MASK]")
    p_mask.add_argument("--seed", type=int, default=0)
    p_mask.add_argument(
        "--output", "-o", default="-", help="JSONL path ('-' for stdout)"
    )
    p_mask.set_defaults(func=_cmd_mask)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ChairkitError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 1


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
