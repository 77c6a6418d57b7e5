/** Shared types mirroring the CLI's JSON formats. */

/** Image ids may be numeric (COCO style) or opaque strings. */
export type ImageId = number | string;

/** One self-contained dataset record, as the CLI's records format. */
export interface CaptionRecord {
  image_id: ImageId;
  references: string[];
  prediction?: string | null;
  instance_objects?: string[];
  domain_tag?: "in-domain" | "near-domain" | "out-of-domain";
}

export type GtPolicy = "references" | "instances" | "union";

/** Per-image evaluation block inside a score report. */
export interface ImageEvalJson {
  image_id: ImageId;
  predicted_objects: string[];
  gt_objects: string[];
  hallucinated_objects: string[];
  hallucinated: boolean;
}

/**
 * A score report exactly as the CLI prints it: rates both as percents
 * rounded to one decimal (chair_i) and as raw ratios (chair_i_ratio),
 * plus the integer counts they were computed from.
 */
export interface ChairReportJson {
  chair_i: number;
  chair_s: number;
  chair_i_ratio: number;
  chair_s_ratio: number;
  n_sentences: number;
  n_objects_total: number;
  n_hallucinated_objects: number;
  n_hallucinated_sentences: number;
  mean_objects_per_caption: number;
  n_skipped_missing: number;
  zero_object_corpus: boolean;
  slice: string | null;
  per_image?: ImageEvalJson[];
  gt_policy?: GtPolicy;
  meta?: { tool: string; version: string };
}

export interface ComparisonJson {
  baseline: ChairReportJson;
  candidate: ChairReportJson;
  delta_chair_i: number;
  delta_chair_s: number;
  relative_reduction_chair_s: number | null;
  delta_mean_objects_per_caption: number;
  warnings: string[];
  meta?: { tool: string; version: string };
}

/** One masked training example: a line of the CLI's JSONL output. */
export interface MaskedExampleJson {
  image_id: ImageId;
  masked_text: string;
  /** [word position in masked_text, original lowercase words] pairs. */
  targets: Array<[number, string]>;
}

export interface MaskSummaryJson {
  n_examples: number;
  n_masked_units: number;
  units_per_example: number;
}

export interface VocabJson {
  n_categories: number;
  source: string;
  categories: string[];
  fine_to_coarse: Record<string, string>;
  warnings: string[];
}

export interface ObjectMentionJson {
  category: string;
  surface: string;
  token_span: [number, number];
  n_tokens: number;
}

/** Vocabulary selection shared by every call (omit for the bundled lexicon). */
export interface VocabOptions {
  /** Path to a vocabulary JSON produced by build-vocab. */
  vocabPath?: string;
  /** Synonym lexicon path, or "builtin" for the bundled 80-category list. */
  synonyms?: string;
  /** Class hierarchy JSON to coarsen. */
  hierarchy?: string;
  /** CLI executable (default: "chairkit", or $CHAIRKIT_CLI). */
  cliPath?: string;
}

export interface ScoreOptions extends VocabOptions {
  policy?: GtPolicy;
  slice?: "in-domain" | "near-domain" | "out-of-domain";
  allowMissing?: boolean;
  workers?: number;
  /** Include the per_image block (default true). */
  perImage?: boolean;
}

export interface MaskOptions extends VocabOptions {
  mode?: "objmlm" | "standard";
  mlmRate?: number;
  restrictToImageObjects?: boolean;
  maskToken?: string;
  seed?: number;
}
