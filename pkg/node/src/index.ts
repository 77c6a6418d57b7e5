/**
 * Node bindings for the chairkit caption object-hallucination scorer.
 *
 * Every call shells out to the `chairkit` CLI (install the Python
 * package first) and returns its JSON verbatim, so numbers here are
 * field-identical to what the CLI reports on the same inputs.
 *
 * ```ts
 * import { score } from "chairkit-node";
 *
 * const report = score([
 *   { image_id: 1, references: ["a dog in a park"], prediction: "a dog catches a frisbee" },
 * ]);
 * console.log(report.chair_i_ratio); // 0.5 -- the frisbee is hallucinated
 * ```
 */

export { buildVocab, compare, extractObjects, mask, score } from "./bindings.js";
export type { ReportInput } from "./bindings.js";
export { ChairkitError, runCli } from "./run.js";
export type { RunResult } from "./run.js";
export type {
  CaptionRecord,
  ChairReportJson,
  ComparisonJson,
  GtPolicy,
  ImageEvalJson,
  ImageId,
  MaskedExampleJson,
  MaskOptions,
  MaskSummaryJson,
  ObjectMentionJson,
  ScoreOptions,
  VocabJson,
  VocabOptions,
} from "./types.js";
