/**
 * In-process bindings over the chairkit CLI.
 *
 * Records and captions are passed in memory (over stdin); only
 * vocabularies and reports travel as files, matching how training and
 * evaluation pipelines hold their data.
 */

import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { runCli } from "./run.js";
import type {
  CaptionRecord,
  ChairReportJson,
  ComparisonJson,
  MaskedExampleJson,
  MaskOptions,
  ObjectMentionJson,
  ScoreOptions,
  VocabJson,
  VocabOptions,
} from "./types.js";

/** compare() also accepts reports carrying just the two headline rates. */
export type ReportInput =
  | ChairReportJson
  | ({ chair_i: number; chair_s: number } & Record<string, unknown>);

function vocabArgs(options: VocabOptions): string[] {
  const args: string[] = [];
  if (options.vocabPath) args.push("--vocab", options.vocabPath);
  if (options.synonyms) args.push("--synonyms", options.synonyms);
  if (options.hierarchy) args.push("--hierarchy", options.hierarchy);
  return args;
}

/**
 * Score in-memory records and return the CLI's JSON report verbatim.
 *
 * Throws ChairkitError (code "missing-predictions") when records lack
 * predictions and allowMissing is not set.
 */
export function score(
  records: CaptionRecord[],
  options: ScoreOptions = {},
): ChairReportJson {
  const args = ["score", "--records", "-", ...vocabArgs(options)];
  if (options.policy) args.push("--gt-policy", options.policy);
  if (options.slice) args.push("--slice", options.slice);
  if (options.allowMissing) args.push("--allow-missing");
  if (options.workers !== undefined) args.push("--workers", String(options.workers));
  if (options.perImage === false) args.push("--summary-only");
  const result = runCli(args, {
    stdin: JSON.stringify(records),
    cliPath: options.cliPath,
  });
  return JSON.parse(result.stdout) as ChairReportJson;
}

/**
 * Compare two score reports (full reports or minimal
 * {chair_i, chair_s} summaries) and return the comparison JSON.
 */
export function compare(
  baseline: ReportInput,
  candidate: ReportInput,
  options: VocabOptions = {},
): ComparisonJson {
  const dir = mkdtempSync(join(tmpdir(), "chairkit-"));
  try {
    const baselinePath = join(dir, "baseline.json");
    const candidatePath = join(dir, "candidate.json");
    writeFileSync(baselinePath, JSON.stringify(baseline));
    writeFileSync(candidatePath, JSON.stringify(candidate));
    const result = runCli(
      ["compare", "--baseline", baselinePath, "--candidate", candidatePath],
      { cliPath: options.cliPath },
    );
    return JSON.parse(result.stdout) as ComparisonJson;
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

/**
 * Mask captions into training examples, one per reference caption.
 *
 * Bare strings are wrapped as single-reference records numbered in
 * input order; full records may carry several references and instance
 * labels. Output is identical to the CLI's JSONL lines for the same
 * inputs and seed.
 */
export function mask(
  captions: Array<string | CaptionRecord>,
  options: MaskOptions = {},
): MaskedExampleJson[] {
  const records = captions.map((entry, index) =>
    typeof entry === "string"
      ? { image_id: index, references: [entry] }
      : entry,
  );
  const args = ["mask", "--records", "-", "--output", "-", ...vocabArgs(options)];
  if (options.mode) args.push("--mode", options.mode);
  if (options.mlmRate !== undefined) args.push("--mlm-rate", String(options.mlmRate));
  if (options.restrictToImageObjects) args.push("--restrict-to-image-objects");
  if (options.maskToken !== undefined) args.push("--mask-token", options.maskToken);
  if (options.seed !== undefined) args.push("--seed", String(options.seed));
  const result = runCli(args, {
    stdin: JSON.stringify(records),
    cliPath: options.cliPath,
  });
  return result.stdout
    .split("\n")
    .filter((line) => line.length > 0)
    .map((line) => JSON.parse(line) as MaskedExampleJson);
}

/**
 * Build a vocabulary from a synonym lexicon and/or class hierarchy and
 * return it; with `output` set, also leave it on disk for reuse via
 * vocabPath.
 */
export function buildVocab(
  options: VocabOptions & { output?: string },
): VocabJson {
  const args = ["build-vocab", ...vocabArgs(options)];
  if (options.output) args.push("--output", options.output);
  const result = runCli(args, { cliPath: options.cliPath });
  const text = options.output
    ? readFileSync(options.output, "utf8")
    : result.stdout;
  return JSON.parse(text) as VocabJson;
}

/** Show the object mentions one caption produces under a vocabulary. */
export function extractObjects(
  caption: string,
  options: VocabOptions = {},
): ObjectMentionJson[] {
  const result = runCli(["extract-objects", caption, ...vocabArgs(options)], {
    cliPath: options.cliPath,
  });
  const parsed = JSON.parse(result.stdout) as { mentions: ObjectMentionJson[] };
  return parsed.mentions;
}
