import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, describe, expect, it } from "vitest";

import {
  buildVocab,
  ChairkitError,
  compare,
  extractObjects,
  mask,
  score,
  type CaptionRecord,
} from "../src/index.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const HIERARCHY_FIXTURE = resolve(HERE, "../../tests/data/oi_hierarchy_600.json");

const FIXTURE: CaptionRecord[] = [
  { image_id: 1, references: ["a dog in a park"], prediction: "a dog catches a frisbee" },
  { image_id: 2, references: ["a cat sleeps"], prediction: "a cat" },
  { image_id: 3, references: ["a person drives a car"], prediction: "a person and a car" },
];

const scratch = mkdtempSync(join(tmpdir(), "chairkit-node-test-"));
afterAll(() => rmSync(scratch, { recursive: true, force: true }));

/** Run the CLI directly, the way a shell user would, for equivalence checks. */
function cliJson(args: string[], stdin?: string): unknown {
  const proc = spawnSync("chairkit", args, { input: stdin, encoding: "utf8" });
  expect(proc.status, proc.stderr).toBe(0);
  return JSON.parse(proc.stdout);
}

describe("score", () => {
  it("reports the fixture rates", () => {
    const report = score(FIXTURE);
    expect(report.chair_i).toBe(20.0);
    expect(report.chair_s).toBe(33.3);
    expect(report.chair_i_ratio).toBe(0.2);
    expect(report.chair_s_ratio).toBeCloseTo(1 / 3, 12);
    expect(report.n_objects_total).toBe(5);
    expect(report.n_hallucinated_objects).toBe(1);
    expect(report.per_image).toHaveLength(3);
  });

  it("is field-identical to the CLI on file inputs", () => {
    const recordsPath = join(scratch, "records.json");
    writeFileSync(recordsPath, JSON.stringify(FIXTURE));
    const fromCli = cliJson(["score", "--records", recordsPath]);
    expect(score(FIXTURE)).toStrictEqual(fromCli);
  });

  it("is unchanged by the worker count", () => {
    expect(score(FIXTURE, { workers: 4 })).toStrictEqual(
      score(FIXTURE, { workers: 1 }),
    );
  });

  it("rejects an empty corpus", () => {
    expect(() => score([])).toThrowError(/empty corpus/);
    try {
      score([]);
      expect.unreachable();
    } catch (error) {
      expect(error).toBeInstanceOf(ChairkitError);
      expect((error as ChairkitError).code).toBe("validation");
      expect((error as ChairkitError).exitCode).toBe(1);
    }
  });

  it("carries missing-predictions as a coded error", () => {
    const records: CaptionRecord[] = [
      { image_id: 1, references: ["a dog"], prediction: "a dog" },
      { image_id: 2, references: ["a cat"] },
    ];
    try {
      score(records);
      expect.unreachable();
    } catch (error) {
      expect((error as ChairkitError).code).toBe("missing-predictions");
    }
    const skipped = score(records, { allowMissing: true });
    expect(skipped.n_skipped_missing).toBe(1);
    expect(skipped.n_sentences).toBe(1);
  });

  it("distinguishes union from references ground truth", () => {
    const records: CaptionRecord[] = [
      {
        image_id: 1,
        references: ["a person sits"],
        instance_objects: ["frisbee"],
        prediction: "a person and a frisbee",
      },
    ];
    const refsOnly = score(records, { policy: "references" });
    expect(refsOnly.chair_i_ratio).toBe(0.5);
    expect(refsOnly.chair_s_ratio).toBe(1.0);
    const union = score(records, { policy: "union" });
    expect(union.chair_i_ratio).toBe(0.0);
    expect(union.chair_s_ratio).toBe(0.0);
  });

  it("surfaces a bad vocabulary path as an io error", () => {
    try {
      score(FIXTURE, { vocabPath: join(scratch, "missing-vocab.json") });
      expect.unreachable();
    } catch (error) {
      expect((error as ChairkitError).code).toBe("io");
      expect((error as ChairkitError).exitCode).toBe(2);
    }
  });
});

describe("compare", () => {
  it("reproduces the documented relative reduction", () => {
    const result = compare({ chair_i: 0, chair_s: 10.9 }, { chair_i: 0, chair_s: 9.0 });
    expect(result.relative_reduction_chair_s).toBe(17.4);
    expect(result.delta_chair_s).toBe(-1.9);
  });

  it("reports a regression as a negative reduction", () => {
    const result = compare({ chair_i: 0, chair_s: 13.0 }, { chair_i: 0, chair_s: 13.5 });
    expect(result.relative_reduction_chair_s).toBe(-3.8);
  });

  it("accepts full reports straight from score()", () => {
    const report = score(FIXTURE);
    const result = compare(report, report);
    expect(result.delta_chair_i).toBe(0.0);
    expect(result.relative_reduction_chair_s).toBe(0.0);
  });
});

describe("mask", () => {
  it("masks every object mention, one token per mention", () => {
    const examples = mask(["a dog catches a frisbee"]);
    expect(examples).toStrictEqual([
      {
        image_id: 0,
        masked_text: "a [MASK] catches a [MASK]",
        targets: [
          [1, "dog"],
          [4, "frisbee"],
        ],
      },
    ]);
  });

  it("collapses multi-word mentions into a single mask token", () => {
    const [example] = mask(["a hot dog on a dining table"]);
    expect(example!.masked_text).toBe("a [MASK] on a [MASK]");
    expect(example!.targets).toStrictEqual([
      [1, "hot dog"],
      [4, "dining table"],
    ]);
  });

  it("masks every word at rate 1.0 in standard mode", () => {
    const [example] = mask(["a dog catches a frisbee"], {
      mode: "standard",
      mlmRate: 1.0,
      seed: 3,
    });
    expect(example!.masked_text).toBe("[MASK] [MASK] [MASK] [MASK] [MASK]");
    expect(example!.targets).toHaveLength(5);
  });

  it("is deterministic for a fixed seed", () => {
    const captions = ["a dog runs", "two cats nap on a dining table", "a person"];
    const first = mask(captions, { mode: "standard", seed: 11 });
    const second = mask(captions, { mode: "standard", seed: 11 });
    expect(JSON.stringify(first)).toBe(JSON.stringify(second));
  });

  it("matches the CLI's JSONL lines exactly", () => {
    const records = FIXTURE.map(({ image_id, references }) => ({ image_id, references }));
    const recordsPath = join(scratch, "mask-records.json");
    writeFileSync(recordsPath, JSON.stringify(records));
    const proc = spawnSync(
      "chairkit",
      ["mask", "--records", recordsPath, "--output", "-"],
      { encoding: "utf8" },
    );
    expect(proc.status, proc.stderr).toBe(0);
    const fromCli = proc.stdout
      .split("\n")
      .filter((line) => line.length > 0)
      .map((line) => JSON.parse(line));
    expect(mask(records)).toStrictEqual(fromCli);
  });

  it("rejects an invalid masking rate with the field in the message", () => {
    try {
      mask(["a dog"], { mode: "standard", mlmRate: 0 });
      expect.unreachable();
    } catch (error) {
      expect((error as ChairkitError).code).toBe("config");
      expect((error as ChairkitError).message).toContain("mlm_rate");
    }
  });
});

describe("buildVocab", () => {
  it("loads the bundled 80-category lexicon", () => {
    const vocab = buildVocab({ synonyms: "builtin" });
    expect(vocab.n_categories).toBe(80);
    expect(vocab.fine_to_coarse["puppy"]).toBe("dog");
    expect(vocab.fine_to_coarse["chihuahua"]).toBe("dog");
  });

  it("coarsens the 600-class hierarchy fixture to 139 categories", () => {
    const vocab = buildVocab({ hierarchy: HIERARCHY_FIXTURE });
    expect(vocab.n_categories).toBe(139);
    expect(vocab.categories).toHaveLength(139);
  });

  it("writes a reusable vocabulary file", () => {
    const vocabPath = join(scratch, "vocab.json");
    const vocab = buildVocab({ synonyms: "builtin", output: vocabPath });
    expect(vocab.n_categories).toBe(80);
    const report = score(FIXTURE, { vocabPath });
    expect(report.chair_i).toBe(20.0);
  });
});

describe("extractObjects", () => {
  it("returns the mentions with spans and surfaces", () => {
    const mentions = extractObjects("Two hot dogs on a dining table");
    expect(mentions.map((m) => m.category)).toStrictEqual(["hot dog", "dining table"]);
    expect(mentions[0]!.surface).toBe("hot dogs");
    expect(mentions[0]!.token_span).toStrictEqual([1, 2]);
  });
});
