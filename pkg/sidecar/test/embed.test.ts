import { describe, expect, it } from "vitest";

import { EMBED_DIMS } from "../src/config";
import { embedBatch, embedText } from "../src/embedders";

function norm(vector: number[]): number {
  return Math.sqrt(vector.reduce((acc, v) => acc + v * v, 0));
}

function cosine(a: number[], b: number[]): number {
  return a.reduce((acc, v, i) => acc + v * b[i], 0);
}

describe("embedText", () => {
  it("produces the advertised dimension per kind", () => {
    expect(embedText("embed_sbert", "hello there").length).toBe(384);
    expect(embedText("embed_luar", "hello there").length).toBe(512);
    expect(embedText("embed_stylecav", "hello there").length).toBe(768);
  });

  it("returns unit-norm vectors", () => {
    for (const kind of Object.keys(EMBED_DIMS)) {
      for (const text of ["one word", "a much longer sentence with several words", "x"]) {
        expect(norm(embedText(kind, text))).toBeCloseTo(1.0, 6);
      }
    }
  });

  it("is deterministic and batch-consistent", () => {
    const single = embedText("embed_sbert", "same input text");
    const again = embedText("embed_sbert", "same input text");
    expect(again).toEqual(single);
    const batch = embedBatch("embed_sbert", ["same input text", "other", "same input text"]);
    expect(batch[0]).toEqual(single);
    expect(batch[2]).toEqual(single);
    expect(batch[1]).not.toEqual(single);
  });

  it("uses a distinct feature space per kind", () => {
    const sbert = embedText("embed_sbert", "the same sentence");
    const luar = embedText("embed_luar", "the same sentence");
    expect(sbert.slice(0, 384)).not.toEqual(luar.slice(0, 384));
  });

  it("maps empty text to a fixed unit vector", () => {
    const empty = embedText("embed_sbert", "");
    expect(norm(empty)).toBeCloseTo(1.0, 9);
    expect(empty[0]).toBe(1);
    expect(embedText("embed_sbert", "   ")).toEqual(empty);
  });

  it("ranks paraphrase-like pairs above unrelated pairs", () => {
    const base = embedText("embed_sbert", "the committee approved the proposal yesterday");
    const close = embedText("embed_sbert", "the committee approved the new proposal");
    const far = embedText("embed_sbert", "seven turtles crossed an empty parking lot");
    expect(cosine(base, close)).toBeGreaterThan(cosine(base, far));
  });

  it("rejects non-embedding kinds", () => {
    expect(() => embedText("score_mis", "x")).toThrow();
  });
});
