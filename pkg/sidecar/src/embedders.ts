/** Deterministic hashed-feature embeddings, one space per kind. */

import { EMBED_DIMS } from "./config";
import { fnv1a, surfaceFeatures } from "./text";

/**
 * Feature hashing into a fixed-dimension space: each surface feature is
 * assigned a bucket and a sign from independent hashes, accumulated, and
 * the result L2-normalized. Identical inputs always produce identical
 * rows; there is no randomness anywhere.
 */
export function embedText(kind: string, text: string): number[] {
  const dim = EMBED_DIMS[kind];
  if (dim === undefined) {
    throw new Error(`not an embedding kind: ${kind}`);
  }
  const vector = new Array<number>(dim).fill(0);
  for (const feature of surfaceFeatures(text)) {
    const bucket = fnv1a(`${kind}|${feature.key}`) % dim;
    const sign = fnv1a(`${feature.key}|${kind}`) & 1 ? 1 : -1;
    vector[bucket] += sign * feature.weight;
  }
  let norm = Math.sqrt(vector.reduce((acc, v) => acc + v * v, 0));
  if (norm === 0) {
    vector[0] = 1; // empty text maps to a fixed unit vector
    norm = 1;
  }
  return vector.map((v) => v / norm);
}

export function embedBatch(kind: string, texts: string[]): number[][] {
  return texts.map((text) => embedText(kind, text));
}
