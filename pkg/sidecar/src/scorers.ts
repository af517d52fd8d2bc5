/** Deterministic surface-level scorers, all returning values in [0, 1]. */

import { tokenize } from "./text";

function clamp01(value: number): number {
  return Math.min(1, Math.max(0, value));
}

/**
 * Meaning-preservation score for a text pair: token-set Jaccard overlap.
 * Symmetric by construction; identical texts score 1, disjoint texts 0.
 */
export function scoreMis(pairs: [string, string][]): number[] {
  return pairs.map(([a, b]) => {
    const setA = new Set(tokenize(a));
    const setB = new Set(tokenize(b));
    if (setA.size === 0 && setB.size === 0) {
      return 1.0;
    }
    let shared = 0;
    for (const token of setA) {
      if (setB.has(token)) {
        shared++;
      }
    }
    const union = setA.size + setB.size - shared;
    return union === 0 ? 1.0 : shared / union;
  });
}

const FUNCTION_WORDS = new Set([
  "the", "a", "an", "is", "are", "was", "were", "to", "of", "in", "and",
  "it", "this", "that", "has", "have", "had", "be", "been", "will",
]);

/** Acceptability heuristic: well-formed sentence shape scores high. */
export function scoreCola(texts: string[]): number[] {
  return texts.map((text) => {
    const trimmed = text.trim();
    const tokens = tokenize(trimmed);
    if (tokens.length === 0) {
      return 0.0;
    }
    let score = 0.35;
    if (/^[A-Z"'“]/.test(trimmed)) {
      score += 0.2;
    }
    if (/[.!?]["'”]?$/.test(trimmed)) {
      score += 0.2;
    }
    if (tokens.some((t) => FUNCTION_WORDS.has(t))) {
      score += 0.15;
    }
    if (tokens.length >= 3 && tokens.length <= 60) {
      score += 0.1;
    }
    return clamp01(score);
  });
}

const INFORMAL_WORDS = new Set([
  "lol", "lmao", "omg", "gonna", "wanna", "gotta", "kinda", "sorta",
  "yeah", "nah", "hey", "u", "ur", "idk", "btw", "dunno", "ain't",
  "cuz", "coz", "tbh", "imo", "haha", "hahaha", "wtf", "pls", "thx",
]);

/** Probability that a text reads as formal, from surface cues only. */
export function classifyFormality(texts: string[]): number[] {
  return texts.map((text) => {
    const trimmed = text.trim();
    const tokens = tokenize(trimmed);
    if (tokens.length === 0) {
      return 0.5;
    }
    let score = 0.5;
    for (const token of tokens) {
      if (INFORMAL_WORDS.has(token)) {
        score -= 0.12;
      }
      if (token.includes("'")) {
        score -= 0.08; // contractions
      }
    }
    const exclamations = (trimmed.match(/!/g) ?? []).length;
    score -= 0.06 * exclamations;
    const longWords = tokens.filter((t) => t.length >= 7).length;
    score += Math.min(0.2, 0.04 * longWords);
    if (/^[A-Z]/.test(trimmed) && /\.$/.test(trimmed)) {
      score += 0.1;
    }
    if (/[A-Z]/.test(trimmed) === false) {
      score -= 0.08; // no capitalization at all
    }
    return clamp01(score);
  });
}
