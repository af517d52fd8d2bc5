/** Shared text utilities: hashing, tokenization, feature extraction. */

/** 32-bit FNV-1a over a string; stable across platforms. */
export function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

/** Lowercased word tokens; apostrophes stay inside contractions. */
export function tokenize(text: string): string[] {
  return text
    .toLowerCase()
    .split(/[^a-z0-9']+/)
    .map((t) => t.replace(/^'+|'+$/g, ""))
    .filter(Boolean);
}

export interface Feature {
  key: string;
  weight: number;
}

/**
 * Surface features for embedding: word unigrams and bigrams plus
 * boundary-marked character trigrams, so near-identical texts land close
 * together while unrelated texts scatter.
 */
export function surfaceFeatures(text: string): Feature[] {
  const tokens = tokenize(text);
  const features: Feature[] = [];
  for (const token of tokens) {
    features.push({ key: `w:${token}`, weight: 1.0 });
    const marked = `^${token}$`;
    for (let i = 0; i + 3 <= marked.length; i++) {
      features.push({ key: `c:${marked.slice(i, i + 3)}`, weight: 0.5 });
    }
  }
  for (let i = 0; i + 1 < tokens.length; i++) {
    features.push({ key: `b:${tokens[i]} ${tokens[i + 1]}`, weight: 0.8 });
  }
  return features;
}
