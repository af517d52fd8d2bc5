/** Service configuration: bind address, advertised kinds, batch limit. */

export const EMBED_DIMS: Record<string, number> = {
  embed_sbert: 384,
  embed_luar: 512,
  embed_stylecav: 768,
};

export const SCORE_KINDS = ["score_mis", "score_cola", "classify_formality"];

export const ALL_KINDS = [...Object.keys(EMBED_DIMS), ...SCORE_KINDS];

export const DEFAULT_MODELS: Record<string, string> = {
  embed_sbert: "hashed-ngram-sbert-384.v1",
  embed_luar: "hashed-ngram-luar-512.v1",
  embed_stylecav: "hashed-ngram-stylecav-768.v1",
  score_mis: "lexical-overlap-mis.v1",
  score_cola: "surface-acceptability.v1",
  classify_formality: "surface-formality.v1",
};

export interface ServiceConfig {
  host: string;
  port: number;
  maxBatch: number;
  kinds: string[];
  models: Record<string, string>;
  sharedSecret: string | null;
}

export class ConfigError extends Error {}

export function loadConfig(env: NodeJS.ProcessEnv = process.env): ServiceConfig {
  const port = Number(env.PORT ?? 8750);
  if (!Number.isInteger(port) || port < 0 || port > 65535) {
    throw new ConfigError(`invalid PORT: ${env.PORT}`);
  }
  const maxBatch = Number(env.MAX_BATCH ?? 256);
  if (!Number.isInteger(maxBatch) || maxBatch < 1) {
    throw new ConfigError(`invalid MAX_BATCH: ${env.MAX_BATCH}`);
  }
  let kinds = ALL_KINDS;
  if (env.KINDS) {
    kinds = env.KINDS.split(",").map((k) => k.trim()).filter(Boolean);
    if (kinds.length === 0) {
      throw new ConfigError("KINDS must name at least one kind");
    }
    for (const kind of kinds) {
      if (!ALL_KINDS.includes(kind)) {
        throw new ConfigError(`unknown kind in KINDS: ${kind}`);
      }
    }
  }
  const models: Record<string, string> = {};
  for (const kind of kinds) {
    models[kind] = env[`MODEL_${kind.toUpperCase()}`] ?? DEFAULT_MODELS[kind];
  }
  return {
    host: env.HOST ?? "127.0.0.1",
    port,
    maxBatch,
    kinds,
    models,
    sharedSecret: env.SHARED_SECRET ?? null,
  };
}
