/** Express application: /health, /embed, /score with JSON bodies. */

import express, { Express, NextFunction, Request, Response } from "express";
import { z } from "zod";

import { EMBED_DIMS, ServiceConfig } from "./config";
import { embedBatch } from "./embedders";
import { classifyFormality, scoreCola, scoreMis } from "./scorers";

const embedSchema = z.object({
  kind: z.string(),
  texts: z.array(z.string()).min(1),
});

const scoreSchema = z.object({
  kind: z.string(),
  texts: z.array(z.string()).min(1).optional(),
  pairs: z.array(z.tuple([z.string(), z.string()])).min(1).optional(),
});

export function buildApp(config: ServiceConfig): Express {
  const app = express();
  app.use(express.json({ limit: "16mb" }));

  if (config.sharedSecret !== null) {
    app.use((req: Request, res: Response, next: NextFunction) => {
      if (req.path === "/health") {
        return next();
      }
      if (req.header("x-shared-secret") !== config.sharedSecret) {
        return res.status(401).json({ error: "missing or wrong shared secret" });
      }
      next();
    });
  }

  app.get("/health", (_req: Request, res: Response) => {
    res.json({ status: "ok", kinds: config.kinds, models: config.models });
  });

  app.post("/embed", (req: Request, res: Response) => {
    const parsed = embedSchema.safeParse(req.body);
    if (!parsed.success) {
      return res.status(400).json({ error: "body must be {kind, texts[]}" });
    }
    const { kind, texts } = parsed.data;
    if (!(kind in EMBED_DIMS) || !config.kinds.includes(kind)) {
      return res.status(400).json({ error: `unknown embedding kind: ${kind}` });
    }
    if (texts.length > config.maxBatch) {
      return res.status(413).json({
        error: `batch of ${texts.length} exceeds limit ${config.maxBatch}`,
      });
    }
    res.json({ vectors: embedBatch(kind, texts) });
  });

  app.post("/score", (req: Request, res: Response) => {
    const parsed = scoreSchema.safeParse(req.body);
    if (!parsed.success) {
      return res.status(400).json({ error: "body must be {kind, texts[] | pairs[]}" });
    }
    const { kind, texts, pairs } = parsed.data;
    if (!config.kinds.includes(kind) || kind in EMBED_DIMS) {
      return res.status(400).json({ error: `unknown scoring kind: ${kind}` });
    }
    if (kind === "score_mis") {
      if (!pairs) {
        return res.status(400).json({ error: "score_mis requires pairs" });
      }
      if (pairs.length > config.maxBatch) {
        return res.status(413).json({
          error: `batch of ${pairs.length} exceeds limit ${config.maxBatch}`,
        });
      }
      return res.json({ scores: scoreMis(pairs) });
    }
    if (!texts) {
      return res.status(400).json({ error: `${kind} requires texts` });
    }
    if (texts.length > config.maxBatch) {
      return res.status(413).json({
        error: `batch of ${texts.length} exceeds limit ${config.maxBatch}`,
      });
    }
    const scores = kind === "score_cola" ? scoreCola(texts) : classifyFormality(texts);
    res.json({ scores });
  });

  app.use((_req: Request, res: Response) => {
    res.status(404).json({ error: "no such route" });
  });

  app.use((err: Error, _req: Request, res: Response, _next: NextFunction) => {
    if (err instanceof SyntaxError) {
      return res.status(400).json({ error: "malformed JSON body" });
    }
    res.status(500).json({ error: err.message });
  });

  return app;
}
