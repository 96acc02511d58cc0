// Export orchestration: read corpus, run batched inference, self-check
// every record against the interchange schema, write atomically.

import { createHash } from "node:crypto";

import { CorpusFormat, loadCorpus, Story } from "./corpus.js";
import { ENCODER_DIMS, EncoderBackend, EncoderName, loadEncoder } from "./encoders.js";
import { EmbeddingRecord, validateRecord, writeEmbeddingsAtomic } from "./schema.js";

export const VERSION = "0.1.0";

export interface ExportJob {
  corpus: string;
  format?: CorpusFormat;
  encoder: EncoderName;
  out: string;
  batchSize: number;
  fineTuned?: string;
}

export interface ExportResult {
  records: number;
  sentences: number;
  dim: number;
}

export class ExportError extends Error {}

export async function runExport(job: ExportJob, backend?: EncoderBackend): Promise<ExportResult> {
  if (!Number.isInteger(job.batchSize) || job.batchSize < 1) {
    throw new ExportError(`batch size must be a positive integer, got ${job.batchSize}`);
  }
  const stories = loadCorpus(job.corpus, job.format);
  if (stories.length === 0) throw new ExportError(`${job.corpus}: no stories to export`);

  const encoder = backend ?? (await loadEncoder(job.encoder, job.fineTuned));
  const expectedDim = ENCODER_DIMS[job.encoder];
  if (encoder.dim !== expectedDim) {
    throw new ExportError(
      `encoder ${encoder.name} produces dim ${encoder.dim}, but ${job.encoder} requires ${expectedDim}`,
    );
  }

  const vectors = await encodeAll(stories, encoder, job.batchSize);
  const records: EmbeddingRecord[] = [];
  let cursor = 0;
  for (const story of stories) {
    const rows = vectors.slice(cursor, cursor + story.sentences.length);
    cursor += story.sentences.length;
    const record: EmbeddingRecord = {
      story_id: story.storyId,
      encoder: encoder.name,
      dim: expectedDim,
      sentences: story.sentences,
      embeddings: rows,
    };
    validateRecord(record, expectedDim, `story ${JSON.stringify(story.storyId)}`);
    records.push(record);
  }

  writeEmbeddingsAtomic(job.out, records, {
    tool: "storyorder-exporter",
    version: VERSION,
    command: "export",
    config_hash: configHash(job),
    encoder: encoder.name,
    dim: expectedDim,
  });
  return { records: records.length, sentences: cursor, dim: expectedDim };
}

async function encodeAll(
  stories: Story[],
  encoder: EncoderBackend,
  batchSize: number,
): Promise<number[][]> {
  const sentences = stories.flatMap((s) => s.sentences);
  const vectors: number[][] = [];
  for (let lo = 0; lo < sentences.length; lo += batchSize) {
    const batch = sentences.slice(lo, lo + batchSize);
    const rows = await encoder.encodeBatch(batch);
    if (rows.length !== batch.length) {
      throw new ExportError(
        `encoder returned ${rows.length} vectors for a batch of ${batch.length} sentences`,
      );
    }
    vectors.push(...rows);
  }
  return vectors;
}

function configHash(job: ExportJob): string {
  const canonical = JSON.stringify({
    corpus: job.corpus,
    format: job.format ?? null,
    encoder: job.encoder,
    batchSize: job.batchSize,
    fineTuned: job.fineTuned ?? null,
  });
  return createHash("sha256").update(canonical).digest("hex").slice(0, 12);
}
