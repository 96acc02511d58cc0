// Embedding interchange records: self-checked before write, written
// atomically (temp file + rename) so a crash never leaves a partial file.

import { closeSync, fsyncSync, openSync, renameSync, unlinkSync, writeSync } from "node:fs";
import { dirname, join } from "node:path";

export interface EmbeddingRecord {
  story_id: string;
  encoder: string;
  dim: number;
  sentences: string[];
  embeddings: number[][];
}

export class SchemaError extends Error {}

export function validateRecord(record: EmbeddingRecord, expectedDim: number, context: string): void {
  if (!record.story_id) throw new SchemaError(`${context}: empty story_id`);
  if (record.dim !== expectedDim) {
    throw new SchemaError(`${context}: dim ${record.dim}, expected ${expectedDim}`);
  }
  if (record.sentences.length === 0) throw new SchemaError(`${context}: no sentences`);
  if (record.sentences.length !== record.embeddings.length) {
    throw new SchemaError(
      `${context}: ${record.sentences.length} sentences but ${record.embeddings.length} embeddings`,
    );
  }
  record.embeddings.forEach((vector, i) => {
    if (vector.length !== expectedDim) {
      throw new SchemaError(`${context}: vector ${i} has ${vector.length} components, expected ${expectedDim}`);
    }
    let sumSquares = 0;
    for (const v of vector) {
      if (!Number.isFinite(v)) throw new SchemaError(`${context}: non-finite component in vector ${i}`);
      sumSquares += v * v;
    }
    if (sumSquares === 0) throw new SchemaError(`${context}: zero vector at sentence ${i}`);
  });
}

export function writeEmbeddingsAtomic(
  outPath: string,
  records: EmbeddingRecord[],
  meta?: Record<string, unknown>,
): void {
  const tempPath = join(dirname(outPath), `.${Date.now()}-${process.pid}.tmp`);
  const fd = openSync(tempPath, "w");
  try {
    if (meta !== undefined) {
      writeSync(fd, JSON.stringify({ _meta: meta }) + "\n");
    }
    for (const record of records) {
      writeSync(fd, JSON.stringify(record) + "\n");
    }
    fsyncSync(fd);
  } catch (e) {
    closeSync(fd);
    unlinkSync(tempPath);
    throw e;
  }
  closeSync(fd);
  renameSync(tempPath, outPath);
}
