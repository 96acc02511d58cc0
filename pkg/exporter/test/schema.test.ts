import assert from "node:assert/strict";
import { existsSync, mkdtempSync, readdirSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { test } from "node:test";

import { EmbeddingRecord, SchemaError, validateRecord, writeEmbeddingsAtomic } from "../src/schema.js";

function record(overrides: Partial<EmbeddingRecord> = {}): EmbeddingRecord {
  return {
    story_id: "s1",
    encoder: "test",
    dim: 2,
    sentences: ["a.", "b."],
    embeddings: [
      [0.1, 0.2],
      [0.3, 0.4],
    ],
    ...overrides,
  };
}

test("valid record passes", () => {
  validateRecord(record(), 2, "r");
});

test("dim mismatch fails", () => {
  assert.throws(() => validateRecord(record({ dim: 3 }), 2, "r"), SchemaError);
  assert.throws(() => validateRecord(record(), 3, "r"), SchemaError);
});

test("sentence/embedding count mismatch fails", () => {
  assert.throws(
    () => validateRecord(record({ embeddings: [[0.1, 0.2]] }), 2, "r"),
    (e: Error) => e.message.includes("2 sentences but 1"),
  );
});

test("ragged vector fails", () => {
  assert.throws(
    () => validateRecord(record({ embeddings: [[0.1, 0.2], [0.3]] }), 2, "r"),
    SchemaError,
  );
});

test("non-finite component fails", () => {
  assert.throws(
    () => validateRecord(record({ embeddings: [[0.1, Number.NaN], [0.3, 0.4]] }), 2, "r"),
    (e: Error) => e.message.includes("non-finite"),
  );
});

test("zero vector fails", () => {
  assert.throws(
    () => validateRecord(record({ embeddings: [[0, 0], [0.3, 0.4]] }), 2, "r"),
    (e: Error) => e.message.includes("zero vector"),
  );
});

test("atomic write produces the file with meta first and no temp leftovers", () => {
  const dir = mkdtempSync(join(tmpdir(), "exporter-schema-"));
  const out = join(dir, "emb.jsonl");
  writeEmbeddingsAtomic(out, [record()], { tool: "storyorder-exporter" });
  const lines = readFileSync(out, "utf-8").trim().split("\n");
  assert.equal(lines.length, 2);
  assert.ok(JSON.parse(lines[0])._meta);
  assert.equal(JSON.parse(lines[1]).story_id, "s1");
  assert.deepEqual(readdirSync(dir), ["emb.jsonl"]);
});

test("failed write cleans up the temp file", () => {
  const dir = mkdtempSync(join(tmpdir(), "exporter-schema-"));
  const out = join(dir, "emb.jsonl");
  const circular: Record<string, unknown> = {};
  circular.self = circular;
  assert.throws(() =>
    writeEmbeddingsAtomic(out, [record({ embeddings: circular as never })], {}),
  );
  assert.equal(existsSync(out), false);
  assert.deepEqual(readdirSync(dir), []);
});
