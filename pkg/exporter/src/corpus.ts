// Story corpus readers: ROC-style CSV (RFC-4180) and JSONL.
// Mirrors the pipeline's loader conventions: whitespace-trimmed sentences,
// no blanks, unique story ids, and rejection of two-choice records.

import { readFileSync } from "node:fs";

export interface Story {
  storyId: string;
  sentences: string[];
}

export type CorpusFormat = "csv-roc" | "jsonl";

export class CorpusError extends Error {}

const CSV_HEADER = [
  "storyid",
  "storytitle",
  "sentence1",
  "sentence2",
  "sentence3",
  "sentence4",
  "sentence5",
];

export function inferFormat(path: string): CorpusFormat {
  if (path.endsWith(".jsonl")) return "jsonl";
  if (path.endsWith(".csv")) return "csv-roc";
  throw new CorpusError(`cannot infer corpus format from ${path}; pass --format`);
}

export function loadCorpus(path: string, format?: CorpusFormat): Story[] {
  const fmt = format ?? inferFormat(path);
  const text = readFileSync(path, "utf-8");
  const stories = fmt === "csv-roc" ? parseCsvRoc(text, path) : parseJsonl(text, path);
  const seen = new Set<string>();
  for (const story of stories) {
    if (seen.has(story.storyId)) {
      throw new CorpusError(`${path}: duplicate story_id ${JSON.stringify(story.storyId)}`);
    }
    seen.add(story.storyId);
  }
  return stories;
}

function parseCsvRoc(text: string, path: string): Story[] {
  const rows = parseCsv(text);
  if (rows.length === 0) throw new CorpusError(`${path}: empty file`);
  const header = rows[0].map((h) => h.trim().toLowerCase());
  if (header.join(",") !== CSV_HEADER.join(",")) {
    throw new CorpusError(`${path}:1: bad header; expected ${CSV_HEADER.join(",")}`);
  }
  const stories: Story[] = [];
  for (let i = 1; i < rows.length; i++) {
    const row = rows[i];
    const line = i + 1;
    if (row.length === 1 && row[0] === "") continue; // trailing blank line
    if (row.length === CSV_HEADER.length + 1) {
      throw new CorpusError(
        `${path}:${line}: record ${JSON.stringify(row[0])} has two fifth-sentence options; ` +
          "two-choice story-cloze records are not orderable",
      );
    }
    if (row.length !== CSV_HEADER.length) {
      throw new CorpusError(`${path}:${line}: expected ${CSV_HEADER.length} fields, got ${row.length}`);
    }
    const storyId = row[0].trim();
    if (!storyId) throw new CorpusError(`${path}:${line}: empty storyid`);
    const sentences = row.slice(2).map((s) => s.trim());
    sentences.forEach((s, k) => {
      if (!s) {
        throw new CorpusError(
          `${path}:${line}: record ${JSON.stringify(storyId)}: sentence${k + 1} is empty`,
        );
      }
    });
    stories.push({ storyId, sentences });
  }
  return stories;
}

function parseJsonl(text: string, path: string): Story[] {
  const stories: Story[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let record: unknown;
    try {
      record = JSON.parse(line);
    } catch (e) {
      throw new CorpusError(`${path}:${i + 1}: bad JSON: ${(e as Error).message}`);
    }
    if (typeof record !== "object" || record === null || Array.isArray(record)) {
      throw new CorpusError(`${path}:${i + 1}: record is not an object`);
    }
    const obj = record as Record<string, unknown>;
    if ("_meta" in obj) continue;
    const storyId = obj["story_id"];
    const sentences = obj["sentences"];
    if (typeof storyId !== "string" && typeof storyId !== "number") {
      throw new CorpusError(`${path}:${i + 1}: record needs 'story_id'`);
    }
    if (!Array.isArray(sentences) || !sentences.every((s) => typeof s === "string")) {
      throw new CorpusError(`${path}:${i + 1}: 'sentences' must be a list of strings`);
    }
    const trimmed = sentences.map((s) => s.trim());
    trimmed.forEach((s, k) => {
      if (!s) throw new CorpusError(`${path}:${i + 1}: sentence ${k + 1} is empty`);
    });
    if (trimmed.length === 0) throw new CorpusError(`${path}:${i + 1}: story has no sentences`);
    stories.push({ storyId: String(storyId), sentences: trimmed });
  }
  return stories;
}

// Minimal RFC-4180 parser: quoted fields, doubled quotes, newlines in quotes.
export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let field = "";
  let row: string[] = [];
  let inQuotes = false;
  let i = 0;
  const push = () => {
    row.push(field);
    field = "";
  };
  const endRow = () => {
    push();
    rows.push(row);
    row = [];
  };
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i++;
        continue;
      }
      field += ch;
      i++;
      continue;
    }
    if (ch === '"' && field === "") {
      inQuotes = true;
      i++;
      continue;
    }
    if (ch === ",") {
      push();
      i++;
      continue;
    }
    if (ch === "\r" && text[i + 1] === "\n") {
      endRow();
      i += 2;
      continue;
    }
    if (ch === "\n") {
      endRow();
      i++;
      continue;
    }
    field += ch;
    i++;
  }
  if (field !== "" || row.length > 0) endRow();
  return rows;
}
