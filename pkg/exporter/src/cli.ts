#!/usr/bin/env node
// storyorder-export --corpus <path> --encoder {sbert-wk,use} --out <path>
//                   [--format csv-roc|jsonl] [--batch-size N] [--fine-tuned <model>]
// Exit codes: 0 success, 1 runtime/encoder failure, 2 invalid input.

import { parseArgs } from "node:util";

import { CorpusError } from "./corpus.js";
import { EncoderLoadError, isEncoderName } from "./encoders.js";
import { ExportError, runExport } from "./export.js";
import { SchemaError } from "./schema.js";

const USAGE =
  "usage: storyorder-export --corpus <path> --encoder {sbert-wk,use} --out <path> " +
  "[--format csv-roc|jsonl] [--batch-size N] [--fine-tuned <model>]";

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        corpus: { type: "string" },
        encoder: { type: "string" },
        out: { type: "string" },
        format: { type: "string" },
        "batch-size": { type: "string", default: "32" },
        "fine-tuned": { type: "string" },
        help: { type: "boolean", default: false },
      },
    }));
  } catch (e) {
    console.error(`error: ${(e as Error).message}\n${USAGE}`);
    return 2;
  }
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  for (const required of ["corpus", "encoder", "out"] as const) {
    if (!values[required]) {
      console.error(`error: missing required option --${required}\n${USAGE}`);
      return 2;
    }
  }
  const encoder = values.encoder as string;
  if (!isEncoderName(encoder)) {
    console.error(`error: unknown encoder ${JSON.stringify(encoder)}; expected sbert-wk or use`);
    return 2;
  }
  const format = values.format as string | undefined;
  if (format !== undefined && format !== "csv-roc" && format !== "jsonl") {
    console.error(`error: unknown format ${JSON.stringify(format)}; expected csv-roc or jsonl`);
    return 2;
  }
  const batchSize = Number(values["batch-size"]);

  try {
    const result = await runExport({
      corpus: values.corpus as string,
      format,
      encoder,
      out: values.out as string,
      batchSize,
      fineTuned: values["fine-tuned"] as string | undefined,
    });
    console.log(
      `exported ${result.records} stories (${result.sentences} sentences, dim ${result.dim}) -> ${values.out}`,
    );
    return 0;
  } catch (e) {
    if (e instanceof CorpusError || e instanceof SchemaError || e instanceof ExportError) {
      console.error(`error: ${e.message}`);
      return 2;
    }
    if (e instanceof EncoderLoadError) {
      console.error(`error: ${e.message}`);
      return 1;
    }
    if (e instanceof Error && "code" in e && (e as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${e.message}`);
      return 2;
    }
    console.error(`internal error: ${(e as Error).stack ?? e}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
