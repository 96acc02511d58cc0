// Pretrained encoder backends. Each produces fixed-width sentence vectors:
// the BERT-based encoder 768, the universal sentence encoder 512. Model
// runtimes are loaded lazily so the exporter builds and its offline tests
// run without them installed; a failed load surfaces as EncoderLoadError.

export const ENCODER_DIMS = {
  "sbert-wk": 768,
  use: 512,
} as const;

export type EncoderName = keyof typeof ENCODER_DIMS;

export interface EncoderBackend {
  name: string;
  dim: number;
  encodeBatch(sentences: string[]): Promise<number[][]>;
}

export class EncoderLoadError extends Error {}

export function isEncoderName(value: string): value is EncoderName {
  return value in ENCODER_DIMS;
}

export async function loadEncoder(name: EncoderName, fineTuned?: string): Promise<EncoderBackend> {
  if (name === "sbert-wk") return loadSbertWk(fineTuned);
  return loadUse(fineTuned);
}

const SBERT_MODEL = "Xenova/all-mpnet-base-v2";

async function loadSbertWk(fineTuned?: string): Promise<EncoderBackend> {
  let pipeline: any;
  try {
    ({ pipeline } = await import("@xenova/transformers"));
  } catch (e) {
    throw new EncoderLoadError(
      `sbert-wk backend needs the '@xenova/transformers' package: ${(e as Error).message}`,
    );
  }
  const model = fineTuned ?? SBERT_MODEL;
  let extractor: any;
  try {
    extractor = await pipeline("feature-extraction", model, { quantized: true });
  } catch (e) {
    throw new EncoderLoadError(`failed to load encoder model ${model}: ${(e as Error).message}`);
  }
  return {
    name: fineTuned ? "sbert-wk-fine-tuned" : "sbert-wk",
    dim: ENCODER_DIMS["sbert-wk"],
    async encodeBatch(sentences: string[]): Promise<number[][]> {
      const output = await extractor(sentences, { pooling: "mean", normalize: false });
      const [batch, dim] = output.dims as [number, number];
      const data: number[] = Array.from(output.data as Float32Array);
      const vectors: number[][] = [];
      for (let i = 0; i < batch; i++) {
        vectors.push(data.slice(i * dim, (i + 1) * dim));
      }
      return vectors;
    },
  };
}

async function loadUse(fineTuned?: string): Promise<EncoderBackend> {
  if (fineTuned) {
    throw new EncoderLoadError("--fine-tuned is only supported for the sbert-wk encoder");
  }
  let use: any;
  try {
    await import("@tensorflow/tfjs");
    use = await import("@tensorflow-models/universal-sentence-encoder");
  } catch (e) {
    throw new EncoderLoadError(
      "use backend needs '@tensorflow/tfjs' and " +
        `'@tensorflow-models/universal-sentence-encoder': ${(e as Error).message}`,
    );
  }
  let model: any;
  try {
    model = await use.load();
  } catch (e) {
    throw new EncoderLoadError(`failed to load the universal sentence encoder: ${(e as Error).message}`);
  }
  return {
    name: "use",
    dim: ENCODER_DIMS.use,
    async encodeBatch(sentences: string[]): Promise<number[][]> {
      const tensor = await model.embed(sentences);
      const rows = (await tensor.array()) as number[][];
      tensor.dispose();
      return rows;
    },
  };
}
