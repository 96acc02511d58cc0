// Optional model runtimes, loaded dynamically at export time. Their type
// packaging is not NodeNext-compatible, so they are declared loosely here;
// the thin wrappers in encoders.ts are the only consumers.

declare module "@xenova/transformers" {
  export const pipeline: (...args: unknown[]) => Promise<any>;
}

declare module "@tensorflow/tfjs";

declare module "@tensorflow-models/universal-sentence-encoder" {
  export const load: (...args: unknown[]) => Promise<any>;
}
