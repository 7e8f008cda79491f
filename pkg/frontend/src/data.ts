// Shard loading and batch assembly: stacks 1-2 single-channel GAF fields
// into the 3-channel input the vision backbones expect.

import * as tf from "@tensorflow/tfjs";

import { ChannelLayout, DataPaths, Task } from "./config";
import { ManifestRecord, readManifest } from "./manifest";
import { NpyArray, readNpy } from "./npy";

export const IMAGE_SIZE = 50;

export interface LoadedDataset {
  records: ManifestRecord[]; // rows kept, manifest order
  layout: ChannelLayout;
  /** [records.length, 50, 50] buffers per source field */
  gasf?: Float32Array;
  gadf?: Float32Array;
}

function checkShard(name: string, arr: NpyArray, expected: number): void {
  if (arr.shape.length !== 3 || arr.shape[1] !== IMAGE_SIZE || arr.shape[2] !== IMAGE_SIZE) {
    throw new Error(`${name}: expected [n, ${IMAGE_SIZE}, ${IMAGE_SIZE}] images, got [${arr.shape}]`);
  }
  if (arr.shape[0] !== expected) {
    throw new Error(`${name}: shard has ${arr.shape[0]} records but manifest has ${expected}`);
  }
}

function gatherRows(src: Float32Array, ids: number[]): Float32Array {
  const px = IMAGE_SIZE * IMAGE_SIZE;
  const out = new Float32Array(ids.length * px);
  ids.forEach((id, row) => {
    out.set(src.subarray(id * px, (id + 1) * px), row * px);
  });
  return out;
}

export function loadDataset(paths: DataPaths, layout: ChannelLayout): LoadedDataset {
  const manifest = readManifest(paths.manifest);
  const records = paths.split ? manifest.filter((r) => r.split === paths.split) : manifest;
  if (records.length === 0) {
    throw new Error(`no records${paths.split ? ` in split "${paths.split}"` : ""}`);
  }
  const ids = records.map((r) => r.id);
  const ds: LoadedDataset = { records, layout };
  if (layout !== "gadf3") {
    if (!paths.gasf) throw new Error(`layout ${layout} needs a gasf shard`);
    const arr = readNpy(paths.gasf);
    checkShard("gasf shard", arr, manifest.length);
    ds.gasf = gatherRows(arr.data, ids);
  }
  if (layout !== "gasf3") {
    if (!paths.gadf) throw new Error(`layout ${layout} needs a gadf shard`);
    const arr = readNpy(paths.gadf);
    checkShard("gadf shard", arr, manifest.length);
    ds.gadf = gatherRows(arr.data, ids);
  }
  return ds;
}

export function labelsFor(ds: LoadedDataset, task: Task): Float32Array {
  const out = new Float32Array(ds.records.length);
  ds.records.forEach((r, i) => {
    out[i] = task === "classification" ? r.modelCode : r.alpha;
  });
  return out;
}

/** Assemble rows `indices` (into ds.records) as a [n, size, size, 3] tensor.

    Field values are already in [-1, 1], the native input range of the
    in-code backbones; inputRange="01" remaps linearly to [0, 1] for
    externally pretrained weights that expect it. */
export function assembleBatch(
  ds: LoadedDataset,
  indices: number[],
  inputSize: number,
  inputRange: "-11" | "01" = "-11",
): tf.Tensor4D {
  const px = IMAGE_SIZE * IMAGE_SIZE;
  const n = indices.length;
  const out = new Float32Array(n * px * 3);
  const channelOf = (chan: number): Float32Array => {
    if (ds.layout === "gasf3") return ds.gasf!;
    if (ds.layout === "gadf3") return ds.gadf!;
    return chan === 1 ? ds.gadf! : ds.gasf!; // gasf-gadf-gasf sandwich
  };
  indices.forEach((rowIdx, i) => {
    for (let chan = 0; chan < 3; chan++) {
      const src = channelOf(chan);
      const base = rowIdx * px;
      for (let p = 0; p < px; p++) {
        out[(i * px + p) * 3 + chan] = src[base + p];
      }
    }
  });
  return tf.tidy(() => {
    let t = tf.tensor4d(out, [n, IMAGE_SIZE, IMAGE_SIZE, 3]);
    if (inputRange === "01") {
      t = t.add(1).div(2);
    }
    if (inputSize !== IMAGE_SIZE) {
      t = tf.image.resizeBilinear(t, [inputSize, inputSize]);
    }
    return t as tf.Tensor4D;
  });
}

/** Deterministic PRNG (mulberry32) for shuffles and splits. */
export function seededRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function shuffled(n: number, rand: () => number): number[] {
  const idx = Array.from({ length: n }, (_, i) => i);
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [idx[i], idx[j]] = [idx[j], idx[i]];
  }
  return idx;
}

/** Fresh 95/5 train/validation split of the pool, re-drawn every epoch. */
export function epochSplit(
  n: number,
  seed: number,
  epoch: number,
  validationFraction = 0.05,
): { train: number[]; validation: number[] } {
  const idx = shuffled(n, seededRng(seed * 1_000_003 + epoch));
  const nVal = Math.max(1, Math.round(n * validationFraction));
  return { train: idx.slice(nVal), validation: idx.slice(0, nVal) };
}
