// Batch inference -> prediction CSV in the evaluator's format:
// classification id,pred_code,score_0..score_4 (softmax rows),
// regression id,pred_alpha clipped inside (0, 2).

import * as fs from "fs";

import * as tf from "@tensorflow/tfjs";

import { initBackend } from "./backend";
import { loadCheckpoint } from "./checkpoint";
import { DataPaths, Task } from "./config";
import { assembleBatch, loadDataset } from "./data";
import { N_CLASSES } from "./manifest";

export const ALPHA_CLIP: [number, number] = [0.005, 1.995];

export interface PredictOptions {
  checkpointDir: string;
  data: DataPaths;
  outPath: string;
  task: Task;
  batchSize?: number;
  tfBackend?: "wasm" | "cpu";
}

export async function predict(opts: PredictOptions): Promise<number> {
  await initBackend(opts.tfBackend ?? "wasm");
  const { model, meta } = await loadCheckpoint(opts.checkpointDir);
  if (meta.task !== opts.task) {
    throw new Error(`checkpoint/task mismatch: checkpoint is ${meta.task}, requested ${opts.task}`);
  }
  const ds = loadDataset(opts.data, meta.channelLayout);
  const batchSize = opts.batchSize ?? 64;
  const lines: string[] = [];
  if (opts.task === "classification") {
    const scoreCols = Array.from({ length: N_CLASSES }, (_, i) => `score_${i}`);
    lines.push(`id,pred_code,${scoreCols.join(",")}`);
  } else {
    lines.push("id,pred_alpha");
  }
  for (let start = 0; start < ds.records.length; start += batchSize) {
    const indices = Array.from(
      { length: Math.min(batchSize, ds.records.length - start) },
      (_, i) => start + i,
    );
    const x = assembleBatch(ds, indices, meta.inputSize);
    const out = model.predict(x) as tf.Tensor;
    const values = await out.data();
    x.dispose();
    out.dispose();
    indices.forEach((rowIdx, i) => {
      const id = ds.records[rowIdx].id;
      if (opts.task === "classification") {
        const scores = Array.from(values.slice(i * N_CLASSES, (i + 1) * N_CLASSES));
        const pred = scores.indexOf(Math.max(...scores));
        lines.push(`${id},${pred},${scores.map((s) => s.toFixed(6)).join(",")}`);
      } else {
        const alpha = Math.min(ALPHA_CLIP[1], Math.max(ALPHA_CLIP[0], values[i]));
        lines.push(`${id},${alpha.toFixed(6)}`);
      }
    });
  }
  fs.writeFileSync(opts.outPath, lines.join("\n") + "\n");
  return ds.records.length;
}
