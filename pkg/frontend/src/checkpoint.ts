// Checkpoint persistence. Pure @tensorflow/tfjs has no file:// IO handler in
// node, so artifacts are captured/restored through memory handlers:
// model.json (topology + weight specs + run metadata) and weights.bin.

import * as fs from "fs";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";

import { ChannelLayout, Task } from "./config";

export interface CheckpointMeta {
  task: Task;
  channelLayout: ChannelLayout;
  inputSize: number;
  backbone: string;
}

export async function saveCheckpoint(
  model: tf.LayersModel,
  dir: string,
  meta: CheckpointMeta,
): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  const artifacts = await new Promise<tf.io.ModelArtifacts>((resolve, reject) => {
    model
      .save(
        tf.io.withSaveHandler(async (a) => {
          resolve(a);
          return {
            modelArtifactsInfo: {
              dateSaved: new Date(),
              modelTopologyType: "JSON",
            },
          };
        }),
      )
      .catch(reject);
  });
  const doc = {
    meta,
    modelTopology: artifacts.modelTopology,
    weightSpecs: artifacts.weightSpecs,
  };
  fs.writeFileSync(path.join(dir, "model.json"), JSON.stringify(doc));
  fs.writeFileSync(path.join(dir, "weights.bin"), Buffer.from(artifacts.weightData as ArrayBuffer));
}

export async function loadCheckpoint(
  dir: string,
): Promise<{ model: tf.LayersModel; meta: CheckpointMeta }> {
  const doc = JSON.parse(fs.readFileSync(path.join(dir, "model.json"), "utf-8"));
  const weights = fs.readFileSync(path.join(dir, "weights.bin"));
  const weightData = weights.buffer.slice(
    weights.byteOffset,
    weights.byteOffset + weights.byteLength,
  );
  const model = await tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: doc.modelTopology,
      weightSpecs: doc.weightSpecs,
      weightData,
    }),
  );
  return { model, meta: doc.meta as CheckpointMeta };
}
