import * as tf from "@tensorflow/tfjs";
import { describe, expect, it } from "vitest";

import { TrainConfig } from "../src/config";
import { buildModel, compileModel } from "../src/models";

function tinyConfig(overrides: Partial<TrainConfig> = {}): TrainConfig {
  return {
    task: "classification",
    backbone: "resnet",
    channelLayout: "gasf3",
    epochs: 1,
    patience: 10,
    batchSize: 8,
    learningRate: 1e-3,
    seed: 1,
    inputSize: 50,
    freezeBackbone: false,
    baseFilters: 8,
    blocksPerStage: [1],
    widthMultiplier: 0.5,
    tfBackend: "cpu",
    data: { manifest: "unused" },
    outDir: "unused",
    ...overrides,
  };
}

describe("buildModel", () => {
  it("classification head emits 5 softmax scores", async () => {
    const model = buildModel(tinyConfig());
    const x = tf.randomNormal([2, 50, 50, 3], 0, 1, "float32", 7);
    const y = model.predict(x) as tf.Tensor;
    expect(y.shape).toEqual([2, 5]);
    const rows = (await y.array()) as number[][];
    for (const row of rows) {
      const sum = row.reduce((a, b) => a + b, 0);
      expect(Math.abs(sum - 1)).toBeLessThan(1e-5);
    }
    x.dispose();
    y.dispose();
  });

  it("regression head emits one unit", () => {
    const model = buildModel(tinyConfig({ task: "regression", backbone: "mobilenet" }));
    const x = tf.zeros([3, 50, 50, 3]);
    const y = model.predict(x) as tf.Tensor;
    expect(y.shape).toEqual([3, 1]);
    x.dispose();
    y.dispose();
  });

  it("same seed builds identical weights, different seed differs", async () => {
    const a = buildModel(tinyConfig({ seed: 5 }));
    const b = buildModel(tinyConfig({ seed: 5 }));
    const c = buildModel(tinyConfig({ seed: 6 }));
    const wa = await a.layers[1].getWeights()[0].data();
    const wb = await b.layers[1].getWeights()[0].data();
    const wc = await c.layers[1].getWeights()[0].data();
    expect(Array.from(wa)).toEqual(Array.from(wb));
    expect(Array.from(wa)).not.toEqual(Array.from(wc));
  });

  it("freeze knob leaves only the head trainable", () => {
    const model = buildModel(tinyConfig({ freezeBackbone: true }));
    compileModel(model, tinyConfig({ freezeBackbone: true }));
    const trainable = model.layers.filter((l) => l.trainable);
    expect(trainable.length).toBe(1);
  });

  it("mobilenet width multiplier shrinks parameter count", () => {
    const wide = buildModel(tinyConfig({ backbone: "mobilenet", widthMultiplier: 1.0 }));
    const narrow = buildModel(tinyConfig({ backbone: "mobilenet", widthMultiplier: 0.25 }));
    expect(narrow.countParams()).toBeLessThan(wide.countParams());
  });
});
