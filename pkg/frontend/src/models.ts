// In-code vision backbones (residual CNN and depthwise-separable CNN) with
// task heads. Sizing knobs keep CPU smoke runs cheap; benchmark-scale runs
// crank base_filters/blocks back up. Every initializer is seeded so a fixed
// config yields identical weights.

import * as tf from "@tensorflow/tfjs";

import { Backbone, Task, TrainConfig } from "./config";
import { N_CLASSES } from "./manifest";

class SeedStream {
  private next: number;

  constructor(seed: number) {
    this.next = seed * 7919 + 1;
  }

  take(): number {
    return this.next++;
  }
}

function conv(
  x: tf.SymbolicTensor,
  filters: number,
  kernel: number,
  stride: number,
  seeds: SeedStream,
  linear = false,
): tf.SymbolicTensor {
  let y = tf.layers
    .conv2d({
      filters,
      kernelSize: kernel,
      strides: stride,
      padding: "same",
      useBias: false,
      kernelInitializer: tf.initializers.heNormal({ seed: seeds.take() }),
    })
    .apply(x) as tf.SymbolicTensor;
  y = tf.layers.batchNormalization().apply(y) as tf.SymbolicTensor;
  if (!linear) {
    y = tf.layers.reLU().apply(y) as tf.SymbolicTensor;
  }
  return y;
}

function residualBlock(
  x: tf.SymbolicTensor,
  filters: number,
  stride: number,
  seeds: SeedStream,
): tf.SymbolicTensor {
  let shortcut = x;
  if (stride !== 1 || (x.shape[x.shape.length - 1] as number) !== filters) {
    shortcut = conv(x, filters, 1, stride, seeds, true);
  }
  let y = conv(x, filters, 3, stride, seeds);
  y = conv(y, filters, 3, 1, seeds, true);
  y = tf.layers.add().apply([y, shortcut]) as tf.SymbolicTensor;
  return tf.layers.reLU().apply(y) as tf.SymbolicTensor;
}

function resnetTrunk(input: tf.SymbolicTensor, cfg: TrainConfig, seeds: SeedStream): tf.SymbolicTensor {
  let y = conv(input, cfg.baseFilters, 3, 1, seeds);
  cfg.blocksPerStage.forEach((blocks, stage) => {
    const filters = cfg.baseFilters * 2 ** stage;
    for (let b = 0; b < blocks; b++) {
      y = residualBlock(y, filters, b === 0 && stage > 0 ? 2 : 1, seeds);
    }
  });
  return tf.layers.globalAveragePooling2d({}).apply(y) as tf.SymbolicTensor;
}

function separableBlock(
  x: tf.SymbolicTensor,
  filters: number,
  stride: number,
  seeds: SeedStream,
): tf.SymbolicTensor {
  let y = tf.layers
    .depthwiseConv2d({
      kernelSize: 3,
      strides: stride,
      padding: "same",
      useBias: false,
      depthwiseInitializer: tf.initializers.heNormal({ seed: seeds.take() }),
    })
    .apply(x) as tf.SymbolicTensor;
  y = tf.layers.batchNormalization().apply(y) as tf.SymbolicTensor;
  y = tf.layers.reLU().apply(y) as tf.SymbolicTensor;
  return conv(y, filters, 1, 1, seeds);
}

function mobilenetTrunk(input: tf.SymbolicTensor, cfg: TrainConfig, seeds: SeedStream): tf.SymbolicTensor {
  const w = (f: number) => Math.max(8, Math.round(f * cfg.widthMultiplier));
  let y = conv(input, w(cfg.baseFilters), 3, 2, seeds);
  const plan: Array<[number, number]> = [
    [w(cfg.baseFilters * 2), 1],
    [w(cfg.baseFilters * 4), 2],
    [w(cfg.baseFilters * 4), 1],
    [w(cfg.baseFilters * 8), 2],
    [w(cfg.baseFilters * 8), 1],
  ];
  for (const [filters, stride] of plan) {
    y = separableBlock(y, filters, stride, seeds);
  }
  return tf.layers.globalAveragePooling2d({}).apply(y) as tf.SymbolicTensor;
}

export function buildModel(cfg: TrainConfig): tf.LayersModel {
  const seeds = new SeedStream(cfg.seed);
  const input = tf.input({ shape: [cfg.inputSize, cfg.inputSize, 3] });
  const trunk: Record<Backbone, (i: tf.SymbolicTensor, c: TrainConfig, s: SeedStream) => tf.SymbolicTensor> = {
    resnet: resnetTrunk,
    mobilenet: mobilenetTrunk,
  };
  const pooled = trunk[cfg.backbone](input, cfg, seeds);
  const head =
    cfg.task === "classification"
      ? tf.layers.dense({
          units: N_CLASSES,
          activation: "softmax",
          kernelInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
        })
      : tf.layers.dense({
          units: 1,
          kernelInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
        });
  const output = head.apply(pooled) as tf.SymbolicTensor;
  const model = tf.model({ inputs: input, outputs: output });
  if (cfg.freezeBackbone) {
    for (const layer of model.layers) {
      if (layer !== model.layers[model.layers.length - 1]) {
        layer.trainable = false;
      }
    }
  }
  return model;
}

export function lossFor(task: Task): string {
  return task === "classification" ? "sparseCategoricalCrossentropy" : "meanAbsoluteError";
}

export function compileModel(model: tf.LayersModel, cfg: TrainConfig): void {
  model.compile({
    optimizer: tf.train.adam(cfg.learningRate),
    loss: lossFor(cfg.task),
  });
}
