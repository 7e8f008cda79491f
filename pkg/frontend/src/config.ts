// Training configuration (JSON file, snake_case keys).

import * as fs from "fs";

export type Task = "classification" | "regression";
export type Backbone = "resnet" | "mobilenet";
export type ChannelLayout = "gasf3" | "gadf3" | "gasf-gadf-gasf";

export interface DataPaths {
  manifest: string;
  gasf?: string;
  gadf?: string;
  split?: string; // restrict to one manifest split; default: use every row
}

export interface TrainConfig {
  task: Task;
  backbone: Backbone;
  channelLayout: ChannelLayout;
  epochs: number;
  patience: number;
  batchSize: number;
  learningRate: number;
  seed: number;
  inputSize: number; // 50 = native; anything else bilinear-resizes
  freezeBackbone: boolean;
  pretrainedUrl?: string;
  baseFilters: number;
  blocksPerStage: number[];
  widthMultiplier: number;
  tfBackend: "wasm" | "cpu";
  data: DataPaths;
  outDir: string;
}

const TASKS: Task[] = ["classification", "regression"];
const BACKBONES: Backbone[] = ["resnet", "mobilenet"];
const LAYOUTS: ChannelLayout[] = ["gasf3", "gadf3", "gasf-gadf-gasf"];

export function parseConfig(doc: Record<string, unknown>): TrainConfig {
  const get = (key: string, fallback?: unknown): unknown =>
    doc[key] !== undefined ? doc[key] : fallback;

  const task = get("task") as Task;
  const backbone = get("backbone", "resnet") as Backbone;
  const layout = get("channel_layout", "gasf3") as ChannelLayout;
  if (!TASKS.includes(task)) throw new Error(`config: task must be one of ${TASKS}`);
  if (!BACKBONES.includes(backbone)) throw new Error(`config: backbone must be one of ${BACKBONES}`);
  if (!LAYOUTS.includes(layout)) throw new Error(`config: channel_layout must be one of ${LAYOUTS}`);

  const data = get("data") as Record<string, string> | undefined;
  if (!data || !data.manifest) throw new Error("config: data.manifest is required");
  const needsGasf = layout !== "gadf3";
  const needsGadf = layout !== "gasf3";
  if (needsGasf && !data.gasf) throw new Error(`config: layout ${layout} needs data.gasf`);
  if (needsGadf && !data.gadf) throw new Error(`config: layout ${layout} needs data.gadf`);

  const cfg: TrainConfig = {
    task,
    backbone,
    channelLayout: layout,
    epochs: Number(get("epochs", 100)),
    patience: Number(get("patience", 10)),
    batchSize: Number(get("batch_size", 32)),
    learningRate: Number(get("learning_rate", 1e-3)),
    seed: Number(get("seed", 0)),
    inputSize: Number(get("input_size", 224)),
    freezeBackbone: Boolean(get("freeze_backbone", false)),
    pretrainedUrl: get("pretrained_url") as string | undefined,
    baseFilters: Number(get("base_filters", 32)),
    blocksPerStage: (get("blocks_per_stage", [2, 2, 2]) as number[]).map(Number),
    widthMultiplier: Number(get("width_multiplier", 1.0)),
    // wasm lacks conv-gradient kernels, so training defaults to cpu;
    // prediction uses wasm (inference-only) unless overridden
    tfBackend: get("tf_backend", "cpu") as "wasm" | "cpu",
    data: {
      manifest: data.manifest,
      gasf: data.gasf,
      gadf: data.gadf,
      split: data.split,
    },
    outDir: String(get("out_dir", "runs/run")),
  };
  for (const [name, v] of [
    ["epochs", cfg.epochs],
    ["batch_size", cfg.batchSize],
    ["learning_rate", cfg.learningRate],
    ["input_size", cfg.inputSize],
  ] as const) {
    if (!Number.isFinite(v) || v <= 0) throw new Error(`config: ${name} must be positive`);
  }
  if (cfg.patience < 0) throw new Error("config: patience must be >= 0");
  if (!["wasm", "cpu"].includes(cfg.tfBackend)) {
    throw new Error("config: tf_backend must be wasm or cpu");
  }
  return cfg;
}

export function loadConfig(path: string): TrainConfig {
  return parseConfig(JSON.parse(fs.readFileSync(path, "utf-8")));
}
