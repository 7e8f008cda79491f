// Training loop: fresh 95/5 train/validation re-split every epoch, early
// stopping when validation loss has not improved for `patience` consecutive
// epochs, best weights checkpointed.

import * as fs from "fs";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";

import { initBackend } from "./backend";
import { saveCheckpoint } from "./checkpoint";
import { TrainConfig } from "./config";
import { LoadedDataset, assembleBatch, epochSplit, labelsFor, loadDataset, seededRng, shuffled } from "./data";
import { buildModel, compileModel } from "./models";

export interface EpochLog {
  epoch: number;
  trainLoss: number;
  valLoss: number;
  seconds: number;
}

export interface TrainResult {
  checkpointDir: string;
  log: EpochLog[];
  bestValLoss: number;
  stoppedEarly: boolean;
}

function labelTensor(task: TrainConfig["task"], values: Float32Array): tf.Tensor {
  // sparse categorical cross-entropy expects float32 class indices
  return task === "classification"
    ? tf.tensor1d(Array.from(values), "float32")
    : tf.tensor2d(Array.from(values), [values.length, 1]);
}

async function runBatches(
  model: tf.LayersModel,
  ds: LoadedDataset,
  labels: Float32Array,
  indices: number[],
  cfg: TrainConfig,
  fit: boolean,
): Promise<number> {
  let lossSum = 0;
  let seen = 0;
  for (let start = 0; start < indices.length; start += cfg.batchSize) {
    const batchIdx = indices.slice(start, start + cfg.batchSize);
    const x = assembleBatch(ds, batchIdx, cfg.inputSize);
    const y = labelTensor(cfg.task, Float32Array.from(batchIdx.map((i) => labels[i])));
    try {
      if (fit) {
        const out = await model.trainOnBatch(x, y);
        lossSum += (Array.isArray(out) ? out[0] : out) * batchIdx.length;
      } else {
        const out = model.evaluate(x, y, { batchSize: batchIdx.length }) as tf.Scalar | tf.Scalar[];
        const scalar = Array.isArray(out) ? out[0] : out;
        lossSum += (await scalar.data())[0] * batchIdx.length;
        (Array.isArray(out) ? out : [out]).forEach((t) => t.dispose());
      }
      seen += batchIdx.length;
    } finally {
      x.dispose();
      y.dispose();
    }
  }
  return lossSum / seen;
}

export async function train(cfg: TrainConfig): Promise<TrainResult> {
  console.log(`tf backend: ${await initBackend(cfg.tfBackend)}`);
  const ds = loadDataset(cfg.data, cfg.channelLayout);
  const labels = labelsFor(ds, cfg.task);
  const model = buildModel(cfg);
  compileModel(model, cfg);
  fs.mkdirSync(cfg.outDir, { recursive: true });

  const checkpointDir = path.join(cfg.outDir, "checkpoint");
  const log: EpochLog[] = [];
  let bestValLoss = Infinity;
  let sinceImprovement = 0;
  let stoppedEarly = false;

  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    const t0 = Date.now();
    const { train: trainIdx, validation: valIdx } = epochSplit(ds.records.length, cfg.seed, epoch);
    const order = shuffled(trainIdx.length, seededRng(cfg.seed * 31 + epoch)).map((i) => trainIdx[i]);
    const trainLoss = await runBatches(model, ds, labels, order, cfg, true);
    const valLoss = await runBatches(model, ds, labels, valIdx, cfg, false);
    if (!Number.isFinite(trainLoss) || !Number.isFinite(valLoss)) {
      throw new Error(`training diverged at epoch ${epoch} (non-finite loss)`);
    }
    const seconds = (Date.now() - t0) / 1000;
    log.push({ epoch, trainLoss, valLoss, seconds });
    console.log(
      `epoch ${epoch}: train_loss=${trainLoss.toFixed(4)} val_loss=${valLoss.toFixed(4)} (${seconds.toFixed(1)}s)`,
    );
    if (valLoss < bestValLoss) {
      bestValLoss = valLoss;
      sinceImprovement = 0;
      await saveCheckpoint(model, checkpointDir, {
        task: cfg.task,
        channelLayout: cfg.channelLayout,
        inputSize: cfg.inputSize,
        backbone: cfg.backbone,
      });
    } else {
      sinceImprovement += 1;
      if (sinceImprovement >= cfg.patience) {
        stoppedEarly = true;
        console.log(`early stop: no improvement for ${cfg.patience} consecutive epochs`);
        break;
      }
    }
  }
  fs.writeFileSync(path.join(cfg.outDir, "training_log.json"), JSON.stringify(log, null, 2));
  return { checkpointDir, log, bestValLoss, stoppedEarly };
}
