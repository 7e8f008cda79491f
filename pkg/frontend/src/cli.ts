// gaftraj-train CLI: `train --config cfg.json` and
// `predict --checkpoint DIR --task cls|reg --manifest ... --out pred.csv`.

import { loadConfig, Task } from "./config";
import { predict } from "./predict";
import { train } from "./train";

function argValue(args: string[], flag: string): string | undefined {
  const i = args.indexOf(flag);
  return i >= 0 && i + 1 < args.length ? args[i + 1] : undefined;
}

function required(args: string[], flag: string): string {
  const v = argValue(args, flag);
  if (v === undefined) {
    throw new Error(`missing required flag ${flag}`);
  }
  return v;
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  if (command === "train") {
    const cfg = loadConfig(required(rest, "--config"));
    const result = await train(cfg);
    console.log(
      `done: best val_loss=${result.bestValLoss.toFixed(4)} after ${result.log.length} epochs` +
        (result.stoppedEarly ? " (early stop)" : ""),
    );
    console.log(`checkpoint: ${result.checkpointDir}`);
    return 0;
  }
  if (command === "predict") {
    const taskFlag = required(rest, "--task");
    const task: Task = taskFlag === "cls" ? "classification" : "regression";
    if (!["cls", "reg"].includes(taskFlag)) {
      throw new Error(`--task must be cls or reg, got ${taskFlag}`);
    }
    const backend = (argValue(rest, "--backend") ?? "wasm") as "wasm" | "cpu";
    const n = await predict({
      checkpointDir: required(rest, "--checkpoint"),
      task,
      outPath: required(rest, "--out"),
      tfBackend: backend,
      data: {
        manifest: required(rest, "--manifest"),
        gasf: argValue(rest, "--gasf"),
        gadf: argValue(rest, "--gadf"),
        split: argValue(rest, "--split"),
      },
    });
    console.log(`wrote ${n} predictions to ${required(rest, "--out")}`);
    return 0;
  }
  console.error("usage: cli.js train --config cfg.json | cli.js predict --checkpoint DIR --task cls|reg --manifest m.csv [--gasf g.npy] [--gadf d.npy] [--split test] --out pred.csv");
  return 2;
}

main()
  .then((code) => process.exit(code))
  .catch((err) => {
    console.error(`error: ${err.message}`);
    process.exit(1);
  });
