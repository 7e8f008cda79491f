// tfjs compute backend selection: WASM (SIMD, ~10x faster on these conv
// loads) with a plain-JS CPU fallback.

import * as tf from "@tensorflow/tfjs";

export type TfBackend = "wasm" | "cpu";

let active: string | null = null;

export async function initBackend(name: TfBackend = "wasm"): Promise<string> {
  if (active) {
    return active;
  }
  if (name === "wasm") {
    try {
      require("@tensorflow/tfjs-backend-wasm");
      if (await tf.setBackend("wasm")) {
        await tf.ready();
        active = tf.getBackend();
        return active;
      }
    } catch {
      // fall through to cpu
    }
    console.warn("wasm backend unavailable, falling back to cpu");
  }
  await tf.setBackend("cpu");
  await tf.ready();
  active = tf.getBackend();
  return active;
}
