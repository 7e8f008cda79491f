// Parser for the generator's manifest.csv.

import * as fs from "fs";

export const MODEL_NAMES = ["ATTM", "CTRW", "FBM", "LW", "SBM"] as const;
export const N_CLASSES = MODEL_NAMES.length;

const HEADER = "id,model,model_code,alpha,raw_length,snr,split,seed_hi,seed_lo";

export interface ManifestRecord {
  id: number;
  model: string;
  modelCode: number;
  alpha: number;
  rawLength: number;
  snr: number;
  split: string;
  seedHi: number;
  seedLo: number;
}

export function parseManifest(text: string): ManifestRecord[] {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0 || lines[0].trim() !== HEADER) {
    throw new Error(`manifest header mismatch: expected "${HEADER}"`);
  }
  const records: ManifestRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 9) {
      throw new Error(`manifest row ${i} has ${parts.length} fields, expected 9`);
    }
    const rec: ManifestRecord = {
      id: parseInt(parts[0], 10),
      model: parts[1],
      modelCode: parseInt(parts[2], 10),
      alpha: parseFloat(parts[3]),
      rawLength: parseInt(parts[4], 10),
      snr: parts[5] === "inf" ? Infinity : parseFloat(parts[5]),
      split: parts[6],
      seedHi: parseInt(parts[7], 10),
      seedLo: parseInt(parts[8], 10),
    };
    if (!Number.isFinite(rec.id) || !Number.isFinite(rec.alpha)) {
      throw new Error(`manifest row ${i} is malformed: ${lines[i]}`);
    }
    if (rec.modelCode < 0 || rec.modelCode >= N_CLASSES) {
      throw new Error(`manifest row ${i}: model code ${rec.modelCode} out of range`);
    }
    records.push(rec);
  }
  return records;
}

export function readManifest(path: string): ManifestRecord[] {
  return parseManifest(fs.readFileSync(path, "utf-8"));
}
