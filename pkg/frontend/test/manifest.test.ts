import * as path from "path";

import { describe, expect, it } from "vitest";

import { parseManifest, readManifest } from "../src/manifest";

const FIXTURES = path.join(__dirname, "..", "fixtures", "tiny");

describe("manifest", () => {
  it("reads the generator's manifest with typed fields", () => {
    const records = readManifest(path.join(FIXTURES, "manifest.csv"));
    expect(records.length).toBe(60);
    records.forEach((r, i) => {
      expect(r.id).toBe(i);
      expect(r.modelCode).toBeGreaterThanOrEqual(0);
      expect(r.modelCode).toBeLessThan(5);
      expect(r.alpha).toBeGreaterThan(0);
      expect(r.alpha).toBeLessThan(2);
      expect(r.rawLength).toBeGreaterThanOrEqual(10);
      expect(r.rawLength).toBeLessThanOrEqual(50);
      expect(["train", "validation", "test"]).toContain(r.split);
    });
  });

  it("parses inf snr as Infinity", () => {
    const text =
      "id,model,model_code,alpha,raw_length,snr,split,seed_hi,seed_lo\n" +
      "0,FBM,2,1.0,50,inf,train,1,0\n";
    const [rec] = parseManifest(text);
    expect(rec.snr).toBe(Infinity);
  });

  it("rejects header mismatches", () => {
    expect(() => parseManifest("id,who\n0,x\n")).toThrow(/header mismatch/);
  });

  it("rejects malformed rows", () => {
    const text =
      "id,model,model_code,alpha,raw_length,snr,split,seed_hi,seed_lo\n0,FBM,2,1.0\n";
    expect(() => parseManifest(text)).toThrow(/fields/);
  });
});
