// Reader for the NPY shards the generator emits (v1.0/v2.0 headers,
// little-endian float32, C order).

import * as fs from "fs";

export interface NpyArray {
  shape: number[];
  data: Float32Array;
}

const MAGIC = "\x93NUMPY";

export function parseNpy(buf: Buffer): NpyArray {
  if (buf.length < 10 || buf.toString("latin1", 0, 6) !== MAGIC) {
    throw new Error("corrupt NPY header: bad magic");
  }
  const major = buf.readUInt8(6);
  let headerLen: number;
  let offset: number;
  if (major === 1) {
    headerLen = buf.readUInt16LE(8);
    offset = 10;
  } else if (major === 2) {
    headerLen = buf.readUInt32LE(8);
    offset = 12;
  } else {
    throw new Error(`unsupported NPY version ${major}`);
  }
  const header = buf.toString("latin1", offset, offset + headerLen);
  const descr = /'descr':\s*'([^']+)'/.exec(header);
  const fortran = /'fortran_order':\s*(True|False)/.exec(header);
  const shapeMatch = /'shape':\s*\(([^)]*)\)/.exec(header);
  if (!descr || !fortran || !shapeMatch) {
    throw new Error("corrupt NPY header: missing fields");
  }
  if (descr[1] !== "<f4") {
    throw new Error(`unsupported dtype ${descr[1]} (expected <f4)`);
  }
  if (fortran[1] !== "False") {
    throw new Error("fortran-order arrays are not supported");
  }
  const shape = shapeMatch[1]
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map((s) => parseInt(s, 10));
  const count = shape.reduce((a, b) => a * b, 1);
  const start = offset + headerLen;
  if (buf.length < start + 4 * count) {
    throw new Error("truncated NPY payload");
  }
  // copy so the view is aligned and detached from the file buffer
  const data = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = buf.readFloatLE(start + 4 * i);
  }
  return { shape, data };
}

export function readNpy(path: string): NpyArray {
  return parseNpy(fs.readFileSync(path));
}
