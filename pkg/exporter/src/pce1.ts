/**
 * PCE1 binary embedding file writer/reader.
 *
 * Layout (little-endian, no padding):
 *   magic "PCE1" | u32 dim | u64 record count | u8 views bitmask
 *   per record: u64 id | i64 label (-1 = unlabeled) | each present view as
 *   dim consecutive float32 values (bit0 base, bit1 weak, bit2 strong).
 */

import * as fs from "node:fs";

export const MAGIC = "PCE1";
export const VIEW_BASE = 1;
export const VIEW_WEAK = 2;
export const VIEW_STRONG = 4;

export interface Pce1Record {
  id: number;
  label: number | null; // null = unlabeled
  base: Float32Array;
  weak?: Float32Array;
  strong?: Float32Array;
}

function viewsMask(record: Pce1Record): number {
  let mask = VIEW_BASE;
  if (record.weak) mask |= VIEW_WEAK;
  if (record.strong) mask |= VIEW_STRONG;
  return mask;
}

export function encodePce1(records: Pce1Record[], dim: number): Buffer {
  if (records.length === 0) throw new Error("refusing to write an empty dataset");
  const mask = viewsMask(records[0]);
  const viewCount = (mask & VIEW_BASE ? 1 : 0) + (mask & VIEW_WEAK ? 1 : 0) + (mask & VIEW_STRONG ? 1 : 0);
  const recordSize = 8 + 8 + viewCount * dim * 4;
  const buf = Buffer.alloc(4 + 4 + 8 + 1 + records.length * recordSize);

  let off = 0;
  buf.write(MAGIC, off, "ascii");
  off += 4;
  buf.writeUInt32LE(dim, off);
  off += 4;
  buf.writeBigUInt64LE(BigInt(records.length), off);
  off += 8;
  buf.writeUInt8(mask, off);
  off += 1;

  for (const record of records) {
    if (viewsMask(record) !== mask) throw new Error("records disagree on which views are present");
    if (record.base.length !== dim) throw new Error(`record ${record.id}: base dim ${record.base.length} != ${dim}`);
    buf.writeBigUInt64LE(BigInt(record.id), off);
    off += 8;
    buf.writeBigInt64LE(BigInt(record.label ?? -1), off);
    off += 8;
    for (const view of [record.base, record.weak, record.strong]) {
      if (!view) continue;
      if (view.length !== dim) throw new Error(`record ${record.id}: view dim ${view.length} != ${dim}`);
      for (let j = 0; j < dim; j++) {
        buf.writeFloatLE(view[j], off);
        off += 4;
      }
    }
  }
  return buf;
}

export function writePce1(path: string, records: Pce1Record[], dim: number): void {
  const tmp = `${path}.tmp`;
  fs.writeFileSync(tmp, encodePce1(records, dim));
  fs.renameSync(tmp, path);
}

export function readPce1(path: string): { dim: number; records: Pce1Record[] } {
  const buf = fs.readFileSync(path);
  if (buf.length < 17) throw new Error(`${path}: too short to hold a PCE1 header`);
  if (buf.toString("ascii", 0, 4) !== MAGIC) throw new Error(`${path}: bad magic`);
  const dim = buf.readUInt32LE(4);
  const count = Number(buf.readBigUInt64LE(8));
  const mask = buf.readUInt8(16);
  if (!(mask & VIEW_BASE)) throw new Error(`${path}: base view missing`);

  let off = 17;
  const records: Pce1Record[] = [];
  const readView = (): Float32Array => {
    const view = new Float32Array(dim);
    for (let j = 0; j < dim; j++) {
      view[j] = buf.readFloatLE(off);
      off += 4;
    }
    return view;
  };
  for (let i = 0; i < count; i++) {
    const id = Number(buf.readBigUInt64LE(off));
    off += 8;
    const label = Number(buf.readBigInt64LE(off));
    off += 8;
    const record: Pce1Record = { id, label: label < 0 ? null : label, base: readView() };
    if (mask & VIEW_WEAK) record.weak = readView();
    if (mask & VIEW_STRONG) record.strong = readView();
    records.push(record);
  }
  if (off !== buf.length) throw new Error(`${path}: ${buf.length - off} trailing bytes`);
  return { dim, records };
}
