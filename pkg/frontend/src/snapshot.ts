/**
 * Reader for solver snapshot files (`.snap`).
 *
 * A snapshot is a short ASCII header terminated by a line reading `end`,
 * followed by one raw little-endian IEEE-754 float64 block per variable.
 * Each block holds nx*ny*nz values with the x index varying fastest.
 */
import * as fs from "fs";

export class SnapshotError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SnapshotError";
  }
}

export interface Snapshot {
  nx: number;
  ny: number;
  nz: number;
  dx: number;
  dy: number;
  dz: number;
  origin: [number, number, number];
  time: number;
  variables: string[];
  /** One flat array per variable, length nx*ny*nz, x fastest. */
  data: Map<string, Float64Array>;
}

const MAGIC = "ctmhd-snapshot";
const VERSION = 1;

/** Flat index of cell (i, j, k) = (x, y, z) in a snapshot block. */
export function cellIndex(snap: Snapshot, i: number, j: number, k: number): number {
  return (k * snap.ny + j) * snap.nx + i;
}

function parseHeader(buf: Buffer): { head: Map<string, string[]>; offset: number } {
  const head = new Map<string, string[]>();
  let pos = 0;
  let first = true;
  for (;;) {
    const nl = buf.indexOf(0x0a, pos);
    if (nl < 0) {
      throw new SnapshotError("unterminated snapshot header");
    }
    const line = buf.toString("ascii", pos, nl).trim();
    pos = nl + 1;
    if (first) {
      if (line !== MAGIC) {
        throw new SnapshotError(`not a snapshot file (magic line ${JSON.stringify(line)})`);
      }
      first = false;
      continue;
    }
    if (line === "end") {
      return { head, offset: pos };
    }
    const toks = line.split(/\s+/);
    if (toks.length < 2) {
      throw new SnapshotError(`malformed header line ${JSON.stringify(line)}`);
    }
    if (toks[0] === "variables" || toks[0] === "origin") {
      head.set(toks[0], toks.slice(1));
    } else {
      // remaining lines alternate key/value tokens, e.g. "nx 64 ny 128 nz 1"
      for (let t = 0; t + 1 < toks.length; t += 2) {
        head.set(toks[t], [toks[t + 1]]);
      }
    }
  }
}

function need(head: Map<string, string[]>, key: string): string[] {
  const v = head.get(key);
  if (v === undefined) {
    throw new SnapshotError(`snapshot header is missing ${JSON.stringify(key)}`);
  }
  return v;
}

function needNumber(head: Map<string, string[]>, key: string): number {
  const v = Number(need(head, key)[0]);
  if (!Number.isFinite(v)) {
    throw new SnapshotError(`snapshot header field ${JSON.stringify(key)} is not a number`);
  }
  return v;
}

/** Parse a snapshot from raw bytes. */
export function parseSnapshot(buf: Buffer): Snapshot {
  const { head, offset } = parseHeader(buf);
  if (needNumber(head, "version") !== VERSION) {
    throw new SnapshotError(`unsupported snapshot version ${need(head, "version")[0]}`);
  }
  const byteorder = need(head, "byteorder")[0];
  if (byteorder !== "little") {
    throw new SnapshotError(`unsupported byte order ${JSON.stringify(byteorder)}`);
  }
  const nx = needNumber(head, "nx");
  const ny = needNumber(head, "ny");
  const nz = needNumber(head, "nz");
  if (![nx, ny, nz].every((n) => Number.isInteger(n) && n >= 1)) {
    throw new SnapshotError(`invalid mesh ${nx}x${ny}x${nz}`);
  }
  const originToks = need(head, "origin");
  if (originToks.length !== 3) {
    throw new SnapshotError("origin must have three components");
  }
  const variables = need(head, "variables");
  const ncell = nx * ny * nz;
  const expected = offset + variables.length * ncell * 8;
  if (buf.length < expected) {
    throw new SnapshotError(
      `truncated snapshot: expected ${expected} bytes, found ${buf.length}`,
    );
  }
  const data = new Map<string, Float64Array>();
  variables.forEach((name, v) => {
    const start = offset + v * ncell * 8;
    const block = new Float64Array(ncell);
    for (let c = 0; c < ncell; c += 1) {
      block[c] = buf.readDoubleLE(start + c * 8);
    }
    data.set(name, block);
  });
  return {
    nx,
    ny,
    nz,
    dx: needNumber(head, "dx"),
    dy: needNumber(head, "dy"),
    dz: needNumber(head, "dz"),
    origin: [Number(originToks[0]), Number(originToks[1]), Number(originToks[2])],
    time: needNumber(head, "time"),
    variables: [...variables],
    data,
  };
}

export function readSnapshot(path: string): Snapshot {
  return parseSnapshot(fs.readFileSync(path));
}
