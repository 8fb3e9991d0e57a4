/**
 * Schlieren rendering: a grayscale image of exp(-k * |grad v| / max |grad v|)
 * on an axis-aligned slice of a snapshot variable, with centered differences
 * for the in-plane gradient (one-sided at the slice edges).
 */
import * as fs from "fs";
import { PNG } from "pngjs";
import { Snapshot, cellIndex } from "./snapshot";

export class VizError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "VizError";
  }
}

export type SliceAxis = "x" | "y" | "z";

export interface SchlierenSpec {
  variable: string;
  axis: SliceAxis;
  index: number;
  /** Contrast exponent; larger values darken weaker gradients less. */
  k?: number;
}

export const DEFAULT_K = 15;

interface Slice {
  /** width, height, and in-plane spacings of the extracted plane */
  nu: number;
  nv: number;
  du: number;
  dv: number;
  values: Float64Array; // nv rows of nu, u fastest
}

function extractSlice(snap: Snapshot, spec: SchlierenSpec): Slice {
  const block = snap.data.get(spec.variable);
  if (block === undefined) {
    throw new VizError(
      `unknown variable ${JSON.stringify(spec.variable)}; snapshot has ${snap.variables.join(", ")}`,
    );
  }
  const axisSize = { x: snap.nx, y: snap.ny, z: snap.nz }[spec.axis];
  if (!Number.isInteger(spec.index) || spec.index < 0 || spec.index >= axisSize) {
    throw new VizError(
      `slice index ${spec.index} outside axis ${spec.axis} of size ${axisSize}`,
    );
  }
  let nu: number;
  let nv: number;
  let du: number;
  let dv: number;
  let at: (u: number, v: number) => number;
  if (spec.axis === "z") {
    [nu, nv, du, dv] = [snap.nx, snap.ny, snap.dx, snap.dy];
    at = (u, v) => block[cellIndex(snap, u, v, spec.index)];
  } else if (spec.axis === "y") {
    [nu, nv, du, dv] = [snap.nx, snap.nz, snap.dx, snap.dz];
    at = (u, v) => block[cellIndex(snap, u, spec.index, v)];
  } else {
    [nu, nv, du, dv] = [snap.ny, snap.nz, snap.dy, snap.dz];
    at = (u, v) => block[cellIndex(snap, spec.index, u, v)];
  }
  const values = new Float64Array(nu * nv);
  for (let v = 0; v < nv; v += 1) {
    for (let u = 0; u < nu; u += 1) {
      values[v * nu + u] = at(u, v);
    }
  }
  return { nu, nv, du, dv, values };
}

function gradientMagnitude(s: Slice): Float64Array {
  const g = new Float64Array(s.nu * s.nv);
  const f = s.values;
  for (let v = 0; v < s.nv; v += 1) {
    for (let u = 0; u < s.nu; u += 1) {
      const ul = Math.max(u - 1, 0);
      const ur = Math.min(u + 1, s.nu - 1);
      const vl = Math.max(v - 1, 0);
      const vr = Math.min(v + 1, s.nv - 1);
      const gu = ur === ul ? 0 : (f[v * s.nu + ur] - f[v * s.nu + ul]) / ((ur - ul) * s.du);
      const gv = vr === vl ? 0 : (f[vr * s.nu + u] - f[vl * s.nu + u]) / ((vr - vl) * s.dv);
      g[v * s.nu + u] = Math.hypot(gu, gv);
    }
  }
  return g;
}

/** Render the schlieren image as a PNG object (8-bit grayscale in RGB). */
export function schlierenImage(snap: Snapshot, spec: SchlierenSpec): PNG {
  const k = spec.k ?? DEFAULT_K;
  if (!(Number.isFinite(k) && k >= 0)) {
    throw new VizError(`contrast exponent must be a non-negative number, got ${k}`);
  }
  const slice = extractSlice(snap, spec);
  const grad = gradientMagnitude(slice);
  let gmax = 0;
  for (const g of grad) {
    gmax = Math.max(gmax, g);
  }
  const png = new PNG({ width: slice.nu, height: slice.nv, colorType: 0 });
  for (let v = 0; v < slice.nv; v += 1) {
    for (let u = 0; u < slice.nu; u += 1) {
      // image row 0 at the top; put the low-v edge at the bottom
      const shade = gmax === 0 ? 1 : Math.exp((-k * grad[v * slice.nu + u]) / gmax);
      const byte = Math.round(255 * shade);
      const p = 4 * ((slice.nv - 1 - v) * slice.nu + u);
      png.data[p] = byte;
      png.data[p + 1] = byte;
      png.data[p + 2] = byte;
      png.data[p + 3] = 255;
    }
  }
  return png;
}

export function writeSchlieren(snap: Snapshot, spec: SchlierenSpec, outPath: string): void {
  fs.writeFileSync(outPath, PNG.sync.write(schlierenImage(snap, spec)));
}
