import { describe, expect, it } from "vitest";
import { parseSnapshot } from "../src/snapshot";
import { schlierenImage, VizError } from "../src/schlieren";
import { buildSnapshotBytes, grayAt } from "./helpers";

function makeSnap(fn: (i: number, j: number, k: number) => number, nx = 8, ny = 6, nz = 4) {
  return parseSnapshot(buildSnapshotBytes(nx, ny, nz, [{ name: "rho", fn }]));
}

describe("schlieren rendering", () => {
  it("renders a constant field as uniform white", () => {
    const png = schlierenImage(makeSnap(() => 3.5), { variable: "rho", axis: "z", index: 1 });
    expect(png.width).toBe(8);
    expect(png.height).toBe(6);
    for (let y = 0; y < png.height; y += 1) {
      for (let x = 0; x < png.width; x += 1) {
        expect(grayAt(png.data, png.width, x, y)).toBe(255);
      }
    }
  });

  it("renders a linear ramp as a uniform gray", () => {
    const k = 2;
    const png = schlierenImage(makeSnap((i) => 0.3 * i), {
      variable: "rho",
      axis: "z",
      index: 0,
      k,
    });
    const expected = Math.round(255 * Math.exp(-k));
    expect(expected).toBeGreaterThan(0);
    expect(expected).toBeLessThan(255);
    for (let y = 0; y < png.height; y += 1) {
      for (let x = 0; x < png.width; x += 1) {
        expect(grayAt(png.data, png.width, x, y)).toBe(expected);
      }
    }
  });

  it("matches the slice dimensions for each axis", () => {
    const snap = makeSnap((i, j, k) => i + j * k, 8, 6, 4);
    const z = schlierenImage(snap, { variable: "rho", axis: "z", index: 0 });
    expect([z.width, z.height]).toEqual([8, 6]);
    const y = schlierenImage(snap, { variable: "rho", axis: "y", index: 0 });
    expect([y.width, y.height]).toEqual([8, 4]);
    const x = schlierenImage(snap, { variable: "rho", axis: "x", index: 0 });
    expect([x.width, x.height]).toEqual([6, 4]);
  });

  it("darkens steep gradients more than shallow ones", () => {
    // one sharp interior jump on an otherwise flat field
    const png = schlierenImage(makeSnap((i) => (i < 4 ? 0 : 1), 8, 6, 1), {
      variable: "rho",
      axis: "z",
      index: 0,
    });
    const atJump = grayAt(png.data, png.width, 4, 2);
    const farField = grayAt(png.data, png.width, 0, 2);
    expect(atJump).toBeLessThan(farField);
    expect(farField).toBe(255);
  });

  it("rejects an unknown variable", () => {
    expect(() =>
      schlierenImage(makeSnap(() => 1), { variable: "pressure", axis: "z", index: 0 }),
    ).toThrow(VizError);
  });

  it("rejects a slice index outside the mesh", () => {
    expect(() =>
      schlierenImage(makeSnap(() => 1), { variable: "rho", axis: "z", index: 4 }),
    ).toThrow(/slice index/);
    expect(() =>
      schlierenImage(makeSnap(() => 1), { variable: "rho", axis: "z", index: -1 }),
    ).toThrow(/slice index/);
  });
});
