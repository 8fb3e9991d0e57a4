import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";
import { PNG } from "pngjs";
import { parseTable, panelImage, scatterOverlay } from "../src/scatter";
import { grayAt } from "./helpers";

const LINE = 0;
const POINT = 128;
const WHITE = 255;

function csv(rows: (string | number)[][]): string {
  return rows.map((r) => r.join(",")).join("\n") + "\n";
}

describe("CSV tables", () => {
  it("parses columns as numbers", () => {
    const t = parseTable(csv([["xi", "rho"], [0, 1], [0.5, 2], [1, 4]]));
    expect(t.columns).toEqual(["xi", "rho"]);
    expect(t.rows).toBe(3);
    expect(Array.from(t.data.get("rho")!)).toEqual([1, 2, 4]);
  });

  it("accepts a header-only table as empty", () => {
    const t = parseTable(csv([["xi", "rho"]]));
    expect(t.rows).toBe(0);
  });

  it("rejects non-numeric cells", () => {
    expect(() => parseTable(csv([["xi", "rho"], [0, "abc"]]))).toThrow(/non-numeric/);
  });
});

describe("scatter overlay panels", () => {
  let dir: string;
  beforeEach(() => {
    dir = fs.mkdtempSync(path.join(os.tmpdir(), "viz-"));
  });
  afterEach(() => {
    fs.rmSync(dir, { recursive: true, force: true });
  });

  it("puts identical-table points on the reference line", () => {
    // a constant variable draws one horizontal line; dots from the identical
    // scatter table must land on that same row (within the 3x3 dot radius)
    const table = parseTable(csv([["xi", "rho"], [0, 2], [0.25, 2], [0.5, 2], [1, 2]]));
    const png = panelImage(table, table, "xi", "rho");
    const lineRows = new Set<number>();
    for (let y = 0; y < png.height; y += 1) {
      for (let x = 0; x < png.width; x += 1) {
        if (grayAt(png.data, png.width, x, y) === LINE) {
          lineRows.add(y);
        }
      }
    }
    expect(lineRows.size).toBe(1);
    const row = [...lineRows][0];
    for (let y = 0; y < png.height; y += 1) {
      for (let x = 0; x < png.width; x += 1) {
        if (grayAt(png.data, png.width, x, y) === POINT) {
          expect(Math.abs(y - row)).toBeLessThanOrEqual(1);
        }
      }
    }
  });

  it("writes one panel per reference variable", () => {
    const reference = parseTable(
      csv([["xi", "rho", "p", "B_eta"], [0, 1, 1, 0], [1, 2, 3, 1]]),
    );
    const result = scatterOverlay(reference, reference, dir);
    expect(result.warnings).toEqual([]);
    expect(result.files.map((f) => path.basename(f))).toEqual([
      "scatter_rho.png",
      "scatter_p.png",
      "scatter_B_eta.png",
    ]);
    for (const f of result.files) {
      const png = PNG.sync.read(fs.readFileSync(f));
      expect(png.width).toBeGreaterThan(0);
      expect(png.height).toBeGreaterThan(0);
    }
  });

  it("renders reference-only panels with a warning for an empty scatter", () => {
    const reference = parseTable(csv([["xi", "rho"], [0, 1], [0.5, 1.5], [1, 2]]));
    const empty = parseTable(csv([["xi", "rho"]]));
    const result = scatterOverlay(empty, reference, dir);
    expect(result.warnings).toHaveLength(1);
    expect(result.warnings[0]).toMatch(/no rows/);
    const png = PNG.sync.read(fs.readFileSync(result.files[0]));
    let hasLine = false;
    for (let y = 0; y < png.height; y += 1) {
      for (let x = 0; x < png.width; x += 1) {
        const g = grayAt(png.data, png.width, x, y);
        expect(g === LINE || g === WHITE).toBe(true);
        hasLine ||= g === LINE;
      }
    }
    expect(hasLine).toBe(true);
  });

  it("rejects a scatter table missing reference columns", () => {
    const reference = parseTable(csv([["xi", "rho", "p"], [0, 1, 1]]));
    const scatter = parseTable(csv([["xi", "rho"], [0, 1]]));
    expect(() => scatterOverlay(scatter, reference, dir)).toThrow(/missing columns: p/);
  });
});
