/**
 * Scatter overlays: for each variable shared by a 3D scatter table and a fine
 * 1D reference table, draw the scatter points on top of the reference line and
 * write one PNG panel per variable.
 */
import * as fs from "fs";
import * as path from "path";
import Papa from "papaparse";
import { PNG } from "pngjs";
import { VizError } from "./schlieren";

export interface Table {
  columns: string[];
  /** Column name -> values, all columns the same length. */
  data: Map<string, Float64Array>;
  rows: number;
}

export function parseTable(text: string): Table {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new VizError(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const grid = parsed.data;
  if (grid.length === 0 || grid[0].length === 0) {
    throw new VizError("CSV file has no header row");
  }
  const columns = grid[0].map((c) => c.trim());
  const rows = grid.length - 1;
  const data = new Map<string, Float64Array>();
  columns.forEach((name, c) => {
    const col = new Float64Array(rows);
    for (let r = 0; r < rows; r += 1) {
      const cell = grid[r + 1][c];
      const v = Number(cell);
      if (cell === undefined || !Number.isFinite(v)) {
        throw new VizError(`non-numeric value ${JSON.stringify(cell)} in column ${name}, row ${r + 2}`);
      }
      col[r] = v;
    }
    data.set(name, col);
  });
  return { columns, data, rows };
}

export function readTable(csvPath: string): Table {
  return parseTable(fs.readFileSync(csvPath, "utf8"));
}

// panel geometry
const WIDTH = 480;
const HEIGHT = 360;
const MARGIN = 24;

const WHITE = 255;
const LINE = 0; // reference line: black
const POINT = 128; // scatter points: gray

function setPixel(png: PNG, x: number, y: number, shade: number): void {
  if (x < 0 || y < 0 || x >= png.width || y >= png.height) {
    return;
  }
  const p = 4 * (y * png.width + x);
  png.data[p] = shade;
  png.data[p + 1] = shade;
  png.data[p + 2] = shade;
  png.data[p + 3] = 255;
}

interface Extent {
  lo: number;
  hi: number;
}

function extent(arrays: Float64Array[]): Extent {
  let lo = Infinity;
  let hi = -Infinity;
  for (const a of arrays) {
    for (const v of a) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!(lo <= hi)) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    // degenerate range: pad so the flat line sits mid-panel
    lo -= 0.5;
    hi += 0.5;
  }
  return { lo, hi };
}

function toX(v: number, e: Extent): number {
  return Math.round(MARGIN + ((v - e.lo) / (e.hi - e.lo)) * (WIDTH - 1 - 2 * MARGIN));
}

function toY(v: number, e: Extent): number {
  return Math.round(HEIGHT - 1 - MARGIN - ((v - e.lo) / (e.hi - e.lo)) * (HEIGHT - 1 - 2 * MARGIN));
}

function drawSegment(png: PNG, x0: number, y0: number, x1: number, y1: number, shade: number): void {
  const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1);
  for (let s = 0; s <= steps; s += 1) {
    const t = s / steps;
    setPixel(png, Math.round(x0 + t * (x1 - x0)), Math.round(y0 + t * (y1 - y0)), shade);
  }
}

function drawDot(png: PNG, x: number, y: number, shade: number): void {
  for (let dy = -1; dy <= 1; dy += 1) {
    for (let dx = -1; dx <= 1; dx += 1) {
      setPixel(png, x + dx, y + dy, shade);
    }
  }
}

/** Render one variable panel: reference polyline plus scatter dots. */
export function panelImage(
  scatter: Table,
  reference: Table,
  coord: string,
  variable: string,
): PNG {
  const refX = reference.data.get(coord);
  const refY = reference.data.get(variable);
  if (refX === undefined || refY === undefined) {
    throw new VizError(`reference table is missing column ${refX === undefined ? coord : variable}`);
  }
  const scaX = scatter.data.get(coord);
  const scaY = scatter.data.get(variable);
  if (scaX === undefined || scaY === undefined) {
    throw new VizError(`scatter table is missing column ${scaX === undefined ? coord : variable}`);
  }
  const ex = extent([refX, scaX]);
  const ey = extent([refY, scaY]);
  const png = new PNG({ width: WIDTH, height: HEIGHT, colorType: 0 });
  png.data.fill(WHITE);
  for (let r = 0; r + 1 < reference.rows; r += 1) {
    drawSegment(png, toX(refX[r], ex), toY(refY[r], ey), toX(refX[r + 1], ex), toY(refY[r + 1], ey), LINE);
  }
  for (let r = 0; r < scatter.rows; r += 1) {
    drawDot(png, toX(scaX[r], ex), toY(scaY[r], ey), POINT);
  }
  return png;
}

export interface OverlayResult {
  files: string[];
  warnings: string[];
}

/**
 * Write one panel PNG per shared variable (every reference column after the
 * coordinate). The scatter table must provide all of them; an empty scatter
 * table produces reference-only panels and a warning.
 */
export function scatterOverlay(scatter: Table, reference: Table, outDir: string): OverlayResult {
  if (reference.columns.length < 2) {
    throw new VizError("reference table needs a coordinate column and at least one variable");
  }
  const coord = reference.columns[0];
  const variables = reference.columns.slice(1);
  const missing = [coord, ...variables].filter((c) => !scatter.data.has(c));
  if (missing.length > 0) {
    throw new VizError(`scatter table is missing columns: ${missing.join(", ")}`);
  }
  const warnings: string[] = [];
  if (scatter.rows === 0) {
    warnings.push("scatter table has no rows; panels show the reference line only");
  }
  const files: string[] = [];
  for (const variable of variables) {
    const png = panelImage(scatter, reference, coord, variable);
    const file = path.join(outDir, `scatter_${variable}.png`);
    fs.writeFileSync(file, PNG.sync.write(png));
    files.push(file);
  }
  return { files, warnings };
}
