#!/usr/bin/env node
/**
 * Standalone rendering scripts for solver artifacts.
 *
 *   viz schlieren <snapshot.snap> <out.png> --variable V --axis x|y|z --index I [--k K]
 *   viz scatter <scatter.csv> <reference.csv> <out-dir>
 */
import * as fs from "fs";
import { readSnapshot, SnapshotError } from "./snapshot";
import { writeSchlieren, SliceAxis, VizError, DEFAULT_K } from "./schlieren";
import { readTable, scatterOverlay } from "./scatter";

const USAGE = `usage:
  viz schlieren <snapshot.snap> <out.png> --variable V --axis x|y|z --index I [--k K]
  viz scatter <scatter.csv> <reference.csv> <out-dir>`;

function parseFlags(args: string[]): { positional: string[]; flags: Map<string, string> } {
  const positional: string[] = [];
  const flags = new Map<string, string>();
  for (let i = 0; i < args.length; i += 1) {
    if (args[i].startsWith("--")) {
      const value = args[i + 1];
      if (value === undefined) {
        throw new VizError(`flag ${args[i]} needs a value`);
      }
      flags.set(args[i].slice(2), value);
      i += 1;
    } else {
      positional.push(args[i]);
    }
  }
  return { positional, flags };
}

function requireFlag(flags: Map<string, string>, name: string): string {
  const v = flags.get(name);
  if (v === undefined) {
    throw new VizError(`missing required flag --${name}`);
  }
  return v;
}

function runSchlieren(args: string[]): void {
  const { positional, flags } = parseFlags(args);
  if (positional.length !== 2) {
    throw new VizError(USAGE);
  }
  const axis = requireFlag(flags, "axis");
  if (axis !== "x" && axis !== "y" && axis !== "z") {
    throw new VizError(`axis must be x, y, or z, got ${JSON.stringify(axis)}`);
  }
  const snap = readSnapshot(positional[0]);
  writeSchlieren(
    snap,
    {
      variable: requireFlag(flags, "variable"),
      axis: axis as SliceAxis,
      index: Number(requireFlag(flags, "index")),
      k: flags.has("k") ? Number(flags.get("k")) : DEFAULT_K,
    },
    positional[1],
  );
  process.stdout.write(`wrote ${positional[1]}\n`);
}

function runScatter(args: string[]): void {
  const { positional, flags } = parseFlags(args);
  if (positional.length !== 3 || flags.size > 0) {
    throw new VizError(USAGE);
  }
  const [scatterPath, referencePath, outDir] = positional;
  fs.mkdirSync(outDir, { recursive: true });
  const result = scatterOverlay(readTable(scatterPath), readTable(referencePath), outDir);
  for (const warning of result.warnings) {
    process.stderr.write(`warning: ${warning}\n`);
  }
  for (const file of result.files) {
    process.stdout.write(`wrote ${file}\n`);
  }
}

export function main(argv: string[]): number {
  try {
    const [command, ...rest] = argv;
    if (command === "schlieren") {
      runSchlieren(rest);
    } else if (command === "scatter") {
      runScatter(rest);
    } else {
      process.stderr.write(`${USAGE}\n`);
      return 1;
    }
    return 0;
  } catch (err) {
    if (err instanceof VizError || err instanceof SnapshotError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    if (err instanceof Error && (err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
