#!/usr/bin/env node
/**
 * plots render --job job.json
 *
 * Reads a plot job (style, input paths, output path), renders the figure and
 * writes the SVG. Exits nonzero on schema mismatches or unreadable inputs;
 * inputs are never modified.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { SchemaError, loadPlotJob } from "./schemas.js";
import { renderJob } from "./render.js";

export function main(argv: string[]): number {
  if (argv.length !== 3 || argv[0] !== "render" || argv[1] !== "--job") {
    console.error("usage: plots render --job <job.json>");
    return 2;
  }
  try {
    const job = loadPlotJob(argv[2]);
    const svg = renderJob(job);
    mkdirSync(dirname(job.output), { recursive: true });
    writeFileSync(job.output, svg);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    console.error(String(err));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
