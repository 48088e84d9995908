/**
 * File schemas shared with the slicedot CLI.
 *
 * Measure files: { manifold: "sphere" | "so3", dim, points, weights? } with
 * rotations stored as row-major 3x3 matrices (9 numbers per point).
 * Density files: { thetas, phis, values } with values theta-major row-major.
 * Run reports embed a config echo plus optional loss_trace / measure /
 * density payloads. Timing tables are CSV with the header
 * kind,n,d,slices,iters,seconds.
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export type Style = "scatter3d" | "heatmap" | "so3ball" | "curves" | "timing";

export interface MeasureFile {
  manifold: "sphere" | "so3";
  dim: number;
  points: number[][];
  weights: number[];
}

export interface DensityFile {
  thetas: number[];
  phis: number[];
  values: number[];
}

export interface RunReport {
  config: Record<string, unknown>;
  loss_trace?: number[];
  measure?: MeasureFile;
  density?: DensityFile;
  [key: string]: unknown;
}

export interface TimingRow {
  kind: string;
  n: number;
  d: number;
  slices: number;
  iters: number;
  seconds: number;
}

export interface PlotJob {
  style: Style;
  inputs: string[];
  output: string;
}

const STYLES: Style[] = ["scatter3d", "heatmap", "so3ball", "curves", "timing"];

function isNumberArray(x: unknown): x is number[] {
  return Array.isArray(x) && x.every((v) => typeof v === "number" && Number.isFinite(v));
}

export function parseMeasure(raw: unknown): MeasureFile {
  if (typeof raw !== "object" || raw === null) {
    throw new SchemaError("measure: not an object");
  }
  const obj = raw as Record<string, unknown>;
  const manifold = obj["manifold"];
  if (manifold !== "sphere" && manifold !== "so3") {
    throw new SchemaError(`measure: bad manifold ${String(manifold)}`);
  }
  const points = obj["points"];
  if (!Array.isArray(points) || points.length === 0 || !points.every(isNumberArray)) {
    throw new SchemaError("measure: points must be a nonempty array of number rows");
  }
  const rows = points as number[][];
  const width = rows[0].length;
  if (!rows.every((r) => r.length === width)) {
    throw new SchemaError("measure: ragged point rows");
  }
  if (manifold === "so3" && width !== 9) {
    throw new SchemaError("measure: so3 points must be row-major 3x3 matrices");
  }
  let weights: number[];
  if (obj["weights"] === undefined) {
    weights = rows.map(() => 1 / rows.length);
  } else if (isNumberArray(obj["weights"]) && (obj["weights"] as number[]).length === rows.length) {
    weights = obj["weights"] as number[];
  } else {
    throw new SchemaError("measure: weights do not match the points");
  }
  const dim = typeof obj["dim"] === "number" ? (obj["dim"] as number) : width;
  return { manifold, dim, points: rows, weights };
}

export function parseDensity(raw: unknown): DensityFile {
  if (typeof raw !== "object" || raw === null) {
    throw new SchemaError("density: not an object");
  }
  const obj = raw as Record<string, unknown>;
  const thetas = obj["thetas"];
  const phis = obj["phis"];
  const values = obj["values"];
  if (!isNumberArray(thetas) || !isNumberArray(phis) || !isNumberArray(values)) {
    throw new SchemaError("density: thetas/phis/values must be number arrays");
  }
  if (values.length !== thetas.length * phis.length) {
    throw new SchemaError("density: values do not match the grid shape");
  }
  return { thetas, phis, values };
}

export function parseRunReport(raw: unknown): RunReport {
  if (typeof raw !== "object" || raw === null) {
    throw new SchemaError("report: not an object");
  }
  const obj = raw as Record<string, unknown>;
  if (typeof obj["config"] !== "object" || obj["config"] === null) {
    throw new SchemaError("report: missing config echo");
  }
  const report: RunReport = { config: obj["config"] as Record<string, unknown> };
  if (obj["loss_trace"] !== undefined) {
    if (!isNumberArray(obj["loss_trace"])) {
      throw new SchemaError("report: loss_trace must be a number array");
    }
    report.loss_trace = obj["loss_trace"] as number[];
  }
  if (obj["measure"] !== undefined) {
    report.measure = parseMeasure(obj["measure"]);
  }
  if (obj["density"] !== undefined) {
    report.density = parseDensity(obj["density"]);
  }
  return report;
}

export function parseTimingCsv(text: string): TimingRow[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length < 2 || lines[0].trim() !== "kind,n,d,slices,iters,seconds") {
    throw new SchemaError("timing: expected the bench speed CSV header");
  }
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== 6) {
      throw new SchemaError(`timing: bad row ${i + 2}`);
    }
    const [kind, n, d, slices, iters, seconds] = parts;
    const row: TimingRow = {
      kind,
      n: Number(n),
      d: Number(d),
      slices: Number(slices),
      iters: Number(iters),
      seconds: Number(seconds),
    };
    if (![row.n, row.d, row.slices, row.iters, row.seconds].every(Number.isFinite)) {
      throw new SchemaError(`timing: non-numeric row ${i + 2}`);
    }
    return row;
  });
}

export function parsePlotJob(raw: unknown): PlotJob {
  if (typeof raw !== "object" || raw === null) {
    throw new SchemaError("job: not an object");
  }
  const obj = raw as Record<string, unknown>;
  const style = obj["style"];
  if (typeof style !== "string" || !STYLES.includes(style as Style)) {
    throw new SchemaError(`job: style must be one of ${STYLES.join(", ")}`);
  }
  const inputs = obj["inputs"];
  if (!Array.isArray(inputs) || inputs.length === 0 || !inputs.every((p) => typeof p === "string")) {
    throw new SchemaError("job: inputs must be a nonempty list of paths");
  }
  if (typeof obj["output"] !== "string" || obj["output"].length === 0) {
    throw new SchemaError("job: output path required");
  }
  return { style: style as Style, inputs: inputs as string[], output: obj["output"] as string };
}

function readJson(path: string): unknown {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${String(err)}`);
  }
  try {
    return JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${path}: invalid JSON`);
  }
}

/** Load a measure from a measure file or from a run report's payload. */
export function loadMeasure(path: string): MeasureFile {
  const raw = readJson(path) as Record<string, unknown>;
  if (raw && typeof raw === "object" && "config" in raw) {
    const report = parseRunReport(raw);
    if (!report.measure) {
      throw new SchemaError(`${path}: report carries no measure payload`);
    }
    return report.measure;
  }
  return parseMeasure(raw);
}

/** Load a density from a density file or from a run report's payload. */
export function loadDensity(path: string): DensityFile {
  const raw = readJson(path) as Record<string, unknown>;
  if (raw && typeof raw === "object" && "config" in raw) {
    const report = parseRunReport(raw);
    if (!report.density) {
      throw new SchemaError(`${path}: report carries no density payload`);
    }
    return report.density;
  }
  return parseDensity(raw);
}

export function loadRunReport(path: string): RunReport {
  return parseRunReport(readJson(path));
}

export function loadTiming(path: string): TimingRow[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${String(err)}`);
  }
  return parseTimingCsv(text);
}

export function loadPlotJob(path: string): PlotJob {
  return parsePlotJob(readJson(path));
}
