/**
 * Figure rendering: each style consumes the frozen file schemas and emits a
 * deterministic standalone SVG string. No numerics beyond projection and
 * scaling happen here.
 */

import {
  DensityFile,
  MeasureFile,
  PlotJob,
  RunReport,
  SchemaError,
  TimingRow,
  loadDensity,
  loadMeasure,
  loadRunReport,
  loadTiming,
} from "./schemas.js";
import { SvgDoc, SERIES_COLORS, colormap } from "./svg.js";
import { Vec3, orthographic, so3BallPoint, sphericalToCartesian } from "./geometry.js";

const SIZE = 480;
const MARGIN = 48;

function projectToCanvas(p: Vec3, radius: number): { x: number; y: number; depth: number } {
  const pr = orthographic(p);
  const cx = SIZE / 2;
  const cy = SIZE / 2;
  return { x: cx + radius * pr.u, y: cy - radius * pr.v, depth: pr.depth };
}

function drawSphereOutline(doc: SvgDoc, radius: number): void {
  doc.circle(SIZE / 2, SIZE / 2, radius, "none", 1, "#888");
  // equator as a depth cue
  const pts: Array<[number, number]> = [];
  for (let i = 0; i <= 128; i++) {
    const phi = (2 * Math.PI * i) / 128;
    const p = projectToCanvas({ x: Math.cos(phi), y: Math.sin(phi), z: 0 }, radius);
    pts.push([p.x, p.y]);
  }
  doc.polyline(pts, "#cccccc", 0.8);
}

export function renderScatter3d(measures: MeasureFile[]): string {
  const doc = new SvgDoc(SIZE, SIZE);
  const radius = SIZE / 2 - MARGIN;
  drawSphereOutline(doc, radius);
  measures.forEach((m, mi) => {
    if (m.manifold !== "sphere" || m.points[0].length !== 3) {
      throw new SchemaError("scatter3d needs measures on the 2-sphere");
    }
    const color = SERIES_COLORS[mi % SERIES_COLORS.length];
    for (const row of m.points) {
      const p = projectToCanvas({ x: row[0], y: row[1], z: row[2] }, radius);
      doc.circle(p.x, p.y, 3, color, p.depth >= 0 ? 0.9 : 0.25);
    }
  });
  return doc.render();
}

export interface HeatmapCell {
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
}

export function heatmapCells(d: DensityFile): HeatmapCell[] {
  const nTheta = d.thetas.length;
  const nPhi = d.phis.length;
  const lo = Math.min(...d.values);
  const hi = Math.max(...d.values);
  const span = hi - lo > 0 ? hi - lo : 1;
  const w = (SIZE - 2 * MARGIN) / nPhi;
  const h = (SIZE - 2 * MARGIN) / nTheta;
  const cells: HeatmapCell[] = [];
  for (let i = 0; i < nTheta; i++) {
    for (let j = 0; j < nPhi; j++) {
      const v = (d.values[i * nPhi + j] - lo) / span;
      cells.push({
        x: MARGIN + j * w,
        y: MARGIN + i * h,
        w: w + 0.5,
        h: h + 0.5,
        fill: colormap(v),
      });
    }
  }
  return cells;
}

export function renderHeatmap(d: DensityFile): string {
  const doc = new SvgDoc(SIZE, SIZE);
  for (const c of heatmapCells(d)) {
    doc.rect(c.x, c.y, c.w, c.h, c.fill);
  }
  doc.text(MARGIN, MARGIN - 10, "azimuth vs polar angle, row-major density");
  return doc.render();
}

export function so3BallPoints(m: MeasureFile): Vec3[] {
  if (m.manifold !== "so3") {
    throw new SchemaError("so3ball needs a rotation-group measure");
  }
  return m.points.map((row) => so3BallPoint(row));
}

export function renderSo3Ball(measures: MeasureFile[]): string {
  const doc = new SvgDoc(SIZE, SIZE);
  const radius = SIZE / 2 - MARGIN;
  doc.circle(SIZE / 2, SIZE / 2, radius, "none", 1, "#888");
  measures.forEach((m, mi) => {
    const color = SERIES_COLORS[mi % SERIES_COLORS.length];
    for (const p of so3BallPoints(m)) {
      const q = projectToCanvas(p, radius); // ball of radius tan(pi/4) = 1
      doc.circle(q.x, q.y, 3, color, q.depth >= 0 ? 0.9 : 0.3);
    }
  });
  return doc.render();
}

function axis(doc: SvgDoc, x0: number, y0: number, x1: number, y1: number): void {
  doc.line(x0, y0, x1, y0, "#333", 1);
  doc.line(x0, y0, x0, y1, "#333", 1);
}

export function renderCurves(reports: RunReport[]): string {
  const doc = new SvgDoc(SIZE, SIZE);
  const x0 = MARGIN + 12;
  const y0 = SIZE - MARGIN;
  const x1 = SIZE - MARGIN;
  const y1 = MARGIN;
  axis(doc, x0, y0, x1, y1);
  const traces = reports.map((r) => {
    if (!r.loss_trace || r.loss_trace.length === 0) {
      throw new SchemaError("curves needs run reports with a loss trace");
    }
    return r.loss_trace;
  });
  const all = traces.flat();
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const span = hi - lo > 0 ? hi - lo : 1;
  const steps = Math.max(...traces.map((t) => t.length));
  traces.forEach((trace, ti) => {
    const pts: Array<[number, number]> = trace.map((v, i) => [
      x0 + ((x1 - x0) * i) / Math.max(1, steps - 1),
      y0 - ((y0 - y1) * (v - lo)) / span,
    ]);
    doc.polyline(pts, SERIES_COLORS[(ti + 2) % SERIES_COLORS.length]);
  });
  doc.text(x0, y1 - 8, `loss per iteration (min ${lo.toPrecision(3)}, max ${hi.toPrecision(3)})`);
  doc.text((x0 + x1) / 2, y0 + 24, "iteration", 11, "middle");
  return doc.render();
}

export function renderTiming(rowsets: TimingRow[][]): string {
  const doc = new SvgDoc(SIZE, SIZE);
  const rows = rowsets.flat();
  if (rows.length === 0) {
    throw new SchemaError("timing: empty table");
  }
  const x0 = MARGIN + 12;
  const y0 = SIZE - MARGIN;
  const x1 = SIZE - MARGIN;
  const y1 = MARGIN;
  axis(doc, x0, y0, x1, y1);
  const ns = rows.map((r) => Math.log10(r.n));
  const ts = rows.map((r) => Math.log10(r.seconds));
  const nLo = Math.min(...ns);
  const nHi = Math.max(...ns);
  const tLo = Math.min(...ts);
  const tHi = Math.max(...ts);
  const nSpan = nHi - nLo > 0 ? nHi - nLo : 1;
  const tSpan = tHi - tLo > 0 ? tHi - tLo : 1;
  const kinds = [...new Set(rows.map((r) => r.kind))].sort();
  kinds.forEach((kind, ki) => {
    const sel = rows.filter((r) => r.kind === kind).sort((a, b) => a.n - b.n);
    const pts: Array<[number, number]> = sel.map((r) => [
      x0 + ((x1 - x0) * (Math.log10(r.n) - nLo)) / nSpan,
      y0 - ((y0 - y1) * (Math.log10(r.seconds) - tLo)) / tSpan,
    ]);
    const color = SERIES_COLORS[(ki + 2) % SERIES_COLORS.length];
    doc.polyline(pts, color, 1.5, kind === "ssw" ? "5,4" : "");
    for (const [x, y] of pts) {
      doc.circle(x, y, 2.5, color);
    }
    doc.text(x1 - 60, y1 + 16 + 14 * ki, kind, 11);
    doc.line(x1 - 80, y1 + 12 + 14 * ki, x1 - 66, y1 + 12 + 14 * ki, color, 2);
  });
  doc.text((x0 + x1) / 2, y0 + 24, "points N (log)", 11, "middle");
  doc.text(x0, y1 - 8, "wall time, s (log)");
  return doc.render();
}

/** Render a job to an SVG string (pure; file output lives in the CLI). */
export function renderJob(job: PlotJob): string {
  switch (job.style) {
    case "scatter3d":
      return renderScatter3d(job.inputs.map(loadMeasure));
    case "heatmap": {
      if (job.inputs.length !== 1) {
        throw new SchemaError("heatmap takes exactly one density input");
      }
      return renderHeatmap(loadDensity(job.inputs[0]));
    }
    case "so3ball":
      return renderSo3Ball(job.inputs.map(loadMeasure));
    case "curves":
      return renderCurves(job.inputs.map(loadRunReport));
    case "timing":
      return renderTiming(job.inputs.map(loadTiming));
  }
}
