/** Minimal deterministic SVG document builder. */

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  private fmt(x: number): string {
    return Number(x.toFixed(3)).toString();
  }

  circle(cx: number, cy: number, r: number, fill: string, opacity = 1, stroke = "none"): void {
    this.parts.push(
      `<circle cx="${this.fmt(cx)}" cy="${this.fmt(cy)}" r="${this.fmt(r)}" ` +
        `fill="${fill}" fill-opacity="${this.fmt(opacity)}" stroke="${stroke}"/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${this.fmt(x)}" y="${this.fmt(y)}" width="${this.fmt(w)}" ` +
        `height="${this.fmt(h)}" fill="${fill}"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.parts.push(
      `<line x1="${this.fmt(x1)}" y1="${this.fmt(y1)}" x2="${this.fmt(x2)}" ` +
        `y2="${this.fmt(y2)}" stroke="${stroke}" stroke-width="${this.fmt(width)}"/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    const coords = pts.map(([x, y]) => `${this.fmt(x)},${this.fmt(y)}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${coords}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${this.fmt(width)}"${dashAttr}/>`,
    );
  }

  text(x: number, y: number, content: string, size = 11, anchor = "start"): void {
    this.parts.push(
      `<text x="${this.fmt(x)}" y="${this.fmt(y)}" font-size="${size}" ` +
        `font-family="sans-serif" text-anchor="${anchor}">${escapeXml(content)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Compact viridis-like colormap on [0, 1]. */
export function colormap(t: number): string {
  const x = Math.min(1, Math.max(0, t));
  const stops: Array<[number, number, number]> = [
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
  ];
  const pos = x * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(pos));
  const f = pos - i;
  const c = stops[i].map((a, k) => Math.round(a + f * (stops[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

export const SERIES_COLORS = ["#2ca02c", "#ff7f0e", "#1f77b4", "#d62728", "#9467bd"];
