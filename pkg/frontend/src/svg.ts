/**
 * Minimal deterministic SVG assembly: scales, axes, polylines. No DOM.
 */

import { scaleLinear, type ScaleLinear } from "d3-scale";

export interface Box {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
}

export const DEFAULT_BOX: Box = {
  width: 640,
  height: 440,
  margin: { top: 24, right: 20, bottom: 44, left: 64 },
};

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toPrecision(8);
  return s.includes("e") ? s : s.replace(/\.?0+$/, "") || "0";
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
      `stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.2): void {
    if (points.length === 0) return;
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string, stroke = "none"): void {
    this.parts.push(
      `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}" stroke="${stroke}"/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string, opacity = 1): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
      `fill="${fill}" opacity="${opacity}"/>`,
    );
  }

  text(x: number, y: number, content: string, anchor = "middle", size = 11): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" font-size="${size}">` +
      `${content}</text>`,
    );
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export interface Frame2D {
  x: ScaleLinear<number, number>;
  y: ScaleLinear<number, number>;
}

/** Draw axes with ticks inside the box and return the two scales. */
export function frame(
  doc: SvgDoc,
  box: Box,
  xDomain: [number, number],
  yDomain: [number, number],
  xLabel: string,
  yLabel: string,
  offsetX = 0,
  panelWidth?: number,
): Frame2D {
  const w = panelWidth ?? box.width;
  const x0 = offsetX + box.margin.left;
  const x1 = offsetX + w - box.margin.right;
  const y0 = box.height - box.margin.bottom;
  const y1 = box.margin.top;
  if (xDomain[0] === xDomain[1]) xDomain = [xDomain[0] - 1, xDomain[1] + 1];
  if (yDomain[0] === yDomain[1]) yDomain = [yDomain[0] - 1, yDomain[1] + 1];
  const x = scaleLinear().domain(xDomain).range([x0, x1]);
  const y = scaleLinear().domain(yDomain).range([y0, y1]);
  doc.line(x0, y0, x1, y0, "black");
  doc.line(x0, y0, x0, y1, "black");
  for (const t of x.ticks(5)) {
    doc.line(x(t), y0, x(t), y0 + 4, "black");
    doc.text(x(t), y0 + 16, fmt(t));
  }
  for (const t of y.ticks(5)) {
    doc.line(x0 - 4, y(t), x0, y(t), "black");
    doc.text(x0 - 6, y(t) + 3, fmt(t), "end");
  }
  doc.text((x0 + x1) / 2, box.height - 8, xLabel);
  doc.text(offsetX + 14, box.margin.top - 8, yLabel, "start");
  return { x, y };
}

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
