/**
 * The four figure kinds: eigenvalue sweeps, plane projections, a 3D view
 * with the body sphere, and apsis curves. Each takes parsed inputs and
 * returns an SVG string; rendering never mutates inputs.
 */

import {
  Table, BifurcationEvent, requireColumns, numbers,
  FAMILY_COLUMNS, ORBIT_COLUMNS, APSIS_COLUMNS,
} from "./data.js";
import { SvgDoc, DEFAULT_BOX, frame, SERIES_COLORS, fmt, Box } from "./svg.js";

export interface AxisRanges {
  xmin?: number;
  xmax?: number;
  ymin?: number;
  ymax?: number;
}

function extent(values: number[], lo?: number, hi?: number): [number, number] {
  const finite = values.filter(Number.isFinite);
  const a = lo ?? (finite.length ? Math.min(...finite) : 0);
  const b = hi ?? (finite.length ? Math.max(...finite) : 1);
  return [a, b];
}

function clampedSegments(
  xs: number[], ys: number[], ylim: [number, number],
  toPt: (x: number, y: number) => [number, number],
): Array<Array<[number, number]>> {
  const segs: Array<Array<[number, number]>> = [];
  let cur: Array<[number, number]> = [];
  for (let i = 0; i < xs.length; i++) {
    const inside = ys[i] >= ylim[0] && ys[i] <= ylim[1] && Number.isFinite(ys[i]);
    if (inside) {
      cur.push(toPt(xs[i], ys[i]));
    } else if (cur.length > 0) {
      segs.push(cur);
      cur = [];
    }
  }
  if (cur.length > 0) segs.push(cur);
  return segs;
}

/** Real parts of the four multipliers against the energy, with event bands. */
export function eigSweep(
  table: Table, events: BifurcationEvent[] = [], ranges: AxisRanges = {},
): string {
  requireColumns(table, FAMILY_COLUMNS);
  const box = DEFAULT_BOX;
  const doc = new SvgDoc(box.width, box.height);
  if (table.rows.length === 0) {
    frame(doc, box, [0, 1], [-1, 1], "h", "Re(multiplier)");
    return doc.render();
  }
  const h = numbers(table, "h");
  const series = [1, 2, 3, 4].map((i) => numbers(table, `re_lambda_${i}`));
  const ydom = extent(
    series.flat().filter((v) => Math.abs(v) <= 5),
    ranges.ymin, ranges.ymax,
  );
  const xdom = extent(h, ranges.xmin, ranges.xmax);
  const f = frame(doc, box, xdom, ydom, "h", "Re(multiplier)");
  for (const ev of events) {
    const [lo, hi] = ev.bracket;
    const x0 = f.x(lo);
    const wpx = Math.max(f.x(hi) - x0, 2);
    doc.rect(x0, box.margin.top, wpx, box.height - box.margin.top - box.margin.bottom,
             "#ffb347", 0.5);
    doc.text(x0, box.margin.top + 10, ev.kind, "start", 9);
  }
  const yline = (v: number) => f.y(Math.max(ydom[0], Math.min(ydom[1], v)));
  doc.line(f.x(xdom[0]), yline(1), f.x(xdom[1]), yline(1), "#999", 0.7, "4 3");
  doc.line(f.x(xdom[0]), yline(-1), f.x(xdom[1]), yline(-1), "#999", 0.7, "4 3");
  series.forEach((ys, i) => {
    for (const seg of clampedSegments(h, ys, ydom, (x, y) => [f.x(x), f.y(y)])) {
      doc.polyline(seg, SERIES_COLORS[i]);
    }
  });
  return doc.render();
}

/** Side-by-side xy and yz projections of a trajectory. */
export function projectionXyYz(table: Table, ranges: AxisRanges = {}): string {
  requireColumns(table, ORBIT_COLUMNS);
  const box: Box = { ...DEFAULT_BOX, width: 880 };
  const doc = new SvgDoc(box.width, box.height);
  const panels: Array<[string, string]> = [["q1", "q2"], ["q2", "q3"]];
  panels.forEach(([cx, cy], i) => {
    const offset = i * (box.width / 2);
    if (table.rows.length === 0) {
      frame(doc, box, [-1, 1], [-1, 1], cx, cy, offset, box.width / 2);
      return;
    }
    const xs = numbers(table, cx);
    const ys = numbers(table, cy);
    // equal aspect around the data box
    const [xa, xb] = extent(xs, ranges.xmin, ranges.xmax);
    const [ya, yb] = extent(ys, ranges.ymin, ranges.ymax);
    const half = Math.max(xb - xa, yb - ya, 1e-12) / 2;
    const cxm = (xa + xb) / 2;
    const cym = (ya + yb) / 2;
    const f = frame(doc, box, [cxm - half * 1.1, cxm + half * 1.1],
                    [cym - half * 1.1, cym + half * 1.1], cx, cy,
                    offset, box.width / 2);
    doc.circle(f.x(0), f.y(0), 2.5, "#333");
    doc.polyline(xs.map((x, k) => [f.x(x), f.y(ys[k])]), SERIES_COLORS[0]);
  });
  return doc.render();
}

function rotate(v: [number, number, number], az: number, el: number): [number, number, number] {
  const [x, y, z] = v;
  const ca = Math.cos(az), sa = Math.sin(az);
  const x1 = ca * x + sa * y;
  const y1 = -sa * x + ca * y;
  const ce = Math.cos(el), se = Math.sin(el);
  return [x1, ce * y1 + se * z, -se * y1 + ce * z];
}

/** Orthographic 3D view of the trajectory with the central body sphere. */
export function orbit3d(
  table: Table, sphereRadius = 0, azimuth = 0.6, elevation = 0.35,
): string {
  requireColumns(table, ORBIT_COLUMNS);
  const box = DEFAULT_BOX;
  const doc = new SvgDoc(box.width, box.height);
  if (table.rows.length === 0) {
    frame(doc, box, [-1, 1], [-1, 1], "view x", "view y");
    return doc.render();
  }
  const pts3 = table.rows.map((r): [number, number, number] =>
    [Number(r.q1), Number(r.q2), Number(r.q3)]);
  const proj = pts3.map((p) => rotate(p, azimuth, elevation));
  const xs = proj.map((p) => p[0]);
  const ys = proj.map((p) => p[2]);
  const span = Math.max(...xs.map(Math.abs), ...ys.map(Math.abs), sphereRadius, 1e-12) * 1.15;
  const f = frame(doc, box, [-span, span], [-span, span], "view x", "view y");
  if (sphereRadius > 0) {
    const r = Math.abs(f.x(sphereRadius) - f.x(0));
    doc.circle(f.x(0), f.y(0), r, "#d0d7de", "#555");
    // a few wireframe latitude ellipses hint at the sphere
    for (const lat of [-0.6, 0, 0.6]) {
      const rr = Math.cos(Math.asin(lat));
      const cy = f.y(sphereRadius * lat * Math.cos(elevation));
      const ry = Math.max(r * rr * Math.sin(elevation), 0.5);
      doc.raw(`<ellipse cx="${fmt(f.x(0))}" cy="${fmt(cy)}" rx="${fmt(r * rr)}" ` +
              `ry="${fmt(ry)}" fill="none" stroke="#888" stroke-width="0.6"/>`);
    }
  }
  doc.polyline(proj.map((p) => [f.x(p[0]), f.y(p[2])]), SERIES_COLORS[1], 1.4);
  return doc.render();
}

/** Periapsis and apoapsis curves with the surface and margin thresholds. */
export function apsisCurve(
  table: Table, ranges: AxisRanges = {},
  surfaceKm = 1716.0, marginKm = 1766.0,
): string {
  requireColumns(table, APSIS_COLUMNS);
  const box = DEFAULT_BOX;
  const doc = new SvgDoc(box.width, box.height);
  if (table.rows.length === 0) {
    frame(doc, box, [0, 1], [0, 1], "h", "distance (km)");
    return doc.render();
  }
  const h = numbers(table, "h");
  const peri = numbers(table, "periapsis_km");
  const apo = numbers(table, "apoapsis_km");
  const xdom = extent(h, ranges.xmin, ranges.xmax);
  const ydom = extent([...peri, ...apo, surfaceKm], ranges.ymin, ranges.ymax);
  const f = frame(doc, box, xdom, ydom, "h", "distance (km)");
  doc.line(f.x(xdom[0]), f.y(surfaceKm), f.x(xdom[1]), f.y(surfaceKm),
           "#7cc7ff", 1.4);
  doc.line(f.x(xdom[0]), f.y(marginKm), f.x(xdom[1]), f.y(marginKm),
           "#2a5fb4", 1.4, "5 3");
  for (const hp of table.meta.get("period_doubling_h") ?? []) {
    const v = Number(hp);
    if (Number.isFinite(v) && v >= xdom[0] && v <= xdom[1]) {
      doc.line(f.x(v), box.margin.top, f.x(v), box.height - box.margin.bottom,
               "#c22", 1.0, "2 3");
      doc.text(f.x(v), box.margin.top + 10, "period doubling", "start", 9);
    }
  }
  doc.polyline(h.map((x, i) => [f.x(x), f.y(peri[i])]), SERIES_COLORS[0], 1.4);
  doc.polyline(h.map((x, i) => [f.x(x), f.y(apo[i])]), SERIES_COLORS[2], 1.4);
  doc.text(box.width - box.margin.right, box.margin.top + 4, "apoapsis", "end", 10);
  doc.text(box.width - box.margin.right, box.margin.top + 16, "periapsis", "end", 10);
  return doc.render();
}
