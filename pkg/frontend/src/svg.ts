/**
 * Deterministic SVG rendering: ratio scatters with bound curves, plus the
 * targeting-grid line chart. No timestamps, no randomness; identical input
 * yields identical bytes.
 */

import { Cell, Table, column } from "./csv.js";
import { GridFigureSpec, RatioFigureSpec } from "./figures.js";
import { checkEnvelope, EnvelopeReport } from "./envelope.js";

const W = 760;
const H = 480;
const MARGIN = { left: 64, right: 20, top: 36, bottom: 48 };

const COLORS = {
  scatter: "#4878a8",
  lower: "#b23a3a",
  upper: "#2e7d46",
  advisory: "#888888",
  axis: "#222222",
  grid: "#dddddd",
  seriesA: "#b23a3a",
  seriesB: "#4878a8",
};

interface Scale {
  (v: number): number;
  min: number;
  max: number;
}

function linearScale(min: number, max: number, outMin: number, outMax: number): Scale {
  if (max <= min) max = min + 1;
  const f = ((v: number) => outMin + ((v - min) / (max - min)) * (outMax - outMin)) as Scale;
  f.min = min;
  f.max = max;
  return f;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const s = v.toPrecision(6);
  return s.includes(".") ? s.replace(/\.?0+$/, "").replace(/\.?0+e/, "e") : s;
}

function ticks(min: number, max: number, count = 6): number[] {
  const span = max - min;
  const rawStep = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 2.5, 5, 10].map((m) => m * mag).find((s) => span / s <= count) ?? mag * 10;
  const start = Math.ceil(min / step) * step;
  const out: number[] = [];
  for (let t = start; t <= max + step * 1e-9; t += step) out.push(Number(t.toPrecision(12)));
  return out;
}

function axis(xs: Scale, ys: Scale, xLabel: string, yLabel: string): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const y0 = H - MARGIN.bottom;
  const y1 = MARGIN.top;
  for (const t of ticks(xs.min, xs.max)) {
    const px = xs(t);
    parts.push(`<line x1="${fmt(px)}" y1="${y1}" x2="${fmt(px)}" y2="${y0}" stroke="${COLORS.grid}"/>`);
    parts.push(
      `<text x="${fmt(px)}" y="${y0 + 18}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(ys.min, ys.max)) {
    const py = ys(t);
    parts.push(`<line x1="${x0}" y1="${fmt(py)}" x2="${x1}" y2="${fmt(py)}" stroke="${COLORS.grid}"/>`);
    parts.push(
      `<text x="${x0 - 6}" y="${fmt(py + 4)}" text-anchor="end" font-size="11">${fmt(t)}</text>`,
    );
  }
  parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="${COLORS.axis}"/>`);
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${H - 10}" text-anchor="middle" font-size="13">${xLabel}</text>`,
  );
  parts.push(
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${(y0 + y1) / 2})">${yLabel}</text>`,
  );
  return parts.join("\n");
}

function document(body: string, title: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="sans-serif">`,
    `<rect width="${W}" height="${H}" fill="white"/>`,
    `<text x="${W / 2}" y="22" text-anchor="middle" font-size="15">${title}</text>`,
    body,
    "</svg>",
    "",
  ].join("\n");
}

function finitePairs(xs: Cell[], ys: Cell[]): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  for (let i = 0; i < xs.length; i++) {
    const x = xs[i];
    const y = ys[i];
    if (x !== null && y !== null && Number.isFinite(x) && Number.isFinite(y)) out.push([x, y]);
  }
  return out;
}

/** Bound columns are functions of theta; reduce rows to one point per theta. */
function curvePoints(xs: Cell[], ys: Cell[]): Array<[number, number]> {
  const seen = new Map<number, number>();
  for (const [x, y] of finitePairs(xs, ys)) {
    if (!seen.has(x)) seen.set(x, y);
  }
  return [...seen.entries()].sort((a, b) => a[0] - b[0]);
}

function polyline(points: Array<[number, number]>, xs: Scale, ys: Scale, stroke: string, dash = ""): string {
  const attr = dash ? ` stroke-dasharray="${dash}"` : "";
  const pts = points.map(([x, y]) => `${fmt(xs(x))},${fmt(ys(y))}`).join(" ");
  return `<polyline fill="none" stroke="${stroke}" stroke-width="1.8"${attr} points="${pts}"/>`;
}

export interface RenderResult {
  svg: string;
  envelope: EnvelopeReport | null;
}

export function renderRatioFigure(table: Table, spec: RatioFigureSpec): RenderResult {
  const thetas = column(table, "theta");
  const ratios = column(table, spec.ratio);
  const points = finitePairs(thetas, ratios);
  if (points.length === 0) {
    throw new Error(`no plottable points for ratio column '${spec.ratio}'`);
  }
  const envelope = checkEnvelope(table, spec);

  let yMax = Math.max(1, ...points.map(([, y]) => y));
  let yMin = Math.min(0, ...points.map(([, y]) => y));
  const curves = spec.bounds.map((b) => ({ ...b, points: curvePoints(thetas, column(table, b.column)) }));
  for (const c of curves) {
    for (const [, y] of c.points) {
      if (y > yMax) yMax = y;
      if (y < yMin) yMin = y;
    }
  }
  const xsAll = points.map(([x]) => x);
  const xScale = linearScale(Math.min(...xsAll), Math.max(...xsAll), MARGIN.left, W - MARGIN.right);
  const yScale = linearScale(yMin, yMax * 1.04, H - MARGIN.bottom, MARGIN.top);

  const body: string[] = [axis(xScale, yScale, "willingness factor", spec.yLabel)];
  for (const [x, y] of points) {
    body.push(`<circle cx="${fmt(xScale(x))}" cy="${fmt(yScale(y))}" r="2" fill="${COLORS.scatter}" fill-opacity="0.45"/>`);
  }
  for (const c of curves) {
    if (c.points.length === 0) continue;
    const color = c.advisory ? COLORS.advisory : c.role === "lower" ? COLORS.lower : COLORS.upper;
    body.push(polyline(c.points, xScale, yScale, color, c.advisory ? "6 4" : ""));
  }
  const note = `outside envelope (non-advisory): ${envelope.violations}`;
  body.push(`<text x="${W - MARGIN.right}" y="${MARGIN.top - 6}" text-anchor="end" font-size="11">${note}</text>`);
  return { svg: document(body.join("\n"), spec.title), envelope };
}

export function renderGridFigure(table: Table, spec: GridFigureSpec): RenderResult {
  const ms = column(table, "M");
  const v0 = column(table, "v0");
  const benign = column(table, "benign_net");
  const a = finitePairs(ms, v0);
  const b = finitePairs(ms, benign);
  if (a.length === 0 || b.length === 0) {
    throw new Error("no plottable points for columns 'v0' / 'benign_net'");
  }
  const ys = [...a.map(([, y]) => y), ...b.map(([, y]) => y)];
  const xScale = linearScale(Math.min(...a.map(([x]) => x)), Math.max(...a.map(([x]) => x)), MARGIN.left, W - MARGIN.right);
  const yScale = linearScale(Math.min(...ys) * 1.05, Math.max(...ys, 0) + 0.05, H - MARGIN.bottom, MARGIN.top);

  const body: string[] = [axis(xScale, yScale, "targeted benign agents", "payoff")];
  body.push(polyline(a, xScale, yScale, COLORS.seriesA));
  body.push(polyline(b, xScale, yScale, COLORS.seriesB));
  for (const [x, y] of a) body.push(`<circle cx="${fmt(xScale(x))}" cy="${fmt(yScale(y))}" r="2.5" fill="${COLORS.seriesA}"/>`);
  for (const [x, y] of b) body.push(`<circle cx="${fmt(xScale(x))}" cy="${fmt(yScale(y))}" r="2.5" fill="${COLORS.seriesB}"/>`);
  body.push(`<text x="${W - MARGIN.right - 6}" y="${MARGIN.top + 14}" text-anchor="end" font-size="12" fill="${COLORS.seriesA}">adversary payoff</text>`);
  body.push(`<text x="${W - MARGIN.right - 6}" y="${MARGIN.top + 30}" text-anchor="end" font-size="12" fill="${COLORS.seriesB}">benign net utility (per agent)</text>`);
  return { svg: document(body.join("\n"), spec.title), envelope: null };
}
