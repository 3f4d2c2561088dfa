// svg.ts — a small hand-rolled line chart: enough for mean curves with
// shaded error bands, reference lines, and a legend. No DOM, no canvas;
// the output is a standalone SVG document string.

import { SeriesPoint } from "./stats.js";

export interface ChartSeries {
  label: string;
  points: SeriesPoint[];
}

export interface ReferenceLine {
  y: number;
  label: string;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  series: ChartSeries[];
  referenceLines?: ReferenceLine[];
  width?: number;
  height?: number;
}

const PALETTE = [
  "#1f6fb2", "#d1495b", "#3f8f4a", "#8b5ca6", "#c77b21",
  "#2a9d8f", "#7a6348", "#5b5b5b",
];

const MARGIN = { top: 44, right: 24, bottom: 52, left: 72 };

function fmt(value: number): string {
  if (!Number.isFinite(value)) return String(value);
  const rounded = Math.round(value * 1e6) / 1e6;
  return String(rounded);
}

/** Tick positions at 1/2/5 × 10^k steps covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / target;
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * power)
    .find((s) => (hi - lo) / s <= target) ?? 10 * power;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step / 2; t += step) {
    ticks.push(Math.abs(t) < step / 1e6 ? 0 : t);
  }
  return ticks;
}

function escapeText(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function lineChart(options: ChartOptions): string {
  const width = options.width ?? 760;
  const height = options.height ?? 460;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs: number[] = [];
  const ys: number[] = [];
  for (const s of options.series) {
    for (const p of s.points) {
      xs.push(p.x);
      ys.push(p.mean - p.stderr, p.mean + p.stderr);
    }
  }
  for (const line of options.referenceLines ?? []) ys.push(line.y);
  if (xs.length === 0) {
    xs.push(0, 1);
  }
  if (ys.length === 0) ys.push(0, 1);
  let [xLo, xHi] = [Math.min(...xs), Math.max(...xs)];
  let [yLo, yHi] = [Math.min(0, ...ys), Math.max(...ys)];
  if (xHi === xLo) xHi = xLo + 1;
  if (yHi === yLo) yHi = yLo + 1;
  yHi += (yHi - yLo) * 0.05;

  const sx = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const sy = (y: number) =>
    MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
      `height="${height}" viewBox="0 0 ${width} ${height}" ` +
      `font-family="Menlo, Consolas, monospace" font-size="11">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<text x="${width / 2}" y="22" text-anchor="middle" font-size="14">` +
      `${escapeText(options.title)}</text>`,
  );

  // axes, ticks, grid
  for (const t of niceTicks(xLo, xHi)) {
    const x = sx(t);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" ` +
        `y2="${MARGIN.top + plotH}" stroke="#eeeeee"/>`,
      `<text x="${x}" y="${MARGIN.top + plotH + 16}" ` +
        `text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  for (const t of niceTicks(yLo, yHi)) {
    const y = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" ` +
        `y2="${y}" stroke="#eeeeee"/>`,
      `<text x="${MARGIN.left - 6}" y="${y + 4}" ` +
        `text-anchor="end">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" ` +
      `height="${plotH}" fill="none" stroke="#333333"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 14}" ` +
      `text-anchor="middle">${escapeText(options.xLabel)}</text>`,
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">` +
      `${escapeText(options.yLabel)}</text>`,
  );

  for (const line of options.referenceLines ?? []) {
    const y = sy(line.y);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" ` +
        `y2="${y}" stroke="#222222" stroke-dasharray="6 4"/>`,
      `<text x="${MARGIN.left + plotW - 4}" y="${y - 4}" ` +
        `text-anchor="end">${escapeText(line.label)}</text>`,
    );
  }

  options.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    if (s.points.length === 0) return;
    const upper = s.points.map(
      (p) => `${sx(p.x)},${sy(p.mean + p.stderr)}`);
    const lower = [...s.points].reverse().map(
      (p) => `${sx(p.x)},${sy(p.mean - p.stderr)}`);
    parts.push(
      `<polygon class="band" points="${[...upper, ...lower].join(" ")}" ` +
        `fill="${color}" fill-opacity="0.18" stroke="none"/>`,
      `<polyline class="mean" points="${s.points
        .map((p) => `${sx(p.x)},${sy(p.mean)}`)
        .join(" ")}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    const ly = MARGIN.top + 14 + 16 * i;
    parts.push(
      `<line x1="${MARGIN.left + 10}" y1="${ly - 4}" ` +
        `x2="${MARGIN.left + 34}" y2="${ly - 4}" stroke="${color}" ` +
        `stroke-width="3"/>`,
      `<text x="${MARGIN.left + 40}" y="${ly}">${escapeText(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
