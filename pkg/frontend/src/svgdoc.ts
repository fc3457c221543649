/**
 * Deterministic SVG assembly: plain string building over d3 scales, so the
 * same inputs always produce byte-identical files.
 */

import { scaleLinear, scaleLog, type ScaleContinuousNumeric } from "d3-scale";

export type Scale = ScaleContinuousNumeric<number, number>;

export interface Frame {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
  x: Scale;
  y: Scale;
}

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

export function makeScale(
  kind: "linear" | "log",
  domain: [number, number],
  range: [number, number],
): Scale {
  const scale = kind === "log" ? scaleLog() : scaleLinear();
  return scale.domain(domain).range(range).nice() as Scale;
}

export function frame(
  width: number,
  height: number,
  xscale: "linear" | "log",
  xdomain: [number, number],
  yscale: "linear" | "log",
  ydomain: [number, number],
): Frame {
  const margin = { top: 34, right: 24, bottom: 48, left: 66 };
  return {
    width,
    height,
    margin,
    x: makeScale(xscale, xdomain, [margin.left, width - margin.right]),
    y: makeScale(yscale, ydomain, [height - margin.bottom, margin.top]),
  };
}

const fmt = (v: number): string => {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  return v.toFixed(2);
};

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function tickLabel(v: number): string {
  const abs = Math.abs(v);
  if (abs !== 0 && (abs >= 1e4 || abs < 1e-2)) return v.toExponential(1);
  return String(Number(v.toPrecision(6)));
}

export function polyline(
  points: Array<[number, number]>,
  stroke: string,
  extra = "",
): string {
  const coords = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polyline fill="none" stroke="${stroke}" ${extra}points="${coords}"/>`;
}

export function axes(f: Frame, xlabel: string, ylabel: string): string {
  const parts: string[] = [];
  const x0 = f.margin.left;
  const x1 = f.width - f.margin.right;
  const y0 = f.height - f.margin.bottom;
  const y1 = f.margin.top;
  parts.push(`<g stroke="#000" fill="none">`);
  parts.push(`<line x1="${fmt(x0)}" y1="${fmt(y0)}" x2="${fmt(x1)}" y2="${fmt(y0)}"/>`);
  parts.push(`<line x1="${fmt(x0)}" y1="${fmt(y0)}" x2="${fmt(x0)}" y2="${fmt(y1)}"/>`);
  parts.push(`</g>`);
  for (const t of f.x.ticks(6)) {
    const px = f.x(t);
    parts.push(`<line stroke="#000" x1="${fmt(px)}" y1="${fmt(y0)}" x2="${fmt(px)}" y2="${fmt(y0 + 5)}"/>`);
    parts.push(
      `<text x="${fmt(px)}" y="${fmt(y0 + 18)}" font-size="11" text-anchor="middle">${tickLabel(t)}</text>`,
    );
  }
  for (const t of f.y.ticks(6)) {
    const py = f.y(t);
    parts.push(`<line stroke="#000" x1="${fmt(x0 - 5)}" y1="${fmt(py)}" x2="${fmt(x0)}" y2="${fmt(py)}"/>`);
    parts.push(
      `<text x="${fmt(x0 - 8)}" y="${fmt(py + 4)}" font-size="11" text-anchor="end">${tickLabel(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${fmt((x0 + x1) / 2)}" y="${fmt(f.height - 10)}" font-size="13" text-anchor="middle">${esc(xlabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${fmt((y0 + y1) / 2)}" font-size="13" text-anchor="middle" transform="rotate(-90 16 ${fmt((y0 + y1) / 2)})">${esc(ylabel)}</text>`,
  );
  return parts.join("\n");
}

export function legend(f: Frame, entries: Array<{ label: string; color: string }>): string {
  const parts: string[] = [`<g class="legend">`];
  entries.forEach((entry, i) => {
    const y = f.margin.top + 8 + 16 * i;
    const x = f.width - f.margin.right - 150;
    parts.push(`<line stroke="${entry.color}" stroke-width="2" x1="${fmt(x)}" y1="${fmt(y)}" x2="${fmt(x + 22)}" y2="${fmt(y)}"/>`);
    parts.push(
      `<text x="${fmt(x + 28)}" y="${fmt(y + 4)}" font-size="11">${esc(entry.label)}</text>`,
    );
  });
  parts.push(`</g>`);
  return parts.join("\n");
}

export function document(
  f: Frame,
  body: string[],
  title: string,
  sourceNote: string,
): string {
  return [
    `<?xml version="1.0" encoding="UTF-8"?>`,
    `<svg xmlns="http://www.w3.org/2000/svg" width="${f.width}" height="${f.height}" viewBox="0 0 ${f.width} ${f.height}">`,
    `<metadata>${esc(sourceNote)}</metadata>`,
    `<rect width="${f.width}" height="${f.height}" fill="#ffffff"/>`,
    `<text x="${fmt(f.width / 2)}" y="20" font-size="14" text-anchor="middle" font-weight="bold">${esc(title)}</text>`,
    ...body,
    `<text x="${fmt(f.margin.left)}" y="${fmt(f.height - 1)}" font-size="7" fill="#777">${esc(sourceNote)}</text>`,
    `</svg>`,
    ``,
  ].join("\n");
}
