/**
 * Filled contour figures over a rectangular sweep grid, with overlay
 * polylines (optimal-density line, closed-form bound, iso-total-density
 * lines) drawn from companion CSVs.
 */

import { resolve } from "node:path";

import { contours } from "d3-contour";

import { CsvError, numericColumn, readCsv } from "./csv.js";
import type { ContourRecipe, OverlaySpec } from "./recipe.js";
import { sourceNote } from "./recipe.js";
import { PALETTE, axes, document, esc, frame, legend, polyline, type Frame } from "./svgdoc.js";

interface Grid {
  xs: number[];
  ys: number[];
  values: number[]; // row-major, values[iy * xs.length + ix]
}

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

export function pivotGrid(
  x: number[], y: number[], z: number[], source: string,
  xName: string, yName: string,
): Grid {
  const xs = uniqueSorted(x);
  const ys = uniqueSorted(y);
  if (xs.length < 2 || ys.length < 2) {
    const axis = xs.length < 2 ? xName : yName;
    throw new CsvError(
      `${source}: axis '${axis}' has fewer than 2 distinct values; not a 2-D grid`,
    );
  }
  if (xs.length * ys.length !== x.length) {
    const axis = x.length % xs.length === 0 ? yName : xName;
    throw new CsvError(
      `${source}: ${x.length} rows do not fill the ${xs.length}x${ys.length} grid; ` +
      `axis '${axis}' is ragged`,
    );
  }
  const xIndex = new Map(xs.map((v, i) => [v, i]));
  const yIndex = new Map(ys.map((v, i) => [v, i]));
  const values = new Array<number>(xs.length * ys.length).fill(NaN);
  for (let k = 0; k < x.length; k++) {
    const ix = xIndex.get(x[k])!;
    const iy = yIndex.get(y[k])!;
    const at = iy * xs.length + ix;
    if (!Number.isNaN(values[at])) {
      throw new CsvError(`${source}: duplicate grid point (${x[k]}, ${y[k]})`);
    }
    values[at] = z[k];
  }
  return { xs, ys, values };
}

/** Two-segment colormap from dark violet through teal to yellow. */
export function fillColor(t: number): string {
  const lerp = (a: number[], b: number[], u: number) =>
    a.map((v, i) => Math.round(v + (b[i] - v) * u));
  const stops: Array<[number, number[]]> = [
    [0.0, [68, 1, 84]], [0.5, [33, 145, 140]], [1.0, [253, 231, 37]],
  ];
  const clamped = Math.max(0, Math.min(1, t));
  const [lo, hi] = clamped <= 0.5 ? [stops[0], stops[1]] : [stops[1], stops[2]];
  const u = (clamped - lo[0]) / (hi[0] - lo[0]);
  const [r, g, b] = lerp(lo[1], hi[1], u);
  return `#${[r, g, b].map((v) => v.toString(16).padStart(2, "0")).join("")}`;
}

function gridToData(grid: number[], u: number): number {
  // piecewise-linear map from contour grid coordinates (cell centers at
  // i + 0.5) into data coordinates
  const t = Math.max(0, Math.min(grid.length - 1, u - 0.5));
  const i = Math.min(Math.floor(t), grid.length - 2);
  return grid[i] + (grid[i + 1] - grid[i]) * (t - i);
}

function ringsToPath(
  polygons: number[][][][], g: Grid, f: Frame,
): string {
  const parts: string[] = [];
  for (const polygon of polygons) {
    for (const ring of polygon) {
      const coords = ring.map(([u, v]) => {
        const px = f.x(gridToData(g.xs, u));
        const py = f.y(gridToData(g.ys, v));
        return `${px.toFixed(2)},${py.toFixed(2)}`;
      });
      parts.push(`M${coords.join("L")}Z`);
    }
  }
  return parts.join("");
}

function drawOverlay(
  spec: OverlaySpec, baseDir: string, f: Frame, color: string,
  logX: boolean, logY: boolean,
): { svg: string; label: string; paths: string[] } {
  const path = resolve(baseDir, spec.path);
  const table = readCsv(path);
  const xs = numericColumn(table, spec.x, path);
  const ys = numericColumn(table, spec.y, path);
  const groups = spec.group
    ? numericColumn(table, spec.group, path)
    : xs.map(() => 0);
  const byGroup = new Map<number, Array<[number, number]>>();
  for (let i = 0; i < xs.length; i++) {
    if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue;
    if ((logX && xs[i] <= 0) || (logY && ys[i] <= 0)) continue; // log axes drop zeros
    if (!byGroup.has(groups[i])) byGroup.set(groups[i], []);
    byGroup.get(groups[i])!.push([f.x(xs[i]), f.y(ys[i])]);
  }
  if (byGroup.size === 0) {
    throw new CsvError(`${path}: overlay '${spec.label}' has no drawable points`);
  }
  const parts: string[] = [];
  for (const pts of byGroup.values()) {
    parts.push(polyline(pts, color, `stroke-width="2" clip-path="url(#plot)" `));
    if (spec.marker ?? true) {
      for (const [px, py] of pts) {
        parts.push(
          `<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="2.5" fill="${color}" clip-path="url(#plot)"/>`,
        );
      }
    }
  }
  return { svg: parts.join("\n"), label: spec.label, paths: [path] };
}

export function renderContour(recipe: ContourRecipe, baseDir: string): string {
  const surfacePath = resolve(baseDir, recipe.input);
  const table = readCsv(surfacePath);
  const xs = numericColumn(table, recipe.x, surfacePath);
  const ys = numericColumn(table, recipe.y, surfacePath);
  const zs = numericColumn(table, recipe.z, surfacePath);
  if (zs.some((v) => Number.isNaN(v))) {
    throw new CsvError(`${surfacePath}: column '${recipe.z}' has empty cells`);
  }
  const grid = pivotGrid(xs, ys, zs, surfacePath, recipe.x, recipe.y);

  const xscale = recipe.xscale ?? "linear";
  const yscale = recipe.yscale ?? "linear";
  const f = frame(
    680, 500,
    xscale, [grid.xs[0], grid.xs[grid.xs.length - 1]],
    yscale, [grid.ys[0], grid.ys[grid.ys.length - 1]],
  );

  const zMin = Math.min(...grid.values);
  const zMax = Math.max(...grid.values);
  const levels = recipe.levels ?? 12;
  const body: string[] = [];
  body.push(
    `<clipPath id="plot"><rect x="${f.margin.left}" y="${f.margin.top}" ` +
    `width="${f.width - f.margin.left - f.margin.right}" ` +
    `height="${f.height - f.margin.top - f.margin.bottom}"/></clipPath>`,
  );
  // base fill at the minimum level, then stacked filled thresholds
  body.push(
    `<rect x="${f.margin.left}" y="${f.margin.top}" ` +
    `width="${f.width - f.margin.left - f.margin.right}" ` +
    `height="${f.height - f.margin.top - f.margin.bottom}" fill="${fillColor(0)}"/>`,
  );
  if (zMax > zMin) {
    const generator = contours().size([grid.xs.length, grid.ys.length]);
    const thresholds = Array.from(
      { length: levels },
      (_, i) => zMin + ((i + 1) * (zMax - zMin)) / (levels + 1),
    );
    generator.thresholds(thresholds);
    for (const band of generator(grid.values)) {
      const d = ringsToPath(band.coordinates as number[][][][], grid, f);
      if (!d) continue;
      const t = (band.value - zMin) / (zMax - zMin);
      body.push(
        `<path clip-path="url(#plot)" fill="${fillColor(t)}" stroke="none" d="${d}"/>`,
      );
    }
  }

  const inputPaths = [surfacePath];
  const legendEntries: Array<{ label: string; color: string }> = [];
  (recipe.overlays ?? []).forEach((spec, i) => {
    const color = spec.color ?? PALETTE[(i + 1) % PALETTE.length];
    const overlay = drawOverlay(
      spec, baseDir, f, color, xscale === "log", yscale === "log");
    body.push(overlay.svg);
    legendEntries.push({ label: overlay.label, color });
    inputPaths.push(...overlay.paths);
  });

  body.push(axes(f, recipe.xlabel, recipe.ylabel));
  if (legendEntries.length) body.push(legend(f, legendEntries));
  body.push(
    `<text x="${f.width - f.margin.right}" y="${f.margin.top - 6}" font-size="10" ` +
    `text-anchor="end">${esc(`${recipe.z}: ${zMin.toFixed(3)} to ${zMax.toFixed(3)}`)}</text>`,
  );
  return document(f, body, recipe.title ?? "", sourceNote(inputPaths));
}
