/**
 * Curve figures: one analytic line per series (solid) plus Monte Carlo
 * means drawn as markers with stderr error bars, legend per drawn entry.
 */

import { resolve } from "node:path";

import { CsvError, numericColumn, readCsv } from "./csv.js";
import type { CurvesRecipe } from "./recipe.js";
import { sourceNote } from "./recipe.js";
import { PALETTE, axes, document, esc, frame, legend, polyline } from "./svgdoc.js";

interface DrawnSeries {
  label: string;
  color: string;
  analytic?: Array<[number, number]>;
  mc?: Array<[number, number, number]>; // x, mean, stderr
}

function finitePairs(xs: number[], ys: number[]): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  for (let i = 0; i < xs.length; i++) {
    if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) out.push([xs[i], ys[i]]);
  }
  return out;
}

export function renderCurves(recipe: CurvesRecipe, baseDir: string): string {
  if (!recipe.series || recipe.series.length === 0) {
    throw new CsvError("curves recipe has no series");
  }
  const drawn: DrawnSeries[] = [];
  const inputPaths: string[] = [];
  for (const [i, spec] of recipe.series.entries()) {
    const path = resolve(baseDir, spec.path);
    inputPaths.push(path);
    const table = readCsv(path);
    const xs = numericColumn(table, spec.x, path);
    const series: DrawnSeries = {
      label: spec.label,
      color: PALETTE[i % PALETTE.length],
    };
    if (spec.analytic) {
      series.analytic = finitePairs(xs, numericColumn(table, spec.analytic, path));
    }
    if (spec.mc) {
      const means = numericColumn(table, spec.mc, path);
      const errs = spec.mcErr
        ? numericColumn(table, spec.mcErr, path)
        : means.map(() => 0);
      series.mc = [];
      for (let k = 0; k < xs.length; k++) {
        if (Number.isFinite(xs[k]) && Number.isFinite(means[k])) {
          series.mc.push([xs[k], means[k], Number.isFinite(errs[k]) ? errs[k] : 0]);
        }
      }
    }
    if (!series.analytic?.length && !series.mc?.length) {
      throw new CsvError(`${path}: series '${spec.label}' has no drawable points`);
    }
    drawn.push(series);
  }

  const allX = drawn.flatMap((s) => [
    ...(s.analytic ?? []).map((p) => p[0]),
    ...(s.mc ?? []).map((p) => p[0]),
  ]);
  const allY = drawn.flatMap((s) => [
    ...(s.analytic ?? []).map((p) => p[1]),
    ...(s.mc ?? []).map((p) => p[1] + p[2]),
    ...(s.mc ?? []).map((p) => Math.max(p[1] - p[2], 0)),
  ]);
  const f = frame(
    640, 460,
    recipe.xscale ?? "linear", [Math.min(...allX), Math.max(...allX)],
    "linear", [Math.min(0, ...allY), Math.max(...allY)],
  );

  const body: string[] = [axes(f, recipe.xlabel, recipe.ylabel)];
  const legendEntries: Array<{ label: string; color: string }> = [];
  for (const series of drawn) {
    if (series.analytic?.length) {
      const pts = series.analytic
        .slice()
        .sort((a, b) => a[0] - b[0])
        .map(([x, y]) => [f.x(x), f.y(y)] as [number, number]);
      body.push(polyline(pts, series.color, `stroke-width="2" `));
      legendEntries.push({ label: `${series.label} (analytic)`, color: series.color });
    }
    if (series.mc?.length) {
      const marks: string[] = [`<g class="mc" stroke="${series.color}" fill="${series.color}">`];
      for (const [x, mean, err] of series.mc) {
        const px = f.x(x);
        marks.push(
          `<line x1="${f.x(x).toFixed(2)}" y1="${f.y(mean - err).toFixed(2)}" x2="${px.toFixed(2)}" y2="${f.y(mean + err).toFixed(2)}"/>`,
        );
        marks.push(
          `<circle cx="${px.toFixed(2)}" cy="${f.y(mean).toFixed(2)}" r="3"/>`,
        );
      }
      marks.push(`</g>`);
      body.push(marks.join("\n"));
      legendEntries.push({ label: `${series.label} (simulation)`, color: series.color });
    }
  }
  body.push(legend(f, legendEntries));
  return document(f, body, recipe.title ?? "", sourceNote(inputPaths));
}
