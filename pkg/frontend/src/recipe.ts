/**
 * Figure recipes: a JSON file naming the input CSVs, the figure kind, axis
 * columns/scales, and overlay series.  Input paths are resolved relative to
 * the recipe file.
 */

import { existsSync, readFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

export type AxisScale = "linear" | "log";

export interface SeriesSpec {
  path: string;
  label: string;
  x: string;
  analytic?: string; // column of the analytic curve
  mc?: string;       // column of Monte Carlo means (drawn with error bars)
  mcErr?: string;    // column of Monte Carlo standard errors
}

export interface OverlaySpec {
  path: string;
  label: string;
  x: string;
  y: string;
  group?: string;    // draw one polyline per distinct value of this column
  color?: string;
  marker?: boolean;
}

export interface CurvesRecipe {
  kind: "curves";
  series: SeriesSpec[];
  xlabel: string;
  ylabel: string;
  xscale?: AxisScale;
  title?: string;
}

export interface ContourRecipe {
  kind: "contour_with_overlays" | "density_contour";
  input: string;     // 2-D sweep CSV
  x: string;
  y: string;
  z: string;
  xscale?: AxisScale;
  yscale?: AxisScale;
  xlabel: string;
  ylabel: string;
  overlays?: OverlaySpec[];
  levels?: number;
  title?: string;
}

export type Recipe = CurvesRecipe | ContourRecipe;

export class RecipeError extends Error {}

export function loadRecipe(path: string): { recipe: Recipe; dir: string } {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch (err) {
    throw new RecipeError(`${path}: ${(err as Error).message}`);
  }
  let recipe: Recipe;
  try {
    recipe = JSON.parse(raw) as Recipe;
  } catch (err) {
    throw new RecipeError(`${path}: invalid JSON: ${(err as Error).message}`);
  }
  if (!recipe.kind) {
    throw new RecipeError(`${path}: recipe needs a 'kind'`);
  }
  return { recipe, dir: dirname(resolve(path)) };
}

/** Manifest hash of a CSV, read from its side-car manifest file. */
export function manifestHash(csvPath: string): string {
  const manifestPath = `${csvPath}.manifest.json`;
  if (!existsSync(manifestPath)) return "unknown";
  try {
    const manifest = JSON.parse(readFileSync(manifestPath, "utf8"));
    return typeof manifest.config_sha256 === "string"
      ? manifest.config_sha256
      : "unknown";
  } catch {
    return "unknown";
  }
}

export function sourceNote(paths: string[]): string {
  const tags = paths.map((p) => {
    const hash = manifestHash(p);
    const name = p.split("/").pop();
    return `${name}@${hash.slice(0, 12)}`;
  });
  return `source: ${tags.join(", ")}`;
}
