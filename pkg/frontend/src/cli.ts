/**
 * Shared CLI plumbing for the figure scripts: --recipe (JSON), --output
 * (SVG), optional --input overrides for the recipe's CSV paths (in order:
 * first the main input / first series, then overlays / later series).
 * Any malformed input exits nonzero with a message naming the problem.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

import type { Recipe } from "./recipe.js";
import { loadRecipe } from "./recipe.js";

export interface CliArgs {
  recipe: string;
  output: string;
  inputs: string[];
}

export function parseArgs(argv: string[], prog: string): CliArgs {
  const args: CliArgs = { recipe: "", output: "", inputs: [] };
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--recipe":
        args.recipe = argv[++i] ?? "";
        break;
      case "--output":
        args.output = argv[++i] ?? "";
        break;
      case "--input":
        args.inputs.push(argv[++i] ?? "");
        break;
      default:
        console.error(`${prog}: unknown argument '${argv[i]}'`);
        console.error(`usage: ${prog} --recipe <recipe.json> --output <figure.svg> [--input <csv>]...`);
        process.exit(2);
    }
  }
  if (!args.recipe || !args.output) {
    console.error(`usage: ${prog} --recipe <recipe.json> --output <figure.svg> [--input <csv>]...`);
    process.exit(2);
  }
  return args;
}

function applyInputOverrides(recipe: Recipe, inputs: string[]) {
  if (inputs.length === 0) return;
  // flag-passed paths are relative to the caller's directory, unlike the
  // recipe's own paths, which resolve against the recipe file
  const absolute = inputs.map((p) => (p ? resolve(p) : p));
  if (recipe.kind === "curves") {
    recipe.series.forEach((series, i) => {
      if (absolute[i]) series.path = absolute[i];
    });
  } else {
    if (absolute[0]) recipe.input = absolute[0];
    (recipe.overlays ?? []).forEach((overlay, i) => {
      if (absolute[i + 1]) overlay.path = absolute[i + 1];
    });
  }
}

export function renderToFile(
  args: CliArgs,
  what: string,
  render: (recipe: Recipe, dir: string) => string,
) {
  try {
    const { recipe, dir } = loadRecipe(args.recipe);
    applyInputOverrides(recipe, args.inputs);
    const svg = render(recipe, dir);
    mkdirSync(dirname(args.output), { recursive: true });
    writeFileSync(args.output, svg);
    console.log(args.output);
  } catch (err) {
    console.error(`error rendering ${what}: ${(err as Error).message}`);
    process.exit(1);
  }
}
