/** CLI: render a curves figure from a recipe. */

import { parseArgs, renderToFile } from "./cli.js";
import { renderCurves } from "./curves.js";

const args = parseArgs(process.argv.slice(2), "plot_curves");
renderToFile(args, "curves", (recipe, dir) => {
  if (recipe.kind !== "curves") {
    throw new Error(`plot_curves needs a 'curves' recipe, got '${recipe.kind}'`);
  }
  return renderCurves(recipe, dir);
});
