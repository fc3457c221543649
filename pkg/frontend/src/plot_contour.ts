/** CLI: render a filled-contour figure (with overlays) from a recipe. */

import { parseArgs, renderToFile } from "./cli.js";
import { renderContour } from "./contour.js";

const args = parseArgs(process.argv.slice(2), "plot_contour");
renderToFile(args, "contour", (recipe, dir) => {
  if (recipe.kind !== "contour_with_overlays" && recipe.kind !== "density_contour") {
    throw new Error(
      `plot_contour needs a contour recipe, got '${recipe.kind}'`,
    );
  }
  return renderContour(recipe, dir);
});
