"""STP surface over (altitude, density) for the single-layer network, plus
the per-altitude optimal density and its closed-form upper bound.

Writes results/density_height_surface.csv (2-D sweep) and
results/density_height_overlays.csv
(columns h1, lambda_opt, stp_opt, lambda_bound).  Feed both to the contour
figure script.
"""
import argparse
import csv
import json
import time
from pathlib import Path

from uavstp import GridSpec, QuadSpec, optimal_density, sweep_2d
from uavstp.cli import load_network, run_manifest, write_sweep_csv
from uavstp.sweep import apply_value

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--output-dir", default=ROOT / "results", type=Path)
    ap.add_argument("--heights", type=int, default=8)
    ap.add_argument("--densities", type=int, default=10)
    args = ap.parse_args()
    args.output_dir.mkdir(parents=True, exist_ok=True)

    started = time.perf_counter()
    config_path = ROOT / "configs" / "single_layer.yaml"
    network = load_network(str(config_path))
    quad = QuadSpec(rel_tol=1e-6, abs_tol=1e-10)
    h_grid = GridSpec.log("layers.0.altitude", 50.0, 400.0, args.heights)
    d_grid = GridSpec.log("layers.0.density", 1e-7, 10 ** -3.5, args.densities)

    surface = sweep_2d(network, h_grid, d_grid, ("analytic",), quad=quad)
    surface_out = args.output_dir / "density_height_surface.csv"
    write_sweep_csv(surface, str(surface_out))

    overlays_out = args.output_dir / "density_height_overlays.csv"
    with open(overlays_out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h1", "lambda_opt", "stp_opt", "lambda_bound"])
        for h in h_grid.values:
            net_h = apply_value(network, "layers.0.altitude", h)
            opt = optimal_density(net_h, 0, d_grid, quad)
            writer.writerow([repr(h), repr(opt.density), repr(opt.stp),
                             repr(opt.bound)])

    for out in (surface_out, overlays_out):
        manifest = run_manifest(
            ["density_height_contour.py"], str(config_path), None,
            [str(surface_out), str(overlays_out)], started,
        )
        with open(f"{out}.manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2)
    print(f"{surface_out}\n{overlays_out}  ({time.perf_counter() - started:.1f}s)")


if __name__ == "__main__":
    main()
