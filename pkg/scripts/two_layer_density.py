"""STP surface over the two layer densities (altitudes 100 m and 200 m) and
iso-total-density slices at three totals.

Writes results/two_layer_surface.csv and results/two_layer_iso.csv.  Feed both to the
contour figure script; the iso CSV draws the constant-total lines.
"""
import argparse
import json
import time
from pathlib import Path

from uavstp import GridSpec, QuadSpec, iso_total_density, sweep_2d
from uavstp.cli import load_network, run_manifest, write_sweep_csv

ROOT = Path(__file__).resolve().parent.parent

TOTALS = (1e-6, 10 ** -5.3, 10 ** -4.6)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--output-dir", default=ROOT / "results", type=Path)
    ap.add_argument("--points", type=int, default=8, help="density grid size per axis")
    ap.add_argument("--fractions", type=int, default=11)
    args = ap.parse_args()
    args.output_dir.mkdir(parents=True, exist_ok=True)

    started = time.perf_counter()
    config_path = ROOT / "configs" / "two_layer.yaml"
    network = load_network(str(config_path))
    quad = QuadSpec(rel_tol=1e-6, abs_tol=1e-10)
    grid_1 = GridSpec.log("layers.0.density", 1e-7, 10 ** -4.3, args.points)
    grid_2 = GridSpec.log("layers.1.density", 1e-7, 10 ** -4.3, args.points)

    surface = sweep_2d(network, grid_1, grid_2, ("analytic",), quad=quad)
    surface_out = args.output_dir / "two_layer_surface.csv"
    write_sweep_csv(surface, str(surface_out))

    fractions = [i / (args.fractions - 1) for i in range(args.fractions)]
    slices = [
        iso_total_density(network, total, fractions, ("analytic",), quad=quad)
        for total in TOTALS
    ]
    iso_out = args.output_dir / "two_layer_iso.csv"
    write_sweep_csv(slices, str(iso_out))
    argmax = {
        repr(total): s.metadata.get("argmax_fraction")
        for total, s in zip(TOTALS, slices)
    }

    for out in (surface_out, iso_out):
        manifest = run_manifest(
            ["two_layer_density.py"], str(config_path), None,
            [str(surface_out), str(iso_out)], started,
        )
        manifest["argmax_fraction"] = argmax
        with open(f"{out}.manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2)
    print(f"{surface_out}\n{iso_out}  ({time.perf_counter() - started:.1f}s)")


if __name__ == "__main__":
    main()
