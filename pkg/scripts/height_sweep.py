"""STP versus layer altitude for the single-layer network, m_los in {1, 3}.

Writes results/height_m1.csv and results/height_m3.csv (analytic plus Monte
Carlo columns) with manifests.  Feed both CSVs to the curves figure script.
"""
import argparse
import json
import time
from pathlib import Path

from uavstp import GridSpec, QuadSpec, SimConfig, sweep_1d
from uavstp.cli import load_network, run_manifest, write_sweep_csv

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--output-dir", default=ROOT / "results", type=Path)
    ap.add_argument("--points", type=int, default=12, help="altitude grid size")
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=20240501)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    args.output_dir.mkdir(parents=True, exist_ok=True)

    grid = GridSpec.log("layers.0.altitude", 25.0, 500.0, args.points)
    simcfg = SimConfig(trials=args.trials, seed=args.seed)
    quad = QuadSpec(rel_tol=1e-6, abs_tol=1e-10)

    for tag, config in (("m1", "single_layer.yaml"),
                        ("m3", "single_layer_m3.yaml")):
        started = time.perf_counter()
        config_path = ROOT / "configs" / config
        network = load_network(str(config_path))
        result = sweep_1d(network, grid, ("analytic", "montecarlo"),
                          simcfg, quad, workers=args.threads)
        out = args.output_dir / f"height_{tag}.csv"
        write_sweep_csv(result, str(out))
        manifest = run_manifest(
            ["height_sweep.py", tag], str(config_path), args.seed,
            [str(out)], started,
        )
        with open(f"{out}.manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2)
        print(f"{out}  ({time.perf_counter() - started:.1f}s)")


if __name__ == "__main__":
    main()
