"""Command-line interface: analyze (closed-form engine), simulate (Monte
Carlo), sweep (grids and iso-density slices to CSV), bound (density upper
bounds).

Exit codes: 0 success, 2 configuration or flag error, 3 numerical
non-convergence, 4 unsupported case (density bound with non-Rayleigh shapes).

Configs are YAML with linear units; the target SINR may be given in dB with
the beta_db key instead of beta.  Every output file is accompanied by a
<output>.manifest.json recording the config hash, command line, seed and
duration; stdout-only runs embed the manifest in the printed JSON.
"""

import argparse
import csv
import hashlib
import json
import sys
import time

import yaml

from . import __version__
from .analysis import (
    UnsupportedCaseError,
    association_probability,
    conditional_stp,
    density_upper_bound,
    link_classes,
    stp_by_class,
)
from .model import ChannelParams, LayerSpec, NetworkSpec
from .montecarlo import SimConfig, count_empty, run_trials, stp_from_outcomes
from .quadrature import ConvergenceError, QuadSpec
from .sweep import (
    GridSpec,
    SweepResult,
    column_name,
    iso_total_density,
    sweep_1d,
    sweep_2d,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_UNSUPPORTED = 4

# conditional-STP spot distances reported by analyze, as multiples of each
# layer's altitude (floored at 1 m for terrestrial layers)
SPOT_MULTIPLIERS = (1.0, 1.5, 3.0)


class ConfigError(Exception):
    pass


def _require_mapping(node, where):
    if not isinstance(node, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(node).__name__}")
    return node


def _numeric(node, where, key, default=None):
    if key not in node:
        if default is not None:
            return default
        raise ConfigError(f"{where}: missing required key {key!r}")
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
    return value


def load_network(path: str) -> NetworkSpec:
    """Parse and validate a YAML network config."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f": line {mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"{path}{line}: {getattr(exc, 'problem', exc)}") from exc

    root = _require_mapping(raw, path)
    layer_nodes = root.get("layers")
    if not isinstance(layer_nodes, list) or not layer_nodes:
        raise ConfigError(f"{path}: layers: expected a nonempty list")
    layers = []
    for i, node in enumerate(layer_nodes):
        where = f"{path}: layers[{i}]"
        node = _require_mapping(node, where)
        try:
            layers.append(LayerSpec(
                density=_numeric(node, where, "density"),
                altitude=_numeric(node, where, "altitude"),
                power=_numeric(node, where, "power"),
            ))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc

    where = f"{path}: channel"
    ch = _require_mapping(root.get("channel"), where)
    if "beta" in ch and "beta_db" in ch:
        raise ConfigError(f"{where}: give either beta or beta_db, not both")
    if "beta_db" in ch:
        beta = 10.0 ** (_numeric(ch, where, "beta_db") / 10.0)
    else:
        beta = _numeric(ch, where, "beta")
    m_los = ch.get("m_los", 1)
    m_nlos = ch.get("m_nlos", 1)
    for name, m in (("m_los", m_los), ("m_nlos", m_nlos)):
        if isinstance(m, bool) or not isinstance(m, int):
            raise ConfigError(f"{where}.{name}: must be a positive integer, got {m!r}")
    try:
        channel = ChannelParams(
            a=_numeric(ch, where, "a"),
            b=_numeric(ch, where, "b"),
            alpha_los=_numeric(ch, where, "alpha_los"),
            alpha_nlos=_numeric(ch, where, "alpha_nlos"),
            m_los=m_los,
            m_nlos=m_nlos,
            beta=beta,
            noise=_numeric(ch, where, "noise", default=0.0),
            fixed_los_prob=ch.get("fixed_los_prob"),
        )
        return NetworkSpec(layers=tuple(layers), channel=channel)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _config_sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def run_manifest(command, config_path, seed, outputs, started) -> dict:
    """Reproducibility record written alongside every output file."""
    return {
        "command": list(command),
        "config_sha256": _config_sha256(config_path),
        "seed": seed,
        "outputs": list(outputs),
        "duration_s": round(time.perf_counter() - started, 3),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "version": __version__,
    }


def _emit_json(result: dict, output: str | None, manifest: dict):
    if output:
        with open(output, "w") as fh:
            json.dump(result, fh, indent=2)
            fh.write("\n")
        with open(output + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    else:
        print(json.dumps({**result, "manifest": manifest}, indent=2))


def _class_key(link) -> str:
    return f"layer{link.layer + 1}_{link.env.value}"


def cmd_analyze(args, argv) -> int:
    started = time.perf_counter()
    network = load_network(args.config)
    quad = QuadSpec(rel_tol=args.rel_tol)
    parts = stp_by_class(network, quad)
    table = association_probability(network, quad)
    spots = {}
    for link in link_classes(network):
        base = max(network.layers[link.layer].altitude, 1.0)
        spots[_class_key(link)] = {
            repr(base * mult): conditional_stp(network, link, base * mult, quad)
            for mult in SPOT_MULTIPLIERS
        }
    result = {
        "stp": min(1.0, max(0.0, sum(r.value for r in parts.values()))),
        "stp_error": sum(r.error for r in parts.values()),
        "stp_by_class": {_class_key(l): r.value for l, r in parts.items()},
        "association": {_class_key(l): p for l, p in table.items()},
        "conditional_stp": spots,
        "params": _network_params(network),
    }
    outputs = [args.output] if args.output else []
    _emit_json(result, args.output, run_manifest(argv, args.config, None, outputs, started))
    return EXIT_OK


def _network_params(network: NetworkSpec) -> dict:
    from .sweep import _network_dict

    return _network_dict(network)


def cmd_simulate(args, argv) -> int:
    started = time.perf_counter()
    network = load_network(args.config)
    if args.trials < 100:
        raise ConfigError(f"--trials must be at least 100, got {args.trials}")
    simcfg = SimConfig(
        trials=args.trials,
        seed=args.seed,
        window_radius=args.window_radius,
        tail_compensation=not args.no_tail_compensation,
    )
    outcomes = run_trials(network, simcfg, workers=args.threads)
    est = stp_from_outcomes(outcomes)
    result = {
        "stp": {"mean": est.mean, "stderr": est.stderr, "trials": est.trials},
        "empty_windows": count_empty(outcomes),
        "simconfig": {
            "trials": simcfg.trials,
            "seed": simcfg.seed,
            "window_radius": simcfg.window_radius,
            "tail_compensation": simcfg.tail_compensation,
        },
    }
    outputs = [args.output] if args.output else []
    _emit_json(result, args.output,
               run_manifest(argv, args.config, args.seed, outputs, started))
    return EXIT_OK


def parse_grid(text: str) -> GridSpec:
    """Grid flag syntax: target=lo:hi:count:lin|log or target=v1,v2,..."""
    if "=" not in text:
        raise ConfigError(f"--grid {text!r}: expected target=<values>")
    target, _, spec = text.partition("=")
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 4:
                raise ConfigError(
                    f"--grid {text!r}: range form is target=lo:hi:count:lin|log"
                )
            lo, hi, count, scale = float(parts[0]), float(parts[1]), int(parts[2]), parts[3]
            if scale == "lin":
                return GridSpec.linear(target, lo, hi, count)
            if scale == "log":
                return GridSpec.log(target, lo, hi, count)
            raise ConfigError(f"--grid {text!r}: scale must be lin or log")
        return GridSpec.explicit(target, [float(v) for v in spec.split(",")])
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"--grid {text!r}: {exc}") from exc


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def _csv_header(result: SweepResult) -> list[str]:
    engines = result.metadata.get("engines", [])
    if "total_density" in result.metadata:
        header = ["lambda_total", "fraction", "lambda1", "lambda2"]
    else:
        header = [column_name(g.target) for g in result.axes]
    if "analytic" in engines:
        header.append("stp_analytic")
    if "montecarlo" in engines:
        header += ["stp_mc", "stp_mc_stderr"]
    header.append("error")
    return header


def _csv_rows(result: SweepResult):
    engines = result.metadata.get("engines", [])
    iso = "total_density" in result.metadata
    for p in result.points:
        if iso:
            row = [
                _fmt(result.metadata["total_density"]),
                _fmt(p.values["fraction"]),
                _fmt(p.values["layers.0.density"]),
                _fmt(p.values["layers.1.density"]),
            ]
        else:
            row = [_fmt(p.values[g.target]) for g in result.axes]
        if "analytic" in engines:
            row.append(_fmt(p.analytic_stp))
        if "montecarlo" in engines:
            row += [_fmt(p.mc_mean), _fmt(p.mc_stderr)]
        # sanitized so rows never need quoting and strict readers stay simple
        row.append(p.error.replace(",", ";").replace("\n", " ") if p.error else "")
        yield row


def write_sweep_csv(results, path: str) -> int:
    """Write one row per grid point; returns the number of per-point errors.

    Header layout: parameter columns (figure notation: h1, lambda2, ...),
    then stp_analytic, then stp_mc and stp_mc_stderr, then error.  Engine
    columns appear only when that engine ran; the error column is always
    last.  A list of results with identical headers (iso-density slices at
    several totals) is concatenated under one header.
    """
    if isinstance(results, SweepResult):
        results = [results]
    headers = {tuple(_csv_header(r)) for r in results}
    if len(headers) != 1:
        raise ValueError("cannot combine sweeps with different columns")
    warnings = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_csv_header(results[0]))
        for result in results:
            for point, row in zip(result.points, _csv_rows(result)):
                warnings += 1 if point.error else 0
                writer.writerow(row)
    return warnings


def cmd_sweep(args, argv) -> int:
    started = time.perf_counter()
    network = load_network(args.config)
    engines = tuple(e.strip() for e in args.engines.split(",") if e.strip())
    for e in engines:
        if e not in ("analytic", "montecarlo"):
            raise ConfigError(f"--engines: unknown engine {e!r}")
    if not engines:
        raise ConfigError("--engines: at least one engine required")
    simcfg = None
    if "montecarlo" in engines:
        if args.trials < 100:
            raise ConfigError(f"--trials must be at least 100, got {args.trials}")
        simcfg = SimConfig(
            trials=args.trials, seed=args.seed, window_radius=args.window_radius,
            tail_compensation=not args.no_tail_compensation,
        )
    quad = QuadSpec(rel_tol=args.rel_tol)

    if args.iso_total and args.grid:
        raise ConfigError("--iso-total cannot be combined with --grid")

    warnings = 0
    argmax = {}
    if args.iso_total:
        if len(network.layers) < 2:
            raise ConfigError("--iso-total needs a config with at least two layers")
        totals = [float(v) for v in args.iso_total.split(",")]
        if args.fractions < 2:
            raise ConfigError("--fractions must be at least 2")
        fractions = [i / (args.fractions - 1) for i in range(args.fractions)]
        results = []
        for total in totals:
            result = iso_total_density(
                network, total, fractions, engines, simcfg, quad, args.threads
            )
            results.append(result)
            if "argmax_fraction" in result.metadata:
                argmax[repr(total)] = result.metadata["argmax_fraction"]
        warnings += write_sweep_csv(results, args.output)
    else:
        grids = [parse_grid(g) for g in (args.grid or [])]
        if len(grids) == 1:
            result = sweep_1d(network, grids[0], engines, simcfg, quad, args.threads)
        elif len(grids) == 2:
            result = sweep_2d(network, grids[0], grids[1], engines, simcfg, quad,
                              args.threads)
        else:
            raise ConfigError("sweep needs one or two --grid flags (or --iso-total)")
        warnings += write_sweep_csv(result, args.output)

    manifest = run_manifest(argv, args.config, args.seed, [args.output], started)
    manifest["warnings"] = warnings
    if argmax:
        manifest["argmax_fraction"] = argmax
    with open(args.output + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    if warnings:
        print(f"warning: {warnings} grid point(s) failed; see error column",
              file=sys.stderr)
    return EXIT_OK


def cmd_bound(args, argv) -> int:
    started = time.perf_counter()
    network = load_network(args.config)
    per_layer = {}
    for j, lay in enumerate(network.layers):
        if lay.altitude > 0.0:
            per_layer[f"layer{j + 1}"] = density_upper_bound(lay, network.channel)
    if not per_layer:
        raise ConfigError("no aerial layers (altitude > 0) to bound")
    result = {
        "density_bound_per_layer": per_layer,
        "density_bound_total": sum(per_layer.values()),
    }
    outputs = [args.output] if args.output else []
    _emit_json(result, args.output,
               run_manifest(argv, args.config, None, outputs, started))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavstp",
        description="Analytic and Monte Carlo success-probability engine "
                    "for multi-layer aerial networks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, output_required=False):
        p.add_argument("--config", required=True, help="YAML network config")
        p.add_argument("--output", required=output_required,
                       help="output path" + ("" if output_required else " (default: stdout)"))

    p = sub.add_parser("analyze", help="closed-form STP, association, spot values")
    add_common(p)
    p.add_argument("--rel-tol", type=float, default=1e-8,
                   help="quadrature relative tolerance (default 1e-8)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo STP estimate")
    add_common(p)
    p.add_argument("--trials", type=int, default=10000, help="trial count (>= 100)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-radius", type=float, default=5000.0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-tail-compensation", action="store_true",
                   help="disable the deterministic far-field interference term")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="grid sweeps to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True, help="CSV output path")
    p.add_argument("--grid", action="append",
                   help="target=lo:hi:count:lin|log or target=v1,v2,... "
                        "(repeat for a 2-D sweep)")
    p.add_argument("--iso-total",
                   help="comma-separated total densities for two-layer "
                        "iso-density slices")
    p.add_argument("--fractions", type=int, default=21,
                   help="fraction grid size for --iso-total (default 21)")
    p.add_argument("--engines", default="analytic",
                   help="comma-separated: analytic,montecarlo")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-radius", type=float, default=5000.0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-tail-compensation", action="store_true")
    p.add_argument("--rel-tol", type=float, default=1e-6,
                   help="quadrature relative tolerance (default 1e-6)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bound", help="closed-form density upper bounds")
    add_common(p)
    p.set_defaults(func=cmd_bound)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, ["uavstp"] + argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"error: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except UnsupportedCaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
