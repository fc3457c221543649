"""Grid evaluation over network parameters: 1-D and 2-D sweeps with the
analytic and Monte Carlo engines, grid-search density optimization against
the closed-form bound, and iso-total-density slices for two-layer networks.

Analytic columns are bit-reproducible; Monte Carlo columns are reproducible
given (seed, grid) because each grid point derives its own seed from the run
seed and the point index.
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from . import __version__ as _version
from .analysis import UnsupportedCaseError, density_upper_bound, total_stp
from .model import NetworkSpec
from .montecarlo import SimConfig, estimate_stp
from .quadrature import ConvergenceError, QuadSpec

ENGINES = ("analytic", "montecarlo")

# grid targets: "layers.<i>.density|altitude|power" or "channel.beta";
# "fraction" is reserved for iso-total-density slices.
_LAYER_FIELDS = ("density", "altitude", "power")


@dataclass(frozen=True)
class GridSpec:
    """One swept parameter and its values.

    Build with linear(), log() (count >= 2, log needs min > 0) or an explicit
    value list (any nonzero length).
    """

    target: str
    values: tuple[float, ...]
    scale: str = "linear"

    def __post_init__(self):
        _parse_target(self.target)
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("grid needs at least one value")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"unknown grid scale {self.scale!r}")

    @classmethod
    def linear(cls, target: str, lo: float, hi: float, count: int) -> "GridSpec":
        if count < 2:
            raise ValueError("range grids need count >= 2")
        return cls(target, tuple(np.linspace(lo, hi, count)), "linear")

    @classmethod
    def log(cls, target: str, lo: float, hi: float, count: int) -> "GridSpec":
        if count < 2:
            raise ValueError("range grids need count >= 2")
        if not lo > 0.0:
            raise ValueError("log grids need min > 0")
        return cls(target, tuple(np.geomspace(lo, hi, count)), "log")

    @classmethod
    def explicit(cls, target: str, values) -> "GridSpec":
        return cls(target, tuple(values), "linear")

    def column_name(self) -> str:
        return column_name(self.target)


def _parse_target(target: str):
    if target == "channel.beta" or target == "fraction":
        return target
    parts = target.split(".")
    if len(parts) == 3 and parts[0] == "layers" and parts[2] in _LAYER_FIELDS:
        try:
            int(parts[1])
        except ValueError:
            raise ValueError(f"bad layer index in grid target {target!r}") from None
        return target
    raise ValueError(
        f"unknown grid target {target!r}; expected layers.<i>.<density|"
        f"altitude|power>, channel.beta or fraction"
    )


def column_name(target: str) -> str:
    """CSV column for a grid target, in 1-based figure notation (h1, lambda2)."""
    if target == "channel.beta":
        return "beta"
    if target == "fraction":
        return "fraction"
    _, idx, fieldname = target.split(".")
    prefix = {"density": "lambda", "altitude": "h", "power": "P"}[fieldname]
    return f"{prefix}{int(idx) + 1}"


def apply_value(network: NetworkSpec, target: str, value: float) -> NetworkSpec:
    """New NetworkSpec with one parameter replaced."""
    if target == "channel.beta":
        return replace(network, channel=replace(network.channel, beta=value))
    if target == "fraction":
        raise ValueError("fraction is only valid inside iso_total_density")
    _, idx, fieldname = target.split(".")
    idx = int(idx)
    if not 0 <= idx < len(network.layers):
        raise ValueError(f"layer index {idx} out of range")
    layers = list(network.layers)
    layers[idx] = replace(layers[idx], **{fieldname: value})
    return replace(network, layers=tuple(layers))


@dataclass
class SweepPoint:
    """One grid point.  Engine fields stay None when that engine did not run;
    error holds the failure message when an engine failed at this point."""

    index: int
    values: dict
    analytic_stp: float | None = None
    analytic_error: float | None = None
    mc_mean: float | None = None
    mc_stderr: float | None = None
    bound: float | None = None
    error: str | None = None


@dataclass
class SweepResult:
    axes: tuple[GridSpec, ...]
    points: list[SweepPoint]
    metadata: dict

    def to_dict(self) -> dict:
        return {
            "axes": [
                {"target": g.target, "values": list(g.values), "scale": g.scale}
                for g in self.axes
            ],
            "points": [
                {
                    "index": p.index,
                    "values": p.values,
                    "analytic_stp": p.analytic_stp,
                    "analytic_error": p.analytic_error,
                    "mc_mean": p.mc_mean,
                    "mc_stderr": p.mc_stderr,
                    "bound": p.bound,
                    "error": p.error,
                }
                for p in self.points
            ],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepResult":
        axes = tuple(
            GridSpec(a["target"], tuple(a["values"]), a["scale"])
            for a in data["axes"]
        )
        points = [
            SweepPoint(
                index=p["index"],
                values=dict(p["values"]),
                analytic_stp=p["analytic_stp"],
                analytic_error=p["analytic_error"],
                mc_mean=p["mc_mean"],
                mc_stderr=p["mc_stderr"],
                bound=p["bound"],
                error=p["error"],
            )
            for p in data["points"]
        ]
        return cls(axes=axes, points=points, metadata=dict(data["metadata"]))


def _network_dict(network: NetworkSpec) -> dict:
    return {
        "layers": [
            {"density": l.density, "altitude": l.altitude, "power": l.power}
            for l in network.layers
        ],
        "channel": {
            "a": network.channel.a,
            "b": network.channel.b,
            "alpha_los": network.channel.alpha_los,
            "alpha_nlos": network.channel.alpha_nlos,
            "m_los": network.channel.m_los,
            "m_nlos": network.channel.m_nlos,
            "beta": network.channel.beta,
            "noise": network.channel.noise,
            **(
                {"fixed_los_prob": network.channel.fixed_los_prob}
                if network.channel.fixed_los_prob is not None else {}
            ),
        },
    }


def _metadata(network: NetworkSpec, engines, simcfg: SimConfig | None) -> dict:
    meta = {
        "network": _network_dict(network),
        "engines": sorted(engines),
        "engine_version": _version,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if simcfg is not None:
        meta["simconfig"] = {
            "trials": simcfg.trials,
            "seed": simcfg.seed,
            "window_radius": simcfg.window_radius,
            "bin_width": simcfg.bin_width,
            "tail_compensation": simcfg.tail_compensation,
        }
    return meta


def point_seed(seed: int, index: int) -> int:
    """Per-point Monte Carlo seed derived from the run seed and point index."""
    return int(np.random.SeedSequence((seed, index)).generate_state(1)[0])


def _check_engines(engines):
    engines = tuple(engines)
    for e in engines:
        if e not in ENGINES:
            raise ValueError(f"unknown engine {e!r}; choose from {ENGINES}")
    if not engines:
        raise ValueError("at least one engine required")
    return engines


def _evaluate_point(point: SweepPoint, build_network, engines,
                    simcfg: SimConfig | None, quad: QuadSpec | None, workers: int):
    try:
        network = build_network()
        if "analytic" in engines:
            from .analysis import stp_by_class

            parts = stp_by_class(network, quad)
            point.analytic_stp = min(1.0, max(0.0, sum(r.value for r in parts.values())))
            point.analytic_error = sum(r.error for r in parts.values())
        if "montecarlo" in engines:
            cfg = replace(simcfg, seed=point_seed(simcfg.seed, point.index))
            est = estimate_stp(network, cfg, workers)
            point.mc_mean = est.mean
            point.mc_stderr = est.stderr
    except (ConvergenceError, ArithmeticError, ValueError) as exc:
        point.error = f"{type(exc).__name__}: {exc}"


def sweep_1d(network: NetworkSpec, grid: GridSpec, engines=("analytic",),
             simcfg: SimConfig | None = None, quad: QuadSpec | None = None,
             workers: int = 1) -> SweepResult:
    """Evaluate the requested engines along one parameter grid.

    Per-point engine failures are recorded in the point's error field and do
    not abort the sweep.
    """
    engines = _check_engines(engines)
    if "montecarlo" in engines and simcfg is None:
        raise ValueError("montecarlo engine needs a SimConfig")
    points = []
    for i, value in enumerate(grid.values):
        point = SweepPoint(index=i, values={grid.target: float(value)})
        _evaluate_point(point, lambda v=value: apply_value(network, grid.target, v),
                        engines, simcfg, quad, workers)
        points.append(point)
    return SweepResult((grid,), points, _metadata(network, engines, simcfg))


def sweep_2d(network: NetworkSpec, grid_a: GridSpec, grid_b: GridSpec,
             engines=("analytic",), simcfg: SimConfig | None = None,
             quad: QuadSpec | None = None, workers: int = 1) -> SweepResult:
    """Evaluate engines over the Cartesian product grid_a x grid_b
    (row-major: grid_a outer, grid_b inner)."""
    engines = _check_engines(engines)
    if "montecarlo" in engines and simcfg is None:
        raise ValueError("montecarlo engine needs a SimConfig")
    points = []
    for ia, va in enumerate(grid_a.values):
        for ib, vb in enumerate(grid_b.values):
            index = ia * len(grid_b.values) + ib
            point = SweepPoint(
                index=index,
                values={grid_a.target: float(va), grid_b.target: float(vb)},
            )
            _evaluate_point(
                point,
                lambda a=va, b=vb: apply_value(
                    apply_value(network, grid_a.target, a), grid_b.target, b),
                engines, simcfg, quad, workers,
            )
            points.append(point)
    return SweepResult((grid_a, grid_b), points, _metadata(network, engines, simcfg))


@dataclass
class OptimalDensity:
    """Grid-search optimum of one layer's density against the closed-form
    bound.  bound is None (with bound_supported False) for non-Rayleigh
    shapes; at_grid_edge flags argmax on the boundary of the search grid."""

    density: float
    stp: float
    bound: float | None
    bound_supported: bool
    bound_holds: bool | None
    at_grid_edge: bool
    densities: tuple[float, ...]
    stps: tuple[float, ...]


def optimal_density(network: NetworkSpec, layer: int, grid: GridSpec,
                    quad: QuadSpec | None = None) -> OptimalDensity:
    """Maximize analytic STP over a density grid for one layer and compare
    the argmax against the layer's density upper bound."""
    target = f"layers.{layer}.density"
    if grid.target != target:
        raise ValueError(f"grid target must be {target!r}, got {grid.target!r}")
    stps = tuple(
        total_stp(apply_value(network, target, v), quad) for v in grid.values
    )
    best = int(np.argmax(stps))
    try:
        bound = density_upper_bound(network.layers[layer], network.channel, quad)
        supported = True
        holds = grid.values[best] <= bound
    except UnsupportedCaseError:
        bound, supported, holds = None, False, None
    return OptimalDensity(
        density=grid.values[best],
        stp=stps[best],
        bound=bound,
        bound_supported=supported,
        bound_holds=holds,
        at_grid_edge=best in (0, len(grid.values) - 1),
        densities=grid.values,
        stps=stps,
    )


def iso_total_density(network: NetworkSpec, total: float, fractions,
                      engines=("analytic",), simcfg: SimConfig | None = None,
                      quad: QuadSpec | None = None, workers: int = 1) -> SweepResult:
    """Evaluate STP along the line density_1 = f*total, density_2 = (1-f)*total
    for the first two layers.  The argmax fraction of the analytic column is
    recorded in the metadata.
    """
    if len(network.layers) < 2:
        raise ValueError("iso-total-density slices need at least two layers")
    if not total > 0.0:
        raise ValueError("total density must be positive")
    engines = _check_engines(engines)
    if "montecarlo" in engines and simcfg is None:
        raise ValueError("montecarlo engine needs a SimConfig")
    fractions = tuple(float(f) for f in fractions)
    if any(not 0.0 <= f <= 1.0 for f in fractions):
        raise ValueError("fractions must lie in [0, 1]")

    points = []
    for i, f in enumerate(fractions):
        point = SweepPoint(
            index=i,
            values={
                "fraction": f,
                "layers.0.density": f * total,
                "layers.1.density": (1.0 - f) * total,
            },
        )
        _evaluate_point(
            point,
            lambda frac=f: apply_value(
                apply_value(network, "layers.0.density", frac * total),
                "layers.1.density", (1.0 - frac) * total),
            engines, simcfg, quad, workers,
        )
        points.append(point)

    grid = GridSpec("fraction", fractions)
    meta = _metadata(network, engines, simcfg)
    meta["total_density"] = total
    evaluated = [
        (p.analytic_stp, p.values["fraction"])
        for p in points if p.analytic_stp is not None
    ]
    if evaluated:
        meta["argmax_fraction"] = max(evaluated)[1]
    return SweepResult((grid,), points, meta)
