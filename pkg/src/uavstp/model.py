"""Domain types and pointwise channel functions for multi-layer aerial networks.

Units are linear throughout: meters for distances and altitudes, watts for
transmit/noise power, nodes per square meter for densities.  The line-of-sight
probability follows the standard elevation-angle model for air-to-ground
links, whose environment constants (a, b) are calibrated with the elevation
angle measured in degrees.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Environment(Enum):
    """Propagation environment of a single air-to-ground link."""

    LOS = "los"
    NLOS = "nlos"


@dataclass(frozen=True)
class LayerSpec:
    """One network layer: transmitters of equal power at a common altitude.

    altitude == 0 describes a terrestrial layer; aerial layers have
    altitude > 0.
    """

    density: float   # nodes / m^2
    altitude: float  # m
    power: float     # W

    def __post_init__(self):
        if not self.density >= 0.0:
            raise ValueError(f"density must be >= 0, got {self.density}")
        if not self.altitude >= 0.0:
            raise ValueError(f"altitude must be >= 0, got {self.altitude}")
        if not self.power > 0.0:
            raise ValueError(f"power must be > 0, got {self.power}")


@dataclass(frozen=True)
class ChannelParams:
    """Channel model shared by all layers.

    a, b            LoS-probability environment constants (b is per degree).
    alpha_los/nlos  pathloss exponents; 2 < alpha_los <= alpha_nlos <= 6.
                    The strict lower bound keeps the interference integrals
                    on [r, inf) convergent.
    m_los/nlos      Nakagami shape parameters; positive integers.  m == 1 is
                    Rayleigh fading.
    beta            target SINR, linear.
    noise           noise power sigma^2 in watts.
    fixed_los_prob  test hook: when set, the LoS probability is this constant
                    for every link instead of the elevation-angle model.
    """

    a: float
    b: float
    alpha_los: float
    alpha_nlos: float
    m_los: int = 1
    m_nlos: int = 1
    beta: float = 1.0
    noise: float = 0.0
    fixed_los_prob: float | None = None

    def __post_init__(self):
        if not self.a > 0.0 or not self.b > 0.0:
            raise ValueError("environment constants a, b must be positive")
        if not self.alpha_los > 2.0:
            raise ValueError(
                f"alpha_los must exceed 2 (got {self.alpha_los}); the "
                "semi-infinite interference integrals diverge otherwise"
            )
        if not self.alpha_los <= self.alpha_nlos <= 6.0:
            raise ValueError(
                "pathloss exponents must satisfy alpha_los <= alpha_nlos <= 6"
            )
        for name in ("m_los", "m_nlos"):
            m = getattr(self, name)
            if not isinstance(m, (int, np.integer)) or m < 1:
                raise ValueError(f"{name} must be a positive integer, got {m!r}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not self.noise >= 0.0:
            raise ValueError(f"noise must be >= 0, got {self.noise}")
        if self.fixed_los_prob is not None and not 0.0 <= self.fixed_los_prob <= 1.0:
            raise ValueError("fixed_los_prob must lie in [0, 1]")

    def alpha(self, env: Environment) -> float:
        return self.alpha_los if env is Environment.LOS else self.alpha_nlos

    def m(self, env: Environment) -> int:
        return self.m_los if env is Environment.LOS else self.m_nlos


@dataclass(frozen=True)
class NetworkSpec:
    """A full network instance: ordered layers plus the shared channel."""

    layers: tuple[LayerSpec, ...]
    channel: ChannelParams

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValueError("network needs at least one layer")
        if not any(lay.density > 0.0 for lay in self.layers):
            raise ValueError("network needs at least one layer with positive density")


def _as_array(x):
    xs = np.asarray(x, dtype=float)
    return xs, xs.ndim == 0


def los_probability(layer: LayerSpec, channel: ChannelParams, x):
    """Probability that a link of distance x to a node of `layer` is LoS.

    x must satisfy x > 0 and x >= layer.altitude (the link cannot be shorter
    than the altitude).  Accepts scalars or arrays.
    """
    xs, scalar = _as_array(x)
    if np.any(xs <= 0.0):
        raise ValueError("link distance must be positive")
    if np.any(xs < layer.altitude):
        raise ValueError(
            f"link distance below layer altitude {layer.altitude}; "
            "elevation angle undefined"
        )
    if channel.fixed_los_prob is not None:
        rho = np.full_like(xs, channel.fixed_los_prob)
    else:
        ratio = np.minimum(layer.altitude / xs, 1.0)
        theta_deg = np.degrees(np.arcsin(ratio))
        rho = 1.0 / (1.0 + channel.a * np.exp(-channel.b * (theta_deg - channel.a)))
    return float(rho) if scalar else rho


def env_probability(layer: LayerSpec, channel: ChannelParams, env: Environment, x):
    """Probability that a link of distance x is in the given environment."""
    rho = los_probability(layer, channel, x)
    return rho if env is Environment.LOS else 1.0 - rho


def radial_intensity(layer: LayerSpec, channel: ChannelParams, env: Environment, x):
    """Intensity (nodes per meter of link distance) of the env-thinned layer.

    Equals 2*pi*x*density*env_probability(x) for x >= altitude and 0 below:
    callers integrate from the altitude upward and the clamp keeps lower
    limits of the form max(r, altitude) trivial to handle.
    """
    xs, scalar = _as_array(x)
    out = np.zeros_like(xs)
    mask = (xs >= layer.altitude) & (xs > 0.0)
    if np.any(mask):
        xv = xs[mask]
        rho = env_probability(layer, channel, env, xv)
        out[mask] = 2.0 * np.pi * xv * layer.density * rho
    return float(out) if scalar else out


def avg_rx_power(power: float, x, alpha: float):
    """Fading-averaged received power over distance x: power * x**-alpha.

    The Gamma(m, 1/m) channel gains have unit mean for every shape m, so the
    average is pure pathloss.
    """
    xs, scalar = _as_array(x)
    if not power > 0.0:
        raise ValueError("power must be positive")
    if np.any(xs <= 0.0):
        raise ValueError("distance must be positive")
    out = power * xs ** (-alpha)
    return float(out) if scalar else out


def sample_fading(env: Environment, channel: ChannelParams, rng: np.random.Generator,
                  size=None):
    """Draw Nakagami-m power gains: Gamma(shape=m, scale=1/m), mean 1, var 1/m."""
    m = channel.m(env)
    return rng.gamma(shape=m, scale=1.0 / m, size=size)
