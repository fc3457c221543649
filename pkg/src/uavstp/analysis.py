"""Analytic engine: distance distributions, association probabilities, the
interference Laplace transform with derivatives, conditional and network-wide
transmission success probability, and the closed-form density upper bound.

Every quantity is evaluated by nested adaptive quadrature; nothing is
truncated.  Outer integrals over the main-link distance run at the caller's
tolerance while nested integrals are tightened two orders further so the
outer adaptive rule never chases inner noise.

Rational kernels of the form 1 - (1 + z)**-m are evaluated in
cancellation-free form (z/(1+z), expm1/log1p); the naive form silently zeros
the slowly decaying interference tail once z drops below machine epsilon.
"""

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .model import ChannelParams, Environment, LayerSpec, NetworkSpec, radial_intensity, los_probability
from .quadrature import QuadResult, QuadSpec, integrate_finite, integrate_semi_infinite

DEFAULT_QUAD = QuadSpec()

# exp(-x) underflows to 0 well before x reaches this; used to short-circuit
# void-probability exponents that cannot influence any result.
_EXP_FLOOR = 745.0


class InconsistentResultError(ArithmeticError):
    """A probability came out of quadrature beyond [0, 1] by more than round-off."""


class UndefinedDistributionError(ValueError):
    """Conditional distribution requested for a class with zero association mass."""


class UnsupportedCaseError(ValueError):
    """The closed-form density bound only exists for Rayleigh shapes (m == 1)."""


@dataclass(frozen=True)
class LinkClass:
    """A (layer index, environment) pair: the unit over which association and
    success probability decompose."""

    layer: int
    env: Environment


@dataclass(frozen=True)
class AssociationTable:
    """Probability that the receiver associates with each link class."""

    entries: Mapping[LinkClass, float]

    def __getitem__(self, link: LinkClass) -> float:
        return self.entries[link]

    def items(self):
        return self.entries.items()

    def total(self) -> float:
        return sum(self.entries.values())

    def layer_total(self, layer: int) -> float:
        return sum(p for link, p in self.entries.items() if link.layer == layer)


@dataclass(frozen=True)
class LaplaceDerivatives:
    """values[n] is the n-th derivative of the conditional interference-plus-
    noise Laplace transform at the evaluation point; values[0] is the
    transform itself."""

    values: tuple[float, ...]


def link_classes(network: NetworkSpec) -> tuple[LinkClass, ...]:
    return tuple(
        LinkClass(j, env)
        for j in range(len(network.layers))
        for env in (Environment.LOS, Environment.NLOS)
    )


def _inner(quad: QuadSpec) -> QuadSpec:
    """Tolerance for integrals nested inside an integrand at tolerance `quad`."""
    return QuadSpec(
        rel_tol=max(quad.rel_tol * 1e-2, 1e-13),
        abs_tol=quad.abs_tol * 1e-2,
        max_subdivisions=quad.max_subdivisions,
    )


def _per_scalar(f: Callable[[float], float]) -> Callable:
    """Adapt a scalar-only integrand to the array contract of quadrature."""

    def wrapped(x):
        xs = np.atleast_1d(x)
        return np.array([f(float(v)) for v in xs])

    return wrapped


def _void_exponent(network: NetworkSpec, link: LinkClass, v: float,
                   quad: QuadSpec) -> float:
    """Integral of the class intensity over [altitude, v]; inf once it is so
    large that exp(-exponent) underflows anyway.

    Integrated in geometrically growing panels so enormous v (produced by the
    semi-infinite map) stay cheap.
    """
    lay = network.layers[link.layer]
    if v <= lay.altitude or lay.density == 0.0:
        return 0.0
    total = 0.0
    lo = lay.altitude
    while lo < v:
        hi = min(v, max(100.0, 8.0 * lo))
        total += integrate_finite(
            lambda x: radial_intensity(lay, network.channel, link.env, x),
            lo, hi, quad,
        ).value
        if total > _EXP_FLOOR:
            return math.inf
        lo = hi
    return total


def nearest_ccdf(network: NetworkSpec, link: LinkClass, v: float,
                 quad: QuadSpec | None = None) -> float:
    """P[nearest node of this class is farther than v] (void probability)."""
    quad = quad or DEFAULT_QUAD
    if v < 0.0:
        raise ValueError("distance must be nonnegative")
    exponent = _void_exponent(network, link, v, quad)
    return 0.0 if math.isinf(exponent) else math.exp(-exponent)


def nearest_pdf(network: NetworkSpec, link: LinkClass, v: float,
                quad: QuadSpec | None = None) -> float:
    """Density of the nearest-node distance for this class; 0 below altitude."""
    quad = quad or DEFAULT_QUAD
    if v < 0.0:
        raise ValueError("distance must be nonnegative")
    lay = network.layers[link.layer]
    if v < lay.altitude:
        return 0.0
    intensity = radial_intensity(lay, network.channel, link.env, v)
    if intensity == 0.0:
        return 0.0
    return intensity * nearest_ccdf(network, link, v, quad)


def exclusion_radius(network: NetworkSpec, main: LinkClass, other: LinkClass,
                     y: float) -> float:
    """Distance below which an `other`-class node would beat the main link's
    average received power when the main link has distance y."""
    ch = network.channel
    p_main = network.layers[main.layer].power
    p_other = network.layers[other.layer].power
    return (p_other * y ** ch.alpha(main.env) / p_main) ** (1.0 / ch.alpha(other.env))


def _unnormalized_mainlink_density(network: NetworkSpec, link: LinkClass,
                                   y: float, quad: QuadSpec) -> float:
    """nearest_pdf(y) times the probability no competing class beats it.

    Integrates to the association probability; dividing by it gives the
    main-link distance PDF.
    """
    f = nearest_pdf(network, link, y, quad)
    if f == 0.0:
        return 0.0
    exponent = 0.0
    for other in link_classes(network):
        if other == link:
            continue
        radius = exclusion_radius(network, link, other, y)
        exponent += _void_exponent(network, other, radius, quad)
        if math.isinf(exponent):
            return 0.0
    return f * math.exp(-exponent)


def _class_outer_integral(network: NetworkSpec, link: LinkClass, quad: QuadSpec,
                          weight: Callable[[float], float] | None) -> QuadResult:
    lay = network.layers[link.layer]
    if lay.density == 0.0:
        return QuadResult(0.0, 0.0)
    inner = _inner(quad)

    def point(y: float) -> float:
        g = _unnormalized_mainlink_density(network, link, y, inner)
        if g == 0.0 or weight is None:
            return g
        return g * weight(y)

    return integrate_semi_infinite(_per_scalar(point), lay.altitude, quad)


def association_probability(network: NetworkSpec,
                            quad: QuadSpec | None = None) -> AssociationTable:
    """Probability of associating with each (layer, environment) class.

    Entries sum to 1 whenever some layer has positive density (a transmitter
    exists almost surely in an infinite network).
    """
    quad = quad or DEFAULT_QUAD
    entries = {
        link: _class_outer_integral(network, link, quad, None).value
        for link in link_classes(network)
    }
    return AssociationTable(entries)


def mainlink_pdf(network: NetworkSpec, link: LinkClass, y: float,
                 quad: QuadSpec | None = None,
                 association: AssociationTable | None = None) -> float:
    """PDF of the main-link distance conditioned on associating with `link`.

    Pass a precomputed `association` table when evaluating many points; the
    table is recomputed per call otherwise.
    """
    quad = quad or DEFAULT_QUAD
    if association is None:
        association = association_probability(network, quad)
    mass = association[link]
    if mass <= 0.0:
        raise UndefinedDistributionError(
            f"association probability of {link} is zero; conditional "
            "distance distribution undefined"
        )
    return _unnormalized_mainlink_density(network, link, y, _inner(quad)) / mass


def _pochhammer(m: int, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= m + i
    return out


def log_laplace_derivs(network: NetworkSpec, main: LinkClass, other: LinkClass,
                       y: float, s: float, n_max: int = 0,
                       quad: QuadSpec | None = None) -> tuple[float, ...]:
    """Log of the conditional Laplace transform of `other`-class interference,
    and its first n_max derivatives in s.

    The conditioning is the association event: no `other` node closer than
    the exclusion radius.  Derivatives are taken under the integral sign, so
    each order is one additional quadrature rather than a finite difference.
    """
    quad = quad or DEFAULT_QUAD
    if s < 0.0:
        raise ValueError("transform argument must be nonnegative")
    ch = network.channel
    lay = network.layers[other.layer]
    if lay.density == 0.0 or (s == 0.0 and n_max == 0):
        return (0.0,) * (n_max + 1)
    lower = max(exclusion_radius(network, main, other, y), lay.altitude)
    alpha = ch.alpha(other.env)
    m = ch.m(other.env)
    power = lay.power

    def integrand(order: int):
        def f(x):
            xs = np.asarray(x, dtype=float)
            rho = los_probability(lay, ch, xs)
            if other.env is Environment.NLOS:
                rho = 1.0 - rho
            c = power * xs ** (-alpha) / m
            if order == 0:
                return xs * rho * (-np.expm1(-m * np.log1p(c * s)))
            return xs * rho * _pochhammer(m, order) * c ** order * (1.0 + c * s) ** (-(m + order))
        return f

    out = []
    for order in range(n_max + 1):
        if order == 0 and s == 0.0:
            out.append(0.0)
            continue
        integral = integrate_semi_infinite(integrand(order), lower, quad).value
        sign = -1.0 if order == 0 else (-1.0) ** order
        out.append(sign * 2.0 * math.pi * lay.density * integral)
    return tuple(out)


def conditional_laplace_derivs(network: NetworkSpec, main: LinkClass, y: float,
                               s: float, n_max: int = 0,
                               quad: QuadSpec | None = None) -> LaplaceDerivatives:
    """Laplace transform of total interference plus noise, conditioned on the
    main link, with derivatives up to order n_max.

    The log-transform is the sum of the per-class logs plus -s*noise; the
    transform's own derivatives follow from the product-rule recursion for
    exp of a smooth function.
    """
    quad = quad or DEFAULT_QUAD
    eta = np.zeros(n_max + 1)
    eta[0] = -s * network.channel.noise
    if n_max >= 1:
        eta[1] = -network.channel.noise
    for other in link_classes(network):
        eta += np.array(log_laplace_derivs(network, main, other, y, s, n_max, quad))
    values = [math.exp(eta[0])]
    for n in range(1, n_max + 1):
        values.append(sum(
            math.comb(n - 1, i) * eta[n - i] * values[i] for i in range(n)
        ))
    return LaplaceDerivatives(tuple(values))


def conditional_stp(network: NetworkSpec, link: LinkClass, y: float,
                    quad: QuadSpec | None = None) -> float:
    """Success probability given the main link is `link` at distance y.

    For Nakagami shape m the Gamma CCDF turns into a degree-(m-1) sum of
    scaled transform derivatives evaluated at s* = m * beta * y**alpha / power.
    """
    quad = quad or DEFAULT_QUAD
    ch = network.channel
    lay = network.layers[link.layer]
    if y < lay.altitude:
        raise ValueError("main-link distance cannot be below the layer altitude")
    m = ch.m(link.env)
    s_star = m * ch.beta * y ** ch.alpha(link.env) / lay.power
    derivs = conditional_laplace_derivs(network, link, y, s_star, m - 1, quad)
    p = sum(
        (-s_star) ** n / math.factorial(n) * derivs.values[n] for n in range(m)
    )
    if not -1e-9 <= p <= 1.0 + 1e-9:
        raise InconsistentResultError(
            f"conditional success probability {p!r} outside [0, 1] beyond round-off"
        )
    return min(1.0, max(0.0, p))


def stp_by_class(network: NetworkSpec,
                 quad: QuadSpec | None = None) -> dict[LinkClass, QuadResult]:
    """Per-class contribution to the network success probability.

    Each contribution integrates conditional_stp against the unnormalized
    main-link density (the association normalization cancels, so it is never
    divided out).
    """
    quad = quad or DEFAULT_QUAD
    inner = _inner(quad)
    out = {}
    for link in link_classes(network):
        out[link] = _class_outer_integral(
            network, link, quad,
            weight=lambda y, _link=link: conditional_stp(network, _link, y, inner),
        )
    return out


def total_stp(network: NetworkSpec, quad: QuadSpec | None = None) -> float:
    """Network-wide successful-transmission probability."""
    contributions = stp_by_class(network, quad)
    total = sum(r.value for r in contributions.values())
    if not -1e-9 <= total <= 1.0 + 1e-9:
        raise InconsistentResultError(f"total STP {total!r} outside [0, 1]")
    return min(1.0, max(0.0, total))


def epsilon(layer: LayerSpec, channel: ChannelParams, s: float,
            quad: QuadSpec | None = None) -> float:
    """Effective interference cross-section (m^2) of one layer at transform
    argument s; drives the closed-form density bound.

    Nonnegative, zero at s = 0, increasing in s.  Convergence of the tail
    needs alpha_los > 2, which ChannelParams already enforces.
    """
    quad = quad or DEFAULT_QUAD
    if s < 0.0:
        raise ValueError("transform argument must be nonnegative")
    if s == 0.0:
        return 0.0

    def f(x):
        xs = np.asarray(x, dtype=float)
        rho = los_probability(layer, channel, xs)
        z_los = s * layer.power * xs ** (-channel.alpha_los)
        z_nlos = s * layer.power * xs ** (-channel.alpha_nlos)
        return xs * (rho * z_los / (1.0 + z_los) + (1.0 - rho) * z_nlos / (1.0 + z_nlos))

    return integrate_semi_infinite(f, layer.altitude, quad).value


def density_upper_bound(layer: LayerSpec, channel: ChannelParams,
                        quad: QuadSpec | None = None) -> float:
    """Upper bound on the layer density that can maximize network STP.

    Only proven for Rayleigh fading on both environments (m == 1); other
    shapes raise UnsupportedCaseError.  A terrestrial layer (altitude 0) has
    transform argument 0 and hence an unbounded (vacuous) bound.
    """
    quad = quad or DEFAULT_QUAD
    if channel.m_los != 1 or channel.m_nlos != 1:
        raise UnsupportedCaseError(
            "density bound requires Rayleigh shapes m_los == m_nlos == 1"
        )
    s_star = channel.beta * layer.altitude ** channel.alpha_los / layer.power
    eps = epsilon(layer, channel, s_star, quad)
    if eps == 0.0:
        return math.inf
    return 1.0 / (2.0 * math.pi * eps)


def phi(network: NetworkSpec, main: LinkClass, other_layer: int, y: float,
        s: float, quad: QuadSpec | None = None) -> float:
    """Exclusion-plus-interference cross-section (m^2) of `other_layer`
    against a main link at distance y, at transform argument s.

    Density-independent, nondecreasing in both y and s; at the corner
    y = altitude, s = s*(altitude) of the layer's own LoS class it collapses
    to epsilon of that layer.
    """
    quad = quad or DEFAULT_QUAD
    ch = network.channel
    lay = network.layers[other_layer]
    total = 0.0
    for env in (Environment.LOS, Environment.NLOS):
        other = LinkClass(other_layer, env)
        lower = max(exclusion_radius(network, main, other, y), lay.altitude)
        alpha = ch.alpha(env)

        def rho(x):
            xs = np.asarray(x, dtype=float)
            r = los_probability(lay, ch, xs)
            return r if env is Environment.LOS else 1.0 - r

        if lower > lay.altitude:
            total += integrate_finite(
                lambda x: np.asarray(x) * rho(x), lay.altitude, lower, quad
            ).value

        def tail(x):
            xs = np.asarray(x, dtype=float)
            z = s * lay.power * xs ** (-alpha)
            return xs * rho(xs) * z / (1.0 + z)

        if s > 0.0:
            total += integrate_semi_infinite(tail, lower, quad).value
    return total
