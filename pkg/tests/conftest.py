import numpy as np
import pytest

from uavstp import ChannelParams, LayerSpec, NetworkSpec, QuadSpec

# urban environment constants used throughout the numerical experiments
URBAN_A = 12.4231
URBAN_B = 0.1202


def urban_channel(**overrides) -> ChannelParams:
    params = dict(
        a=URBAN_A, b=URBAN_B, alpha_los=2.5, alpha_nlos=3.5,
        m_los=1, m_nlos=1, beta=0.7, noise=0.0,
    )
    params.update(overrides)
    return ChannelParams(**params)


def single_layer(density=1e-5, altitude=100.0, power=1.0, **channel_overrides):
    return NetworkSpec(
        layers=(LayerSpec(density, altitude, power),),
        channel=urban_channel(**channel_overrides),
    )


def two_layer(d1=5e-6, d2=5e-6, h1=100.0, h2=200.0, **channel_overrides):
    return NetworkSpec(
        layers=(LayerSpec(d1, h1, 1.0), LayerSpec(d2, h2, 1.0)),
        channel=urban_channel(**channel_overrides),
    )


@pytest.fixture
def channel():
    return urban_channel()


@pytest.fixture
def network():
    """The reference single-layer configuration (density 1e-5, 100 m)."""
    return single_layer()


@pytest.fixture
def fast_quad():
    return QuadSpec(rel_tol=1e-6, abs_tol=1e-10)


def simpson(f, a, b, n):
    """Fixed-step composite Simpson rule; the brute-force oracle."""
    if n % 2:
        n += 1
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def simpson_panels(f, a, b, n_per_panel=200_000, ratio=8.0):
    """Composite Simpson over geometrically growing panels [a, b].

    Resolves integrands whose variation scale is proportional to x without
    needing absurd point counts on wide ranges.
    """
    total = 0.0
    lo = a
    while lo < b:
        hi = min(b, max(lo * ratio, lo + 100.0))
        total += simpson(f, lo, hi, n_per_panel)
        lo = hi
    return total
