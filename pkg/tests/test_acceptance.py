"""Acceptance suite: every release gate runs here at its stated tolerance and
prints one pass/fail line.  The heavy Monte Carlo runs (10^5 trials per
configuration) are shared across gates through session fixtures.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete; expect roughly ten minutes on two cores.
"""

import math

import numpy as np
import pytest

from uavstp import (
    Environment,
    GridSpec,
    LinkClass,
    QuadSpec,
    SimConfig,
    association_probability,
    conditional_laplace_derivs,
    conditional_stp,
    epsilon,
    integrate_finite,
    nearest_ccdf,
    optimal_density,
    phi,
    iso_total_density,
    run_trials,
    sample_interference,
    sample_layer,
    total_stp,
    trial_rng,
)
from uavstp.analysis import _per_scalar, _unnormalized_mainlink_density
from uavstp.montecarlo import association_from_outcomes, stp_from_outcomes

from conftest import single_layer, two_layer

LOS = Environment.LOS
TRIALS = 100_000
SEED = 7041
WORKERS = 2
HEIGHTS = (50.0, 100.0, 200.0, 400.0)
FAST = QuadSpec(rel_tol=1e-6, abs_tol=1e-10)


def report(name: str, ok: bool, detail: str):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} — {detail}")


@pytest.fixture(scope="session")
def reference_networks():
    return {h: single_layer(altitude=h) for h in HEIGHTS}


@pytest.fixture(scope="session")
def reference_outcomes(reference_networks):
    """10^5 trials per height at the default window; reused by several gates."""
    return {
        h: run_trials(net, SimConfig(trials=TRIALS, seed=SEED), workers=WORKERS)
        for h, net in reference_networks.items()
    }


@pytest.fixture(scope="session")
def analytic_stps(reference_networks):
    return {h: total_stp(net, FAST) for h, net in reference_networks.items()}


def test_criterion_1_cross_engine_agreement(reference_networks, reference_outcomes,
                                            analytic_stps):
    """Analytic and Monte Carlo STP agree within max(0.02, 3 stderr)."""
    lines = []
    ok = True
    for h in HEIGHTS:
        est = stp_from_outcomes(reference_outcomes[h])
        gap = abs(analytic_stps[h] - est.mean)
        tol = max(0.02, 3.0 * est.stderr)
        ok &= gap <= tol
        lines.append(f"h={h:.0f}: |{analytic_stps[h]:.4f}-{est.mean:.4f}|="
                     f"{gap:.4f}<={tol:.4f}")
    report("criterion 1 (cross-engine agreement)", ok, "; ".join(lines))
    assert ok, lines


def test_criterion_2_height_unimodality():
    """Analytic STP over 20 log-spaced altitudes has an interior maximum."""
    from uavstp import sweep_1d

    grid = GridSpec.log("layers.0.altitude", 25.0, 500.0, 20)
    result = sweep_1d(single_layer(), grid, ("analytic",), quad=FAST)
    stps = [p.analytic_stp for p in result.points]
    assert all(s is not None for s in stps)
    best = int(np.argmax(stps))
    ok = 0 < best < len(grid.values) - 1
    report("criterion 2 (height unimodality)", ok,
           f"argmax at h={grid.values[best]:.0f} (index {best} of 0..19), "
           f"stp={stps[best]:.4f}")
    assert ok, stps


def test_criterion_3_forced_los_monotone():
    """With the LoS probability pinned to 1, altitude only hurts."""
    heights = np.geomspace(25.0, 500.0, 20)
    stps = [
        total_stp(single_layer(altitude=h, fixed_los_prob=1.0), FAST)
        for h in heights
    ]
    ok = all(b <= a + 1e-9 for a, b in zip(stps, stps[1:]))
    report("criterion 3 (forced-LoS monotonicity)", ok,
           f"stp range {stps[0]:.4f} -> {stps[-1]:.6f}")
    assert ok, stps


def test_criterion_4_association(reference_networks, reference_outcomes):
    """Analytic association sums to 1 and matches the simulated frequencies."""
    lines = []
    ok = True
    for h in HEIGHTS:
        table = association_probability(reference_networks[h], FAST)
        total = table.total()
        ok &= abs(total - 1.0) <= 1e-6
        freqs = association_from_outcomes(reference_outcomes[h],
                                          reference_networks[h])
        worst = 0.0
        for link, est in freqs.items():
            gap = abs(table[link] - est.mean)
            margin = 3.0 * max(est.stderr, math.sqrt(table[link] / TRIALS))
            worst = max(worst, gap - margin)
            ok &= gap <= margin
        lines.append(f"h={h:.0f}: sum={total:.8f}, worst margin excess {worst:.2e}")
    report("criterion 4 (association)", ok, "; ".join(lines))
    assert ok, lines


def test_criterion_5_density_bound():
    """Grid-search optimal density respects the bound; both fall with height."""
    bounds, argmaxes = [], []
    ok = True
    for h in (100.0, 200.0, 300.0):
        net = single_layer(altitude=h)
        grid = GridSpec.log("layers.0.density", 1e-7, 10 ** -3.5, 15)
        opt = optimal_density(net, 0, grid, FAST)
        ok &= opt.bound_holds
        bounds.append(opt.bound)
        argmaxes.append(opt.density)
    ok &= bounds[0] > bounds[1] > bounds[2]
    report("criterion 5 (density bound)", ok,
           f"argmax={['%.2e' % a for a in argmaxes]}, "
           f"bound={['%.2e' % b for b in bounds]}")
    assert ok, (argmaxes, bounds)


def test_criterion_6_corner_identity():
    """Exclusion-plus-interference cross-section equals epsilon at the corner."""
    tight = QuadSpec(rel_tol=1e-11, abs_tol=0.0)
    cases = [
        dict(altitude=100.0, beta=0.7),
        dict(altitude=200.0, beta=0.7),
        dict(altitude=150.0, beta=2.0),
    ]
    rels = []
    ok = True
    for case in cases:
        net = single_layer(**case)
        lay = net.layers[0]
        s = net.channel.beta * lay.altitude ** net.channel.alpha_los
        lhs = phi(net, LinkClass(0, LOS), 0, lay.altitude, s, tight)
        rhs = epsilon(lay, net.channel, s, tight)
        rel = abs(lhs - rhs) / rhs
        rels.append(rel)
        ok &= rel <= 1e-8
    report("criterion 6 (corner identity)", ok,
           f"relative gaps {['%.1e' % r for r in rels]}")
    assert ok, rels


def test_criterion_7_laplace_oracle(reference_networks):
    """exp(log-transform) matches the empirical mean of exp(-s I); the
    transform is 1 at 0 and completely monotone through order 2."""
    net = reference_networks[100.0]
    main = LinkClass(0, LOS)
    cfg = SimConfig(trials=1, seed=SEED)
    lines = []
    ok = True
    for y in (120.0, 150.0, 250.0):
        s = net.channel.beta * y ** net.channel.alpha_los
        draws = np.empty(TRIALS)
        for i in range(TRIALS):
            draws[i] = math.exp(
                -s * sample_interference(net, main, y, cfg, trial_rng(SEED + 1, i)))
        target = conditional_laplace_derivs(net, main, y, s, 0).values[0]
        se = draws.std(ddof=1) / math.sqrt(TRIALS)
        gap = abs(draws.mean() - target)
        ok &= gap <= 3.0 * se
        lines.append(f"y={y:.0f}: |{draws.mean():.5f}-{target:.5f}|<=3*{se:.5f}")
    at_zero = conditional_laplace_derivs(net, main, 150.0, 0.0, 0).values[0]
    ok &= at_zero == 1.0
    for s in (1e4, 3e5, 2e6):
        l0, l1, l2 = conditional_laplace_derivs(net, main, 150.0, s, 2).values
        ok &= l0 > 0.0 and l1 <= 0.0 and l2 >= 0.0
    report("criterion 7 (interference transform oracle)", ok,
           "; ".join(lines) + f"; L(0)={at_zero}")
    assert ok, lines


def test_criterion_8_nakagami_derivative_path():
    """Shape-3 conditional STP matches binned simulation; the derivative
    recursion matches finite differences."""
    net = single_layer(m_los=3)
    main = LinkClass(0, LOS)
    y_spot, half_bin = 150.0, 1.0
    outcomes = run_trials(net, SimConfig(trials=TRIALS, seed=SEED + 2),
                          workers=WORKERS)
    in_bin = [
        o for o in outcomes
        if o.main_class == main and abs(o.main_distance - y_spot) <= half_bin
    ]
    freq = sum(o.success for o in in_bin) / len(in_bin)
    se = math.sqrt(freq * (1.0 - freq) / len(in_bin))
    analytic = conditional_stp(net, main, y_spot)
    ok = abs(analytic - freq) <= 3.0 * se

    s = net.channel.m_los * net.channel.beta * y_spot ** net.channel.alpha_los
    tight = QuadSpec(rel_tol=1e-12, abs_tol=0.0)
    derivs = conditional_laplace_derivs(net, main, y_spot, s, 2, tight)
    step = 1e-3 * s
    up = conditional_laplace_derivs(net, main, y_spot, s + step, 0, tight).values[0]
    down = conditional_laplace_derivs(net, main, y_spot, s - step, 0, tight).values[0]
    fd1 = (up - down) / (2.0 * step)
    fd2 = (up - 2.0 * derivs.values[0] + down) / step ** 2
    rel1 = abs(derivs.values[1] - fd1) / abs(fd1)
    rel2 = abs(derivs.values[2] - fd2) / abs(fd2)
    ok &= rel1 <= 1e-4 and rel2 <= 1e-4
    report("criterion 8 (shape-3 derivative path)", ok,
           f"binned |{analytic:.4f}-{freq:.4f}|<=3*{se:.4f} (n={len(in_bin)}); "
           f"derivative rel errors {rel1:.1e}, {rel2:.1e}")
    assert ok


def test_criterion_9_two_layer_regime_shift():
    """Iso-total-density argmax fraction moves from the high layer to the low
    layer as the total density grows."""
    net = two_layer()
    fractions = [i / 20 for i in range(21)]
    argmax = {}
    for total in (1e-6, 10 ** -5.3, 10 ** -4.6):
        result = iso_total_density(net, total, fractions, ("analytic",), quad=FAST)
        argmax[total] = result.metadata["argmax_fraction"]
    ok = (argmax[1e-6] <= 0.2
          and argmax[10 ** -4.6] >= 0.8
          and 0.0 < argmax[10 ** -5.3] < 1.0)
    report("criterion 9 (two-layer regime shift)", ok,
           f"argmax fractions {[f'{v:.2f}' for v in argmax.values()]} "
           f"at totals 1e-6, 10^-5.3, 10^-4.6")
    assert ok, argmax


def test_criterion_10_truncation_adequacy(reference_networks, reference_outcomes):
    """Doubling the window moves each estimate by less than one stderr."""
    lines = []
    ok = True
    for h in HEIGHTS:
        base = stp_from_outcomes(reference_outcomes[h])
        doubled = stp_from_outcomes(run_trials(
            reference_networks[h],
            SimConfig(trials=TRIALS, seed=SEED, window_radius=10000.0),
            workers=WORKERS,
        ))
        delta = abs(doubled.mean - base.mean)
        ok &= delta < base.stderr
        lines.append(f"h={h:.0f}: |Δ|={delta:.5f} < se={base.stderr:.5f}")
    report("criterion 10 (truncation adequacy)", ok, "; ".join(lines))
    assert ok, lines


# ---------------------------------------------------------------------------
# distribution-level agreement (supplementary gates backing the criteria)

def test_nearest_distance_ks(reference_networks):
    """Per-class empirical nearest-distance CCDF within KS 0.01 of the void
    formula."""
    net = reference_networks[100.0]
    lay = net.layers[0]
    reps = TRIALS
    nearest = {env: np.full(reps, np.inf) for env in Environment}
    for i in range(reps):
        sample = sample_layer(lay, net.channel, 5000.0, trial_rng(SEED + 3, i))
        for env, mask in ((Environment.LOS, sample.is_los),
                          (Environment.NLOS, ~sample.is_los)):
            dist = sample.distance[mask]
            if dist.size:
                nearest[env][i] = dist.min()
    lines = []
    ok = True
    for env, values in nearest.items():
        values.sort()
        idx = np.arange(249, reps, 250)
        link = LinkClass(0, env)
        cdf = np.array([1.0 - nearest_ccdf(net, link, v) for v in values[idx]])
        emp = (idx + 1) / reps
        ks = np.abs(emp - cdf).max()
        ok &= ks <= 0.01
        lines.append(f"{env.value}: KS={ks:.4f}")
    report("nearest-distance KS", ok,
           "; ".join(lines) + f" at {reps} realizations")
    assert ok, lines


def test_mainlink_distance_ks(reference_networks, reference_outcomes):
    """Main-link distances from the simulator match the analytic density."""
    net = reference_networks[100.0]
    link = LinkClass(0, LOS)
    dists = np.sort([
        o.main_distance for o in reference_outcomes[100.0] if o.main_class == link
    ])
    mass = association_probability(net, FAST)[link]
    # cumulative of the unnormalized density over a grid, then interpolate
    grid = np.geomspace(100.0, max(dists.max(), 1500.0), 200)
    inner = QuadSpec(rel_tol=1e-8, abs_tol=1e-12)
    panel = [0.0]
    for lo, hi in zip(grid[:-1], grid[1:]):
        panel.append(integrate_finite(
            _per_scalar(lambda v: _unnormalized_mainlink_density(net, link, v, inner)),
            lo, hi, inner,
        ).value)
    cdf_grid = np.cumsum(panel) / mass
    idx = np.arange(199, dists.size, 200)
    cdf = np.interp(dists[idx], grid, np.minimum(cdf_grid, 1.0))
    emp = (idx + 1) / dists.size
    ks = np.abs(emp - cdf).max()
    ok = ks <= 0.01
    report("main-link distance KS", ok, f"KS={ks:.4f} over {dists.size} samples")
    assert ok


def test_conditional_stp_binned_rayleigh(reference_networks, reference_outcomes):
    """Rayleigh conditional STP at 150 m matches the binned success rate."""
    net = reference_networks[100.0]
    link = LinkClass(0, LOS)
    in_bin = [
        o for o in reference_outcomes[100.0]
        if o.main_class == link and abs(o.main_distance - 150.0) <= 1.0
    ]
    freq = sum(o.success for o in in_bin) / len(in_bin)
    se = math.sqrt(freq * (1.0 - freq) / len(in_bin))
    analytic = conditional_stp(net, link, 150.0)
    ok = abs(analytic - freq) <= 3.0 * se
    report("binned conditional STP (Rayleigh)", ok,
           f"|{analytic:.4f}-{freq:.4f}|<=3*{se:.4f} (n={len(in_bin)})")
    assert ok
