import math

import numpy as np
import pytest

from uavstp import (
    Environment,
    LayerSpec,
    LinkClass,
    NetworkSpec,
    SimConfig,
    conditional_laplace_derivs,
    estimate_association,
    estimate_stp,
    far_field_mean,
    los_probability,
    nearest_ccdf,
    run_trial,
    run_trials,
    sample_interference,
    sample_layer,
    total_stp,
    trial_rng,
)
from uavstp.montecarlo import count_empty, stp_from_outcomes

from conftest import single_layer, two_layer, urban_channel

LOS = Environment.LOS
NLOS = Environment.NLOS


class TestSampleLayer:
    def test_zero_density_is_empty(self, channel):
        lay = LayerSpec(0.0, 100.0, 1.0)
        sample = sample_layer(lay, channel, 5000.0, trial_rng(1, 0))
        assert len(sample) == 0

    def test_count_follows_poisson_moments(self, channel):
        lay = LayerSpec(1e-5, 100.0, 1.0)
        expected = 1e-5 * math.pi * 5000.0 ** 2  # about 785.4
        reps = 10000
        counts = np.array([
            len(sample_layer(lay, channel, 5000.0, trial_rng(11, i)))
            for i in range(reps)
        ])
        se_mean = math.sqrt(expected / reps)
        assert counts.mean() == pytest.approx(expected, abs=3.0 * se_mean)
        # Poisson: variance equals the mean (4 sigma of the variance estimate)
        se_var = expected * math.sqrt(2.0 / reps)
        assert counts.var() == pytest.approx(expected, abs=4.0 * se_var)

    def test_radii_uniform_on_disk(self, channel):
        lay = LayerSpec(1e-5, 0.0, 1.0)
        sample = sample_layer(lay, channel, 5000.0, trial_rng(5, 0))
        # squared radii of disk-uniform points are uniform on [0, R^2]
        u = (sample.radius / 5000.0) ** 2
        assert 0.0 < u.min() and u.max() < 1.0
        ks = np.abs(np.sort(u) - (np.arange(len(u)) + 0.5) / len(u)).max()
        assert ks < 1.63 / math.sqrt(len(u))  # 1% KS critical value

    def test_los_fraction_matches_model(self, channel):
        lay = LayerSpec(1e-5, 100.0, 1.0)
        rho_300 = los_probability(lay, channel, 300.0)
        hits = los = 0
        for i in range(400):
            sample = sample_layer(lay, channel, 5000.0, trial_rng(17, i))
            band = (sample.distance >= 290.0) & (sample.distance <= 310.0)
            hits += int(band.sum())
            los += int((band & sample.is_los).sum())
        freq = los / hits
        se = math.sqrt(rho_300 * (1.0 - rho_300) / hits)
        assert freq == pytest.approx(rho_300, abs=3.0 * se)

    def test_deterministic(self, channel):
        lay = LayerSpec(1e-5, 100.0, 1.0)
        a = sample_layer(lay, channel, 5000.0, trial_rng(3, 7))
        b = sample_layer(lay, channel, 5000.0, trial_rng(3, 7))
        assert np.array_equal(a.radius, b.radius)
        assert np.array_equal(a.gain, b.gain)

    def test_window_nesting_prefix(self, channel):
        # a realization in a smaller window is an exact prefix of the same
        # trial's realization in a larger window (couples window-size checks)
        lay = LayerSpec(1e-5, 100.0, 1.0)
        small = sample_layer(lay, channel, 5000.0, trial_rng(9, 4))
        large = sample_layer(lay, channel, 10000.0, trial_rng(9, 4))
        n = len(small)
        assert len(large) > n
        assert np.array_equal(small.radius, large.radius[:n])
        assert np.array_equal(small.is_los, large.is_los[:n])
        assert np.array_equal(small.gain, large.gain[:n])

    def test_nearest_distance_matches_void_probability(self, channel):
        # empirical CCDF of the nearest LoS node at one distance
        lay = LayerSpec(1e-5, 100.0, 1.0)
        net = NetworkSpec((lay,), channel)
        target = nearest_ccdf(net, LinkClass(0, LOS), 300.0)
        reps = 3000
        beyond = 0
        for i in range(reps):
            sample = sample_layer(lay, channel, 5000.0, trial_rng(23, i))
            los_dist = sample.distance[sample.is_los]
            if los_dist.size == 0 or los_dist.min() > 300.0:
                beyond += 1
        freq = beyond / reps
        se = math.sqrt(target * (1.0 - target) / reps)
        assert freq == pytest.approx(target, abs=3.0 * se)


class TestRunTrial:
    def test_lone_node_always_succeeds_without_compensation(self):
        channel = urban_channel(beta=1e9)
        lay = LayerSpec(1e-7, 100.0, 1.0)
        net = NetworkSpec((lay,), channel)
        cfg = SimConfig(trials=1, seed=0, window_radius=1000.0,
                        tail_compensation=False)
        seed = next(
            s for s in range(200)
            if len(sample_layer(lay, channel, 1000.0,
                                trial_rng(s, 0).spawn(1)[0])) == 1
        )
        outcome = run_trial(net, cfg, trial_rng(seed, 0))
        assert outcome.success
        assert outcome.sinr == math.inf

    def test_empty_window_is_failure(self, channel):
        net = NetworkSpec((LayerSpec(1e-9, 100.0, 1.0),), channel)
        cfg = SimConfig(trials=1, seed=0, window_radius=200.0)
        outcome = run_trial(net, cfg, trial_rng(0, 0))
        assert outcome.main_class is None
        assert not outcome.success
        assert outcome.sinr is None

    def test_noise_dominated_regime_fails(self):
        net = single_layer(noise=1e12)
        cfg = SimConfig(trials=50, seed=2)
        outcomes = run_trials(net, cfg)
        assert not any(o.success for o in outcomes)

    def test_outcome_fields(self, network):
        cfg = SimConfig(trials=1, seed=4)
        o = run_trial(network, cfg, trial_rng(4, 0))
        assert o.main_class.layer == 0
        assert o.main_distance >= 100.0
        assert o.sinr > 0.0


class TestEstimates:
    def test_deterministic_given_seed(self, network):
        cfg = SimConfig(trials=300, seed=123)
        assert estimate_stp(network, cfg) == estimate_stp(network, cfg)

    def test_worker_count_does_not_change_results(self, network):
        cfg = SimConfig(trials=240, seed=5)
        assert run_trials(network, cfg, workers=1) == run_trials(network, cfg, workers=8)

    def test_vanishing_target_sinr_always_succeeds(self):
        net = single_layer(beta=1e-12)
        est = estimate_stp(net, SimConfig(trials=300, seed=6))
        assert est.mean == 1.0

    def test_stderr_formula(self, network):
        est = estimate_stp(network, SimConfig(trials=400, seed=7))
        assert est.stderr == pytest.approx(
            math.sqrt(est.mean * (1.0 - est.mean) / 400.0))

    def test_empty_windows_reported(self, channel):
        net = NetworkSpec((LayerSpec(1e-9, 100.0, 1.0),), channel)
        outcomes = run_trials(net, SimConfig(trials=100, seed=8, window_radius=200.0))
        assert count_empty(outcomes) == 100
        assert stp_from_outcomes(outcomes).mean == 0.0

    def test_cross_engine_agreement(self, network):
        est = estimate_stp(network, SimConfig(trials=4000, seed=9))
        assert est.mean == pytest.approx(total_stp(network), abs=4.0 * est.stderr)

    def test_association_partition_single_layer(self, network):
        table = estimate_association(network, SimConfig(trials=2000, seed=10))
        total = sum(e.mean for e in table.values())
        assert total == pytest.approx(1.0, abs=1e-9)  # empty windows negligible

    def test_association_symmetry_identical_layers(self):
        net = two_layer(d1=3e-6, d2=3e-6, h1=150.0, h2=150.0)
        table = estimate_association(net, SimConfig(trials=3000, seed=11))
        layer0 = sum(e.mean for link, e in table.items() if link.layer == 0)
        se = math.sqrt(0.25 / 3000)
        assert layer0 == pytest.approx(0.5, abs=3.0 * se)


class TestFarField:
    def test_positive_and_decreasing_in_radius(self, network):
        m1 = far_field_mean(network, 5000.0)
        m2 = far_field_mean(network, 10000.0)
        assert 0.0 < m2 < m1

    def test_compensation_lowers_success(self, network):
        on = estimate_stp(network, SimConfig(trials=2000, seed=12))
        off = estimate_stp(
            network, SimConfig(trials=2000, seed=12, tail_compensation=False))
        assert on.mean < off.mean


class TestConditionalInterference:
    def test_matches_log_transform(self, network):
        # empirical mean of exp(-s I) against the product-form transform
        main = LinkClass(0, LOS)
        y = 150.0
        s = network.channel.beta * y ** network.channel.alpha_los
        cfg = SimConfig(trials=1, seed=13)
        reps = 3000
        draws = np.array([
            math.exp(-s * sample_interference(network, main, y, cfg, trial_rng(13, i)))
            for i in range(reps)
        ])
        target = conditional_laplace_derivs(network, main, y, s, 0).values[0]
        se = draws.std(ddof=1) / math.sqrt(reps)
        assert draws.mean() == pytest.approx(target, abs=4.0 * se)

    def test_window_must_cover_exclusion(self, network):
        cfg = SimConfig(trials=1, seed=14, window_radius=120.0)
        with pytest.raises(ValueError, match="window"):
            sample_interference(network, LinkClass(0, LOS), 200.0, cfg, trial_rng(0, 0))


class TestSimConfigValidation:
    def test_bounds(self):
        with pytest.raises(ValueError):
            SimConfig(trials=0)
        with pytest.raises(ValueError):
            SimConfig(trials=10, seed=-1)
        with pytest.raises(ValueError):
            SimConfig(trials=10, window_radius=0.0)
