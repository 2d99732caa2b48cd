import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ntrack import (FilterConfig, kf_init, kf_predict, kf_update,
                    pf_estimate, pf_init, pf_predict, pf_update)
from ntrack.errors import InvalidConfig, InvalidMeasurement, InvalidVelocity
from ntrack.filters import KalmanSW

CFG = FilterConfig()
NOISELESS = FilterConfig(process_sigma=0.0)


class TestPfInit:
    def test_zero_sigma_collapses_to_center(self):
        ps = pf_init((4.0, 7.0), NOISELESS, seed=0)
        assert np.all(ps.px == 4.0) and np.all(ps.py == 7.0)
        assert np.allclose(ps.weights, 1.0 / len(ps))

    def test_same_seed_identical(self):
        a = pf_init((1.0, 2.0), CFG, seed=42)
        b = pf_init((1.0, 2.0), CFG, seed=42)
        assert np.array_equal(a.px, b.px) and np.array_equal(a.py, b.py)

    def test_mean_near_center_over_seeds(self):
        # Monte-Carlo bound: |mean - center| < 3 sigma / sqrt(N) in most seeds
        bound = 3 * CFG.process_sigma / math.sqrt(CFG.n_particles)
        hits = 0
        for seed in range(100):
            ps = pf_init((50.0, -20.0), CFG, seed)
            ex, ey = pf_estimate(ps)
            if abs(ex - 50.0) < bound and abs(ey + 20.0) < bound:
                hits += 1
        assert hits >= 95


class TestPfPredict:
    def test_noiseless_shift(self):
        ps = pf_init((0.0, 0.0), NOISELESS, seed=1)
        shifted = pf_predict(ps, (3.0, -1.0), NOISELESS)
        assert np.all(shifted.px == 3.0) and np.all(shifted.py == -1.0)

    def test_zero_velocity_identity(self):
        ps = pf_init((2.0, 5.0), NOISELESS, seed=1)
        same = pf_predict(ps, (0.0, 0.0), NOISELESS)
        assert np.array_equal(same.px, ps.px) and np.array_equal(same.py, ps.py)

    def test_mean_displacement_matches_velocity(self):
        cfg = FilterConfig(n_particles=1000, process_sigma=2.0)
        ps = pf_init((0.0, 0.0), cfg, seed=0)
        before = pf_estimate(ps)
        after = pf_estimate(pf_predict(ps, (3.0, -1.0), cfg))
        assert after[0] - before[0] == pytest.approx(3.0, abs=0.1)
        assert after[1] - before[1] == pytest.approx(-1.0, abs=0.1)

    def test_rejects_non_finite(self):
        ps = pf_init((0.0, 0.0), CFG, seed=1)
        with pytest.raises(InvalidVelocity):
            pf_predict(ps, (float("nan"), 0.0), CFG)

    def test_source_set_unchanged(self):
        ps = pf_init((0.0, 0.0), CFG, seed=9)
        px_before = ps.px.copy()
        pf_predict(ps, (5.0, 5.0), CFG)
        assert np.array_equal(ps.px, px_before)


def _two_particle_set(weights=(0.5, 0.5)):
    ps = pf_init((0.0, 0.0), NOISELESS, seed=0)
    object.__setattr__(ps, "px", np.array([0.0, 2.0]))
    object.__setattr__(ps, "py", np.array([0.0, 0.0]))
    object.__setattr__(ps, "weights", np.array(weights, dtype=float))
    return ps


class TestPfUpdate:
    def test_symmetric_observation_keeps_weights(self):
        ps = _two_particle_set()
        updated = pf_update(ps, (1.0, 0.0), CFG)
        assert np.allclose(updated.weights, [0.5, 0.5])

    def test_observation_on_particle_dominates(self):
        cfg = FilterConfig(meas_sigma=0.05)
        updated = pf_update(_two_particle_set(), (0.0, 0.0), cfg)
        assert updated.weights.max() > 1 - 1e-6

    def test_far_observation_degenerates(self):
        cfg = FilterConfig(meas_sigma=1.0)
        updated = pf_update(_two_particle_set(), (1e6, 1e6), cfg)
        assert updated.degenerate
        assert np.allclose(updated.weights, 0.5)

    @settings(max_examples=50)
    @given(st.integers(0, 2**31 - 1),
           st.floats(-50, 50, allow_nan=False), st.floats(-50, 50, allow_nan=False))
    def test_weights_normalized(self, seed, ox, oy):
        ps = pf_init((0.0, 0.0), CFG, seed)
        updated = pf_update(ps, (ox, oy), CFG)
        assert updated.weights.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(updated.weights >= 0)


class TestPfEstimate:
    def test_single_particle(self):
        cfg = FilterConfig(n_particles=1, process_sigma=0.0)
        ps = pf_init((4.0, 7.0), cfg, seed=0)
        assert pf_estimate(ps) == (4.0, 7.0)

    def test_symmetric_pair(self):
        assert pf_estimate(_two_particle_set()) == (1.0, 0.0)

    def test_stationary_target_convergence(self):
        cfg = FilterConfig(process_sigma=2.0)
        target = np.array([100.0, 50.0])
        hits = 0
        for seed in range(20):
            rng = np.random.default_rng(7000 + seed)
            ps = pf_init(tuple(target + rng.normal(0, 10, 2)), cfg, seed)
            for _ in range(50):
                ps = pf_predict(ps, (0.0, 0.0), cfg)
                ps = pf_update(ps, tuple(target + rng.normal(0, cfg.meas_sigma, 2)), cfg)
            if np.linalg.norm(np.array(pf_estimate(ps)) - target) < cfg.meas_sigma:
                hits += 1
        assert hits >= 19

    def test_zero_noise_tracks_moving_target_exactly(self):
        # particles and target accumulate the same float ops; only the
        # weighted mean introduces rounding at machine epsilon
        pos = np.array([10.0, 20.0])
        ps = pf_init(tuple(pos), NOISELESS, seed=0)
        for step in range(30):
            v = np.array([2.0 + 0.1 * step, -1.5])
            pos = pos + v
            ps = pf_predict(ps, tuple(v), NOISELESS)
            ps = pf_update(ps, tuple(pos), NOISELESS)
            assert np.all(ps.px == pos[0]) and np.all(ps.py == pos[1])
            assert pf_estimate(ps) == pytest.approx(tuple(pos), abs=1e-9)


def test_filter_stream_determinism():
    def run():
        ps = pf_init((0.0, 0.0), CFG, seed=11)
        for i in range(25):
            ps = pf_predict(ps, (1.0, 0.5), CFG)
            ps = pf_update(ps, (float(i), 0.5 * i), CFG)
        return ps

    a, b = run(), run()
    assert np.array_equal(a.px, b.px)
    assert np.array_equal(a.py, b.py)
    assert np.array_equal(a.weights, b.weights)


class TestKalman:
    def test_predict_constant_velocity(self):
        k = KalmanSW(mean=np.array([100.0, 10.0, 2.0, 0.5]), cov=np.eye(4))
        out = kf_predict(k, CFG)
        assert np.allclose(out.mean, [102.0, 10.5, 2.0, 0.5])

    def test_predict_zero_velocity_keeps_mean(self):
        k = kf_init(64.0, 8.0, CFG)
        assert np.allclose(kf_predict(k, CFG).mean[:2], [64.0, 8.0])

    def test_covariance_trace_grows(self):
        k = kf_init(200.0, 20.0, CFG)
        assert np.trace(kf_predict(k, CFG).cov) > np.trace(k.cov)

    def test_zero_innovation_keeps_mean(self):
        k = kf_init(100.0, 10.0, CFG)
        k = kf_predict(k, CFG)
        out = kf_update(k, (k.s, k.w), CFG)
        assert np.allclose(out.mean, k.mean, atol=1e-9)

    def test_update_shrinks_position_variance(self):
        k = kf_predict(kf_init(100.0, 10.0, CFG), CFG)
        out = kf_update(k, (110.0, 11.0), CFG)
        assert out.cov[0, 0] <= k.cov[0, 0]
        assert out.cov[1, 1] <= k.cov[1, 1]

    def test_repeated_measurement_fixed_point(self):
        k = kf_init(100.0, 10.0, CFG)
        for _ in range(20):
            k = kf_predict(k, CFG)
            k = kf_update(k, (120.0, 12.0), CFG)
        assert abs(k.s - 120.0) < 1e-3
        assert abs(k.w - 12.0) < 1e-3

    def test_rejects_bad_measurement(self):
        k = kf_init(100.0, 10.0, CFG)
        with pytest.raises(InvalidMeasurement):
            kf_update(k, (-5.0, 2.0), CFG)

    def test_covariance_stays_spd(self):
        rng = np.random.default_rng(5)
        k = kf_init(50.0, 5.0, CFG)
        for _ in range(300):
            k = kf_predict(k, CFG)
            np.linalg.cholesky(k.cov)
            if rng.random() < 0.6:
                k = kf_update(k, (float(rng.uniform(5, 500)), float(rng.uniform(2, 40))), CFG)
                np.linalg.cholesky(k.cov)
            assert np.allclose(k.cov, k.cov.T)


def test_config_validation():
    with pytest.raises(InvalidConfig):
        FilterConfig(n_particles=0)
    with pytest.raises(InvalidConfig):
        FilterConfig(resample_threshold=0.0)
    with pytest.raises(InvalidConfig):
        FilterConfig(meas_sigma=0.0)
