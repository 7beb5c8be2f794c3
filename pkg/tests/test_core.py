from __future__ import annotations

import numpy as np
import pytest

from cocosim.core import (ControllerFault, Pose, Rng, SimClock, Twist,
                          clamp_norm, gaussian3, saturate, vec3)


def sat(linear, v_max=0.25, w_max=0.0):
    return saturate(Twist.from_linear(vec3(*linear)), v_max, w_max)


class TestSaturate:
    def test_zero_fixed_point(self):
        assert np.array_equal(sat((0, 0, 0)).linear, vec3())

    def test_below_cap_is_identity(self):
        out = sat((0.1, 0, 0))
        assert np.array_equal(out.linear, vec3(0.1, 0, 0))

    def test_scales_3_4_5_vector(self):
        # 3-4-5 triangle: norm 5 scaled to 0.25 is a factor of 0.05
        out = sat((3, 4, 0))
        assert np.allclose(out.linear, [0.15, 0.20, 0.0], atol=1e-15)
        assert np.isclose(np.linalg.norm(out.linear), 0.25)

    def test_direction_preserved(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            v = rng.normal(size=3) * 10
            out = sat(v).linear
            cos = v @ out / (np.linalg.norm(v) * np.linalg.norm(out))
            assert cos > 1 - 1e-12

    def test_exactly_idempotent(self):
        rng = np.random.default_rng(6)
        for _ in range(500):
            v = rng.normal(size=3) * rng.choice([1e-3, 1.0, 1e3])
            once = sat(v)
            twice = saturate(once, 0.25, 0.0)
            assert np.array_equal(once.linear, twice.linear)

    def test_never_increases_magnitude(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            v = rng.normal(size=3)
            w = rng.normal(size=3)
            out = saturate(Twist(v, w), 0.25, 0.1)
            assert np.linalg.norm(out.linear) <= np.linalg.norm(v) + 1e-15
            assert np.linalg.norm(out.angular) <= np.linalg.norm(w) + 1e-15

    def test_non_finite_faults(self):
        with pytest.raises(ControllerFault):
            sat((np.nan, 0, 0))
        with pytest.raises(ControllerFault):
            saturate(Twist(vec3(0.1, 0, 0), vec3(np.inf, 0, 0)), 0.2, 0.1)

    def test_bad_caps_rejected(self):
        with pytest.raises(ValueError):
            sat((0, 0, 0), v_max=0.0)
        with pytest.raises(ValueError):
            sat((0, 0, 0), w_max=-1.0)


class TestGaussian3:
    def test_sigma_zero_is_exact_zero(self):
        out = gaussian3(Rng(1), 0.0)
        assert np.array_equal(out, vec3())

    def test_sample_mean_within_clt_bound(self):
        # oracle: for N=10000 the mean of N(0, 0.01) lies within
        # 5*sigma/sqrt(N) = 0.0005 per axis with overwhelming probability
        rng = Rng(123)
        draws = np.array([gaussian3(rng, 0.01) for _ in range(10000)])
        assert np.all(np.abs(draws.mean(axis=0)) < 0.0005)
        assert np.allclose(draws.std(axis=0), 0.01, rtol=0.05)

    def test_fixed_seed_reproducible(self):
        a = gaussian3(Rng(42), 0.01)
        b = gaussian3(Rng(42), 0.01)
        assert np.array_equal(a, b)

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            gaussian3(Rng(1), -0.1)


class TestRng:
    def test_equal_seeds_equal_streams(self):
        a, b = Rng(99), Rng(99)
        xa = a.uniforms(100000)
        xb = b.uniforms(100000)
        assert np.array_equal(xa, xb)

    def test_streams_differ(self):
        assert not np.array_equal(Rng(5, stream=0).uniforms(16),
                                  Rng(5, stream=1).uniforms(16))

    def test_negative_seed_rejected(self):
        with pytest.raises(Exception):
            Rng(-1)


class TestClockAndTypes:
    def test_clock_steps_exactly(self):
        c = SimClock(dt=0.01)
        for k in range(100):
            assert c.ticks == k
            c = c.advance()
        assert c.t == pytest.approx(1.0)

    def test_pose_requires_unit_quaternion(self):
        Pose(vec3(), np.array([1.0, 0, 0, 0]))
        with pytest.raises(ValueError):
            Pose(vec3(), np.array([1.0, 0.1, 0, 0]))

    def test_clamp_norm_boundary(self):
        v = vec3(0.25, 0, 0)
        assert np.array_equal(clamp_norm(v, 0.25), v)
