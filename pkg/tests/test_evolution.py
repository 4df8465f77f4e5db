import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from benjamin.diagnostics import shift_min_distance
from benjamin.evolution import (
    BlowUpError,
    EvolutionConfig,
    EvolutionError,
    dt_bound,
    evolve,
    linear_phase,
    measure_speed,
    peak_position,
)
from benjamin.functionals import ModelParams
from benjamin.grid import make_grid
from benjamin.solver import dilate, petviashvili, q_bo, q_kdv

KDV = ModelParams(1.0, 1.0, 0.0)


class TestLinearPhase:
    def test_zero_wavenumber(self):
        assert linear_phase(ModelParams(1, 1, 1), 0.0, 123.0) == 1

    def test_half_turn(self):
        assert abs(linear_phase(KDV, 1.0, math.pi) + 1) < 1e-15

    @settings(max_examples=50, deadline=None)
    @given(xi=st.floats(-1e3, 1e3), t=st.floats(-100, 100), a=st.floats(0, 5), b=st.floats(-5, 5))
    def test_unit_modulus(self, xi, t, a, b):
        assert abs(abs(linear_phase(ModelParams(1, a, b), xi, t)) - 1) < 1e-12

    def test_bo_term_is_odd(self):
        p = ModelParams(1, 0, 1)
        assert linear_phase(p, -2.0, 0.3) == np.conj(linear_phase(p, 2.0, 0.3))


class TestConfig:
    @pytest.mark.parametrize(
        "kw", [dict(t_end=0), dict(t_end=1, dt=-1), dict(t_end=1, dt=2), dict(t_end=1, record_stride=0)]
    )
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            EvolutionConfig(**kw)

    def test_bound_formula(self):
        g = make_grid(64, math.pi)
        # max |xi| is 32 at the Nyquist mode
        assert abs(dt_bound(ModelParams(1, 1, 0), g) - 1 / 32**3) < 1e-18
        assert abs(dt_bound(ModelParams(1, 1, 2), g) - 1 / (32**3 + 2 * 32**2)) < 1e-18
        assert dt_bound(ModelParams(1, 0, 0), g) == math.inf

    def test_refuses_step_above_bound(self):
        g = make_grid(128, 20.0)
        with pytest.raises(ValueError, match="stability bound"):
            evolve(q_kdv(1, g), KDV, g, EvolutionConfig(t_end=1.0, dt=1.1 * dt_bound(KDV, g)))

    def test_rejects_bad_initial(self):
        g = make_grid(64, 10.0)
        with pytest.raises(ValueError):
            evolve(np.full(64, np.nan), KDV, g, EvolutionConfig(t_end=1.0))
        with pytest.raises(ValueError):
            evolve(np.zeros(63), KDV, g, EvolutionConfig(t_end=1.0))


class TestLinearFlow:
    def test_cosine_half_period(self):
        g = make_grid(32, math.pi)
        cfg = EvolutionConfig(t_end=math.pi, nonlinear=False, record_stride=10**6)
        tr = evolve(np.cos(g.x), KDV, g, cfg)
        assert tr.times[-1] == pytest.approx(math.pi, abs=1e-14)
        assert np.max(np.abs(tr.final + np.cos(g.x))) < 1e-10

    def test_bo_dispersion_relation(self):
        # e^{ikx} picks up exp(i beta k|k| t): cos(kx) -> cos(kx + beta k^2 t)
        g = make_grid(32, math.pi)
        p = ModelParams(1, 0, 0.7)
        tr = evolve(np.cos(3 * g.x), p, g, EvolutionConfig(t_end=0.5, nonlinear=False))
        np.testing.assert_allclose(tr.final, np.cos(3 * g.x + 0.7 * 9 * 0.5), atol=1e-10)


@pytest.fixture(scope="module")
def kdv_run():
    g = make_grid(512, 40.0)
    cfg = EvolutionConfig(t_end=10.0, record_stride=2000)
    return g, evolve(q_kdv(1.0, g), KDV, g, cfg)


class TestSoliton:
    def test_translates_without_change(self, kdv_run):
        g, tr = kdv_run
        expected = g.translate(q_kdv(1.0, g), 10.0)
        assert g.l2_norm(tr.final - expected) < 1e-5

    def test_conservation(self, kdv_run):
        _, tr = kdv_run
        assert tr.relative_drift("mass") < 1e-9
        assert tr.relative_drift("energy") < 1e-7

    def test_speed(self, kdv_run):
        _, tr = kdv_run
        assert abs(measure_speed(tr) - 1.0) < 1e-3

    def test_trace_shape(self, kdv_run):
        _, tr = kdv_run
        n = len(tr.times)
        assert n == len(tr.mass_series) == len(tr.energy_series) == len(tr.snapshots) == len(tr.peak_series)
        assert np.all(np.diff(tr.times) > 0) and tr.times[0] == 0.0

    def test_bo_soliton_speed(self):
        g = make_grid(2048, 100.0)
        p = ModelParams(1, 0, 1)
        tr = evolve(q_bo(1.0, g), p, g, EvolutionConfig(t_end=4.0, record_stride=400))
        assert abs(measure_speed(tr) - 1.0) < 1e-2

    def test_dilated_wave_speed(self):
        w = petviashvili(ModelParams(1, 1, 0.3), make_grid(256, 40.0))
        d = dilate(w, math.sqrt(2.0))
        tr = evolve(d.profile, d.params, d.grid, EvolutionConfig(t_end=2.0, record_stride=500))
        assert abs(measure_speed(tr) - 2.0) < 5e-3


class TestNumericalProperties:
    def test_conservation_over_ten_thousand_steps(self):
        g = make_grid(256, 40.0)
        p = ModelParams(1, 1, 0.3)
        u0 = petviashvili(p, g).profile + 0.1 * np.exp(-((g.x - 5) ** 2))
        dt = dt_bound(p, g)
        tr = evolve(u0, p, g, EvolutionConfig(t_end=1e4 * dt, dt=dt, record_stride=500, keep_snapshots=False))
        assert tr.snapshots is None
        assert tr.relative_drift("mass") < 1e-9
        assert tr.relative_drift("energy") < 1e-7

    @pytest.mark.parametrize("p", [(1, 1, 0), (1, 1, 0.4)])
    def test_time_reversal(self, p):
        # u(-x, -t) solves the same equation, so evolving the reflected end state undoes the run
        p = ModelParams(*p)
        g = make_grid(256, 40.0)
        u0 = 1.5 * np.exp(-(g.x**2) / 4)
        cfg = EvolutionConfig(t_end=3.0, record_stride=10**6)
        forward = evolve(u0, p, g, cfg).final
        back = evolve(g.reflect(forward), p, g, cfg).final
        assert g.l2_norm(g.reflect(back) - u0) < 1e-6

    def test_step_halving_order(self):
        g = make_grid(128, 20.0)
        p = ModelParams(1, 1, 0.2)
        u0 = q_kdv(1.0, g)
        finals = []
        for dt in (0.01, 0.005, 0.0025):
            cfg = EvolutionConfig(t_end=1.0, dt=dt, record_stride=10**6, enforce_dt_bound=False)
            finals.append(evolve(u0, p, g, cfg).final)
        e1 = g.l2_norm(finals[0] - finals[1])
        e2 = g.l2_norm(finals[1] - finals[2])
        assert math.log2(e1 / e2) >= 3.5

    def test_blow_up_sentinel(self):
        g = make_grid(64, 40.0)
        u0 = 3000 * np.exp(-g.x**2)
        with pytest.raises(BlowUpError) as info:
            evolve(u0, KDV, g, EvolutionConfig(t_end=1.0, record_stride=1, dealias=False))
        tr = info.value.trace
        assert len(tr.times) >= 1 and tr.times[0] == 0.0


class TestSpeedMeasurement:
    def test_peak_position_parabola(self):
        g = make_grid(256, 20.0)
        assert abs(peak_position(np.exp(-((g.x - 0.0371) ** 2)), g) - 0.0371) < 2e-3

    def test_unwraps_across_boundary(self):
        g = make_grid(256, 20.0)
        tr = evolve(g.translate(q_kdv(1.0, g), 17.0), KDV, g, EvolutionConfig(t_end=4.0, record_stride=1000))
        assert abs(measure_speed(tr) - 1.0) < 1e-2

    def test_incoherent(self):
        g = make_grid(256, 20.0)
        rng = np.random.default_rng(0)
        tr = evolve(0.01 * rng.standard_normal(256), KDV, g, EvolutionConfig(t_end=0.01, record_stride=5))
        with pytest.raises(EvolutionError):
            measure_speed(tr)

    def test_needs_snapshots(self):
        g = make_grid(64, 20.0)
        tr = evolve(q_kdv(1.0, g), KDV, g, EvolutionConfig(t_end=0.1, keep_snapshots=False))
        with pytest.raises(ValueError):
            measure_speed(tr)
