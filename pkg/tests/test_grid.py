import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from benjamin.grid import Grid, make_grid

from conftest import smooth_random_field


class TestConstruction:
    def test_spacing_and_wavenumbers(self):
        g = make_grid(16, 8.0)
        assert g.spacing == 1.0
        np.testing.assert_allclose(g.wavenumbers / (np.pi / 8), np.round(g.wavenumbers / (np.pi / 8)))

    def test_spacing_long_grid(self):
        assert make_grid(2048, 80.0).spacing == 0.078125

    @pytest.mark.parametrize("n", [15, 8, 0, 17])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValueError):
            make_grid(n, 8.0)

    @pytest.mark.parametrize("L", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_bad_length(self, L):
        with pytest.raises(ValueError):
            make_grid(16, L)

    def test_wavenumber_symmetry(self):
        g = make_grid(64, 5.0)
        xi = g.wavenumbers
        assert np.count_nonzero(xi == 0) == 1
        body = xi[~g.nyquist]
        np.testing.assert_allclose(np.sort(body), np.sort(-body))

    def test_spacing_times_n(self):
        g = make_grid(2048, 33.3)
        assert abs(g.spacing * g.n_points - 2 * g.half_length) < 1e-12

    def test_equality_and_hash(self):
        assert make_grid(64, 5.0) == Grid(64, 5.0)
        assert hash(make_grid(64, 5.0)) == hash(Grid(64, 5.0))
        assert make_grid(64, 5.0) != make_grid(64, 6.0)

    def test_abscissae_are_read_only(self):
        g = make_grid(16, 1.0)
        with pytest.raises(ValueError):
            g.x[0] = 1.0


class TestTransforms:
    def test_constant_has_only_zero_mode(self):
        g = make_grid(64, 3.0)
        F = g.forward(np.ones(64))
        assert abs(F[0] - 6.0) < 1e-12
        assert np.max(np.abs(F[1:])) < 1e-12

    def test_pure_cosine_has_two_coefficients(self):
        g = make_grid(64, 3.0)
        F = g.forward(np.cos(np.pi * g.x / 3.0))
        big = np.abs(F) > 1e-10
        assert np.count_nonzero(big) == 2
        i, j = np.flatnonzero(big)
        assert abs(F[i] - np.conj(F[j])) < 1e-12

    def test_parseval(self):
        g = make_grid(128, 7.0)
        f = np.random.default_rng(3).standard_normal(128)
        lhs = g.spacing * np.sum(f * f)
        rhs = np.sum(np.abs(g.forward(f)) ** 2) / g.length
        assert abs(lhs - rhs) < 1e-10 * lhs

    def test_gaussian_matches_continuum_transform(self):
        # FT of exp(-x^2/2) is sqrt(2 pi) exp(-xi^2/2)
        g = make_grid(256, 20.0)
        F = g.forward(np.exp(-0.5 * g.x**2))
        exact = math.sqrt(2 * math.pi) * np.exp(-0.5 * g.wavenumbers**2)
        np.testing.assert_allclose(F, exact, atol=1e-12)

    @pytest.mark.parametrize("n", [64, 256, 2048])
    def test_round_trip(self, n):
        g = make_grid(n, 10.0)
        rng = np.random.default_rng(n)
        for _ in range(5):
            f = rng.standard_normal(n)
            assert np.max(np.abs(g.inverse(g.forward(f)) - f)) < 1e-12

    @settings(max_examples=50, deadline=None)
    @given(
        n=st.sampled_from([16, 64, 256, 2048]),
        L=st.floats(0.5, 500.0),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_round_trip_property(self, n, L, seed):
        g = make_grid(n, L)
        f = np.random.default_rng(seed).standard_normal(n)
        assert np.max(np.abs(g.inverse(g.forward(f)) - f)) < 1e-12 * max(1.0, np.max(np.abs(f)))

    def test_wrong_shape(self):
        with pytest.raises(ValueError):
            make_grid(16, 1.0).forward(np.zeros(15))


class TestMultipliers:
    g = make_grid(128, math.pi)

    @pytest.mark.parametrize("k", [1, 3, 7])
    def test_first_derivative_of_sine(self, k):
        x = self.g.x
        np.testing.assert_allclose(self.g.derivative(np.sin(k * x), 1), k * np.cos(k * x), atol=1e-10)

    @pytest.mark.parametrize("k", [1, 3, 7])
    def test_third_derivative_of_sine(self, k):
        x = self.g.x
        np.testing.assert_allclose(self.g.derivative(np.sin(k * x), 3), -k**3 * np.cos(k * x),
                                   atol=1e-9 * k**3)

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_derivative_of_constant(self, order):
        assert np.max(np.abs(self.g.derivative(np.full(128, 2.5), order))) < 1e-12

    def test_bad_order(self):
        with pytest.raises(ValueError):
            self.g.derivative(np.zeros(128), 4)

    @pytest.mark.parametrize("k", [1, 2, 9])
    def test_hilbert_of_cosine(self, k):
        x = self.g.x
        np.testing.assert_allclose(self.g.hilbert(np.cos(k * x)), -np.sin(k * x), atol=1e-12)
        np.testing.assert_allclose(self.g.hilbert(np.sin(k * x)), np.cos(k * x), atol=1e-12)

    def test_hilbert_of_constant(self):
        assert np.max(np.abs(self.g.hilbert(np.full(128, 3.0)))) < 1e-12

    def test_hilbert_of_lorentzian(self):
        # H[1/(1+x^2)] = -x/(1+x^2) under the i sgn(xi) multiplier, up to the periodic images
        g = make_grid(16384, 400.0)
        out = g.hilbert(1.0 / (1.0 + g.x**2))
        core = np.abs(g.x) < 20
        np.testing.assert_allclose(out[core], -(g.x / (1.0 + g.x**2))[core], atol=2e-3)

    def test_nyquist_is_zeroed_for_odd_multipliers(self):
        g = self.g
        alt = np.cos(np.pi * g.x / g.spacing)
        assert np.max(np.abs(g.derivative(alt, 1))) < 1e-12
        assert np.max(np.abs(g.derivative(alt, 3))) < 1e-12
        assert np.max(np.abs(g.hilbert(alt))) < 1e-12
        assert np.max(np.abs(g.derivative(alt, 2) + (np.pi / g.spacing) ** 2 * alt)) < 1e-8

    @pytest.mark.parametrize("k", [1, 4])
    def test_half_derivative_of_cosine(self, k):
        x = self.g.x
        np.testing.assert_allclose(self.g.half_derivative(np.cos(k * x)), math.sqrt(k) * np.cos(k * x),
                                   atol=1e-12)

    def test_half_derivative_of_constant(self):
        assert np.max(np.abs(self.g.half_derivative(np.ones(128)))) < 1e-12

    def test_half_derivative_squared_is_hilbert_derivative(self):
        g = make_grid(256, 20.0)
        # narrow window: the Nyquist mode is kept by |xi|^{1/2} but dropped by H d/dx
        f = smooth_random_field(g, np.random.default_rng(5), width=3.0)
        twice = g.half_derivative(g.half_derivative(f))
        np.testing.assert_allclose(twice, -g.hilbert(g.derivative(f)), atol=1e-10)


class TestIdentities:
    def test_hilbert_squared_is_minus_identity(self):
        g = make_grid(256, 10.0)
        rng = np.random.default_rng(0)
        for _ in range(20):
            f = rng.standard_normal(256)
            # the zero and Nyquist modes are annihilated, so remove them first
            F = g.forward(f)
            F[0] = 0
            F[g.nyquist] = 0
            f = g.inverse(F)
            assert np.max(np.abs(g.hilbert(g.hilbert(f)) + f)) < 1e-10

    def test_half_derivative_identity_many_seeds(self):
        # int f' H f = ||D^{1/2} f||^2
        g = make_grid(512, 30.0)
        for seed in range(100):
            rng = np.random.default_rng(seed)
            f = smooth_random_field(g, rng, ell=rng.uniform(0.3, 2.0), width=rng.uniform(1.0, 6.0))
            lhs = g.inner(g.derivative(f), g.hilbert(f))
            rhs = g.l2_norm(g.half_derivative(f)) ** 2
            assert abs(lhs - rhs) < 1e-10 * max(1.0, rhs)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), order=st.sampled_from([1, 2, 3]))
    def test_derivative_commutes_with_hilbert(self, seed, order):
        g = make_grid(256, 15.0)
        f = smooth_random_field(g, np.random.default_rng(seed))
        a = g.derivative(g.hilbert(f), order)
        b = g.hilbert(g.derivative(f, order))
        assert np.max(np.abs(a - b)) < 1e-10


class TestTranslationAndSymmetry:
    def test_translate_gaussian(self):
        g = make_grid(256, 20.0)
        f = np.exp(-g.x**2)
        np.testing.assert_allclose(g.translate(f, 3.7), np.exp(-(g.x - 3.7) ** 2), atol=1e-12)

    def test_translate_by_period_is_identity(self):
        g = make_grid(64, 5.0)
        f = np.exp(-g.x**2)
        np.testing.assert_allclose(g.translate(f, g.length), f, atol=1e-12)

    def test_reflect_pairs_mirror_points(self):
        g = make_grid(64, 5.0)
        np.testing.assert_allclose(g.reflect(g.x)[1:], -g.x[1:])
        f = np.exp(-(g.x - 1) ** 2)
        # x_0 = -L is its own mirror image on the periodic grid
        np.testing.assert_allclose(g.reflect(f)[1:], np.exp(-(g.x[1:] + 1) ** 2), atol=1e-14)
        assert g.reflect(f)[0] == f[0]

    def test_symmetrize_is_even(self):
        g = make_grid(64, 5.0)
        s = g.symmetrize(np.exp(-(g.x - 1) ** 2))
        np.testing.assert_array_equal(s, g.reflect(s))


class TestNorms:
    def test_constant_l2(self):
        g = make_grid(64, 5.0)
        assert abs(g.sobolev_norm(np.full(64, 2.0), 0.0) - 2.0 * math.sqrt(10.0)) < 1e-12

    def test_sobolev_of_cosine(self):
        g = make_grid(64, math.pi)
        f = np.cos(3 * g.x)
        assert abs(g.sobolev_norm(f, 1.0) / g.sobolev_norm(f, 0.0) - math.sqrt(10.0)) < 1e-12

    def test_s_zero_matches_l2(self):
        g = make_grid(128, 7.0)
        f = np.random.default_rng(1).standard_normal(128)
        assert abs(g.sobolev_norm(f, 0.0) - g.l2_norm(f)) < 1e-12 * g.l2_norm(f)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), s1=st.floats(0, 3), s2=st.floats(0, 3))
    def test_monotone_in_s(self, seed, s1, s2):
        g = make_grid(64, 5.0)
        f = np.random.default_rng(seed).standard_normal(64)
        lo, hi = sorted((s1, s2))
        assert g.sobolev_norm(f, lo) <= g.sobolev_norm(f, hi) * (1 + 1e-12)

    def test_negative_index(self):
        with pytest.raises(ValueError):
            make_grid(64, 5.0).sobolev_norm(np.ones(64), -1)

    def test_integrate_gaussian(self):
        g = make_grid(128, 15.0)
        assert abs(g.integrate(np.exp(-g.x**2)) - math.sqrt(math.pi)) < 1e-13

    def test_spectral_tail_smooth_vs_rough(self):
        g = make_grid(256, 20.0)
        assert g.spectral_tail(np.exp(-g.x**2)) < 1e-8
        assert g.spectral_tail(np.random.default_rng(0).standard_normal(256)) > 1e-2
