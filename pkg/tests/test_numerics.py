import math

import mpmath as mp
import numpy as np
import pytest

from tpi_sim.numerics import (
    QuadratureError,
    faddeeva_w,
    integrate,
    voigt_fwhm,
    voigt_value,
)


def w_reference(z: complex) -> complex:
    """Slow 40-digit reference: w(z) = exp(-z^2) erfc(-iz)."""
    with mp.workdps(40):
        zm = mp.mpc(z)
        return complex(mp.exp(-zm * zm) * mp.erfc(-1j * zm))


class TestFaddeeva:
    def test_at_origin(self):
        assert faddeeva_w(0.0) == 1.0 + 0.0j

    def test_real_axis_real_part_is_gaussian(self):
        # Re w(x) = exp(-x^2) for real x
        assert faddeeva_w(1.0).real == pytest.approx(math.exp(-1.0), rel=1e-14)
        assert faddeeva_w(2.5).real == pytest.approx(math.exp(-6.25), rel=1e-13)

    def test_imaginary_axis_value(self):
        # w(iy) = erfcx(y); reference value computed with the 40-digit oracle
        val = faddeeva_w(1.0j)
        assert val.imag == 0.0
        assert val.real == pytest.approx(0.42758357615580700441, rel=1e-14)

    def test_against_high_precision_reference(self):
        radii = np.geomspace(1e-3, 1e3, 13)
        angles = np.linspace(0.0, math.pi, 9)
        worst = 0.0
        for r in radii:
            for a in angles:
                z = complex(r * math.cos(a), r * abs(math.sin(a)))
                ref = w_reference(z)
                got = complex(faddeeva_w(z))
                worst = max(worst, abs(got - ref) / abs(ref))
        assert worst <= 1e-12

    def test_reflection_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            z = complex(rng.uniform(-20, 20), rng.uniform(0, 20))
            lhs = faddeeva_w(complex(-z.real, z.imag))
            rhs = complex(faddeeva_w(z)).conjugate()
            assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-300)

    def test_monotone_on_imaginary_axis(self):
        ys = np.linspace(0.0, 30.0, 400)
        vals = np.real(faddeeva_w(1j * ys))
        assert vals[0] == 1.0
        assert np.all(np.diff(vals) < 0.0)

    def test_lower_half_plane_rejected(self):
        with pytest.raises(ValueError):
            faddeeva_w(1.0 - 0.5j)
        with pytest.raises(ValueError):
            faddeeva_w(np.array([1.0 + 1j, 2.0 - 1e-12j]))

    def test_array_input(self):
        zs = np.array([0.0, 1.0, 1j, 2 + 3j])
        vals = faddeeva_w(zs)
        assert vals.shape == zs.shape
        assert vals[0] == 1.0 + 0.0j


class TestVoigt:
    def test_gaussian_peak(self):
        sigma = 0.8e9
        assert voigt_value(0.0, sigma, 0.0) == pytest.approx(
            1.0 / (sigma * math.sqrt(2.0 * math.pi)), rel=1e-14
        )

    def test_lorentzian_peak(self):
        hwhm = 0.3e9
        assert voigt_value(0.0, 0.0, hwhm) == pytest.approx(1.0 / (math.pi * hwhm), rel=1e-14)

    def test_degenerate_raises(self):
        with pytest.raises(ValueError):
            voigt_value(0.0, 0.0, 0.0)

    def test_matches_direct_convolution(self):
        # independent oracle: numerically convolve the Gaussian with the Lorentzian
        sigma, hwhm = 1.3, 0.7

        def convolution(x):
            def f(t):
                gauss = np.exp(-0.5 * (t / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
                lorentz = hwhm / math.pi / ((x - t) ** 2 + hwhm * hwhm)
                return gauss * lorentz

            return integrate(f, -14.0 * sigma, 14.0 * sigma, tol=1e-13)

        for x in (0.0, 0.5, 1.7, 4.0, -2.3):
            assert voigt_value(x, sigma, hwhm) == pytest.approx(convolution(x), rel=1e-9)

    def test_normalization_random_widths(self):
        # in-window mass over +-60 widths plus the explicitly integrated
        # Lorentzian-tail wings (substitution u = 1/x) must close to 1
        rng = np.random.default_rng(11)

        def profile(x, sigma, hwhm):
            return np.array([voigt_value(v, sigma, hwhm) for v in np.atleast_1d(x)])

        for _ in range(6):
            sigma = rng.uniform(0.2, 3.0)
            hwhm = rng.uniform(0.0, 3.0)
            window = 60.0 * (sigma + hwhm)
            total = integrate(lambda x: profile(x, sigma, hwhm), -window, window, tol=1e-11)
            wing = integrate(
                lambda u: profile(1.0 / u, sigma, hwhm) / u**2, 1e-9, 1.0 / window, tol=1e-11
            )
            assert total + 2.0 * wing == pytest.approx(1.0, abs=1e-8)


class TestVoigtFwhm:
    def test_pure_limits(self):
        assert voigt_fwhm(2.0, 0.0) == 2.0
        assert voigt_fwhm(0.0, 3.0) == 3.0

    def test_known_combination(self):
        # 480 MHz Lorentzian + 550 MHz Gaussian combine to ~850 MHz
        assert voigt_fwhm(480e6, 550e6) == pytest.approx(850.21e6, rel=1e-3)

    def test_half_maximum_property(self):
        for fl, fg in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.1)]:
            fwhm = voigt_fwhm(fl, fg)
            sigma = fg / (2.0 * math.sqrt(2.0 * math.log(2.0)))
            peak = voigt_value(0.0, sigma, fl / 2.0)
            assert voigt_value(fwhm / 2.0, sigma, fl / 2.0) == pytest.approx(
                0.5 * peak, rel=1e-9
            )


class TestIntegrate:
    def test_exponential_to_infinity(self):
        assert integrate(lambda t: np.exp(-t), 0.0, math.inf, tol=1e-12, decay_time=1.0) == (
            pytest.approx(1.0, abs=1e-12)
        )

    def test_unit_gaussian(self):
        val = integrate(
            lambda t: np.exp(-0.5 * t * t) / math.sqrt(2 * math.pi),
            -math.inf,
            math.inf,
            tol=1e-12,
            decay_time=1.0,
        )
        assert val == pytest.approx(1.0, abs=1e-11)

    def test_polynomial_exact(self):
        # Kronrod-15 integrates low-degree polynomials exactly
        assert integrate(lambda x: 3 * x**2, 0.0, 2.0, tol=1e-13) == pytest.approx(8.0, abs=1e-12)
        assert integrate(lambda x: x**9 - x, -1.0, 3.0, tol=1e-12) == pytest.approx(
            (3.0**10 - 1.0) / 10.0 - (9.0 - 1.0) / 2.0, rel=1e-12
        )

    def test_randomized_closed_forms(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            a = rng.uniform(0.5, 3.0)
            w = rng.uniform(0.0, 8.0)
            # int_0^inf e^{-a t} cos(w t) dt = a / (a^2 + w^2)
            val = integrate(
                lambda t: np.exp(-a * t) * np.cos(w * t),
                0.0,
                math.inf,
                tol=1e-12,
                decay_time=1.0 / a,
            )
            assert val == pytest.approx(a / (a * a + w * w), abs=1e-10)

    def test_reversed_and_empty_ranges(self):
        assert integrate(lambda x: np.ones_like(x), 1.0, 1.0) == 0.0
        assert integrate(lambda x: np.ones_like(x), 2.0, 0.0, tol=1e-12) == pytest.approx(-2.0)

    def test_infinite_range_needs_decay_time(self):
        with pytest.raises(ValueError):
            integrate(lambda t: np.exp(-t), 0.0, math.inf)

    def test_non_convergence_raises(self):
        with pytest.raises(QuadratureError):
            integrate(lambda x: np.abs(np.sin(100.0 * x)), 0.0, 10.0, tol=1e-14, max_intervals=30)

    def test_truncation_factor_configurable(self):
        # a short truncation visibly cuts the tail of exp(-t)
        short = integrate(
            lambda t: np.exp(-t), 0.0, math.inf, tol=1e-13, decay_time=1.0, truncation_factor=2.0
        )
        assert short == pytest.approx(1.0 - math.exp(-2.0), abs=1e-10)
