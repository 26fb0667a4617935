import math

import numpy as np
import pytest

from htfa.grid import GridSpec, Signal1D, Signal2D, lp_norm, pure_frequency, pure_frequency_2d
from htfa.leibniz import (
    InadmissibleExponents,
    LeibnizInstance,
    leibniz_ratio_1d,
    leibniz_ratio_2d,
    leibniz_ratio_mixed,
    paraproduct_decomposition_check,
    shift_coefficient,
    shift_series_tail,
)

GRID = GridSpec(8)  # N = 256
GRID2 = GridSpec(5, axes=2)


def band_limited(rng, grid, limit):
    n = grid.size
    spec = np.zeros(n, dtype=complex)
    for k in range(-limit, limit + 1):
        spec[k % n] = rng.normal() + 1j * rng.normal()
    return Signal1D(grid, np.fft.ifft(spec))


def band_limited_2d(rng, grid, limit):
    n = grid.size
    spec = np.zeros((n, n), dtype=complex)
    for kx in range(-limit, limit + 1):
        for ky in range(-limit, limit + 1):
            spec[kx % n, ky % n] = rng.normal() + 1j * rng.normal()
    return Signal2D(grid, np.fft.ifft2(spec))


class TestRatio1D:
    def test_single_frequency_closed_form(self):
        for alpha, n in ((0.5, 3), (1.0, 7), (1.7, 5)):
            f = pure_frequency(GRID, n)
            inst = LeibnizInstance(f, f, alpha, [(2, 2), (2, 2)], 1)
            got = leibniz_ratio_1d(inst)
            assert got == pytest.approx(2.0 ** (alpha - 1.0), rel=1e-10)

    def test_constant_second_factor(self):
        rng = np.random.default_rng(111)
        f = band_limited(rng, GRID, 20)
        g = Signal1D(GRID, np.full(GRID.size, 2.0))
        inst = LeibnizInstance(f, g, 1.0, [(2, "inf"), (4, 4)], 2)
        # derivative of the constant vanishes: ratio = ||Df||_2 |c| / (||Df||_2 |c|)
        assert leibniz_ratio_1d(inst) == pytest.approx(1.0, rel=1e-10)

    def test_random_scan_bounded(self):
        rng = np.random.default_rng(112)
        worst = 0.0
        cells = [
            (0.5, 1, [(2, 2), (2, 2)]),
            (1.0, 2, [(4, 4), (4, 4)]),
            (1.5, 1, [("3/2", 3), (3, "3/2")]),
        ]
        for alpha, s, pairs in cells:
            for _ in range(20):
                f = band_limited(rng, GRID, 32)
                g = band_limited(rng, GRID, 32)
                inst = LeibnizInstance(f, g, alpha, pairs, s)
                worst = max(worst, leibniz_ratio_1d(inst))
        print(f"one-parameter ratio max over scan: {worst:.3f}")
        assert worst <= 50.0

    def test_holder_violation_rejected(self):
        f = pure_frequency(GRID, 1)
        with pytest.raises(InadmissibleExponents):
            leibniz_ratio_1d(LeibnizInstance(f, f, 1.0, [(2, 3), (2, 2)], 1))

    def test_threshold_rejected(self):
        f = pure_frequency(GRID, 1)
        # s = 2/3 <= 1/(1+0.4)
        with pytest.raises(InadmissibleExponents):
            leibniz_ratio_1d(
                LeibnizInstance(f, f, 0.4, [("4/3", 4), ("4/3", 4)], "2/3")
            )


class TestRatio2D:
    def test_separable_single_frequency(self):
        f = pure_frequency_2d(GRID2, 2, 3)
        alpha, beta = 0.8, 1.3
        pairs = [(2, 2)] * 4
        inst = LeibnizInstance(f, f, alpha, pairs, 1, beta=beta)
        got = leibniz_ratio_2d(inst)
        assert got == pytest.approx(2.0 ** (alpha + beta - 2.0), rel=1e-10)

    def test_fixed_y_frequency_reduces_to_1d(self):
        rng = np.random.default_rng(113)
        g1 = GridSpec(5)
        a = band_limited(rng, g1, 6)
        b = band_limited(rng, g1, 6)
        m = 3
        em = pure_frequency(g1, m).samples
        f2 = Signal2D(GRID2, np.outer(a.samples, em))
        g2 = Signal2D(GRID2, np.outer(b.samples, em))
        alpha, beta = 0.9, 1.1
        inst2 = LeibnizInstance(f2, g2, alpha, [(2, 2)] * 4, 1, beta=beta)
        inst1 = LeibnizInstance(a, b, alpha, [(2, 2)] * 2, 1)
        # the fixed y-frequency contributes |2m|^b against two |m|^b per side
        got = leibniz_ratio_2d(inst2)
        expected = 2.0 ** (beta - 1.0) * leibniz_ratio_1d(inst1)
        assert got == pytest.approx(expected, rel=1e-10)

    def test_random_scan_bounded(self):
        rng = np.random.default_rng(114)
        worst = 0.0
        for _ in range(10):
            f = band_limited_2d(rng, GRID2, 6)
            g = band_limited_2d(rng, GRID2, 6)
            inst = LeibnizInstance(f, g, 1.0, [(2, 2)] * 4, 1, beta=0.7)
            worst = max(worst, leibniz_ratio_2d(inst))
        print(f"two-parameter ratio max over scan: {worst:.3f}")
        assert worst <= 50.0


class TestRatioMixed:
    def test_constants_vanish(self):
        f = Signal2D(GRID2, np.full((32, 32), 1.5))
        pairs = [((2, 4), (2, 4))] * 4
        inst = LeibnizInstance(f, f, 1.0, pairs, (1, 2), beta=1.0)
        assert leibniz_ratio_mixed(inst) == 0.0

    def test_separable_single_frequency(self):
        f = pure_frequency_2d(GRID2, 2, 3)
        alpha, beta = 1.0, 0.6
        pairs = [((2, 4), (2, 4))] * 4
        inst = LeibnizInstance(f, f, alpha, pairs, (1, 2), beta=beta)
        got = leibniz_ratio_mixed(inst)
        assert got == pytest.approx(2.0 ** (alpha + beta - 2.0), rel=1e-10)

    def test_random_scan_bounded(self):
        rng = np.random.default_rng(115)
        worst = 0.0
        for _ in range(10):
            f = band_limited_2d(rng, GRID2, 6)
            g = band_limited_2d(rng, GRID2, 6)
            pairs = [((2, 4), (2, 4))] * 4
            inst = LeibnizInstance(f, g, 0.8, pairs, (1, 2), beta=1.2)
            worst = max(worst, leibniz_ratio_mixed(inst))
        print(f"mixed-norm ratio max over scan: {worst:.3f}")
        assert worst <= 50.0

    def test_names_violated_condition(self):
        f = pure_frequency_2d(GRID2, 1, 1)
        # outer target 4/5 sits below the slow-decay threshold 1/(1+0.2)
        slow_pairs = [((2, 4), ("4/3", 4))] * 4
        with pytest.raises(InadmissibleExponents, match="slow-decay"):
            leibniz_ratio_mixed(
                LeibnizInstance(f, f, 0.2, slow_pairs, ("4/5", 2), beta=1.0)
            )
        bad_pairs = [((2, 4), (3, 4))] * 4
        with pytest.raises(InadmissibleExponents, match="splitting"):
            leibniz_ratio_mixed(
                LeibnizInstance(f, f, 1.0, bad_pairs, (1, 2), beta=1.0)
            )


class TestShiftSeries:
    def test_alpha_one_coefficients_analytic(self):
        # odd coefficients are -8/(pi n)^2 ... explicitly -8/(pi^2 n^2);
        # even ones vanish
        for n in (1, 3, 5, 9):
            got = shift_coefficient(n, 1.0)
            assert got == pytest.approx(-8.0 / (math.pi**2 * n**2), rel=1e-8)
        for n in (2, 4, 8):
            assert abs(shift_coefficient(n, 1.0)) <= 1e-10

    def test_decay_rate_within_factor_four(self):
        alpha = 1.0
        vals = [abs(shift_coefficient(n, alpha)) * n ** (1 + alpha) for n in range(1, 64, 2)]
        assert max(vals) <= 4.0
        assert min(vals) >= max(vals) / 4.0

    def test_zero_coefficient_value(self):
        assert shift_coefficient(0, 1.0) == pytest.approx(2.0)

    def test_residual_matches_tail_rate(self):
        rng = np.random.default_rng(116)
        small = GridSpec(7)  # N = 128, band limit 16
        f = band_limited(rng, small, 12)
        g = band_limited(rng, small, 12)
        alpha = 1.0
        r32 = paraproduct_decomposition_check(f, g, alpha, n_max=32)
        r128 = paraproduct_decomposition_check(f, g, alpha, n_max=128)
        assert r128["residual"] < r32["residual"]
        rate = r32["residual"] / max(r128["residual"], 1e-30)
        analytic = r32["tail"] / r128["tail"]
        assert rate >= analytic / 4.0
        print(
            f"residual rate {rate:.2f} vs analytic tail rate {analytic:.2f} "
            f"(residuals {r32['residual']:.2e} -> {r128['residual']:.2e})"
        )

    def test_zero_input_zero_residual(self):
        small = GridSpec(7)
        z = Signal1D(small, np.zeros(small.size))
        f = pure_frequency(small, 3)
        rep = paraproduct_decomposition_check(z, f, 1.0, n_max=16)
        assert rep["residual"] <= 1e-14

    def test_single_frequency_small_residual(self):
        small = GridSpec(7)
        f = pure_frequency(small, 3)
        g = pure_frequency(small, 5)
        rep = paraproduct_decomposition_check(f, g, 1.0, n_max=64)
        assert rep["residual"] <= 2.0 * rep["tail"] * max(1.0, rep["target_norm"])

    def test_top_octave_refused(self):
        small = GridSpec(7)
        f = pure_frequency(small, 40)  # beyond N/8 = 16
        with pytest.raises(ValueError, match="band-limited"):
            paraproduct_decomposition_check(f, f, 1.0)
