import math
from fractions import Fraction

import numpy as np
import pytest

from htfa.dyadic import DyadicInterval, Tile
from htfa.grid import GridSpec, Signal1D, Signal2D, dft, lp_norm, pure_frequency
from htfa.wavepacket import (
    LP_WINDOW,
    ResolutionError,
    Window,
    chi_tilde,
    fourier_project,
    fractional_derivative,
    inner_product,
    lowpass_multiplier,
    lp_projections,
    lp_reconstruct,
    make_wave_packet,
    packet_decay_constant,
    shifted_ops,
    torus_distance,
)

GRID = GridSpec(7)  # N = 128


def tile(jspace, mspace, mfreq):
    return Tile(DyadicInterval(jspace, mspace), DyadicInterval(-jspace, mfreq))


class TestWindow:
    def test_flat_region(self):
        w = Window(0.8)
        assert w.evaluate(0.0) == 1.0
        assert np.all(w.evaluate(np.linspace(-0.8, 0.8, 33)) == 1.0)

    def test_support(self):
        w = Window(0.8)
        assert w.evaluate(1.0) == 0.0
        assert w.evaluate(1.3) == 0.0
        assert 0 < w.evaluate(0.9) < 1

    def test_c2_transition_endpoints(self):
        # second finite difference stays small near both ramp ends
        w = Window(0.5)
        h = 1e-4
        for t0 in (0.5, 1.0):
            second = (w.evaluate(t0 + h) - 2 * w.evaluate(t0) + w.evaluate(t0 - h)) / h**2
            assert abs(second) < 0.2


class TestWavePacket:
    def test_low_frequency_bump_unit_norm(self):
        t = Tile(DyadicInterval(0, 0), DyadicInterval(0, 0))  # I=[0,1), w=[0,1)
        with pytest.raises(ResolutionError):
            make_wave_packet(t, grid=GRID)

    def test_unit_norm(self):
        p = make_wave_packet(tile(3, 2, 1), grid=GRID)
        assert lp_norm(p.samples, 2) == pytest.approx(1.0, abs=1e-12)

    def test_spectrum_inside_shrunken_band(self):
        t = tile(4, 3, 2)  # freq [32, 48): packet support within [33.2, 46.8]
        p = make_wave_packet(t, grid=GRID)
        spec = p.spectrum()
        freqs = GRID.frequencies()
        center, half = 40.0, 0.45 * 16
        outside = np.abs(freqs - center) >= half
        assert np.all(spec[outside] == 0)
        assert np.any(spec[~outside] != 0)

    def test_disjoint_frequency_orthogonality(self):
        a = make_wave_packet(tile(4, 1, 1), grid=GRID)
        b = make_wave_packet(tile(4, 5, 2), grid=GRID)
        assert abs(inner_product(a.samples, b)) <= 1e-14

    def test_self_inner_product_is_one(self):
        p = make_wave_packet(tile(3, 4, 2), grid=GRID)
        assert inner_product(p.samples, p) == pytest.approx(1.0, abs=1e-12)

    def test_plancherel_oracle(self):
        rng = np.random.default_rng(5)
        f = Signal1D(GRID, rng.normal(size=GRID.size) + 1j * rng.normal(size=GRID.size))
        p = make_wave_packet(tile(3, 1, 3), grid=GRID)
        direct = inner_product(f, p)
        fh, ph = dft(f).samples, dft(p.samples).samples
        via_spectrum = np.sum(fh * np.conj(ph)) / GRID.size**2
        assert direct == pytest.approx(via_spectrum, abs=1e-12)

    def test_too_few_bins_refused(self):
        with pytest.raises(ResolutionError):
            make_wave_packet(tile(1, 0, 1), grid=GRID)

    def test_out_of_band_refused(self):
        t = Tile(DyadicInterval(5, 0), DyadicInterval(-5, 3))  # freq [96,128)
        with pytest.raises(ResolutionError):
            make_wave_packet(t, grid=GRID)

    def test_spatial_decay(self):
        # the envelope constant is reported, not bounded; concentration is
        # the hard assertion (same threshold the verify suite uses)
        p = make_wave_packet(tile(4, 8, 1), grid=GridSpec(10))
        c = packet_decay_constant(p, m_check=10)
        assert np.isfinite(c)
        print(f"packet decay constant (exponent 10): {c:.3e}")
        x = GridSpec(10).points()
        d = torus_distance(x, float(p.tile.space.left), float(p.tile.space.right))
        near = d <= 2 * float(p.tile.space.length)
        mass = np.sum(np.abs(p.samples.samples[near]) ** 2)
        total = np.sum(np.abs(p.samples.samples) ** 2)
        assert mass / total >= 0.95

    def test_cache_returns_same_object(self):
        t = tile(3, 0, 2)
        assert make_wave_packet(t, grid=GRID) is make_wave_packet(t, grid=GRID)


class TestFourierProject:
    def test_pure_frequency_kept(self):
        f = pure_frequency(GRID, 5)
        out = fourier_project(f, (4, 8))
        assert np.allclose(out.samples, f.samples)

    def test_pure_frequency_killed(self):
        f = pure_frequency(GRID, 9)
        out = fourier_project(f, (4, 8))
        assert np.max(np.abs(out.samples)) <= 1e-14

    def test_idempotent_and_commuting(self):
        rng = np.random.default_rng(6)
        f = Signal1D(GRID, rng.normal(size=GRID.size) + 1j * rng.normal(size=GRID.size))
        once = fourier_project(f, (-10, 20))
        twice = fourier_project(once, (-10, 20))
        assert np.allclose(once.samples, twice.samples, atol=1e-14)
        ab = fourier_project(fourier_project(f, (-10, 20)), (5, 40))
        direct = fourier_project(f, (5, 20))
        assert np.allclose(ab.samples, direct.samples, atol=1e-13)

    def test_dyadic_interval_argument(self):
        f = pure_frequency(GRID, 17)
        out = fourier_project(f, DyadicInterval(-4, 1))  # [16, 32)
        assert np.allclose(out.samples, f.samples)


class TestLittlewoodPaley:
    def test_flat_part_passes(self):
        f = pure_frequency(GRID, 3)
        low, band = lp_projections(f, 3)  # P_3 flat for |xi| <= 4
        assert np.allclose(low.samples, f.samples)
        assert np.max(np.abs(band.samples)) <= 1e-14

    def test_constant_signal(self):
        f = Signal1D(GRID, np.full(GRID.size, 2.0))
        for k in range(1, GRID.log_size):
            low, band = lp_projections(f, k)
            assert np.allclose(low.samples, f.samples)
            assert np.max(np.abs(band.samples)) <= 1e-14

    def test_reconstruction(self):
        rng = np.random.default_rng(7)
        f = Signal1D(GRID, rng.normal(size=GRID.size) + 1j * rng.normal(size=GRID.size))
        out = lp_reconstruct(f)
        assert np.max(np.abs(out.samples - f.samples)) <= 1e-10 * lp_norm(f, 2)

    def test_scale_out_of_range(self):
        f = pure_frequency(GRID, 1)
        with pytest.raises(ValueError):
            lp_projections(f, GRID.log_size)

    def test_band_multiplier_support(self):
        mult = lowpass_multiplier(GRID, 4) - lowpass_multiplier(GRID, 3)
        freqs = np.abs(GRID.frequencies())
        assert np.all(mult[(freqs <= 4) | (freqs >= 32)] == 0)


class TestFractionalDerivative:
    def test_single_frequency(self):
        f = pure_frequency(GRID, -7)
        out = fractional_derivative(f, 0.6)
        assert np.allclose(out.samples, 7**0.6 * f.samples)

    def test_constant_killed(self):
        f = Signal1D(GRID, np.ones(GRID.size))
        out = fractional_derivative(f, 1.2)
        assert np.max(np.abs(out.samples)) <= 1e-14

    def test_composition(self):
        rng = np.random.default_rng(8)
        f = Signal1D(GRID, rng.normal(size=GRID.size) + 1j * rng.normal(size=GRID.size))
        a, b = 0.7, 1.1
        two_step = fractional_derivative(fractional_derivative(f, a), b)
        one_step = fractional_derivative(f, a + b)
        scale = lp_norm(one_step, 2)
        assert lp_norm(two_step - one_step, 2) <= 1e-10 * scale

    def test_rejects_nonpositive_alpha(self):
        f = pure_frequency(GRID, 1)
        with pytest.raises(ValueError):
            fractional_derivative(f, 0.0)

    def test_2d_axis(self):
        g = GridSpec(4, axes=2)
        n = g.size
        f = Signal2D(g, np.outer(np.exp(2j * np.pi * 3 * np.arange(n) / n), np.ones(n)))
        out = fractional_derivative(f, 1.0, axis=0)
        assert np.allclose(out.samples, 3.0 * f.samples)
        out_y = fractional_derivative(f, 1.0, axis=1)
        assert np.max(np.abs(out_y.samples)) <= 1e-12


class TestShiftedOps:
    def test_zero_shift_matches(self):
        rng = np.random.default_rng(9)
        f = Signal1D(GRID, rng.normal(size=GRID.size) + 1j * rng.normal(size=GRID.size))
        low0, band0 = lp_projections(f, 3)
        low, band = shifted_ops(f, 3, 0)
        assert np.allclose(low.samples, low0.samples)
        assert np.allclose(band.samples, band0.samples)

    def test_modulus_preserved_on_pure_frequency(self):
        f = pure_frequency(GRID, 2)
        low, _ = shifted_ops(f, 3, 5)
        low0, _ = lp_projections(f, 3)
        assert np.allclose(np.abs(low.samples), np.abs(low0.samples))

    def test_phase_additivity(self):
        rng = np.random.default_rng(10)
        f = Signal1D(GRID, rng.normal(size=GRID.size) + 1j * rng.normal(size=GRID.size))
        a, _ = shifted_ops(f, 4, 3)
        b, _ = shifted_ops(Signal1D(GRID, a.samples), 4, 2)
        c, _ = shifted_ops(f, 4, 5)
        # shifting twice composes the phases only when the multiplier is
        # flat; compare on a band-limited input instead
        flat = fourier_project(f, (-4, 5))
        a, _ = shifted_ops(flat, 4, 3)
        b, _ = shifted_ops(Signal1D(GRID, a.samples), 4, 2)
        c, _ = shifted_ops(flat, 4, 5)
        assert np.allclose(b.samples, c.samples, atol=1e-12)


class TestChiTilde:
    def test_inside_is_one(self):
        i = DyadicInterval(3, 2)
        w = chi_tilde(i, 20, GRID)
        x = GRID.points()
        inside = (x >= float(i.left)) & (x < float(i.right))
        assert np.all(w.samples[inside].real == 1.0)

    def test_one_length_away(self):
        i = DyadicInterval(3, 2)
        w = chi_tilde(i, 20, GRID)
        x = GRID.points()
        j = np.argmin(np.abs(x - (float(i.right) + float(i.length))))
        assert w.samples[j].real == pytest.approx(2.0**-20, rel=1e-6)

    def test_mass_constant(self):
        i = DyadicInterval(4, 3)
        w = chi_tilde(i, 20, GridSpec(10))
        mass = float(np.sum(w.samples.real)) / 1024
        ratio = mass / float(i.length)
        assert 1.0 <= ratio <= 3.0

    def test_rejects_bad_exponent(self):
        with pytest.raises(ValueError):
            chi_tilde(DyadicInterval(2, 1), 0, GRID)


def test_torus_distance_wraps():
    pts = np.array([0.0, 0.5, 0.95])
    d = torus_distance(pts, 0.0, 0.125)
    assert d[0] == 0.0
    assert d[1] == pytest.approx(0.375)
    assert d[2] == pytest.approx(0.05)
