"""Wave packets, Fourier projections, and multiplier building blocks.

A wave packet adapted to a tile is built entirely in the frequency
domain: a smooth compactly-supported profile is scaled into the middle
nine tenths of the tile's frequency interval, modulated so the spatial
envelope sits at the center of the space interval, inverse transformed,
and normalized to unit L^2 norm.  Its discrete Fourier coefficients are
exactly zero outside the shrunken frequency interval, which is what
makes disjoint-frequency orthogonality and sharp projection identities
hold to machine precision rather than approximately.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dyadic import DyadicInterval, Tile
from .grid import GridSpec, Signal1D, Signal2D, dft, idft, lp_norm


class ResolutionError(ValueError):
    """Tile too small (or out of band) for the grid."""


@dataclass(frozen=True)
class Window:
    """Even bump profile: 1 on [-flat, flat], 0 outside [-1, 1].

    The transition is the C^2 quintic step 6u^5 - 15u^4 + 10u^3, whose
    first two derivatives vanish at both ends of the ramp.
    """

    flat_fraction: float = 0.8

    def __post_init__(self):
        if not 0 < self.flat_fraction < 1:
            raise ValueError("flat_fraction must lie in (0, 1)")

    def evaluate(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        u = np.clip((1.0 - t) / (1.0 - self.flat_fraction), 0.0, 1.0)
        ramp = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
        return np.where(t <= self.flat_fraction, 1.0, ramp)


# Default packet window.  A wider flat region starves the transition ramp
# of frequency samples and the packets lose all spatial decay, so half the
# support ramps.
PACKET_WINDOW = Window(0.5)
# Littlewood-Paley bump: identically 1 on [-1/2, 1/2], supported on [-1, 1].
LP_WINDOW = Window(0.5)


@dataclass(eq=False)
class WavePacket:
    tile: Tile
    samples: Signal1D
    l2norm: float
    _spectrum: np.ndarray = None

    @property
    def grid(self) -> GridSpec:
        return self.samples.grid

    def spectrum(self) -> np.ndarray:
        """DFT coefficients; exactly zero outside the shrunken tile band."""
        if self._spectrum is not None:
            return self._spectrum
        return dft(self.samples).samples


_cache_lock = threading.Lock()
_packet_cache: dict = {}


def _freq_bins(grid: GridSpec, left: Fraction, right: Fraction) -> np.ndarray:
    """Integer representatives k with left <= k < right."""
    lo = math.ceil(left)
    if lo == left:
        lo = int(left)
    hi = math.ceil(right) - 1
    if Fraction(hi) == right - 1 and right.denominator == 1:
        hi = int(right) - 1
    return np.arange(lo, hi + 1)


def make_wave_packet(tile: Tile, window: Window = PACKET_WINDOW,
                     grid: GridSpec = None) -> WavePacket:
    """Unit-norm packet with spectrum inside nine tenths of the tile band."""
    if grid is None:
        raise ValueError("grid is required")
    key = (tile, window, grid)
    with _cache_lock:
        hit = _packet_cache.get(key)
    if hit is not None:
        return hit

    n = grid.size
    w = tile.freq
    if w.length < 4:
        raise ResolutionError(f"frequency interval has {w.length} bins; need >= 4")
    if w.left < Fraction(-n, 2) or w.right > Fraction(n, 2) + 1:
        raise ResolutionError("frequency interval leaves the representable band")

    center = float(w.center)
    half = 0.45 * float(w.length)  # nine-tenths shrink
    bins = _freq_bins(grid, w.left, w.right)
    vals = window.evaluate((bins - center) / half)
    keep = vals > 0
    bins, vals = bins[keep], vals[keep]
    if bins.size == 0:
        raise ResolutionError("no frequency bins survive the window")
    if np.any(bins < -n // 2 + 1) or np.any(bins > n // 2):
        raise ResolutionError("packet bins outside the representable band")

    x0 = float(tile.space.center)
    spec = np.zeros(n, dtype=np.complex128)
    spec[bins % n] = vals * np.exp(-2j * np.pi * bins * x0)
    raw = idft(Signal1D(grid, spec))
    norm = lp_norm(raw, 2)
    packet = WavePacket(tile, Signal1D(grid, raw.samples / norm), 1.0, spec / norm)
    with _cache_lock:
        _packet_cache[key] = packet
    return packet


def inner_product(f: Signal1D, packet) -> complex:
    """(1/N) sum f conj(phi)."""
    phi = packet.samples if isinstance(packet, WavePacket) else packet
    if f.grid != phi.grid:
        raise ValueError("grid mismatch")
    return complex(np.vdot(phi.samples, f.samples) / f.grid.size)


# ---------------------------------------------------------------------------
# Projections and multipliers


def _interval_bounds(interval):
    if isinstance(interval, DyadicInterval):
        return interval.left, interval.right
    a, b = interval
    return Fraction(a), Fraction(b)


def fourier_project(f: Signal1D, interval, sharp: bool = True,
                    window: Window = PACKET_WINDOW) -> Signal1D:
    """Restrict the spectrum to a frequency interval [a, b).

    sharp=True multiplies by the indicator of the bins; otherwise by the
    window fitted to the interval.
    """
    a, b = _interval_bounds(interval)
    freqs = f.grid.frequencies()
    spec = dft(f).samples.copy()
    if sharp:
        mask = (freqs >= float(a)) & (freqs < float(b))
        spec[~mask] = 0
    else:
        c = float(a + b) / 2
        half = float(b - a) / 2
        spec *= window.evaluate((freqs - c) / half)
    return idft(Signal1D(f.grid, spec))


def lowpass_multiplier(grid: GridSpec, cutoff_log2: float) -> np.ndarray:
    """The bump profile evaluated at xi / 2^cutoff_log2 on each bin.

    Identically 1 for |xi| <= 2^(cutoff-1), zero for |xi| >= 2^cutoff.
    """
    freqs = grid.frequencies()
    return LP_WINDOW.evaluate(freqs / (2.0**cutoff_log2))


def apply_multiplier(f, mult: np.ndarray, axis: int = 0):
    if isinstance(f, Signal1D):
        spec = np.fft.fft(f.samples) * mult
        return Signal1D(f.grid, np.fft.ifft(spec))
    spec = np.fft.fft(f.samples, axis=axis)
    shape = [1, 1]
    shape[axis] = mult.size
    spec = spec * mult.reshape(shape)
    return Signal2D(f.grid, np.fft.ifft(spec, axis=axis))


def lp_projections(f, k: int, axis: int = 0):
    """Scale-k smoothing P_k f and band piece Q_k f.

    P_k passes |xi| <= 2^(k-1) untouched and cuts |xi| >= 2^k; Q_k is the
    difference of consecutive smoothings, supported on the band
    2^(k-1) <= |xi| <= 2^(k+1).  Summing P_0 f + sum_{k=0}^{L-1} Q_k f
    telescopes back to f exactly on the representable band.
    """
    grid = f.grid
    if not 0 <= k <= grid.log_size - 1:
        raise ValueError(f"scale {k} outside [0, {grid.log_size - 1}]")
    low = lowpass_multiplier(grid, k)
    band = lowpass_multiplier(grid, k + 1) - low
    return apply_multiplier(f, low, axis), apply_multiplier(f, band, axis)


def lp_reconstruct(f, axis: int = 0):
    """P_0 f + sum_k Q_k f; equals f up to roundoff."""
    grid = f.grid
    out = apply_multiplier(f, lowpass_multiplier(grid, 0), axis)
    for k in range(grid.log_size):
        out = out + apply_multiplier(
            f, lowpass_multiplier(grid, k + 1) - lowpass_multiplier(grid, k), axis
        )
    return out


def fractional_derivative(f, alpha: float, axis: int = 0):
    """Multiplier |xi|^alpha on the integer representatives of one axis.

    The zero mode is annihilated, matching the homogeneous symbol.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    freqs = f.grid.frequencies().astype(float)
    mult = np.where(freqs == 0, 0.0, np.abs(freqs) ** alpha)
    return apply_multiplier(f, mult, axis)


def shifted_ops(f: Signal1D, k: int, n_shift: int):
    """Scale-k smoothing and band pieces translated by n 2^-k.

    Realized as the extra phase e^{2 pi i n xi / 2^k} on the multipliers.
    """
    grid = f.grid
    if abs(n_shift) > grid.size:
        raise ValueError("shift exceeds the grid size")
    if not 0 <= k <= grid.log_size - 1:
        raise ValueError(f"scale {k} outside [0, {grid.log_size - 1}]")
    freqs = grid.frequencies()
    phase = np.exp(2j * np.pi * n_shift * freqs / (2.0**k))
    low = lowpass_multiplier(grid, k) * phase
    band = (lowpass_multiplier(grid, k + 1) - lowpass_multiplier(grid, k)) * phase
    return apply_multiplier(f, low), apply_multiplier(f, band)


# ---------------------------------------------------------------------------
# The polynomially decaying weight


def torus_distance(points: np.ndarray, left: float, right: float) -> np.ndarray:
    """Distance on the unit circle from each point to the arc [left, right]."""
    inside = (points >= left) & (points < right)
    def circ(d):
        d = np.abs(d)
        return np.minimum(d, 1.0 - d)
    d = np.minimum(circ(points - left), circ(points - right))
    return np.where(inside, 0.0, d)


def chi_tilde(interval: DyadicInterval, m_exp: int, grid: GridSpec) -> Signal1D:
    """(1 + dist(x, I)/|I|)^(-m_exp) with torus distance."""
    if m_exp < 1:
        raise ValueError("m_exp must be >= 1")
    x = grid.points()
    d = torus_distance(x, float(interval.left), float(interval.right))
    w = (1.0 + d / float(interval.length)) ** (-float(m_exp))
    return Signal1D(grid, w)


def packet_decay_constant(packet: WavePacket, m_check: int = 10) -> float:
    """Smallest C with |phi(x)| <= C |I|^(-1/2) (1 + dist/|I|)^(-m_check)."""
    tile = packet.tile
    grid = packet.grid
    x = grid.points()
    d = torus_distance(x, float(tile.space.left), float(tile.space.right))
    ln = float(tile.space.length)
    envelope = ln ** (-0.5) * (1.0 + d / ln) ** (-float(m_check))
    return float(np.max(np.abs(packet.samples.samples) / envelope))
