"""Bilinear and trilinear operators on the periodic grid.

The direct bilinear Hilbert transform is the multiplier operator

    (f, g) -> (1/N^2) sum_{xi < eta} f_hat(xi) g_hat(eta) e^{2 pi i (xi+eta) x}

with the strict comparison taken on integer frequency representatives;
the diagonal xi = eta contributes nothing.  Its model form is a sum over
a rank-one tri-tile family of wave-packet coefficients, and the two are
tied together only through norm experiments, never through an exact
identity.  The exact identities live elsewhere: duality between the
model operator and its trilinear form, the two computation paths of the
tensor product with a paraproduct, and dilation covariance of the direct
multiplier form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dyadic import TileSet
from .grid import GridSpec, Signal1D, Signal2D, lp_norm
from .size_energy import CoeffMap, coefficient_map, energy, size
from .wavepacket import (
    PACKET_WINDOW,
    Window,
    apply_multiplier,
    inner_product,
    lowpass_multiplier,
    make_wave_packet,
)


# ---------------------------------------------------------------------------
# Direct multiplier form


def _rep(grid: GridSpec) -> np.ndarray:
    return grid.frequencies()


_bht_geometry_cache: dict = {}


def _bht_geometry(n: int):
    hit = _bht_geometry_cache.get(n)
    if hit is None:
        idx = np.arange(n)
        rep = np.where(idx <= n // 2, idx, idx - n)
        mask = (rep[:, None] < rep[None, :]).ravel()
        out_bin = ((idx[:, None] + idx[None, :]) % n).ravel()[mask]
        hit = (mask, out_bin)
        if len(_bht_geometry_cache) < 8:
            _bht_geometry_cache[n] = hit
    return hit


def bht_direct(f: Signal1D, g: Signal1D) -> Signal1D:
    """Accelerated evaluation by scatter-adding over output bins."""
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    n = f.grid.size
    fh = np.fft.fft(f.samples)
    gh = np.fft.fft(g.samples)
    mask, out_bin = _bht_geometry(n)
    weights = (fh[:, None] * gh[None, :]).ravel()[mask]
    acc = np.bincount(out_bin, weights.real, minlength=n) + 1j * np.bincount(
        out_bin, weights.imag, minlength=n
    )
    return Signal1D(f.grid, np.fft.ifft(acc) / n)


def bht_direct_reference(f: Signal1D, g: Signal1D) -> Signal1D:
    """Plain double sum over frequency pairs; the oracle path."""
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    n = f.grid.size
    fh = np.fft.fft(f.samples)
    gh = np.fft.fft(g.samples)
    rep = _rep(f.grid)
    x = np.arange(n)
    out = np.zeros(n, dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            if rep[a] < rep[b]:
                out += fh[a] * gh[b] * np.exp(2j * np.pi * (rep[a] + rep[b]) * x / n)
    return Signal1D(f.grid, out / n**2)


def product_control(f: Signal1D, g: Signal1D) -> Signal1D:
    """The full-multiplier analogue: plain pointwise product."""
    return f * g


# ---------------------------------------------------------------------------
# Model operator and trilinear form


@dataclass(eq=False)
class TrilinearValue:
    value: complex
    breakdown: Optional[dict] = None

    def check_consistency(self, tol=1e-12) -> bool:
        if self.breakdown is None:
            return True
        return abs(sum(self.breakdown.values()) - self.value) <= tol * max(
            1.0, abs(self.value)
        )


def _model_terms(f, g, tiles: TileSet, window: Window, grid: GridSpec):
    for p in tiles:
        w1 = make_wave_packet(p.component(1), window, grid)
        w2 = make_wave_packet(p.component(2), window, grid)
        c = inner_product(f, w1) * inner_product(g, w2) / math.sqrt(
            float(p.space.length)
        )
        yield p, c


def bht_model(f: Signal1D, g: Signal1D, tiles: TileSet,
              window: Window = PACKET_WINDOW) -> Signal1D:
    """sum_P |I_P|^(-1/2) <f, phi1> <g, phi2> phi3(x) over a certified family."""
    if not tiles.rank1_certified:
        raise ValueError("tile family must be rank-one certified")
    grid = f.grid
    out = np.zeros(grid.size, dtype=np.complex128)
    for p, c in _model_terms(f, g, tiles, window, grid):
        out += c * make_wave_packet(p.component(3), window, grid).samples.samples
    return Signal1D(grid, out)


def pair(u: Signal1D, h: Signal1D) -> complex:
    """(1/N) sum u conj(h), the duality pairing for trilinear forms."""
    if u.grid != h.grid:
        raise ValueError("grid mismatch")
    return complex(np.vdot(h.samples, u.samples) / u.grid.size)


def trilinear_form(f: Signal1D, g: Signal1D, h: Signal1D, tiles: TileSet,
                   window: Window = PACKET_WINDOW,
                   keep_breakdown: bool = False) -> TrilinearValue:
    """sum_P |I_P|^(-1/2) <f, phi1> <g, phi2> <phi3, h>.

    Pairs exactly with bht_model: the value equals pair(bht_model(f,g), h).
    """
    if not tiles.rank1_certified:
        raise ValueError("tile family must be rank-one certified")
    grid = f.grid
    breakdown = {} if keep_breakdown else None
    total = 0.0 + 0.0j
    for p, c in _model_terms(f, g, tiles, window, grid):
        w3 = make_wave_packet(p.component(3), window, grid)
        term = c * np.conj(inner_product(h, w3))
        total += term
        if keep_breakdown:
            breakdown[p] = term
    return TrilinearValue(total, breakdown)


def trilinear_size_energy_bound_check(f, g, h, tiles: TileSet, thetas,
                                      window: Window = PACKET_WINDOW) -> dict:
    """Ratio of |trilinear form| to the size/energy product bound.

    thetas must be three values in [0, 1) summing to one.
    """
    t1, t2, t3 = thetas
    if not (0 <= t1 < 1 and 0 <= t2 < 1 and 0 <= t3 < 1):
        raise ValueError("each theta must lie in [0, 1)")
    if abs(t1 + t2 + t3 - 1.0) > 1e-12:
        raise ValueError("thetas must sum to one")
    lhs = abs(trilinear_form(f, g, h, tiles, window).value)
    rhs = 1.0
    for sig, j, theta in ((f, 1, t1), (g, 2, t2), (h, 3, t3)):
        coeffs = coefficient_map(sig, tiles, j, window)
        s = size(coeffs).value
        e = energy(coeffs).value
        rhs *= s**theta * e ** (1.0 - theta)
    ratio = 0.0 if rhs == 0 else lhs / rhs
    return {"lhs": lhs, "rhs": rhs, "ratio": ratio}


def shell_decomposition(f: Signal1D, interval) -> list:
    """Cut f into dyadic distance shells around an interval.

    Shell 0 is the doubled interval; shell l >= 1 is 2^(l+1) I minus 2^l I.
    The pieces sum back to f exactly.
    """
    from .wavepacket import torus_distance

    x = f.grid.points()
    d = torus_distance(x, float(interval.left), float(interval.right))
    scaled = d / float(interval.length)
    pieces = []
    claimed = np.zeros(f.grid.size, dtype=bool)
    inner = scaled <= 0.5  # inside the doubled interval
    pieces.append(Signal1D(f.grid, np.where(inner, f.samples, 0)))
    claimed |= inner
    l = 1
    while not np.all(claimed):
        lo, hi = 2.0 ** (l - 1) * 0.5, 2.0**l * 0.5
        ring = (~claimed) & (scaled <= hi)
        pieces.append(Signal1D(f.grid, np.where(ring, f.samples, 0)))
        claimed |= ring
        l += 1
        if l > 64:
            raise RuntimeError("shell decomposition failed to terminate")
    return pieces


# ---------------------------------------------------------------------------
# Paraproducts built from scale projections


@dataclass(frozen=True)
class ParaproductSpec:
    """Which slot carries the smoothing, and over which scales.

    kind I:   sum_k  P~_k (Q_k f . Q_k g)
    kind II:  sum_k  Q~_k (P_k f . Q_k g)
    kind III: sum_k  Q~_k (Q_k f . P_k g)

    The outer multiplier is widened so it passes the inner product's
    frequency support unchanged wherever that support stays away from
    zero (kind I's widened smoothing covers all of it).
    """

    kind: str
    scales: tuple = ()

    def __post_init__(self):
        if self.kind not in ("I", "II", "III"):
            raise ValueError("kind must be 'I', 'II' or 'III'")


def _default_scales(grid: GridSpec):
    return tuple(range(0, grid.log_size - 1))


def _outer_multiplier(grid: GridSpec, k: int, kind: str) -> np.ndarray:
    wide_low = lowpass_multiplier(grid, min(k + 3, grid.log_size))
    if kind == "I":
        return wide_low
    return wide_low - lowpass_multiplier(grid, k - 1)


def paraproduct(f, g, spec: ParaproductSpec, axis: int = 0):
    """One-parameter paraproduct of the selected kind."""
    grid = f.grid
    scales = spec.scales or _default_scales(grid)
    acc = None
    for k in scales:
        low = lowpass_multiplier(grid, k)
        band = lowpass_multiplier(grid, k + 1) - low
        if spec.kind == "I":
            inner = apply_multiplier(f, band, axis) * apply_multiplier(g, band, axis)
        elif spec.kind == "II":
            inner = apply_multiplier(f, low, axis) * apply_multiplier(g, band, axis)
        else:
            inner = apply_multiplier(f, band, axis) * apply_multiplier(g, low, axis)
        term = apply_multiplier(inner, _outer_multiplier(grid, k, spec.kind), axis)
        acc = term if acc is None else acc + term
    return acc


def biparam_paraproduct(f: Signal2D, g: Signal2D, specs) -> Signal2D:
    """Two-parameter paraproduct: one spec per axis, tensor multipliers."""
    spec_x, spec_y = specs
    grid = f.grid
    sx = spec_x.scales or _default_scales(grid)
    sy = spec_y.scales or _default_scales(grid)

    def slot_multipliers(spec, k):
        low = lowpass_multiplier(grid, k)
        band = lowpass_multiplier(grid, k + 1) - low
        if spec.kind == "I":
            return band, band
        if spec.kind == "II":
            return low, band
        return band, low

    out = np.zeros((grid.size, grid.size), dtype=np.complex128)
    fh = np.fft.fft2(f.samples)
    gh = np.fft.fft2(g.samples)
    for k in sx:
        fx, gx = slot_multipliers(spec_x, k)
        ox = _outer_multiplier(grid, k, spec_x.kind)
        for l in sy:
            fy, gy = slot_multipliers(spec_y, l)
            oy = _outer_multiplier(grid, l, spec_y.kind)
            a = np.fft.ifft2(fh * np.outer(fx, fy))
            b = np.fft.ifft2(gh * np.outer(gx, gy))
            out += np.fft.ifft2(np.fft.fft2(a * b) * np.outer(ox, oy))
    return Signal2D(grid, out)


# ---------------------------------------------------------------------------
# Discrete paraproduct over an interval family


def paraproduct_discrete(f: Signal1D, g: Signal1D, intervals,
                         nonlacunary_slot: int = 1,
                         window: Window = PACKET_WINDOW) -> Signal1D:
    """sum_I |I|^(-1/2) <f, phi1_I> <g, phi2_I> phi3_I(x).

    Exactly one slot rides the non-lacunary band [0, 1/|I|); the other
    two ride [1/|I|, 2/|I|) and are mean-free.
    """
    if nonlacunary_slot not in (1, 2, 3):
        raise ValueError("exactly one slot must be non-lacunary (1, 2 or 3)")
    from .dyadic import DyadicInterval, Tile

    grid = f.grid
    out = np.zeros(grid.size, dtype=np.complex128)
    for i in intervals:
        packets = []
        for slot in (1, 2, 3):
            block = DyadicInterval(-i.scale, 0 if slot == nonlacunary_slot else 1)
            packets.append(make_wave_packet(Tile(i, block), window, grid))
        c = (
            inner_product(f, packets[0])
            * inner_product(g, packets[1])
            / math.sqrt(float(i.length))
        )
        out += c * packets[2].samples.samples
    return Signal1D(grid, out)


def trilinear_form_discrete(f, g, h, intervals, nonlacunary_slot: int = 1,
                            window: Window = PACKET_WINDOW) -> complex:
    from .dyadic import DyadicInterval, Tile

    grid = f.grid
    total = 0.0 + 0.0j
    for i in intervals:
        packets = []
        for slot in (1, 2, 3):
            block = DyadicInterval(-i.scale, 0 if slot == nonlacunary_slot else 1)
            packets.append(make_wave_packet(Tile(i, block), window, grid))
        total += (
            inner_product(f, packets[0])
            * inner_product(g, packets[1])
            * np.conj(inner_product(h, packets[2]))
            / math.sqrt(float(i.length))
        )
    return complex(total)


# ---------------------------------------------------------------------------
# Carleson operator


def carleson(f: Signal1D) -> Signal1D:
    """sup over cut frequencies of |partial Fourier sum|, prefix-computed."""
    n = f.grid.size
    fh = np.fft.fft(f.samples)
    rep = _rep(f.grid)
    order = np.argsort(rep, kind="stable")
    x = np.arange(n)
    phases = np.exp(2j * np.pi * rep[order][:, None] * x[None, :] / n)
    terms = fh[order][:, None] * phases / n
    partial = np.cumsum(terms, axis=0)
    out = np.max(np.abs(partial), axis=0)
    return Signal1D(f.grid, np.maximum(out, 0.0))


# ---------------------------------------------------------------------------
# Square functions


def square_function(f, axes=(0,)) -> "Signal1D | Signal2D":
    """(sum over scales |Q_k f|^2)^(1/2), iterated over the chosen axes."""
    grid = f.grid
    if isinstance(f, Signal1D):
        axes = (0,)
    pieces = [f]
    for axis in axes:
        nxt = []
        for sig in pieces:
            for k in range(grid.log_size):
                band = lowpass_multiplier(grid, k + 1) - lowpass_multiplier(grid, k)
                nxt.append(apply_multiplier(sig, band, axis))
        pieces = nxt
    acc = sum(np.abs(p.samples) ** 2 for p in pieces)
    return type(f)(grid, np.sqrt(acc))


def zero_scale_part(f, axes=(0,)):
    """The smoothing at scale zero over the chosen axes (handled apart)."""
    grid = f.grid
    out = f
    if isinstance(f, Signal1D):
        axes = (0,)
    for axis in axes:
        out = apply_multiplier(out, lowpass_multiplier(grid, 0), axis)
    return out


# ---------------------------------------------------------------------------
# Tensor product of the bilinear Hilbert transform with a paraproduct


def _tensor_y_multipliers(grid: GridSpec, k: int, kind: str):
    """Separated low/band/outer triple that reproduces the product exactly.

    kind II uses a narrowed smoothing so the product's spectrum stays in
    an annulus where the widened outer band equals one; kind I's widened
    smoothing passes the doubled band outright.
    """
    band = lowpass_multiplier(grid, k + 1) - lowpass_multiplier(grid, k)
    wide_low = lowpass_multiplier(grid, min(k + 3, grid.log_size))
    if kind == "I":
        return band, band, wide_low
    narrow_low = lowpass_multiplier(grid, k - 2)
    outer = wide_low - lowpass_multiplier(grid, k - 2)
    return narrow_low, band, outer


def tensor_scales(grid: GridSpec, kind: str):
    # capped so the summand spectra never alias and the outer reproduces
    if kind == "I":
        return tuple(range(0, grid.log_size - 2))
    return tuple(range(2, grid.log_size - 2))


def tensor_bht_paraproduct(f: Signal2D, g: Signal2D, spec: ParaproductSpec) -> Signal2D:
    """BHT along x tensored with a paraproduct along y, by the scale sum.

    kind II: sum_k BHT(P_k^y f, Q_k^y g); kind I: sum_k BHT(Q_k^y f, Q_k^y g).
    The outer y-multiplier reproduces each summand exactly, so applying it
    is a no-op and the scale sum is the whole operator.  kind III is the
    mirror of kind II under swapping the arguments.
    """
    if spec.kind == "III":
        raise ValueError("kind III is the argument swap of kind II")
    grid = f.grid
    out = np.zeros((grid.size, grid.size), dtype=np.complex128)
    scales = spec.scales or tensor_scales(grid, spec.kind)
    for k in scales:
        mf, mg, _outer = _tensor_y_multipliers(grid, k, spec.kind)
        a = apply_multiplier(f, mf, axis=1)
        b = apply_multiplier(g, mg, axis=1)
        for col in range(grid.size):
            fa = Signal1D(grid_1d(grid), a.samples[:, col])
            gb = Signal1D(grid_1d(grid), b.samples[:, col])
            out[:, col] += bht_direct(fa, gb).samples
    return Signal2D(grid, out)


def grid_1d(grid: GridSpec) -> GridSpec:
    return GridSpec(grid.log_size, 1)


def tensor_bht_paraproduct_direct(f: Signal2D, g: Signal2D,
                                  spec: ParaproductSpec) -> Signal2D:
    """Direct 2-D multiplier form, a quadruple frequency contraction.

    The multiplier is the product of the strict half-plane indicator in
    (xi1, xi2) and the summed separated symbol in (eta1, eta2), with the
    output frequency the integer sums.  Quartic in N; keep N small.
    """
    if spec.kind == "III":
        raise ValueError("kind III is the argument swap of kind II")
    from .wavepacket import LP_WINDOW

    grid = f.grid
    n = grid.size
    if n > 64:
        raise ValueError("direct tensor evaluation is capped at N = 64")
    rep = _rep(grid)
    half_plane = rep[:, None] < rep[None, :]

    # separated y-symbol, with the outer profile evaluated at the exact
    # integer frequency sums (no aliasing of eta1 + eta2)
    scales = spec.scales or tensor_scales(grid, spec.kind)
    sum_rep = rep[:, None] + rep[None, :]
    m_y = np.zeros((n, n))
    for k in scales:
        mf, mg, _outer = _tensor_y_multipliers(grid, k, spec.kind)
        hi = min(k + 3, grid.log_size)
        outer_exact = LP_WINDOW.evaluate(sum_rep / 2.0**hi)
        if spec.kind != "I":
            outer_exact = outer_exact - LP_WINDOW.evaluate(sum_rep / 2.0 ** (k - 2))
        m_y += mf[:, None] * mg[None, :] * outer_exact

    fh = np.fft.fft2(f.samples)
    gh = np.fft.fft2(g.samples)
    x = np.arange(n)
    phase = np.exp(2j * np.pi * np.outer(np.arange(n), x) / n)  # phase[s, x]
    ybins = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n

    out = np.zeros((n, n), dtype=np.complex128)
    for i1 in range(n):
        for i2 in range(n):
            if not half_plane[i1, i2]:
                continue
            inner = (fh[i1][:, None] * gh[i2][None, :]) * m_y
            coeff = np.bincount(
                ybins.ravel(), inner.real.ravel(), minlength=n
            ) + 1j * np.bincount(ybins.ravel(), inner.imag.ravel(), minlength=n)
            out += np.outer(phase[(i1 + i2) % n], coeff @ phase)
    return Signal2D(grid, out / n**4)
