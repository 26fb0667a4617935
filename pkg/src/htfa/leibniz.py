"""Fractional Leibniz rule experiments.

Each experiment computes the ratio of the derivative norm of a product
to the sum-of-products bound, with both sides evaluated spectrally.
Admissibility of an exponent assignment is decided in exact rational
arithmetic before any float touches the data.

The decomposition check rebuilds the fractional derivative of a product
from low-high paraproduct pieces whose modified symbols are expanded in
a translation series: on the support of a scale-k piece the homogeneous
symbol equals 2^(k alpha) times a periodic profile, whose Fourier
coefficients c_n decay like n^-(1+alpha).  Truncating at |n| <= n_max
leaves a residual that shrinks at the analytic tail rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .grid import (
    GridSpec,
    Signal1D,
    Signal2D,
    as_reciprocal,
    lp_norm,
    mixed_norm,
)
from .wavepacket import apply_multiplier, fractional_derivative, lowpass_multiplier


class InadmissibleExponents(ValueError):
    pass


def _inv(x) -> Fraction:
    return as_reciprocal(x)


@dataclass(eq=False)
class LeibnizInstance:
    """Inputs, derivative orders, and the exponent assignment.

    pairs lists (p_i, q_i) per right-hand term: two terms in one
    parameter, four in two parameters.  For mixed norms each entry of
    pairs and the target is itself an (outer, inner) exponent pair.
    """

    f: "Signal1D | Signal2D"
    g: "Signal1D | Signal2D"
    alpha: float
    pairs: list
    target: object
    beta: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise InadmissibleExponents("alpha must be positive")


def _check_scalar_cell(pairs, target, alphas):
    inv_s = _inv(target)
    if inv_s == 0:
        raise InadmissibleExponents("target exponent must be finite")
    for p, q in pairs:
        ip, iq = _inv(p), _inv(q)
        if ip + iq != inv_s:
            raise InadmissibleExponents(
                f"pair ({p}, {q}) violates the splitting of 1/{target}"
            )
        if ip >= 1 or iq >= 1:
            raise InadmissibleExponents("pair exponents must exceed one")
    s = float(1 / inv_s)
    for a in alphas:
        if s <= 1.0 / (1.0 + a):
            raise InadmissibleExponents(
                f"target {target} at or below the 1/(1+order) threshold"
            )


def leibniz_ratio_1d(inst: LeibnizInstance) -> float:
    """|| D^a (f g) ||_s over the two-term product bound."""
    if len(inst.pairs) != 2:
        raise InadmissibleExponents("one-parameter rule takes two pairs")
    _check_scalar_cell(inst.pairs, inst.target, [inst.alpha])
    f, g, a = inst.f, inst.g, inst.alpha
    lhs = lp_norm(fractional_derivative(f * g, a), inst.target)
    (p1, q1), (p2, q2) = inst.pairs
    rhs = lp_norm(fractional_derivative(f, a), p1) * lp_norm(g, q1) + lp_norm(
        f, p2
    ) * lp_norm(fractional_derivative(g, a), q2)
    return 0.0 if rhs == 0 else lhs / rhs


def _d12(sig, alpha, beta):
    return fractional_derivative(fractional_derivative(sig, alpha, axis=0), beta, axis=1)


def leibniz_ratio_2d(inst: LeibnizInstance) -> float:
    """Both-axis derivative of a product against the four-term bound."""
    if len(inst.pairs) != 4:
        raise InadmissibleExponents("two-parameter rule takes four pairs")
    if inst.beta <= 0:
        raise InadmissibleExponents("beta must be positive")
    _check_scalar_cell(inst.pairs, inst.target, [inst.alpha, inst.beta])
    f, g, a, b = inst.f, inst.g, inst.alpha, inst.beta
    lhs = lp_norm(_d12(f * g, a, b), inst.target)
    (p1, q1), (p2, q2), (p3, q3), (p4, q4) = inst.pairs
    rhs = (
        lp_norm(_d12(f, a, b), p1) * lp_norm(g, q1)
        + lp_norm(f, p2) * lp_norm(_d12(g, a, b), q2)
        + lp_norm(fractional_derivative(f, a, axis=0), p3)
        * lp_norm(fractional_derivative(g, b, axis=1), q3)
        + lp_norm(fractional_derivative(f, b, axis=1), p4)
        * lp_norm(fractional_derivative(g, a, axis=0), q4)
    )
    return 0.0 if rhs == 0 else lhs / rhs


def _check_mixed_cell(pairs, target, alpha, beta):
    (s1, s2) = target
    i1, i2 = _inv(s1), _inv(s2)
    if i1 == 0 or i2 == 0:
        raise InadmissibleExponents("mixed targets must be finite")
    if not i1 < 2:  # s1 > 1/2
        raise InadmissibleExponents("outer target must exceed one half")
    if i2 > 1:  # s2 >= 1
        raise InadmissibleExponents("inner target must be at least one")
    s1f = float(1 / i1)
    if s1f <= max(1.0 / (1.0 + alpha), 1.0 / (1.0 + beta)):
        raise InadmissibleExponents(
            "outer target at or below the slow-decay threshold max 1/(1+order)"
        )
    for (pp, qq) in pairs:
        (p_out, p_in), (q_out, q_in) = pp, qq
        if _inv(p_out) + _inv(q_out) != i1 or _inv(p_in) + _inv(q_in) != i2:
            raise InadmissibleExponents(
                f"mixed pair {pp} x {qq} violates the axiswise splitting"
            )
        for e in (p_out, p_in, q_out, q_in):
            if _inv(e) >= 1:
                raise InadmissibleExponents("pair exponents must exceed one")


def leibniz_ratio_mixed(inst: LeibnizInstance) -> float:
    """Mixed-norm two-parameter ratio; target and pairs are (outer, inner)."""
    if len(inst.pairs) != 4:
        raise InadmissibleExponents("mixed rule takes four pairs")
    if inst.beta <= 0:
        raise InadmissibleExponents("beta must be positive")
    _check_mixed_cell(inst.pairs, inst.target, inst.alpha, inst.beta)
    f, g, a, b = inst.f, inst.g, inst.alpha, inst.beta
    s1, s2 = inst.target
    lhs = mixed_norm(_d12(f * g, a, b), s1, s2)
    terms = [
        (_d12(f, a, b), g),
        (f, _d12(g, a, b)),
        (fractional_derivative(f, a, axis=0), fractional_derivative(g, b, axis=1)),
        (fractional_derivative(f, b, axis=1), fractional_derivative(g, a, axis=0)),
    ]
    rhs = 0.0
    for ((pp, qq), (u, v)) in zip(inst.pairs, terms):
        rhs += mixed_norm(u, *pp) * mixed_norm(v, *qq)
    return 0.0 if rhs == 0 else lhs / rhs


# ---------------------------------------------------------------------------
# Shift-series reconstruction of the derivative of a product


@lru_cache(maxsize=None)
def shift_coefficient(n: int, alpha: float) -> float:
    """Fourier coefficient of |u|^alpha over one period of length eight.

    c_n = (1/4) int_0^4 u^alpha cos(pi n u / 4) du; real and even in n.
    """
    if n == 0:
        return 4.0**alpha / (alpha + 1.0)
    val, _err = quad(lambda u: u**alpha, 0.0, 4.0, weight="cos", wvar=math.pi * abs(n) / 4.0)
    return val / 4.0


def shift_series_tail(n_max: int, alpha: float, upto: int = 4096) -> float:
    """sum of |c_n| over |n| > n_max, truncated far out."""
    return 2.0 * sum(abs(shift_coefficient(n, alpha)) for n in range(n_max + 1, upto))


def _band_limit_ok(sig, axis, limit):
    spec = np.fft.fft(sig.samples, axis=axis) if isinstance(sig, Signal2D) else np.fft.fft(sig.samples)
    freqs = np.abs(sig.grid.frequencies())
    bad = freqs > limit
    if isinstance(sig, Signal2D):
        shape = [1, 1]
        shape[axis] = freqs.size
        mask = bad.reshape(shape) * np.ones_like(spec, dtype=bool)
        return not np.any(np.abs(spec[mask]) > 1e-10)
    return not np.any(np.abs(spec[bad]) > 1e-10)


def paraproduct_decomposition_check(f: Signal1D, g: Signal1D, alpha: float,
                                    n_max: int = 64) -> dict:
    """Rebuild D^a (f g) from paraproduct pieces with truncated symbols.

    Inputs must be band-limited to |xi| <= N/8 so every product of scale
    pieces stays representable.  Returns the residual norm and the
    analytic tail of the truncated series.
    """
    grid = f.grid
    n = grid.size
    limit = n // 8
    if not (_band_limit_ok(f, 0, limit) and _band_limit_ok(g, 0, limit)):
        raise ValueError(
            f"inputs must be band-limited to |xi| <= {limit}: aliasing risk"
        )
    target = fractional_derivative(f * g, alpha)

    freqs = grid.frequencies()
    k_top = grid.log_size - 3  # products reach 2^(k+2) <= N/2
    recon = np.zeros(n, dtype=np.complex128)

    # scale-zero block handled exactly
    p0 = lowpass_multiplier(grid, 0)
    low_prod = apply_multiplier(f, p0) * apply_multiplier(g, p0)
    recon += fractional_derivative(low_prod, alpha).samples

    for k in range(0, k_top + 1):
        low_k = lowpass_multiplier(grid, k)
        low_k1 = lowpass_multiplier(grid, k + 1)
        band_k = low_k1 - low_k
        piece = (
            apply_multiplier(f, low_k1) * apply_multiplier(g, band_k)
            + apply_multiplier(f, band_k) * apply_multiplier(g, low_k)
        )
        spec = np.fft.fft(piece.samples)
        series = np.zeros(n, dtype=np.complex128)
        period = 2.0 ** (k + 3)
        for m in range(-n_max, n_max + 1):
            c = shift_coefficient(m, alpha)
            if c == 0.0:
                continue
            series += c * np.exp(2j * np.pi * m * freqs / period) * spec
        recon += 2.0**(k * alpha) * np.fft.ifft(series)

    residual = lp_norm(Signal1D(grid, recon - target.samples), 2)
    return {
        "residual": residual,
        "tail": shift_series_tail(n_max, alpha),
        "target_norm": lp_norm(target, 2),
    }
