"""Discrete signals on the periodic unit torus, and their norms.

Everything downstream lives on a grid of N = 2^L equispaced points per
axis, x_n = n/N, carrying the normalized counting measure 1/N per axis
(so the constant function 1 has unit norm in every L^p).  Frequencies
are integers with representative chosen in (-N/2, N/2]; that convention
is shared by every multiplier operator in the package, since both
|xi|^alpha and xi < eta comparisons depend on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

INF = Fraction(0)  # reciprocal encoding of p = infinity


def as_reciprocal(p) -> Fraction:
    """Encode an extended-real exponent p as the exact reciprocal 1/p.

    Accepts Fraction/int/float/str ("3/2", "inf"); infinity maps to 0.
    """
    if p is None:
        raise ValueError("exponent must not be None")
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "oo", "infinity"):
            return Fraction(0)
        p = Fraction(p)
    if isinstance(p, float) and math.isinf(p):
        return Fraction(0)
    p = Fraction(p)
    if p <= 0:
        raise ValueError(f"exponent must be positive, got {p}")
    return 1 / p


@dataclass(frozen=True)
class ExponentTuple:
    """Reciprocals (1/p, 1/q, 1/s') of a Lebesgue exponent triple.

    Stored as exact rationals; infinity is the reciprocal 0.  The Hoelder
    constraint 1/p + 1/q + 1/s' = 1 is *not* enforced here: predicates
    that need it check it themselves.
    """

    inv_p: Fraction
    inv_q: Fraction
    inv_sprime: Fraction

    @classmethod
    def from_exponents(cls, p, q, sprime) -> "ExponentTuple":
        return cls(as_reciprocal(p), as_reciprocal(q), as_reciprocal(sprime))

    def holder_sum(self) -> Fraction:
        return self.inv_p + self.inv_q + self.inv_sprime


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid with 2^log_size points per axis."""

    log_size: int
    axes: int = 1

    def __post_init__(self):
        if self.log_size < 3:
            raise ValueError("grid needs log_size >= 3")
        if self.axes not in (1, 2):
            raise ValueError("axes must be 1 or 2")

    @property
    def size(self) -> int:
        return 1 << self.log_size

    def points(self) -> np.ndarray:
        n = self.size
        return np.arange(n) / n

    def frequencies(self) -> np.ndarray:
        """Integer frequency representative of each DFT bin, in (-N/2, N/2]."""
        n = self.size
        idx = np.arange(n)
        return np.where(idx <= n // 2, idx, idx - n)


def _check_len(grid: GridSpec, samples: np.ndarray, axes: int):
    if grid.axes != axes:
        raise ValueError(f"grid has axes={grid.axes}, expected {axes}")
    want = (grid.size,) if axes == 1 else (grid.size, grid.size)
    if samples.shape != want:
        raise ValueError(f"sample shape {samples.shape} != {want}")


@dataclass(eq=False)
class Signal1D:
    """Complex samples on a 1-D periodic grid."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.complex128)
        _check_len(self.grid, self.samples, 1)
        self.samples.flags.writeable = False

    # small conveniences; heavy lifting stays in module functions
    def __add__(self, other):
        return Signal1D(self.grid, self.samples + _raw(other, self.grid))

    def __sub__(self, other):
        return Signal1D(self.grid, self.samples - _raw(other, self.grid))

    def __mul__(self, other):
        return Signal1D(self.grid, self.samples * _raw(other, self.grid))

    __rmul__ = __mul__

    def __abs__(self):
        return Signal1D(self.grid, np.abs(self.samples))

    def conj(self):
        return Signal1D(self.grid, np.conj(self.samples))


@dataclass(eq=False)
class Signal2D:
    """Complex samples on an N x N periodic grid; axis 0 is x, axis 1 is y."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.complex128)
        _check_len(self.grid, self.samples, 2)
        self.samples.flags.writeable = False

    def __add__(self, other):
        return Signal2D(self.grid, self.samples + _raw(other, self.grid))

    def __sub__(self, other):
        return Signal2D(self.grid, self.samples - _raw(other, self.grid))

    def __mul__(self, other):
        return Signal2D(self.grid, self.samples * _raw(other, self.grid))

    __rmul__ = __mul__

    def __abs__(self):
        return Signal2D(self.grid, np.abs(self.samples))

    def conj(self):
        return Signal2D(self.grid, np.conj(self.samples))


def _raw(x, grid: GridSpec):
    if isinstance(x, (Signal1D, Signal2D)):
        if x.grid != grid:
            raise ValueError("grid mismatch")
        return x.samples
    return x


@dataclass(eq=False)
class SignalFamily:
    """Ordered family of signals on one grid; may nest one level deep."""

    members: list

    def __post_init__(self):
        if not self.members:
            raise ValueError("family must be non-empty")
        g = self.grid
        for m in self.members:
            mg = m.grid if not isinstance(m, SignalFamily) else m.grid
            if mg != g:
                raise ValueError("family members must share one grid")

    @property
    def grid(self) -> GridSpec:
        m = self.members[0]
        return m.grid if not isinstance(m, SignalFamily) else m.grid

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


# ---------------------------------------------------------------------------
# Fourier transforms


def dft(f: Signal1D) -> Signal1D:
    """Forward transform, f_hat(k) = sum_n f(n) e^{-2 pi i k n / N}."""
    return Signal1D(f.grid, np.fft.fft(f.samples))


def idft(f: Signal1D) -> Signal1D:
    return Signal1D(f.grid, np.fft.ifft(f.samples))


def dft2(f: Signal2D) -> Signal2D:
    return Signal2D(f.grid, np.fft.fft2(f.samples))


def idft2(f: Signal2D) -> Signal2D:
    return Signal2D(f.grid, np.fft.ifft2(f.samples))


def pure_frequency(grid: GridSpec, k: int) -> Signal1D:
    """e_k(x) = exp(2 pi i k x) sampled on the grid."""
    n = grid.size
    return Signal1D(grid, np.exp(2j * np.pi * k * np.arange(n) / n))


def pure_frequency_2d(grid: GridSpec, kx: int, ky: int) -> Signal2D:
    n = grid.size
    ex = np.exp(2j * np.pi * kx * np.arange(n) / n)
    ey = np.exp(2j * np.pi * ky * np.arange(n) / n)
    return Signal2D(grid, np.outer(ex, ey))


# ---------------------------------------------------------------------------
# Norms


def _p_as_float(p):
    inv = as_reciprocal(p)
    return math.inf if inv == 0 else float(1 / inv)


def lp_norm(f, p) -> float:
    """((1/N^axes) sum |f|^p)^(1/p); p = inf gives max |f|.  p may be < 1."""
    pf = _p_as_float(p)
    a = np.abs(f.samples)
    if math.isinf(pf):
        return float(a.max())
    if pf <= 0:
        raise ValueError("p must be positive")
    meas = 1.0 / a.size
    return float((meas * np.sum(a**pf)) ** (1.0 / pf))


def mixed_norm(f: Signal2D, p1, p2) -> float:
    """|| ||f(x, .)||_{L^{p2}_y} ||_{L^{p1}_x}: inner norm over y first."""
    p1f, p2f = _p_as_float(p1), _p_as_float(p2)
    a = np.abs(f.samples)
    n = a.shape[1]
    if math.isinf(p2f):
        inner = a.max(axis=1)
    else:
        inner = (np.sum(a**p2f, axis=1) / n) ** (1.0 / p2f)
    if math.isinf(p1f):
        return float(inner.max())
    return float((np.sum(inner**p1f) / a.shape[0]) ** (1.0 / p1f))


def _pointwise_lr(members, r) -> np.ndarray:
    rf = _p_as_float(r)
    stack = []
    for m in members:
        if isinstance(m, SignalFamily):
            stack.append(_pointwise_lr(m.members, r))
        else:
            stack.append(np.abs(m.samples))
    arr = np.stack(stack)
    if math.isinf(rf):
        return arr.max(axis=0)
    return (np.sum(arr**rf, axis=0)) ** (1.0 / rf)


def lr_family_norm(family: SignalFamily, r, pointwise: bool = True):
    """Pointwise l^r aggregation x -> (sum_k |f_k(x)|^r)^(1/r).

    Nested families aggregate innermost first.  With pointwise=False the
    scalar L^r norm of the aggregated signal is returned (the full
    L^r(l^r) norm of the family).
    """
    agg = _pointwise_lr(family.members, r)
    first = family.members[0]
    while isinstance(first, SignalFamily):
        first = first.members[0]
    out = type(first)(family.grid, agg.astype(np.complex128))
    if pointwise:
        return out
    return lp_norm(out, r)


def mask_measure(mask) -> float:
    """Normalized measure of a 0/1 signal."""
    a = np.abs(mask.samples)
    return float(a.sum() / a.size)
