"""Vector-valued application, exponent ranges, and iterated Fourier integrals.

Range predicates are exact: points are rational reciprocal triples
(1/p, 1/q, 1/s') on the Hoelder plane, and every inequality from the
boundedness statements is evaluated in exact arithmetic, so boundary
points land exactly where the strict/non-strict comparisons put them.
Predicates answer in three values: inside, outside, or outside the
proven coverage — an unproven region is never reported as unbounded.

The iterated Fourier-integral operators are discretized with strict
chains of integer frequency representatives.  The hybrid trilinear
operator splits exactly into its two filtration pieces: the dyadic
splitting interval of a pair of filtration values is unique, and pairs
the splitting loses carry a vanishing third factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .grid import GridSpec, Signal1D, SignalFamily, as_reciprocal, lp_norm, lr_family_norm
from .operators import bht_direct

HALF = Fraction(1, 2)
ONE = Fraction(1)


class CoverageError(ValueError):
    """The queried tuple falls outside the proven cases."""


class ChainError(ValueError):
    def __init__(self, index, msg):
        super().__init__(msg)
        self.index = index


@dataclass(frozen=True)
class RangePoint:
    """Exact reciprocals (1/p, 1/q, 1/s') with 1/p + 1/q + 1/s' = 1."""

    inv_p: Fraction
    inv_q: Fraction
    inv_sprime: Fraction

    def __post_init__(self):
        object.__setattr__(self, "inv_p", Fraction(self.inv_p))
        object.__setattr__(self, "inv_q", Fraction(self.inv_q))
        object.__setattr__(self, "inv_sprime", Fraction(self.inv_sprime))
        if self.inv_p + self.inv_q + self.inv_sprime != 1:
            raise ValueError("reciprocals must sum to one")

    @classmethod
    def from_pq(cls, inv_p, inv_q) -> "RangePoint":
        ip, iq = Fraction(inv_p), Fraction(inv_q)
        return cls(ip, iq, 1 - ip - iq)


@dataclass(frozen=True)
class TupleR:
    """Reciprocals (1/r1, 1/r2, 1/r') with 1/r1 + 1/r2 = 1/r."""

    inv_r1: Fraction
    inv_r2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "inv_r1", Fraction(self.inv_r1))
        object.__setattr__(self, "inv_r2", Fraction(self.inv_r2))
        if not (0 <= self.inv_r1 < 1 and 0 <= self.inv_r2 < 1):
            raise ValueError("need 1 < r1, r2 <= infinity")
        if self.inv_r() > 1:
            raise ValueError("need r >= 1")

    @classmethod
    def from_exponents(cls, r1, r2) -> "TupleR":
        return cls(as_reciprocal(r1), as_reciprocal(r2))

    def inv_r(self) -> Fraction:
        return self.inv_r1 + self.inv_r2

    def inv_rprime(self) -> Fraction:
        return 1 - self.inv_r()

    def as_point(self) -> RangePoint:
        return RangePoint(self.inv_r1, self.inv_r2, self.inv_rprime())


def range_bht(pt: RangePoint) -> bool:
    """Scalar boundedness region on the Hoelder plane.

    0 <= 1/p < 1, 0 <= 1/q < 1, 0 < 1/p + 1/q < 3/2, all strict where shown.
    """
    s = pt.inv_p + pt.inv_q
    return (
        0 <= pt.inv_p < 1
        and 0 <= pt.inv_q < 1
        and 0 < s < Fraction(3, 2)
    )


@dataclass(frozen=True)
class RangeSet:
    """Descriptor of one target-space region, with membership."""

    case: str
    limit: Optional[Fraction] = None

    def contains(self, pt: RangePoint) -> bool:
        if self.case == "bht":
            return range_bht(pt)
        if self.case == "q-limited":
            return range_bht(pt) and 0 <= pt.inv_q < self.limit
        if self.case == "p-limited":
            return range_bht(pt) and 0 <= pt.inv_p < self.limit
        if self.case == "widened":
            inv_r = self.limit
            return (
                0 <= pt.inv_p < HALF + inv_r
                and 0 <= pt.inv_q < HALF + inv_r
                and -inv_r < pt.inv_sprime < 1
            )
        raise ValueError(f"unknown case {self.case}")


def describe_range(rt: TupleR) -> RangeSet:
    """Dispatch on which reciprocal of the tuple exceeds one half."""
    big = [
        name
        for name, v in (
            ("r1", rt.inv_r1),
            ("r2", rt.inv_r2),
            ("rprime", rt.inv_rprime()),
        )
        if v > HALF
    ]
    if len(big) > 1:
        raise CoverageError("more than one reciprocal exceeds 1/2")
    if not big:
        return RangeSet("bht")
    which = big[0]
    if which == "r1":
        return RangeSet("q-limited", Fraction(3, 2) - rt.inv_r1)
    if which == "r2":
        return RangeSet("p-limited", Fraction(3, 2) - rt.inv_r2)
    return RangeSet("widened", rt.inv_r())


def range_D(rt: TupleR, pt: RangePoint) -> bool:
    """Membership of (1/p, 1/q, 1/s') in the vector-valued region of rt."""
    return describe_range(rt).contains(pt)


def range_verdict(inv_r1, inv_r2, pt: RangePoint) -> str:
    """Three-valued answer from raw reciprocals: in, out, outside-coverage.

    Tuples that cannot satisfy r >= 1, or that put two reciprocals past
    one half, are reported as outside the proven coverage rather than as
    unbounded.
    """
    a, b = Fraction(inv_r1), Fraction(inv_r2)
    if not (0 <= a < 1 and 0 <= b < 1):
        raise ValueError("reciprocals must lie in [0, 1)")
    if a + b > 1:
        return "outside-coverage"
    try:
        return "in" if range_D(TupleR(a, b), pt) else "out"
    except CoverageError:
        return "outside-coverage"


def range_D_iterated(tuples: list) -> RangeSet:
    """Chained admissibility across iterated tuples; outermost region wins.

    Tuple j must lie (as a point on the Hoelder plane) inside the region
    of tuple j+1; failure reports the failing link.
    """
    if not tuples:
        raise ValueError("need at least one tuple")
    for j in range(len(tuples) - 1):
        inner_region = describe_range(tuples[j + 1])
        if not inner_region.contains(tuples[j].as_point()):
            raise ChainError(j, f"tuple {j} falls outside the region of tuple {j + 1}")
    return describe_range(tuples[0])


def range_Tr(r, pt: RangePoint) -> bool:
    """Boundedness region of the interval-family bilinear operator T_r.

    For r >= 2 it matches the scalar region; for 1 <= r < 2 the region is
    0 <= 1/p, 1/q < 1/2 + 1/r together with -1/r' < 1/s' < 1, strict.
    """
    inv_r = as_reciprocal(r)
    if inv_r > 1:
        raise ValueError("need r >= 1")
    if inv_r <= HALF:  # r >= 2
        return range_bht(pt)
    inv_rprime = 1 - inv_r
    return (
        0 <= pt.inv_p < HALF + inv_r
        and 0 <= pt.inv_q < HALF + inv_r
        and -inv_rprime < pt.inv_sprime < 1
    )


# ---------------------------------------------------------------------------
# Vector-valued application


def vv_apply(op, family_f: SignalFamily, family_g: SignalFamily, r) -> Signal1D:
    """Memberwise bilinear application, then the pointwise l^r aggregate."""
    if len(family_f) != len(family_g):
        raise ValueError("families must have equal length")
    outs = []
    for mf, mg in zip(family_f, family_g):
        if isinstance(mf, SignalFamily) != isinstance(mg, SignalFamily):
            raise ValueError("nesting structure must match")
        if isinstance(mf, SignalFamily):
            outs.append(vv_apply(op, mf, mg, r))
        else:
            outs.append(op(mf, mg))
    return lr_family_norm(SignalFamily(outs), r)


# ---------------------------------------------------------------------------
# Interval families and the square-function operators


@dataclass(eq=False)
class IntervalFamily:
    """Pairwise disjoint half-open frequency intervals [a_k, b_k)."""

    intervals: list

    def __post_init__(self):
        ivs = sorted((int(a), int(b)) for a, b in self.intervals)
        for (a, b) in ivs:
            if b <= a:
                raise ValueError("intervals must be nonempty")
        for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
            if a2 < b1:
                raise ValueError("intervals must be pairwise disjoint")
        self.intervals = ivs

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)


def _sharp_project(f: Signal1D, a: int, b: int) -> Signal1D:
    freqs = f.grid.frequencies()
    spec = np.fft.fft(f.samples)
    keep = (freqs >= a) & (freqs < b)
    return Signal1D(f.grid, np.fft.ifft(np.where(keep, spec, 0)))


def rf_operator(f: Signal1D, bands: IntervalFamily, nu) -> Signal1D:
    """Pointwise l^nu aggregate of the sharp band projections."""
    inv = as_reciprocal(nu)
    mags = [np.abs(_sharp_project(f, a, b).samples) for a, b in bands]
    arr = np.stack(mags)
    if inv == 0:
        out = arr.max(axis=0)
    else:
        nu_f = float(1 / inv)
        out = (np.sum(arr**nu_f, axis=0)) ** (1 / nu_f)
    return Signal1D(f.grid, out)


def t_r(f: Signal1D, g: Signal1D, bands: IntervalFamily, r) -> Signal1D:
    """l^r aggregate of the half-plane operator over band projections."""
    inv = as_reciprocal(r)
    mags = []
    for a, b in bands:
        pf = _sharp_project(f, a, b)
        pg = _sharp_project(g, a, b)
        mags.append(np.abs(bht_direct(pf, pg).samples))
    arr = np.stack(mags)
    if inv == 0:
        out = arr.max(axis=0)
    else:
        rf = float(1 / inv)
        out = (np.sum(arr**rf, axis=0)) ** (1 / rf)
    return Signal1D(f.grid, out)


def t_r_region_oracle(f: Signal1D, g: Signal1D, bands: IntervalFamily, r) -> Signal1D:
    """Direct nested-frequency double sums per band; the slow oracle."""
    grid = f.grid
    n = grid.size
    fh = np.fft.fft(f.samples)
    gh = np.fft.fft(g.samples)
    rep = grid.frequencies()
    x = np.arange(n)
    inv = as_reciprocal(r)
    mags = []
    for a, b in bands:
        acc = np.zeros(n, dtype=np.complex128)
        for i1 in range(n):
            if not (a <= rep[i1] < b):
                continue
            for i2 in range(n):
                if not (a <= rep[i2] < b) or not (rep[i1] < rep[i2]):
                    continue
                acc += fh[i1] * gh[i2] * np.exp(
                    2j * np.pi * (rep[i1] + rep[i2]) * x / n
                )
        mags.append(np.abs(acc) / n**2)
    arr = np.stack(mags)
    if inv == 0:
        out = arr.max(axis=0)
    else:
        rf = float(1 / inv)
        out = (np.sum(arr**rf, axis=0)) ** (1 / rf)
    return Signal1D(grid, out)


# ---------------------------------------------------------------------------
# Filtration of the line by the mass of one function


@dataclass(eq=False)
class Filtration:
    """Cumulative-mass map of |g|^p along frequency-representative order.

    phi[i] is the inclusive mass up to the i-th representative; the
    resolver maps dyadic subintervals of [0, 1] to contiguous runs of
    representative positions.  The rightmost interval at each depth is
    right-closed so the value 1 resolves.
    """

    grid: GridSpec
    order: np.ndarray  # DFT indices sorted by representative
    phi: np.ndarray

    def preimage(self, left: Fraction, right: Fraction, closed_right: bool):
        vals = self.phi
        if closed_right:
            mask = (vals >= float(left)) & (vals <= float(right))
        else:
            mask = (vals >= float(left)) & (vals < float(right))
        pos = np.nonzero(mask)[0]
        return (int(pos[0]), int(pos[-1]) + 1) if pos.size else None

    def split_pair(self, pos2: int, pos3: int, max_depth: int = 64):
        """The unique dyadic interval whose halves separate the two values."""
        v2, v3 = self.phi[pos2], self.phi[pos3]
        left, right = Fraction(0), Fraction(1)
        for _ in range(max_depth):
            mid = (left + right) / 2
            in_left2 = v2 < mid
            in_left3 = v3 < mid
            if in_left2 and not in_left3:
                return (left, right)
            if in_left2 and in_left3:
                right = mid
            elif not in_left2 and not in_left3:
                left = mid
            else:
                return None  # v3 left of v2; no splitting interval
        return None


def filtration_phi(g: Signal1D, p: float) -> Filtration:
    """Build the filtration; g must carry unit L^p norm and not vanish."""
    norm = lp_norm(g, p)
    if norm == 0:
        raise ValueError("g must not vanish identically")
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"g must be normalized in L^{p}; got {norm}")
    rep = g.grid.frequencies()
    order = np.argsort(rep, kind="stable")
    mass = np.abs(g.samples[order]) ** float(p) / g.grid.size
    phi = np.cumsum(mass)
    phi[-1] = 1.0  # pin the endpoint against roundoff
    return Filtration(g.grid, order, phi)


# ---------------------------------------------------------------------------
# The hybrid trilinear operator and its two pieces

BRUTE_FORCE_CAP = 64


def m_operator(f1: Signal1D, f2: Signal1D, g: Signal1D) -> Signal1D:
    """Triple sum over strict chains of frequency representatives.

    M(f1,f2,g)(m) = (1/N^3) sum_{x1<x2<x3} f1_hat(x1) f2_hat(x2) g(x3)
    e^{2 pi i m (x1+x2+x3)/N}, the chain running over representatives and
    g read at the grid point of the representative.
    """
    grid = f1.grid
    if f2.grid != grid or g.grid != grid:
        raise ValueError("grid mismatch")
    n = grid.size
    if n > BRUTE_FORCE_CAP:
        raise ValueError(f"triple sum refused for N > {BRUTE_FORCE_CAP}")
    rep = grid.frequencies()
    order = np.argsort(rep, kind="stable")
    h1 = np.fft.fft(f1.samples)[order]
    h2 = np.fft.fft(f2.samples)[order]
    gv = g.samples[order]
    r = rep[order].astype(float)
    m = np.arange(n)
    out = np.zeros(n, dtype=np.complex128)
    # prefix structure: sum over x2 of (sum_{x1<x2} h1 e) h2 e (sum_{x3>x2} g e)
    e = np.exp(2j * np.pi * np.outer(r, m) / n)  # e[i, m]
    pre = np.zeros(n, dtype=np.complex128)
    suf = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        suf += gv[i] * e[i]
    for i2 in range(n):
        suf -= gv[i2] * e[i2]
        out += pre * (h2[i2] * e[i2]) * suf
        pre += h1[i2] * e[i2]
    return Signal1D(grid, out / n**3)


def m_operator_reference(f1, f2, g) -> Signal1D:
    """Plain three-loop evaluation; oracle for the prefix version."""
    grid = f1.grid
    n = grid.size
    if n > 32:
        raise ValueError("reference triple loop refused for N > 32")
    rep = grid.frequencies()
    order = np.argsort(rep, kind="stable")
    h1 = np.fft.fft(f1.samples)[order]
    h2 = np.fft.fft(f2.samples)[order]
    gv = g.samples[order]
    r = rep[order].astype(float)
    m = np.arange(n)
    out = np.zeros(n, dtype=np.complex128)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                out += (
                    h1[a]
                    * h2[b]
                    * gv[c]
                    * np.exp(2j * np.pi * (r[a] + r[b] + r[c]) * m / n)
                )
    return Signal1D(grid, out / n**3)


def m1_operator(f1: Signal1D, f2: Signal1D, g: Signal1D,
                p: float = 1.5) -> Signal1D:
    """Filtration piece with both low variables inside the left half."""
    grid = f1.grid
    n = grid.size
    if not np.any(g.samples):
        return Signal1D(grid, np.zeros(n, dtype=np.complex128))
    filt = filtration_phi(g, p)
    rep = grid.frequencies()
    order = filt.order
    r = rep[order].astype(float)
    m = np.arange(n)
    gv = g.samples[order]
    out = np.zeros(n, dtype=np.complex128)
    h1 = np.fft.fft(f1.samples)[order]
    h2 = np.fft.fft(f2.samples)[order]
    e = np.exp(2j * np.pi * np.outer(r, m) / n)
    for omega, runs in _filtration_cells(filt, n).items():
        (l_lo, l_hi), (r_lo, r_hi) = runs
        left_pairs = np.zeros(n, dtype=np.complex128)
        pre = np.zeros(n, dtype=np.complex128)
        for i in range(l_lo, l_hi):
            left_pairs += pre * (h2[i] * e[i])
            pre += h1[i] * e[i]
        gright = np.zeros(n, dtype=np.complex128)
        for i in range(r_lo, r_hi):
            gright += gv[i] * e[i]
        out += left_pairs * gright
    return Signal1D(grid, out / n**3)


def m1_via_band_rewrite(f1: Signal1D, f2: Signal1D, g: Signal1D,
                        p: float = 1.5) -> Signal1D:
    """Same piece assembled from half-plane operators of band projections.

    Each splitting interval contributes the half-plane operator of the two
    inputs projected onto the left run's representative band, times the
    transform of g restricted to the right run.
    """
    grid = f1.grid
    n = grid.size
    filt = filtration_phi(g, p)
    rep = grid.frequencies()
    order = filt.order
    r = rep[order]
    out = np.zeros(n, dtype=np.complex128)
    for omega, runs in _filtration_cells(filt, n).items():
        (l_lo, l_hi), (r_lo, r_hi) = runs
        band = (int(r[l_lo]), int(r[l_hi - 1]) + 1)
        pf = _sharp_project(f1, *band)
        pg = _sharp_project(f2, *band)
        masked = np.zeros(n, dtype=np.complex128)
        masked[order[r_lo:r_hi]] = g.samples[order[r_lo:r_hi]]
        out += bht_direct(pf, pg).samples * np.fft.ifft(masked)
    return Signal1D(grid, out)


def m2_operator(f1: Signal1D, f2: Signal1D, g: Signal1D,
                p: float = 1.5) -> Signal1D:
    """Filtration piece with the lowest variable left of the left half."""
    grid = f1.grid
    n = grid.size
    if not np.any(g.samples):
        return Signal1D(grid, np.zeros(n, dtype=np.complex128))
    filt = filtration_phi(g, p)
    rep = grid.frequencies()
    order = filt.order
    r = rep[order].astype(float)
    m = np.arange(n)
    gv = g.samples[order]
    h1 = np.fft.fft(f1.samples)[order]
    h2 = np.fft.fft(f2.samples)[order]
    e = np.exp(2j * np.pi * np.outer(r, m) / n)
    out = np.zeros(n, dtype=np.complex128)
    prefix = np.cumsum(h1[:, None] * e, axis=0)  # prefix[i] = sum_{j <= i}
    for omega, runs in _filtration_cells(filt, n).items():
        (l_lo, l_hi), (r_lo, r_hi) = runs
        f1_left = prefix[l_lo - 1] if l_lo > 0 else np.zeros(n, dtype=np.complex128)
        f2_mid = np.zeros(n, dtype=np.complex128)
        for i in range(l_lo, l_hi):
            f2_mid += h2[i] * e[i]
        gright = np.zeros(n, dtype=np.complex128)
        for i in range(r_lo, r_hi):
            gright += gv[i] * e[i]
        out += f1_left * f2_mid * gright
    return Signal1D(grid, out / n**3)


def _filtration_cells(filt: Filtration, n: int) -> dict:
    """Left/right position runs of every dyadic interval that splits pairs.

    Walk the dyadic tree of [0, 1]; an interval contributes when both of
    its halves hold at least one filtration value.  The rightmost interval
    at each depth is right-closed.
    """
    out = {}
    stack = [(Fraction(0), Fraction(1))]
    while stack:
        left, right = stack.pop()
        mid = (left + right) / 2
        closed = right == 1
        lrun = filt.preimage(left, mid, closed_right=False)
        rrun = filt.preimage(mid, right, closed_right=closed)
        if lrun and rrun:
            out[(left, right)] = (lrun, rrun)
        # descend while any value remains strictly inside
        span = filt.preimage(left, right, closed_right=closed)
        if span and span[1] - span[0] >= 2 and right - left > Fraction(1, 2**40):
            stack.append((left, mid))
            stack.append((mid, right))
    return out
