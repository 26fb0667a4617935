"""Exceptional sets, stopping-time decompositions, and localized forms.

The selection loop walks dyadic average levels downward.  At each level
it takes the maximal dyadic intervals whose decaying-weight average of
the mask sits in the half-open window [2^-n-1, 2^-n) and which still
hold an unclaimed tile, then claims every unclaimed tile spatially
inside.  Maximal qualifying intervals at one level are automatically
pairwise disjoint (dyadic intervals nest or miss), the claims partition
the collection, and the recorded window certificate is exact.

Running three stopping times against three masks and intersecting the
claims sends every tile to a single cell (n1, n2, n3, I) with I the
smallest of its three claiming intervals; the cell interval satisfies
the one-sided average bound against each mask, which is all the
intersection preserves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .dyadic import DyadicInterval, TileSet, restrict
from .grid import GridSpec, Signal1D, mask_measure
from .size_energy import DEFAULT_CHI_EXP, modified_size
from .wavepacket import chi_tilde, torus_distance


@dataclass(eq=False)
class ExceptionalSet:
    mask: Signal1D
    constant_used: float

    def measure(self) -> float:
        return mask_measure(self.mask)

    def complement_points(self) -> np.ndarray:
        return self.mask.grid.points()[self.mask.samples.real == 0]


def exceptional_set(f_mask: Signal1D, g_mask: Signal1D, budget: float) -> ExceptionalSet:
    """Superlevel set of the two maximal functions, threshold doubled
    until its measure fits the budget."""
    from .size_energy import maximal_function

    for m in (f_mask, g_mask):
        if not np.any(m.samples):
            raise ValueError("masks must be non-trivial")
    grid = f_mask.grid
    mf = maximal_function(f_mask).samples.real
    mg = maximal_function(g_mask).samples.real
    amf, amg = mask_measure(f_mask), mask_measure(g_mask)
    c = 1.0
    while c <= 2.0**40:
        omega = (mf > c * amf) | (mg > c * amg)
        if float(np.sum(omega)) / grid.size <= budget:
            return ExceptionalSet(Signal1D(grid, omega.astype(float)), c)
        c *= 2.0
    raise ValueError("budget unreachable")


def distance_partition(tiles: TileSet, omega: ExceptionalSet) -> dict:
    """Partition by the dyadic class of the scaled distance to the
    complement; class 0 exactly when the tile's space meets it."""
    grid = omega.mask.grid
    comp = omega.mask.samples.real == 0
    pts = grid.points()[comp]
    out: dict = {}
    for p in tiles:
        if pts.size == 0:
            d = math.inf
        else:
            d = float(np.min(torus_distance(pts, float(p.space.left), float(p.space.right))))
        if d == 0.0:
            cls = 0
        elif math.isinf(d):
            cls = grid.log_size + 1
        else:
            cls = max(1, math.floor(math.log2(1.0 + d / float(p.space.length))))
        out.setdefault(cls, []).append(p)
    return {k: TileSet(v) for k, v in out.items()}


# ---------------------------------------------------------------------------
# The stopping-time loop


@dataclass(eq=False)
class Decomposition:
    levels: dict            # n -> list of (interval, TileSet)
    certificates: dict      # (n, interval) -> recorded average
    leftover: TileSet

    def claimed_cells(self):
        for n, entries in sorted(self.levels.items()):
            for interval, tiles in entries:
                yield n, interval, tiles

    def to_json(self) -> dict:
        return {
            "levels": [
                {
                    "n": n,
                    "interval": interval.to_json(),
                    "average": self.certificates[(n, interval)],
                    "tiles": [t.to_json() for t in tiles],
                }
                for n, interval, tiles in self.claimed_cells()
            ],
            "leftover": [t.to_json() for t in self.leftover],
        }


def _all_dyadic_intervals(grid: GridSpec):
    for j in range(grid.log_size + 1):
        for m in range(1 << j):
            yield DyadicInterval(j, m)


def _interval_averages(weight: Signal1D, m_exp: int) -> dict:
    grid = weight.grid
    out = {}
    for interval in _all_dyadic_intervals(grid):
        w = chi_tilde(interval, m_exp, grid).samples.real
        val = float(np.sum(np.abs(weight.samples) * w)) / grid.size
        out[interval] = val / float(interval.length)
    return out


def stopping_time_select(tiles: TileSet, weight: Signal1D,
                         m_exp: int = DEFAULT_CHI_EXP) -> Decomposition:
    """Claim every tile through maximal intervals at descending levels."""
    if not np.any(weight.samples):
        raise ValueError("weight must not vanish: averages never clear any level")
    averages = _interval_averages(weight, m_exp)
    stock = list(tiles)
    if not stock:
        return Decomposition({}, {}, TileSet([]))

    relevant = [i for i in averages if any(i.contains(p.space) for p in tiles)]
    top = max(averages[i] for i in relevant)
    anchor = math.floor(-math.log2(mask_measure(weight)))
    n = min(math.floor(-math.log2(top)), anchor)
    guard = n + weight.grid.log_size + 60

    levels: dict = {}
    certificates: dict = {}
    while stock:
        if n > guard:
            raise RuntimeError("stopping-time loop failed to terminate")
        lo, hi = 2.0 ** (-n - 1), 2.0**-n
        qualifying = [
            i
            for i in relevant
            if lo <= averages[i] < hi and any(i.contains(p.space) for p in stock)
        ]
        maximal = [
            i for i in qualifying
            if not any(o != i and o.contains(i) for o in qualifying)
        ]
        if maximal:
            entries = []
            for interval in sorted(maximal, key=lambda i: i.left):
                claimed = [p for p in stock if interval.contains(p.space)]
                if not claimed:
                    continue
                entries.append((interval, TileSet(claimed)))
                certificates[(n, interval)] = averages[interval]
                taken = set(claimed)
                stock = [p for p in stock if p not in taken]
            if entries:
                levels[n] = entries
        n += 1
    return Decomposition(levels, certificates, TileSet(stock))


def triple_stopping(tiles: TileSet, f_mask: Signal1D, g_mask: Signal1D,
                    h_mask: Signal1D, m_exp: int = DEFAULT_CHI_EXP) -> dict:
    """Intersect three stopping-time claim structures.

    Every tile lands in exactly one cell (n1, n2, n3, I), I the smallest
    of its three claiming intervals.  Cell values are (TileSet, certs),
    certs the three one-sided average bounds 2^-n_j.
    """
    claims = []
    for mask in (f_mask, g_mask, h_mask):
        dec = stopping_time_select(tiles, mask, m_exp)
        tile_to = {}
        for n, interval, claimed in dec.claimed_cells():
            for p in claimed:
                tile_to[p] = (n, interval)
        claims.append(tile_to)

    cells: dict = {}
    for p in tiles:
        (n1, i1), (n2, i2), (n3, i3) = (claims[k][p] for k in range(3))
        smallest = min((i1, i2, i3), key=lambda i: i.length)
        key = (n1, n2, n3, smallest)
        cells.setdefault(key, []).append(p)
    return {k: TileSet(v) for k, v in cells.items()}


def carleson_packing(decomposition: Decomposition, mask: Signal1D) -> float:
    """Largest ratio of claimed length to 2^n times the mask measure."""
    meas = mask_measure(mask)
    worst = 0.0
    for n, entries in decomposition.levels.items():
        total = math.fsum(float(i.length) for i, _ in entries)
        worst = max(worst, total / (2.0**n * meas))
    return worst


# ---------------------------------------------------------------------------
# Localized trilinear forms and the induction-statement ratios


def localized_trilinear(f, g, h, f_mask, g_mask, h_mask, interval, tiles,
                        window=None):
    """Masked, space-restricted trilinear form."""
    from .operators import trilinear_form
    from .wavepacket import PACKET_WINDOW

    window = window or PACKET_WINDOW
    local = restrict(tiles, interval)
    local.rank1_certified = tiles.rank1_certified
    return trilinear_form(f * f_mask, g * g_mask, h * h_mask, local, window)


def _admissible_thetas(thetas):
    t1, t2, t3 = thetas
    if not (0 <= t1 < 1 and 0 <= t2 < 1 and 0 <= t3 < 1):
        raise ValueError("each theta must lie in [0, 1)")
    if abs(t1 + t2 + t3 - 1.0) > 1e-12:
        raise ValueError("thetas must sum to one")
    return t1, t2, t3


def check_condition_c(thetas, rt) -> bool:
    """(1 + theta_j)/2 - 1/r_j > 0 for the three tuple reciprocals."""
    t1, t2, t3 = thetas
    recs = (rt.inv_r1, rt.inv_r2, rt.inv_rprime())
    return all((1 + t) / 2 - float(r) > 0 for t, r in zip((t1, t2, t3), recs))


def localized_form_ratio(f, g, h, f_mask, g_mask, h_mask, interval, tiles,
                         thetas, eps: float = 0.05,
                         m_exp: int = DEFAULT_CHI_EXP) -> dict:
    """Scalar localized estimate: form value over the size-power bound.

    The bound is the product of the masks' windowed sizes raised to
    (1 + theta_j)/2 - eps, times the interval length.
    """
    t1, t2, t3 = _admissible_thetas(thetas)
    lam = abs(localized_trilinear(f, g, h, f_mask, g_mask, h_mask, interval, tiles).value)
    rhs = float(interval.length)
    for mask, theta in ((f_mask, t1), (g_mask, t2), (h_mask, t3)):
        s = modified_size(mask, tiles, interval, m_exp)
        rhs *= s ** (0.5 + theta / 2 - eps)
    ratio = 0.0 if rhs == 0 else lam / rhs
    return {"lhs": lam, "rhs": rhs, "ratio": ratio}


def localized_family_ratio(fs, gs, hs, f_mask, g_mask, h_mask, interval, tiles,
                           thetas, rt, eps: float = 0.05,
                           m_exp: int = DEFAULT_CHI_EXP) -> dict:
    """Depth-one vector-valued localized estimate.

    The families must be dominated: the pointwise l^{r1}, l^{r2}, l^{r'}
    aggregates stay under the respective masks.  The left side is the
    absolute sum over members of the localized forms.
    """
    t1, t2, t3 = _admissible_thetas(thetas)
    if not check_condition_c(thetas, rt):
        raise ValueError("tuple condition violated: raise the thetas")
    _check_dominated(fs, f_mask, float(1 / rt.inv_r1) if rt.inv_r1 else math.inf)
    _check_dominated(gs, g_mask, float(1 / rt.inv_r2) if rt.inv_r2 else math.inf)
    rp = rt.inv_rprime()
    _check_dominated(hs, h_mask, float(1 / rp) if rp else math.inf)
    lam = abs(
        sum(
            localized_trilinear(fk, gk, hk, f_mask, g_mask, h_mask, interval, tiles).value
            for fk, gk, hk in zip(fs, gs, hs)
        )
    )
    rhs = float(interval.length)
    for mask, theta in ((f_mask, t1), (g_mask, t2), (h_mask, t3)):
        s = modified_size(mask, tiles, interval, m_exp)
        rhs *= s ** (0.5 + theta / 2 - eps)
    ratio = 0.0 if rhs == 0 else lam / rhs
    return {"lhs": lam, "rhs": rhs, "ratio": ratio}


def _check_dominated(family, mask, r):
    agg = np.zeros(mask.grid.size)
    for m in family:
        a = np.abs(m.samples)
        agg = np.maximum(agg, a) if math.isinf(r) else agg + a**r
    if not math.isinf(r):
        agg = agg ** (1 / r)
    if np.any(agg > mask.samples.real + 1e-9):
        raise ValueError("family aggregate exceeds its mask")
