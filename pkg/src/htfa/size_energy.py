"""Size and energy functionals over tile families, and maximal functions.

The size of a coefficient sequence is the largest tree-normalized l^2
mass: the supremum over trees (in either of the other two component
orders) of (|I_T|^-1 sum_{P in T} |c_P|^2)^(1/2).  At desk scale the
supremum is computed exactly by trying every tile as a candidate top.

Energy is the dyadic-level functional sup_n 2^n (sum_T |I_T|)^(1/2)
over chains of strongly disjoint trees whose coefficient mass sits
between 2^n |I_T|^(1/2) and the 2^(n+1) cap on every subtree.  The
selector is greedy in frequency order and its output always passes the
strong-disjointness conditions, which the tests re-verify.

The interval-family (paraproduct) variants replace trees by single
intervals, with an L^1-flavored energy and a weak-L^1 quasinorm for the
lacunary size, both evaluated exactly on the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .dyadic import (
    DyadicInterval,
    TileSet,
    Tree,
    restrict,
    strongly_disjoint_check,
    tile_le,
)
from .grid import GridSpec, Signal1D, lp_norm
from .wavepacket import (
    PACKET_WINDOW,
    Window,
    chi_tilde,
    inner_product,
    make_wave_packet,
)

DEFAULT_CHI_EXP = 20


@dataclass(eq=False)
class CoeffMap:
    """Inner products <f, phi_{P_j}> keyed by tri-tile, for one component j."""

    tileset: TileSet
    component: int
    values: dict

    def __post_init__(self):
        if self.component not in (1, 2, 3):
            raise ValueError("component must be 1, 2 or 3")
        members = set(self.tileset.tiles)
        for key in self.values:
            if key not in members:
                raise ValueError("coefficient key outside the tile set")

    def __getitem__(self, tile):
        return self.values[tile]

    def restricted(self, interval: DyadicInterval) -> "CoeffMap":
        sub = restrict(self.tileset, interval)
        keep = set(sub.tiles)
        return CoeffMap(sub, self.component, {t: v for t, v in self.values.items() if t in keep})


def coefficient_map(f: Signal1D, tiles: TileSet, component: int,
                    window: Window = PACKET_WINDOW) -> CoeffMap:
    grid = f.grid
    vals = {}
    for p in tiles:
        packet = make_wave_packet(p.component(component), window, grid)
        vals[p] = inner_product(f, packet)
    return CoeffMap(tiles, component, vals)


@dataclass(eq=False)
class SizeReport:
    value: float
    witness: Optional[Tree]


def _tree_mass(coeffs: CoeffMap, tree: Tree) -> float:
    return math.fsum(abs(coeffs[p]) ** 2 for p in tree.members)


def _maximal_tree(coeffs: CoeffMap, top, order_component: int) -> Tree:
    members = [
        p
        for p in coeffs.tileset
        if tile_le(p.component(order_component), top.component(order_component))
    ]
    return Tree(top, members, order_component)


def size(coeffs: CoeffMap) -> SizeReport:
    """Exact supremum of the tree-normalized coefficient mass.

    Trees are i-trees for i != j (j the coefficient component); every
    tile in the collection is tried as a top.
    """
    j = coeffs.component
    best_val, best_tree = 0.0, None
    for top in coeffs.tileset:
        for i in (1, 2, 3):
            if i == j:
                continue
            tree = _maximal_tree(coeffs, top, i)
            val = math.sqrt(_tree_mass(coeffs, tree) / float(top.space.length))
            if val > best_val:
                best_val, best_tree = val, tree
    return SizeReport(best_val, best_tree)


def evaluate_tree(coeffs: CoeffMap, tree: Tree) -> float:
    """Re-evaluate a size witness."""
    return math.sqrt(_tree_mass(coeffs, tree) / float(tree.space.length))


# ---------------------------------------------------------------------------
# Averaged sizes


def _weighted_average(f: Signal1D, interval: DyadicInterval, m_exp: int) -> float:
    w = chi_tilde(interval, m_exp, f.grid)
    integral = float(np.sum(np.abs(f.samples) * w.samples.real)) / f.grid.size
    return integral / float(interval.length)


def simple_size(f: Signal1D, tiles: TileSet, m_exp: int = DEFAULT_CHI_EXP) -> float:
    """sup over tile space intervals of the decaying-weight average of |f|."""
    intervals = {p.space for p in tiles}
    if not intervals:
        return 0.0
    return max(_weighted_average(f, i, m_exp) for i in intervals)


def _dyadic_intervals_within(grid: GridSpec, region) -> list:
    """Grid dyadic intervals (shift 0) contained in a rational region."""
    out = []
    for j in range(grid.log_size + 1):
        length = Fraction(1, 2**j)
        lo = math.ceil(region.left / length)
        hi = math.floor(region.right / length)
        for m in range(lo, hi):
            if 0 <= m < 2**j:
                out.append(DyadicInterval(j, m))
    return out


def modified_size(f: Signal1D, tiles: TileSet, interval: DyadicInterval,
                  m_exp: int = DEFAULT_CHI_EXP) -> float:
    """sup over dyadic J inside the tripled window that hold a tile's space.

    Restricting to tiles inside `interval` first; J must contain at least
    one such tile's space interval and sit inside the tripled interval.
    """
    local = restrict(tiles, interval)
    if len(local) == 0:
        raise ValueError("no admissible J: no tiles inside the interval")
    spaces = [p.space for p in local]
    region = interval.dilate(3)
    best = None
    for cand in _dyadic_intervals_within(f.grid, region):
        if any(cand.contains(s) for s in spaces):
            val = _weighted_average(f, cand, m_exp)
            best = val if best is None else max(best, val)
    if best is None:
        raise ValueError("no admissible J inside the tripled interval")
    return best


# ---------------------------------------------------------------------------
# Energy


@dataclass(eq=False)
class EnergyReport:
    value: float
    level: Optional[int]
    chain: list


def _subtree_cap_ok(coeffs: CoeffMap, tree: Tree, i: int, cap: float) -> bool:
    # binding subtrees are the maximal ones under each member as sub-top
    for sub_top in tree.members:
        mass = math.fsum(
            abs(coeffs[p]) ** 2
            for p in tree.members
            if tile_le(p.component(i), sub_top.component(i))
        )
        if math.sqrt(mass) > cap * math.sqrt(float(sub_top.space.length)) + 1e-12:
            return False
    return True


def energy(coeffs: CoeffMap) -> EnergyReport:
    """Dyadic-level supremum 2^n (sum |I_T|)^(1/2) over selected chains.

    For each level the selector walks candidate tops in increasing
    component-j frequency (ties: larger space, leftmost), keeps trees
    whose mass clears 2^n |I_T|^(1/2), whose subtrees respect the
    2^(n+1) cap, and which stay strongly j-disjoint from the chain so
    far.  Levels range over the window where the supremum can live.
    """
    j = coeffs.component
    ratios = [
        abs(coeffs[p]) / math.sqrt(float(p.space.length))
        for p in coeffs.tileset
        if abs(coeffs[p]) > 0
    ]
    if not ratios:
        return EnergyReport(0.0, None, [])
    n_hi = math.floor(math.log2(max(ratios)))
    n_lo = max(n_hi - 40, math.floor(math.log2(min(ratios))) - 1)

    best = EnergyReport(0.0, None, [])
    for n in range(n_hi, n_lo - 1, -1):
        level = 2.0**n
        chain = []
        used = set()
        candidates = sorted(
            coeffs.tileset,
            key=lambda t: (t.freqs[j - 1].left, -t.space.length, t.space.left),
        )
        for top in candidates:
            if top in used:
                continue
            for i in (1, 2, 3):
                if i == j:
                    continue
                members = [
                    p
                    for p in coeffs.tileset
                    if p not in used and tile_le(p.component(i), top.component(i))
                ]
                if not members:
                    continue
                tree = Tree(top, members, i)
                mass = math.sqrt(_tree_mass(coeffs, tree))
                if mass < level * math.sqrt(float(top.space.length)):
                    continue
                if not _subtree_cap_ok(coeffs, tree, i, 2.0 * level):
                    continue
                ok, _ = strongly_disjoint_check(chain + [tree], j)
                if not ok:
                    continue
                chain.append(tree)
                used.update(members)
                break
        if chain:
            val = level * math.sqrt(math.fsum(float(t.space.length) for t in chain))
            if val > best.value:
                best = EnergyReport(val, n, chain)
    return best


def localized_energy_decay(f_builder, tiles: TileSet, interval: DyadicInterval,
                           component: int, ks=(1, 2, 3, 4, 5)) -> dict:
    """Energy of the restricted family against shell-supported inputs.

    f_builder(k) must return a signal supported where the scaled distance
    to the interval is comparable to 2^k; the support condition is
    verified and the resulting energies tabulated.
    """
    local = restrict(tiles, interval)
    table = {}
    for k in ks:
        f = f_builder(k)
        supp = np.abs(f.samples) > 0
        if not np.any(supp):
            table[k] = 0.0
            continue
        x = f.grid.points()[supp]
        from .wavepacket import torus_distance

        d = torus_distance(x, float(interval.left), float(interval.right))
        scaled = d / float(interval.length)
        if not np.all((scaled >= 2.0 ** (k - 1)) & (scaled <= 2.0**k)):
            raise ValueError(f"support violates the scaled-distance shell for k={k}")
        table[k] = energy(coefficient_map(f, local, component)).value
    return table


# ---------------------------------------------------------------------------
# Interval-family (paraproduct) sizes and energies


def weak_l1_quasinorm(values: np.ndarray) -> float:
    """sup_lambda lambda |{|g| > lambda}| computed exactly on the grid."""
    a = np.sort(np.abs(values))[::-1]
    n = a.size
    counts = np.arange(1, n + 1) / n
    return float(np.max(a * counts))


def _lacunary_quantity(coeffs: dict, interval: DyadicInterval, family,
                       grid: GridSpec) -> float:
    acc = np.zeros(grid.size)
    x = grid.points()
    for i in family:
        if interval.contains(i):
            mask = (x >= float(i.left)) & (x < float(i.right))
            acc[mask] += abs(coeffs[i]) ** 2 / float(i.length)
    g = np.sqrt(acc)
    return weak_l1_quasinorm(g) / math.sqrt(float(interval.length))


def paraproduct_size(f: Signal1D, intervals: list, lacunary: bool,
                     window: Window = PACKET_WINDOW) -> float:
    """Largest normalized packet coefficient (or its weak-l2 variant).

    Non-lacunary packets ride the band [0, 1/|I|); lacunary ones ride
    [1/|I|, 2/|I|) and are mean-free.
    """
    coeffs = _interval_coeffs(f, intervals, lacunary, window)
    if not intervals:
        return 0.0
    if not lacunary:
        return max(
            abs(coeffs[i]) / math.sqrt(float(i.length)) for i in intervals
        )
    return max(_lacunary_quantity(coeffs, i0, intervals, f.grid) for i0 in intervals)


def _interval_coeffs(f: Signal1D, intervals, lacunary, window) -> dict:
    from .dyadic import Tile

    out = {}
    for i in intervals:
        block = DyadicInterval(-i.scale, 1 if lacunary else 0)
        packet = make_wave_packet(Tile(i, block), window, f.grid)
        out[i] = inner_product(f, packet)
    return out


def paraproduct_energy(f: Signal1D, intervals: list, lacunary: bool,
                       window: Window = PACKET_WINDOW) -> float:
    """sup_n 2^n sum |I| over disjoint intervals clearing the level."""
    if not intervals:
        return 0.0
    coeffs = _interval_coeffs(f, intervals, lacunary, window)
    if not lacunary:
        quantity = {i: abs(coeffs[i]) / math.sqrt(float(i.length)) for i in intervals}
    else:
        quantity = {
            i0: _lacunary_quantity(coeffs, i0, intervals, f.grid) for i0 in intervals
        }
    vals = [v for v in quantity.values() if v > 0]
    if not vals:
        return 0.0
    n_hi = math.floor(math.log2(max(vals)))
    n_lo = max(n_hi - 40, math.floor(math.log2(min(vals))) - 1)
    best = 0.0
    for n in range(n_hi, n_lo - 1, -1):
        level = 2.0**n
        qualifying = [i for i in intervals if quantity[i] >= level]
        # dyadic intervals overlap only by nesting: keep the maximal ones
        chosen = [
            i for i in qualifying
            if not any(o != i and o.contains(i) for o in qualifying)
        ]
        total = math.fsum(float(i.length) for i in chosen)
        best = max(best, level * total)
    return best


# ---------------------------------------------------------------------------
# Maximal functions


def maximal_function(f: Signal1D) -> Signal1D:
    """Dyadic maximal function: the best average over dyadic intervals."""
    n = f.grid.size
    a = np.abs(f.samples)
    out = a.copy()
    cur = a.copy()
    for j in range(f.grid.log_size):
        cur = 0.5 * (cur[0::2] + cur[1::2])
        out = np.maximum(out, np.repeat(cur, n // cur.size))
    return Signal1D(f.grid, out)


def shifted_maximal(f: Signal1D, n_shift: int) -> Signal1D:
    """sup over scales of the shifted smoothing |P_{k,n} f|."""
    from .wavepacket import shifted_ops

    out = np.zeros(f.grid.size)
    for k in range(f.grid.log_size):
        low, _ = shifted_ops(f, k, n_shift)
        out = np.maximum(out, np.abs(low.samples))
    return Signal1D(f.grid, out)
