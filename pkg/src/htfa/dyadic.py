"""Dyadic intervals, tiles, tri-tiles, trees, and their order structure.

All interval endpoints are exact rationals, so nesting, disjointness and
dilation predicates are decided without rounding.  Spatial intervals live
in torus units (length 2^-j <= 1, never wrapping); frequency intervals
live in integer frequency units (length 2^j), optionally on a grid
shifted by +-1/3 of the mesh width.

A tile is an area-one space x frequency rectangle.  A tri-tile shares one
space interval across three frequency intervals.  The order relation
P' < P (strict spatial inclusion plus a 3-fold frequency blowup
containment) is what trees and all coherence checks are built on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

_ALLOWED_SHIFTS = (Fraction(0), Fraction(1, 3), Fraction(-1, 3))

# Interpretation of "|I'| much smaller than |I|" in the fourth coherence
# condition: at least this factor between the lengths.
MUCH_LESS_FACTOR = 8


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """Half-open interval [ (m+shift) 2^-j, (m+1+shift) 2^-j )."""

    scale: int
    offset: int
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        if self.shift not in _ALLOWED_SHIFTS:
            raise ValueError("shift must be one of 0, 1/3, -1/3")

    @property
    def length(self) -> Fraction:
        return Fraction(1, 2**self.scale) if self.scale >= 0 else Fraction(2 ** (-self.scale))

    @property
    def left(self) -> Fraction:
        return (self.offset + self.shift) * self.length

    @property
    def right(self) -> Fraction:
        return self.left + self.length

    @property
    def center(self) -> Fraction:
        return self.left + self.length / 2

    def contains_point(self, x) -> bool:
        return self.left <= x < self.right

    def contains(self, other: "DyadicInterval") -> bool:
        return self.left <= other.left and other.right <= self.right

    def strictly_contains(self, other: "DyadicInterval") -> bool:
        return self.contains(other) and (self.left, self.right) != (other.left, other.right)

    def disjoint(self, other: "DyadicInterval") -> bool:
        return self.right <= other.left or other.right <= self.left

    def same_extent(self, other: "DyadicInterval") -> bool:
        return self.left == other.left and self.right == other.right

    def dilate(self, factor: int) -> "Region":
        """The interval with the same center and `factor` times the length."""
        half = self.length * factor / 2
        return Region(self.center - half, self.center + half)

    def halves(self):
        child = DyadicInterval(self.scale + 1, 2 * self.offset, self.shift)
        return child, DyadicInterval(self.scale + 1, 2 * self.offset + 1, self.shift)

    def parent(self) -> "DyadicInterval":
        return DyadicInterval(self.scale - 1, self.offset // 2, self.shift)

    def to_json(self) -> dict:
        return {"j": self.scale, "m": self.offset, "shift": str(self.shift)}

    @classmethod
    def from_json(cls, d: dict) -> "DyadicInterval":
        return cls(d["j"], d["m"], Fraction(d["shift"]))


@dataclass(frozen=True, order=True)
class Region:
    """Plain half-open rational interval, the result of dilating."""

    left: Fraction
    right: Fraction

    def contains(self, other) -> bool:
        return self.left <= other.left and other.right <= self.right

    def intersects(self, other) -> bool:
        return not (self.right <= other.left or other.right <= self.left)


@dataclass(frozen=True, order=True)
class Tile:
    """Space x frequency rectangle of area one."""

    space: DyadicInterval
    freq: DyadicInterval

    def __post_init__(self):
        if self.space.length * self.freq.length != 1:
            raise ValueError(
                f"tile area must be 1, got {self.space.length * self.freq.length}"
            )


@dataclass(frozen=True, order=True)
class TriTile:
    """One space interval with three frequency intervals."""

    space: DyadicInterval
    freqs: tuple

    def __post_init__(self):
        if len(self.freqs) != 3:
            raise ValueError("a tri-tile carries exactly three frequency intervals")
        for w in self.freqs:
            if self.space.length * w.length != 1:
                raise ValueError("each component tile must have area one")

    def component(self, j: int) -> Tile:
        """Component tile P_j, j in {1, 2, 3}."""
        return Tile(self.space, self.freqs[j - 1])

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "freqs": [w.to_json() for w in self.freqs],
        }

    @classmethod
    def from_json(cls, d: dict) -> "TriTile":
        return cls(
            DyadicInterval.from_json(d["space"]),
            tuple(DyadicInterval.from_json(w) for w in d["freqs"]),
        )


# ---------------------------------------------------------------------------
# Order relations between tiles


def tile_lt(p_prime: Tile, p: Tile) -> bool:
    """p' < p: strict spatial inclusion and freq(p) inside 3 freq(p')."""
    return p.space.strictly_contains(p_prime.space) and p_prime.freq.dilate(3).contains(p.freq)


def tile_le(p_prime: Tile, p: Tile) -> bool:
    return p_prime == p or tile_lt(p_prime, p)


def tile_lesssim(p_prime: Tile, p: Tile) -> bool:
    """p' <~ p: spatial inclusion and freq(p) inside 100 freq(p')."""
    return p.space.contains(p_prime.space) and p_prime.freq.dilate(100).contains(p.freq)


def tile_lesssim_prime(p_prime: Tile, p: Tile) -> bool:
    """p' <~' p: p' <~ p but not p' <= p."""
    return tile_lesssim(p_prime, p) and not tile_le(p_prime, p)


# ---------------------------------------------------------------------------
# Tile collections


@dataclass(eq=False)
class TileSet:
    """Finite ordered collection of tri-tiles."""

    tiles: list
    rank1_certified: bool = False

    def __post_init__(self):
        self.tiles = list(self.tiles)

    def __len__(self):
        return len(self.tiles)

    def __iter__(self):
        return iter(self.tiles)

    def __contains__(self, t):
        return t in set(self.tiles)

    def certify_rank_one(self) -> "TileSet":
        ok, witness = check_rank_one(self)
        if not ok:
            raise ValueError(f"collection is not rank one: {witness}")
        self.rank1_certified = True
        return self

    def to_json(self) -> str:
        return json.dumps([t.to_json() for t in self.tiles])

    @classmethod
    def from_json(cls, text: str) -> "TileSet":
        return cls([TriTile.from_json(d) for d in json.loads(text)])


@dataclass(eq=False)
class Tree:
    """Tiles sitting under a common top in component `tree_index`."""

    top: TriTile
    members: list
    tree_index: int

    def __post_init__(self):
        j = self.tree_index
        for p in self.members:
            if not tile_le(p.component(j), self.top.component(j)):
                raise ValueError("tree member violates the order relation to the top")

    @property
    def space(self) -> DyadicInterval:
        return self.top.space

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def check_rank_one(tiles: Iterable[TriTile]):
    """Pairwise coherence check; returns (ok, first violating pair or None).

    The four conditions, for every pair of distinct tri-tiles P, P':
      1. every component tile differs;
      2. one shared frequency interval forces all three to be shared;
      3. P'_j0 <= P_j0 for some j0 forces P'_j <~ P_j for every j;
      4. and if additionally |I_P'| is much smaller than |I_P|, then
         P'_j <~' P_j for every j != j0.
    """
    ts = list(tiles)
    for a in range(len(ts)):
        for b in range(len(ts)):
            if a == b:
                continue
            p, pp = ts[a], ts[b]  # pp plays P', p plays P
            if p == pp:
                return False, (p, pp, "duplicate tri-tile")
            for j in (1, 2, 3):
                if pp.component(j) == p.component(j):
                    return False, (p, pp, f"shared component tile {j}")
            shared = [j for j in (1, 2, 3) if pp.freqs[j - 1].same_extent(p.freqs[j - 1])]
            if shared and len(shared) != 3:
                return False, (p, pp, f"frequency interval shared only in {shared}")
            below = [j for j in (1, 2, 3) if tile_le(pp.component(j), p.component(j))]
            if below:
                for j in (1, 2, 3):
                    if not tile_lesssim(pp.component(j), p.component(j)):
                        return False, (p, pp, f"order coherence fails in component {j}")
                much_smaller = pp.space.length * MUCH_LESS_FACTOR <= p.space.length
                if much_smaller:
                    j0 = below[0]
                    for j in (1, 2, 3):
                        if j == j0:
                            continue
                        if not tile_lesssim_prime(pp.component(j), p.component(j)):
                            return False, (p, pp, f"separation fails in component {j}")
    return True, None


def extract_trees(tiles: TileSet, j: int, i: int) -> list:
    """Greedy maximal-tree cover of the collection, in the i-tree order.

    Repeatedly pick the candidate top with the largest space interval
    (ties: leftmost in space, then lowest frequency), collect every
    remaining tile under it, remove, repeat.  The output partitions the
    input.  j is the coefficient component the caller cares about; only
    i (the order component, i != j) affects the cover.
    """
    if i == j:
        raise ValueError("tree order component must differ from the size component")
    remaining = list(tiles)
    trees = []
    while remaining:
        top = max(
            remaining,
            key=lambda t: (
                t.space.length,
                -t.space.left,
                -t.freqs[i - 1].left,
            ),
        )
        members = [p for p in remaining if tile_le(p.component(i), top.component(i))]
        trees.append(Tree(top, members, i))
        taken = set(members)
        remaining = [p for p in remaining if p not in taken]
    return trees


def strongly_disjoint_check(trees: list, i: int):
    """Conditions for a chain of strongly i-disjoint trees.

    (i) component-i tiles are distinct across trees; (ii) when doubled
    frequency intervals meet, the tile with the coarser frequency stays
    out of the other tree's top space interval; (iii) at equal frequency
    lengths, later trees stay out of earlier tops.  Returns (ok, witness).
    """
    for l1 in range(len(trees)):
        for l2 in range(len(trees)):
            if l1 == l2:
                continue
            t1, t2 = trees[l1], trees[l2]
            for p in t1:
                for pp in t2:
                    w, wp = p.freqs[i - 1], pp.freqs[i - 1]
                    if p.component(i) == pp.component(i):
                        return False, (l1, l2, p, pp, "shared component tile")
                    if not w.dilate(2).intersects(wp.dilate(2)):
                        continue
                    if w.length < wp.length:
                        if not pp.space.disjoint(t1.space):
                            return False, (l1, l2, p, pp, "space meets other top")
                    elif wp.length < w.length:
                        if not p.space.disjoint(t2.space):
                            return False, (l1, l2, p, pp, "space meets other top")
                    elif l1 < l2:
                        if not pp.space.disjoint(t1.space):
                            return False, (l1, l2, p, pp, "equal-scale overlap")
    return True, None


def restrict(tiles: TileSet, interval: DyadicInterval) -> TileSet:
    """Tiles whose space interval is contained in `interval`."""
    return TileSet([p for p in tiles if interval.contains(p.space)])


# ---------------------------------------------------------------------------
# Canonical generator

def canonical_tileset(
    log_size: int,
    scales: Iterable[int],
    freq_shift: Fraction = Fraction(0),
    certify: bool = True,
) -> TileSet:
    """Whitney-style tri-tile family adapted to a 2^log_size grid.

    For each scale k the space intervals are all dyadic intervals of
    length 2^-k and the frequency triple is the three consecutive blocks
    [1,2), [2,3), [3,4) in units of 2^k (optionally on a 1/3-shifted
    grid), a lacunary template sitting just above the frequency origin.
    The fixed template keeps the family coherent across scales, which the
    rank-one check certifies at construction unless disabled.

    The family is usable with wave packets for 2 <= k <= log_size - 3
    (each frequency block then holds at least four representable bins);
    smaller scales are still valid geometry for order and coherence
    experiments.
    """
    n = 1 << log_size
    tiles = []
    for k in sorted(set(int(k) for k in scales)):
        if k < 0 or k > log_size:
            raise ValueError(f"scale {k} outside grid range")
        if (4 << k) > n // 2:
            raise ValueError(f"scale {k} pushes frequency blocks past the band")
        freqs = tuple(
            DyadicInterval(-k, m, freq_shift) for m in (1, 2, 3)
        )
        for m in range(1 << k):
            tiles.append(TriTile(DyadicInterval(k, m), freqs))
    ts = TileSet(tiles)
    if certify:
        ts.certify_rank_one()
    return ts
