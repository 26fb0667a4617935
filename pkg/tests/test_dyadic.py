from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from htfa.dyadic import (
    DyadicInterval,
    TileSet,
    Tile,
    TriTile,
    canonical_tileset,
    check_rank_one,
    extract_trees,
    restrict,
    strongly_disjoint_check,
    tile_le,
    tile_lesssim,
    tile_lesssim_prime,
    tile_lt,
)

THIRD = Fraction(1, 3)


def interval_strategy(shift=Fraction(0)):
    return st.builds(
        DyadicInterval,
        scale=st.integers(min_value=0, max_value=5),
        offset=st.integers(min_value=0, max_value=31),
        shift=st.just(shift),
    )


class TestDyadicInterval:
    def test_geometry(self):
        i = DyadicInterval(2, 3)
        assert i.left == Fraction(3, 4) and i.right == 1 and i.length == Fraction(1, 4)

    def test_shifted_geometry(self):
        i = DyadicInterval(1, 0, THIRD)
        assert i.left == Fraction(1, 6) and i.right == Fraction(2, 3)

    def test_negative_scale_is_frequency_block(self):
        i = DyadicInterval(-3, 2)
        assert i.left == 16 and i.right == 24

    def test_bad_shift_rejected(self):
        with pytest.raises(ValueError):
            DyadicInterval(0, 0, Fraction(1, 2))

    @given(interval_strategy(), interval_strategy())
    @settings(max_examples=300)
    def test_same_shift_nested_or_disjoint(self, a, b):
        assert a.disjoint(b) or a.contains(b) or b.contains(a)

    def test_dilate(self):
        r = DyadicInterval(-1, 3).dilate(3)  # [6,8) -> [4,10)
        assert r.left == 4 and r.right == 10

    def test_halves_and_parent(self):
        i = DyadicInterval(2, 3)
        lo, hi = i.halves()
        assert lo.parent() == i and hi.parent() == i
        assert lo.right == hi.left == i.center

    def test_json_round_trip(self):
        i = DyadicInterval(4, 7, -THIRD)
        assert DyadicInterval.from_json(i.to_json()) == i


class TestTile:
    def test_area_one_enforced(self):
        with pytest.raises(ValueError):
            Tile(DyadicInterval(1, 0), DyadicInterval(-2, 0))
        Tile(DyadicInterval(1, 0), DyadicInterval(-1, 0))  # area 1, fine

    def test_tri_tile_shares_space(self):
        sp = DyadicInterval(2, 1)
        t = TriTile(sp, tuple(DyadicInterval(-2, m) for m in (1, 2, 3)))
        for j in (1, 2, 3):
            assert t.component(j).space == sp

    def test_tileset_json_round_trip(self):
        ts = canonical_tileset(6, [2, 3], certify=False)
        back = TileSet.from_json(ts.to_json())
        assert list(back) == list(ts)


def _tile(jspace, mspace, mfreq):
    return Tile(DyadicInterval(jspace, mspace), DyadicInterval(-jspace, mfreq))


class TestOrderRelations:
    def test_equal_tiles(self):
        p = _tile(1, 0, 1)
        assert not tile_lt(p, p)
        assert tile_le(p, p)

    def test_child_space_parent_frequency(self):
        # smaller space interval, coarse tile's band inside triple blowup
        p = _tile(0, 0, 1)        # space [0,1), freq [1,2)
        pp = _tile(1, 0, 1)       # space [0,1/2), freq [2,4): 3w' = [1,5)
        assert tile_lt(pp, p)
        assert tile_le(pp, p)

    def test_far_frequencies(self):
        p = _tile(0, 0, 9)
        pp = _tile(1, 0, 1)
        assert not tile_lt(pp, p)

    def test_geometric_inclusion_oracle(self):
        # enumerate small tile pairs, compare with a direct computation
        tiles = [
            _tile(j, m, mf)
            for j in (0, 1, 2)
            for m in range(2**j)
            for mf in range(0, 5)
        ]
        for p in tiles:
            for pp in tiles:
                # direct geometric oracle, spelled out
                blow = pp.freq.dilate(3)
                direct = p.space.strictly_contains(pp.space) and (
                    blow.left <= p.freq.left and p.freq.right <= blow.right
                )
                assert tile_lt(pp, p) == direct

    def test_partial_order_reflexive_antisymmetric(self):
        tiles = [
            _tile(j, m, mf)
            for j in (0, 1, 2, 3)
            for m in range(2**j)
            for mf in range(0, 5)
        ]
        for p in tiles:
            assert tile_le(p, p)
        for p in tiles:
            for q in tiles:
                if tile_le(p, q) and tile_le(q, p):
                    assert p == q

    def test_order_not_transitive_counterexample(self):
        # the 3-blowup relation genuinely fails transitivity; pin one witness
        p = _tile(0, 0, 8)    # freq [8,9)
        pmid = _tile(1, 0, 3)  # freq [6,8), 3w = [4,10)
        pbot = _tile(2, 0, 0)  # freq [0,4), 3w = [-4,8)
        assert tile_lt(pmid, p)
        assert tile_lt(pbot, pmid)
        assert not tile_le(pbot, p)

    def test_lesssim_variants(self):
        p = _tile(0, 0, 1)
        pp = _tile(2, 1, 30)  # same spatial containment, frequency 100-close only
        assert tile_lesssim(pp, p)
        assert tile_lesssim_prime(pp, p)


class TestRankOne:
    def test_single_tri_tile(self):
        ts = TileSet([canonical_tileset(6, [2], certify=False).tiles[0]])
        ok, _ = check_rank_one(ts)
        assert ok

    @pytest.mark.parametrize("scales", [[2, 3, 4], [2, 4], [3]])
    def test_canonical_generator(self, scales):
        ts = canonical_tileset(8, scales, certify=False)
        ok, witness = check_rank_one(ts)
        assert ok, witness

    def test_canonical_generator_shifted(self):
        ts = canonical_tileset(8, [2, 3], freq_shift=Fraction(-1, 3), certify=False)
        ok, witness = check_rank_one(ts)
        assert ok, witness

    def test_partially_shared_frequencies_fail(self):
        sp = DyadicInterval(2, 0)
        a = TriTile(sp, (DyadicInterval(-2, 1), DyadicInterval(-2, 2), DyadicInterval(-2, 3)))
        b = TriTile(
            DyadicInterval(2, 1),
            (DyadicInterval(-2, 1), DyadicInterval(-2, 5), DyadicInterval(-2, 6)),
        )
        ok, witness = check_rank_one(TileSet([a, b]))
        assert not ok
        assert "shared only" in witness[2]

    def test_certify_sets_flag(self):
        ts = canonical_tileset(7, [2, 3])
        assert ts.rank1_certified


class TestTrees:
    def test_single_top_collects_everything(self):
        ts = canonical_tileset(7, [2, 3, 4], certify=False)
        under = [
            p for p in ts if tile_le(p.component(1), ts.tiles[0].component(1))
        ]
        trees = extract_trees(TileSet(under), j=2, i=1)
        assert len(trees) == 1
        assert sorted(trees[0].members) == sorted(under)

    def test_two_spatial_clusters(self):
        ts = canonical_tileset(7, [3], certify=False)
        left = [p for p in ts if p.space.right <= Fraction(1, 2)]
        right = [p for p in ts if p.space.left >= Fraction(1, 2)]
        trees = extract_trees(TileSet(left[:2] + right[:2]), j=2, i=1)
        assert len(trees) == 4  # same-scale tiles never sit under one another

    def test_partition_property(self):
        ts = canonical_tileset(8, [2, 3, 4], certify=False)
        trees = extract_trees(ts, j=3, i=1)
        seen = []
        for t in trees:
            seen.extend(t.members)
        assert sorted(seen) == sorted(ts.tiles)

    def test_rerun_on_tree_returns_tree(self):
        ts = canonical_tileset(8, [2, 3, 4], certify=False)
        trees = extract_trees(ts, j=3, i=1)
        big = max(trees, key=len)
        again = extract_trees(TileSet(big.members), j=3, i=1)
        assert len(again) == 1
        assert sorted(again[0].members) == sorted(big.members)


class TestStrongDisjointness:
    def test_single_tree(self):
        ts = canonical_tileset(7, [2, 3], certify=False)
        trees = extract_trees(ts, j=3, i=1)
        ok, _ = strongly_disjoint_check(trees[:1], i=1)
        assert ok

    def test_shared_tile_fails(self):
        ts = canonical_tileset(7, [2], certify=False)
        t = ts.tiles[0]
        tree = extract_trees(TileSet([t]), j=3, i=1)[0]
        ok, witness = strongly_disjoint_check([tree, tree], i=1)
        assert not ok
        assert "shared" in witness[4]


class TestRestrict:
    def test_whole_torus(self):
        ts = canonical_tileset(7, [2, 3], certify=False)
        assert len(restrict(ts, DyadicInterval(0, 0))) == len(ts)

    def test_disjoint_interval(self):
        ts = canonical_tileset(7, [2], certify=False)
        sub = restrict(ts, DyadicInterval(5, 0))
        assert len(sub) == 0

    def test_filter_oracle_and_idempotence(self):
        ts = canonical_tileset(8, [2, 3, 4], certify=False)
        half = DyadicInterval(1, 1)
        sub = restrict(ts, half)
        assert all(half.contains(p.space) for p in sub)
        assert len(sub) == sum(1 for p in ts if half.contains(p.space))
        again = restrict(sub, half)
        assert list(again) == list(sub)

    def test_monotone(self):
        ts = canonical_tileset(8, [2, 3, 4], certify=False)
        quarter = DyadicInterval(2, 1)
        half = DyadicInterval(1, 0)
        inner = set(restrict(ts, quarter).tiles)
        outer = set(restrict(ts, half).tiles)
        assert inner <= outer
