from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import Point, Polygon
from shapely.ops import unary_union

from ammann import numerics as nm
from ammann.generator import (
    build_supertile,
    build_theta_patch,
    disk_patch,
    enumerate_W,
    hierarchy_of,
    level_tile,
    partner_address,
    random_code,
    supertile_counts,
    to_combinatorial,
    weight,
    with_ground_truth,
)

codes = st.text(alphabet="12", min_size=1, max_size=7)


def brute_W(theta_k: str) -> set[str]:
    """Every string over {1,2} up to weight e+2 tested against the defining inequality."""
    e = weight(theta_k)
    out = set()
    for n in range(1, e + 3):
        for sigma in product("12", repeat=n):
            w = weight(sigma)
            if w > e + 2:
                continue
            if int(sigma[-1]) > w - e >= 0:
                out.add("".join(sigma))
    return out


def _abs_area(poly):
    a = nm.polygon_area(poly)
    return a if a.sign() >= 0 else -a


def test_weight_examples():
    assert weight("") == 0
    assert weight("121") == 4
    assert weight("22") == 4


@pytest.mark.parametrize("theta_k,expected", [
    ("1", {"1", "2"}),
    ("2", {"2", "11", "12"}),
])
def test_enumerate_W_examples(theta_k, expected):
    assert enumerate_W(theta_k) == expected


def test_enumerate_W_empty_prefix_is_single_tile():
    assert enumerate_W("") == {""}


@given(codes)
def test_enumerate_W_matches_brute_force(theta_k):
    assert enumerate_W(theta_k) == brute_W(theta_k)


def test_bad_alphabet_rejected():
    with pytest.raises(ValueError):
        enumerate_W("13")


@pytest.mark.parametrize("n,count", [(1, 2), (2, 3), (3, 5), (4, 8), (5, 13), (6, 21)])
def test_supertile_counts(n, count):
    p = build_supertile(n)
    assert len(p) == count
    L, S = supertile_counts(n)
    assert L + S == count
    assert sum(t.size == "small" for t in p.tiles) == S


@pytest.mark.parametrize("theta_k", ["1", "2", "121", "2211", "11121111"])
def test_anchor_is_canonical_tile(theta_k):
    p = build_theta_patch(theta_k)
    t = p.by_address[p.anchor]
    sG = {nm.GoldenPoint(nm.S * q.x, nm.S * q.y).key() for q in nm.golden_bee()}
    assert set(t.corners) == sG
    assert t.size == "large"


def test_first_patch_is_scaled_bee():
    p = build_theta_patch("1")
    assert len(p) == 2
    sizes = sorted(t.size for t in p.tiles)
    assert sizes == ["large", "small"]
    total = sum((_abs_area(t.polygon()) for t in p.tiles), nm.ZERO)
    assert total == _abs_area(nm.golden_bee())
    T = to_combinatorial(p)
    shared = [e for e, fs in T.edge_faces.items() if len(fs) == 2]
    assert len(shared) == 1


@settings(max_examples=30, deadline=None)
@given(st.text(alphabet="12", min_size=1, max_size=9))
def test_patch_is_a_disc_without_overlap(theta_k):
    p = build_theta_patch(theta_k)
    # exact: areas add up to the area of the outline
    total = sum((_abs_area(t.polygon()) for t in p.tiles), nm.ZERO)
    outline = [nm.apply(p.frame, q) for q in nm.golden_bee()]
    assert total == _abs_area(outline)
    # independent float check: the union is a single polygon without holes
    polys = [Polygon(t.float_polygon()) for t in p.tiles]
    union = unary_union(polys)
    assert union.geom_type == "Polygon"
    assert len(union.interiors) == 0
    assert abs(union.area - sum(q.area for q in polys)) < 1e-9 * union.area


@settings(max_examples=20, deadline=None)
@given(st.text(alphabet="12", min_size=2, max_size=8))
def test_patches_are_nested(theta):
    small = build_theta_patch(theta[:-1])
    big = build_theta_patch(theta)
    cover = unary_union([Polygon(t.float_polygon()) for t in big.tiles])
    keys_big = {frozenset(t.corners) for t in big.tiles}
    for t in small.tiles:
        # each tile of the smaller patch is a tile of the bigger one
        assert frozenset(t.corners) in keys_big
        assert cover.buffer(1e-9).contains(Polygon(t.float_polygon()))


@pytest.mark.parametrize("theta_k", ["1", "2", "1211", "222", "12121"])
def test_small_tiles_have_distinct_partners(theta_k):
    p = build_theta_patch(theta_k)
    sizes = {t.address: t.size for t in p.tiles}
    partners = p.partners()
    smalls = [a for a, s in sizes.items() if s == "small"]
    # within a whole theta patch every small tile finds its partner
    assert set(partners) == set(smalls)
    assert len(set(partners.values())) == len(partners)
    for a, b in partners.items():
        assert sizes[b] == "large"
        assert b == partner_address(a)


def test_partner_of_large_rejected():
    with pytest.raises(ValueError):
        partner_address("21")


@pytest.mark.parametrize("n", [5, 6, 7])
def test_interior_degrees(n):
    T = to_combinatorial(build_supertile(n))
    interior = set(T.adjacency) - set(T.boundary_vertices)
    assert interior or n < 6
    assert all(T.degree(v) in (3, 4) for v in interior)


def test_single_tile_combinatorics():
    T = to_combinatorial(build_theta_patch(""))
    assert len(T.faces) == 1
    assert len(T.adjacency) == 6
    assert len(T.edge_faces) == 6


def test_hierarchy_counts_follow_recurrence():
    h = with_ground_truth(6)
    for j in range(7):
        assert len(h.levels[j]) == sum(supertile_counts(6 - j))


def test_scaled_union_identity():
    """Merging each level-j pair reproduces the level-(j+1) tile polygons."""
    p = build_supertile(6)
    h = hierarchy_of(p, 3)
    area = {t.address: _abs_area(t.polygon()) for t in p.tiles}
    for j in range(1, 4):
        nxt = {}
        for parent, kids in h.children[j].items():
            nxt[parent] = sum((area[k] for k in kids), nm.ZERO)
        for parent, a in nxt.items():
            scale = nm.TAU_G * nm.TAU_G
            expect = "large" if h.levels[j][parent] == "large" else "small"
            # a level-j large tile has area tau^(2j) times a level-0 large tile
            ref = _abs_area([nm.GoldenPoint(nm.S * q.x, nm.S * q.y) for q in nm.golden_bee()])
            for _ in range(j if expect == "large" else j - 1):
                ref = ref * scale
            assert a == ref
        area = nxt


def test_level_tile():
    assert level_tile("1121", 5, 0) == "1121"
    assert level_tile("1121", 5, 2) == "112"
    assert level_tile("1121", 5, 5) == ""


def test_disk_patch_covers_disc():
    p = disk_patch(random_code(30, 3), 6.0)
    union = unary_union([Polygon(t.float_polygon()) for t in p.tiles])
    assert union.contains(Point(0, 0).buffer(6.0))
    to_combinatorial(p).validate()
