from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ammann.amalgamation import (
    NotAmmannError,
    amalgamate,
    amalgamate_patch,
    build_reference_maps,
    color_red,
    ground_truth_pairs,
    merge_faces,
    resolve_partners,
)
from ammann.distortion import apply
from ammann.generator import (
    build_supertile,
    disk_patch,
    level_tile,
    random_code,
    to_combinatorial,
)
from ammann.planar_map import CombTiling, automorphism_count, induced_subtiling, map_isomorphism


@pytest.fixture(scope="module")
def disc():
    p = disk_patch(random_code(40, 7), 12.0)
    return p, to_combinatorial(p)


def square_grid(n: int) -> CombTiling:
    def v(a, b):
        return a * (n + 1) + b
    return CombTiling(faces={i * n + j: (v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1))
                             for i in range(n) for j in range(n)})


def test_reference_maps():
    m1, m2 = build_reference_maps()
    assert (len(m1.tiling.faces), len(m1.arrows)) == (8, 3)
    assert (len(m2.tiling.faces), len(m2.arrows)) == (13, 5)
    assert automorphism_count(m1.tiling) == 1
    assert automorphism_count(m2.tiling) == 1
    for m in (m1, m2):
        assert len(set(m.arrows.values())) == len(m.arrows)


def test_level6_splits_into_level4_and_level5():
    T = to_combinatorial(build_supertile(6))
    red = color_red(T, "leaf", boundary_convention=True)
    ind = induced_subtiling(T, red.edges)
    assert sorted(len(m) for m in ind.members.values()) == [8, 13]
    refs = {len(r.tiling.faces): r.tiling for r in build_reference_maps()}
    for members in ind.members.values():
        sub = T.restrict(members)
        assert map_isomorphism(sub, refs[len(members)]) is not None


def test_level5_has_no_interior_red_cycle():
    T = to_combinatorial(build_supertile(5))
    assert len(color_red(T, "cycle")) == 0


def test_red_edges_join_degree_four_vertices(disc):
    _, T = disc
    red = color_red(T)
    assert red.edges
    assert all(T.degree(u) == 4 and T.degree(v) == 4 for u, v in red.edges)


def test_pruning_modes_agree(disc):
    _, T = disc
    assert color_red(T, "leaf").edges == color_red(T, "cycle").edges


def test_unknown_mode_rejected(disc):
    with pytest.raises(ValueError):
        color_red(disc[1], "bogus")


def test_red_set_survives_distortion(disc):
    _, T = disc
    D = apply("sine-042", T).tiling
    assert color_red(D).edges == color_red(T).edges


def test_merges_equal_ground_truth(disc):
    p, T = disc
    res = amalgamate_patch(T)
    expected = [q for q in ground_truth_pairs(T, p.top, 0) if q[0] in res.certified]
    assert res.merges == expected
    assert len(res.merges) > 100
    smalls = [s for s, _ in res.merges]
    larges = [b for _, b in res.merges]
    assert len(set(smalls)) == len(smalls)
    assert len(set(larges)) == len(larges)


def test_red_regions_are_level5_tiles(disc):
    p, T = disc
    res = amalgamate_patch(T)
    assert res.regions
    for level, members in res.regions.values():
        anc = {level_tile(T.labels[f], p.top, 5) for f in members}
        assert len(anc) == 1


def test_iterated_amalgamation_follows_hierarchy(disc):
    p, T = disc
    prev = T
    results = amalgamate(T, iterations=4)
    assert len(results) == 4
    for k, res in enumerate(results):
        expected = [q for q in ground_truth_pairs(prev, p.top, k) if q[0] in res.certified]
        assert res.merges == expected, f"level {k}"
        # surviving labels are level-(k+1) addresses
        for f, a in res.tiling.labels.items():
            assert level_tile(a, p.top, k + 1) == a
        prev = res.tiling
    sizes = [len(r.tiling.faces) for r in results]
    assert sizes == sorted(sizes, reverse=True)


def test_certified_output_looks_like_a_tiling(disc):
    _, T = disc
    out = amalgamate_patch(T).tiling
    out.validate()
    interior = set(out.adjacency) - set(out.boundary_vertices)
    assert interior
    assert all(out.degree(v) in (3, 4) for v in interior)
    inner_faces = [f for f, c in out.faces.items() if not set(c) & set(out.boundary_vertices)]
    assert inner_faces
    assert all(len(out.faces[f]) in (4, 5, 6) for f in inner_faces)


def test_size_classes_after_merge(disc):
    _, T = disc
    res = amalgamate_patch(T)
    larges = {b for _, b in res.merges}
    for f, size in res.tiling.size_class.items():
        assert size == ("large" if f in larges else "small")


def test_truncated_face_is_uncertified_without_error(disc):
    _, T = disc
    res = amalgamate_patch(T)
    _, members = next(iter(res.regions.values()))
    Q = T.restrict(set(T.faces) - {members[0]})
    res2 = amalgamate_patch(Q)
    assert not set(members) & res2.certified
    assert all(s not in members and b not in members for s, b in res2.merges)


def test_square_grid_is_rejected():
    G = square_grid(5)
    with pytest.raises(NotAmmannError, match="1 faces"):
        resolve_partners(G, color_red(G))
    # non-strict mode reports instead of raising
    res = resolve_partners(G, color_red(G), strict=False)
    assert not res.pairs and res.uncertified


def test_merge_rejects_double_use():
    T = square_grid(2)
    with pytest.raises(ValueError):
        merge_faces(T, [(0, 1), (2, 1)])


def test_merge_removes_shared_edge():
    T = CombTiling(faces={0: (0, 1, 4, 3), 1: (1, 2, 5, 4)}, size_class={0: "small", 1: "large"})
    out = merge_faces(T, [(0, 1)])
    assert list(out.faces) == [1]
    # degree-2 points on the patch boundary stay; only interior ones are spliced
    assert sorted(out.faces[1]) == [0, 1, 2, 3, 4, 5]
    assert (1, 4) not in out.edge_faces
    assert out.size_class[1] == "large"


@settings(max_examples=6, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_merges_equal_ground_truth_random_codes(seed):
    p = disk_patch(random_code(40, seed), 8.0)
    T = to_combinatorial(p)
    res = amalgamate_patch(T)
    assert res.merges == [q for q in ground_truth_pairs(T, p.top, 0) if q[0] in res.certified]


def test_radius_restriction_records_margin(disc):
    _, T = disc
    res = amalgamate_patch(T, C=0.4, R=3.0)
    assert res.r_hat == pytest.approx(3.0 + 0.8 + 1.272019649514069 ** 6)
    assert res.processed < len(T.faces)
