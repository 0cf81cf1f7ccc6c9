from __future__ import annotations

import random
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ammann.generator import build_supertile, to_combinatorial
from ammann.planar_map import (
    CombTiling,
    ConstructionError,
    automorphism_count,
    induced_subtiling,
    map_isomorphism,
    rooted_code,
)


def _edge_sets(T):
    return {frozenset(frozenset(e) for e in zip(c, c[1:] + c[:1])) for c in T.faces.values()}


def brute_automorphisms(T) -> int:
    """Vertex permutations carrying the set of face boundaries onto itself."""
    vs = sorted(T.adjacency)
    faces = _edge_sets(T)
    n = 0
    for perm in permutations(vs):
        m = dict(zip(vs, perm))
        img = {frozenset(frozenset(m[v] for v in e) for e in f) for f in faces}
        n += img == faces
    return n


SMALL_MAPS = {
    "square": CombTiling(faces={0: (0, 1, 2, 3)}),
    "pentagon": CombTiling(faces={0: (0, 1, 2, 3, 4)}),
    "domino": CombTiling(faces={0: (0, 1, 4, 3), 1: (1, 2, 5, 4)}),
    "L-tromino": CombTiling(faces={0: (0, 1, 4, 3), 1: (1, 2, 5, 4), 2: (3, 4, 7, 6)}),
}


@pytest.mark.parametrize("name", sorted(SMALL_MAPS))
def test_automorphism_count_matches_brute_force(name):
    T = SMALL_MAPS[name]
    assert automorphism_count(T) == brute_automorphisms(T)


def test_automorphism_count_frozen_values():
    # values of the brute-force oracle above
    assert [automorphism_count(SMALL_MAPS[k]) for k in ("square", "pentagon", "domino", "L-tromino")] == [8, 10, 4, 2]


def test_single_tile_map():
    T = to_combinatorial(build_supertile(0))
    assert len(T.faces) == 1
    assert len(next(iter(T.faces.values()))) == 6
    assert T.euler_characteristic() == 1
    T.validate()


@pytest.mark.parametrize("n", range(1, 7))
def test_supertile_maps_are_discs(n):
    T = to_combinatorial(build_supertile(n))
    T.validate()
    assert T.euler_characteristic() == 1
    for e, fs in T.edge_faces.items():
        assert 1 <= len(fs) <= 2


def test_validate_rejects_bad_cycles():
    with pytest.raises(ConstructionError):
        CombTiling(faces={0: (0, 1)}).validate()
    with pytest.raises(ConstructionError):
        # the same edge used three times
        CombTiling(faces={0: (0, 1, 2), 1: (1, 0, 3), 2: (0, 1, 4)}).validate()


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=2, max_value=5))
def test_relabelled_map_is_isomorphic(seed, n):
    T = to_combinatorial(build_supertile(n))
    rng = random.Random(seed)
    vs, fs = sorted(T.adjacency), sorted(T.faces)
    vn, fn = [v + 1000 for v in vs], [f + 1000 for f in fs]
    rng.shuffle(vn)
    rng.shuffle(fn)
    U = T.relabel(dict(zip(vs, vn)), dict(zip(fs, fn)))
    iso = map_isomorphism(T, U)
    assert iso is not None
    for f, g in iso.face_map.items():
        assert len(T.faces[f]) == len(U.faces[g])
    # faces map to faces with the same boundary under the vertex map
    for f, g in iso.face_map.items():
        assert {iso.vertex_map[v] for v in T.faces[f]} == set(U.faces[g])


def test_non_isomorphic_maps():
    assert map_isomorphism(SMALL_MAPS["square"], SMALL_MAPS["pentagon"]) is None
    A = to_combinatorial(build_supertile(4))
    B = to_combinatorial(build_supertile(5))
    assert map_isomorphism(A, B) is None


def test_rooted_code_is_label_free():
    T = SMALL_MAPS["domino"]
    U = T.relabel({v: 10 - v for v in T.adjacency}, {0: 7, 1: 8})
    assert rooted_code(T, 0, 0, 1) == rooted_code(U, 7, 0, 1)


def test_induced_subtiling_of_domino_boundary():
    T = SMALL_MAPS["domino"]
    # keep only the outer boundary: one bounded region holding both faces
    ind = induced_subtiling(T, T.boundary_edges)
    assert len(ind.tiling.faces) == 1
    assert set().union(*ind.members.values()) == {0, 1}


def test_restrict_keeps_cycles():
    T = to_combinatorial(build_supertile(4))
    keep = sorted(T.faces)[:3]
    R = T.restrict(keep)
    assert set(R.faces) == set(keep)
    for f in keep:
        assert R.faces[f] == T.faces[f]
