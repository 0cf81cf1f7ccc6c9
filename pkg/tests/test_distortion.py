from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ammann.distortion import (
    PRESETS,
    CertificationError,
    Composition,
    DistortionField,
    InvalidFieldError,
    RadialBumps,
    SineWarp,
    apply,
    conjugation_error,
    crossing_edges,
    make_field,
    verify_bound,
)
from ammann.generator import disk_patch, random_code, to_combinatorial
from ammann.planar_map import CombTiling


@pytest.fixture(scope="module")
def patch():
    return to_combinatorial(disk_patch(random_code(30, 11), 8.0))


def test_identity_field():
    f = make_field(None)
    pts = np.random.default_rng(0).normal(size=(50, 2))
    assert np.array_equal(f(pts), pts)
    assert f.C == 0.0 and f.L == 0.0
    assert make_field({"family": "sine", "amplitude": 0.0}).C == 0.0


def test_sine_constants():
    f = SineWarp(0.3, 1.0)
    assert f.C == pytest.approx(0.4243, abs=5e-5)
    assert f.L == pytest.approx(0.3)


def test_lipschitz_one_rejected():
    with pytest.raises(InvalidFieldError):
        SineWarp(0.5, 2.0)
    with pytest.raises(InvalidFieldError):
        RadialBumps(((0.0, 0.0, 0.5, 0.5),))


def test_unknown_preset():
    with pytest.raises(KeyError):
        make_field("no-such-field")


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_are_certified(name):
    f = make_field(name)
    assert 0.1 <= f.C <= 0.6
    m = verify_bound(f, samples=8192)
    assert m <= f.C


def test_sine_bound_is_nearly_attained():
    f = SineWarp(0.3, 1.0)
    # both sines peak together at (pi/2, pi/2)
    d = f.displacement(np.array([[math.pi / 2, math.pi / 2]]))
    assert float(np.hypot(*d[0])) == pytest.approx(f.C)


def test_bump_height_is_the_bound():
    f = RadialBumps(((0.0, 0.0, 0.5, 3.0),))
    assert f.C == 0.5
    r = np.linspace(0, 3, 2001)
    d = f.displacement(np.stack([r, np.zeros_like(r)], axis=1))
    assert np.abs(d[:, 0]).max() == pytest.approx(0.5, rel=1e-5)
    assert np.all(d[r >= 3.0] == 0.0)


def test_overlapping_bumps_sum():
    f = RadialBumps(((0.0, 0.0, 0.2, 3.0), (1.0, 0.0, 0.1, 3.0)))
    assert f.C == pytest.approx(0.3)


def test_composition_bound():
    g = Composition((SineWarp(0.15, 1.2), RadialBumps(((0.5, 0.5, 0.35, 2.5),))))
    assert g.C == pytest.approx(0.15 * math.sqrt(2) + 0.35)
    verify_bound(g, samples=8192, box=(-10, -10, 10, 10))


def test_verify_bound_catches_lies():
    class Liar(DistortionField):
        C = 0.01

        def displacement(self, pts):
            return np.full_like(np.asarray(pts, dtype=float), 0.1)

    with pytest.raises(CertificationError):
        verify_bound(Liar())


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 0.4), st.floats(0.1, 2.0), st.floats(1.0, 50.0))
def test_conjugation_shrinks_displacement(A, w, r):
    if A * w >= 1:
        return
    f = SineWarp(A, w)
    assert conjugation_error(f, r) <= f.C / r + 1e-12


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_distorted_patch_keeps_structure(patch, name):
    D = apply(name, patch, delta=0.05)
    T = D.tiling
    assert T.faces == patch.faces
    assert set(T.edge_faces) == set(patch.edge_faces)
    assert T.size_class == patch.size_class
    assert not T.exact
    f = make_field(name)
    for v, p in T.positions.items():
        assert math.dist(p, patch.positions[v]) <= f.C + 1e-12
    for e, pts in T.edge_points.items():
        seg = np.hypot(*np.diff(pts, axis=0).T)
        # pieces were at most delta long before mapping, (1 + L) delta after
        assert seg.max() <= 0.05 * (1 + f.L) + 1e-9
    assert crossing_edges(T, limit=1) == []


def test_delta_must_be_positive(patch):
    with pytest.raises(ValueError):
        apply("sine-042", patch, delta=0.0)


def test_crossing_detector_finds_a_crossing():
    # two squares sharing an edge, one corner dragged across the other square
    T = CombTiling(
        faces={0: (0, 1, 4, 3), 1: (1, 2, 5, 4)},
        positions={0: (0, 0), 1: (1, 0), 2: (2, 0), 3: (0, 1), 4: (1, 1), 5: (1.5, -1)},
    )
    assert crossing_edges(T)
