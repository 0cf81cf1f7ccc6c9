from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ammann.amalgamation import color_red
from ammann.analysis import (
    boundary_samples,
    fit_exponent,
    render_svg,
    windowed_hausdorff,
)
from ammann.generator import build_supertile, to_combinatorial
from ammann.planar_map import CombTiling

BOX = (-10.0, -10.0, 10.0, 10.0)


def brute_hausdorff(A, B, window, delta):
    def inside(P):
        x0, y0, x1, y1 = window
        m = (P[:, 0] >= x0 + delta) & (P[:, 0] <= x1 - delta) & (P[:, 1] >= y0 + delta) & (P[:, 1] <= y1 - delta)
        return P[m]
    D = np.hypot(*(inside(A)[:, None, :] - B[None, :, :]).transpose(2, 0, 1))
    E = np.hypot(*(inside(B)[:, None, :] - A[None, :, :]).transpose(2, 0, 1))
    return max(D.min(axis=1).max(), E.min(axis=1).max())


pointsets = arrays(np.float64, st.tuples(st.integers(5, 40), st.just(2)),
                   elements=st.floats(-5, 5, allow_nan=False))


@settings(max_examples=40)
@given(pointsets, pointsets)
def test_hausdorff_matches_brute_force(A, B):
    try:
        d = windowed_hausdorff(A, B, BOX, 0.05)
    except ValueError:
        return
    assert d == pytest.approx(brute_hausdorff(A, B, BOX, 0.05))


def test_hausdorff_of_identical_sets_is_zero():
    T = to_combinatorial(build_supertile(6))
    P = boundary_samples(T, 0.05)
    assert windowed_hausdorff(P, P, BOX, 0.05) == 0.0


def test_hausdorff_of_translated_boundary():
    T = to_combinatorial(build_supertile(6))
    P = boundary_samples(T, 0.05)
    d = windowed_hausdorff(P, P + np.array([0.1, 0.0]), (-1, -1, 4, 4), 0.05)
    assert abs(d - 0.1) <= 2 * 0.05


def test_empty_window_raises():
    P = np.array([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ValueError, match="window"):
        windowed_hausdorff(P, P, (50, 50, 60, 60), 0.05)


def test_boundary_samples_are_dense():
    T = to_combinatorial(build_supertile(4))
    P = boundary_samples(T, 0.05)
    for e in T.edge_faces:
        pl = T.edge_polyline(*e)
        mids = (pl[:-1] + pl[1:]) / 2
        d = np.min(np.hypot(*(mids[:, None, :] - P[None, :, :]).transpose(2, 0, 1)), axis=1)
        assert d.max() <= 0.05


def test_fit_exponent_recovers_power_law():
    x = [10, 20, 40, 80]
    p, k = fit_exponent(x, [3.0 * v ** 2 for v in x])
    assert p == pytest.approx(2.0)
    assert k == pytest.approx(3.0)


def test_render_is_valid_and_deterministic():
    T = to_combinatorial(build_supertile(6))
    red = color_red(T, "leaf", boundary_convention=True).edges
    a = render_svg(T, red=red, arrows=[(0, 1)])
    b = render_svg(T, red=red, arrows=[(0, 1)])
    assert a == b
    root = ET.fromstring(a.split("\n", 1)[1])
    assert root.tag.endswith("svg")
    polys = root.findall(".//{http://www.w3.org/2000/svg}polygon")
    assert len(polys) == 21
    assert root.findall(".//{http://www.w3.org/2000/svg}polyline")


def test_render_empty_patch():
    for T in (None, CombTiling(faces={})):
        svg = render_svg(T)
        root = ET.fromstring(svg.split("\n", 1)[1])
        assert root.tag.endswith("svg")
        assert list(root) == []
