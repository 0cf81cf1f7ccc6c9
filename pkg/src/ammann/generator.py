"""Ammann-A2 patches from the golden-bee subdivision.

Tiles are addressed by strings over {1, 2}. In the subdivision frame the
cell of an address ``sigma`` is ``f_sigma(G)``; a supertile of level ``N``
is the set of addresses with ``0 <= e(sigma) - N < last(sigma)``, i.e. the
leaves of the subdivision tree cut at weight ``N``. Large tiles have
``e(sigma) == N``, small ones ``e(sigma) == N + 1``.

Addresses are stable through the hierarchy: the small tile ``rho + "2"``
and its partner ``rho + "1"`` amalgamate into the tile ``rho``, and a large
tile without a partner keeps its address as a small tile one level up.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from . import numerics as nm
from .numerics import GoldenPoint, Similarity
from .planar_map import CombTiling, from_polygons

__all__ = [
    "Code",
    "weight",
    "enumerate_W",
    "GeoTile",
    "GeoPatch",
    "HierarchyGroundTruth",
    "build_theta_patch",
    "build_supertile",
    "with_ground_truth",
    "to_combinatorial",
    "supertile_counts",
    "random_code",
    "theta_frame",
    "level_tile",
    "partner_address",
    "disk_patch",
    "ancestor_outline",
    "hierarchy_of",
]

Code = str  # finite prefix over "12"


def _check_code(code: str) -> str:
    code = "".join(str(c) for c in code)
    if set(code) - {"1", "2"}:
        raise ValueError(f"code must use the alphabet {{1,2}}, got {code!r}")
    return code


def weight(sigma: Iterable) -> int:
    """Sum of the symbols; 0 for the empty string."""
    return sum(int(c) for c in sigma)


def random_code(length: int, rng: random.Random | int | None = None) -> Code:
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    return "".join(rng.choice("12") for _ in range(length))


def _leaf_addresses(level: int) -> Iterator[str]:
    stack = [("", 0)]
    while stack:
        sigma, e = stack.pop()
        if e >= level:
            yield sigma
        else:
            stack.append((sigma + "2", e + 2))
            stack.append((sigma + "1", e + 1))


def enumerate_W(theta_k: Code) -> set[str]:
    """Addresses of the tiles of the k-th theta patch.

    For k >= 1 these are exactly the strings with
    ``last(sigma) > e(sigma) - e(theta_k) >= 0``. For k = 0 the patch is the
    single tile sG, addressed by the empty string.
    """
    theta_k = _check_code(theta_k)
    return set(_leaf_addresses(weight(theta_k)))


def partner_address(sigma: str) -> str:
    """Large partner of a small tile ``rho + '2'``."""
    if not sigma.endswith("2"):
        raise ValueError(f"{sigma!r} is not a small-tile address")
    return sigma[:-1] + "1"


def level_tile(sigma: str, top: int, j: int) -> str:
    """Level-j tile containing leaf ``sigma`` of a level-``top`` supertile."""
    cut = top - j
    e = 0
    for i, c in enumerate(sigma):
        if e >= cut:
            return sigma[:i]
        e += int(c)
    return sigma


# -- fast tuple-level similarities (m00, m01, m10, m11, tx, ty), each a 4-tuple
_mul, _add = nm._mul, nm._add


def _sim_tuple(f: Similarity) -> tuple:
    return f.as_tuple()


def _compose_t(f: tuple, g: tuple) -> tuple:
    a, b, c, d, tx, ty = f
    A, B, C, D, TX, TY = g
    return (
        _add(_mul(a, A), _mul(b, C)),
        _add(_mul(a, B), _mul(b, D)),
        _add(_mul(c, A), _mul(d, C)),
        _add(_mul(c, B), _mul(d, D)),
        _add(_add(_mul(a, TX), _mul(b, TY)), tx),
        _add(_add(_mul(c, TX), _mul(d, TY)), ty),
    )


def _apply_t(f: tuple, p: tuple) -> tuple:
    a, b, c, d, tx, ty = f
    x, y = p[:4], p[4:]
    return _add(_add(_mul(a, x), _mul(b, y)), tx) + _add(_add(_mul(c, x), _mul(d, y)), ty)


def _sim_from_t(t: tuple) -> Similarity:
    return Similarity(*(nm.GoldenInt(*c) for c in t))


_F_T = {"1": _sim_tuple(nm.F1), "2": _sim_tuple(nm.F2)}
_G_KEYS = tuple(p.key() for p in nm.golden_bee())
_G_CENTER = (nm.to_float(nm.S) / 2.0, 0.5)
_G_RADIUS = nm.TAU / 2.0  # half the box diagonal; every point of G is this close to the centre


def _float_t(t: tuple) -> tuple:
    return tuple(nm._float(c) for c in t)


@dataclass(frozen=True)
class GeoTile:
    """One tile: ``transform`` applied to sG gives its polygon."""

    address: str
    size: str
    transform: Similarity
    corners: tuple  # exact point keys, counter-clockwise

    def polygon(self) -> tuple:
        return tuple(GoldenPoint.from_key(k) for k in self.corners)

    def float_polygon(self) -> list[tuple[float, float]]:
        return [(nm._float(k[:4]), nm._float(k[4:])) for k in self.corners]


@dataclass(frozen=True)
class GeoPatch:
    """A patch of tiles in tiling units (large tiles congruent to sG).

    ``frame`` maps the subdivision frame (root cell G) to tiling units and
    ``top`` is the weight at which the subdivision tree was cut.
    """

    tiles: tuple
    frame: Similarity
    top: int
    code: str | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.tiles)

    @property
    def by_address(self) -> dict:
        return {t.address: t for t in self.tiles}

    def partners(self) -> dict[str, str]:
        """small address -> large partner address, for partners present."""
        present = {t.address for t in self.tiles}
        out = {}
        for t in self.tiles:
            if t.size == "small":
                p = partner_address(t.address)
                if p in present:
                    out[t.address] = p
        return out

    @property
    def anchor(self) -> str | None:
        """Address of the canonical anchor tile sG (theta patches only)."""
        if self.code is None:
            return None
        return self.code[::-1]

    def union_polygon_floats(self) -> list:
        """Outline of the root cell in tiling units (the whole supertile)."""
        fr = _sim_tuple(self.frame)
        return [(nm._float(q[:4]), nm._float(q[4:])) for q in (_apply_t(fr, k) for k in _G_KEYS)]


def _generate(frame: tuple, top: int, keep: Callable | None) -> list[GeoTile]:
    """Walk the subdivision tree below ``frame`` down to weight ``top``.

    ``keep(center, radius)`` prunes cells whose bounding disc (in tiling
    units) can be discarded.
    """
    out = []
    stack = [("", 0, frame)]
    up = _sim_tuple(nm.scaling(1))
    while stack:
        sigma, e, M = stack.pop()
        if keep is not None:
            m = _float_t(M)
            cx = m[0] * _G_CENTER[0] + m[1] * _G_CENTER[1] + m[4]
            cy = m[2] * _G_CENTER[0] + m[3] * _G_CENTER[1] + m[5]
            r = math.hypot(m[0], m[1]) * _G_RADIUS
            if not keep((cx, cy), r, e >= top):
                continue
        if e >= top:
            size = "large" if e == top else "small"
            corners = tuple(_apply_t(M, k) for k in _G_KEYS)
            if _det_sign(M) < 0:
                corners = corners[::-1]
            out.append(GeoTile(sigma, size, _sim_from_t(_compose_t(M, up)), corners))
            continue
        stack.append((sigma + "2", e + 2, _compose_t(M, _F_T["2"])))
        stack.append((sigma + "1", e + 1, _compose_t(M, _F_T["1"])))
    out.sort(key=lambda t: (len(t.address), t.address))
    return out


def _det_sign(M: tuple) -> int:
    a, b, c, d = M[:4]
    return nm._sign(nm._sub(_mul(a, d), _mul(b, c)))


def theta_frame(theta_k: Code) -> Similarity:
    """Subdivision frame of the k-th theta patch, in tiling units.

    The anchor address ``reversed(theta_k)`` lands exactly on sG.
    """
    return nm.compose(nm.scaling(-1), nm.f_minus_word(theta_k))


def build_theta_patch(theta_k: Code, keep: Callable | None = None) -> GeoPatch:
    """The patch T(theta, k) for the prefix ``theta_k``.

    Tiles are ``s * (f_-(theta|k) o f_sigma)(G)`` for ``sigma`` in
    :func:`enumerate_W`; the tile addressed by ``reversed(theta_k)`` is sG.
    """
    theta_k = _check_code(theta_k)
    frame = theta_frame(theta_k)
    top = weight(theta_k)
    tiles = _generate(_sim_tuple(frame), top, keep)
    return GeoPatch(tuple(tiles), frame, top, code=theta_k)


def build_supertile(n: int, keep: Callable | None = None) -> GeoPatch:
    """The supertile of level n: a level-n large tile split into level-0 tiles.

    The outline is ``tau^(n-1) G`` with the usual orientation.
    """
    if n < 0:
        raise ValueError("level must be non-negative")
    frame = nm.scaling(n - 1)
    return GeoPatch(tuple(_generate(_sim_tuple(frame), n, keep)), frame, n)


def ancestor_outline(theta: Code, j: int) -> list[tuple[float, float]]:
    """Float outline of the level-j supertile containing the anchor of T(theta)."""
    theta = _check_code(theta)
    for m in range(len(theta) + 1):
        if weight(theta[:m]) >= j:
            break
    else:
        raise ValueError(f"code too short for level {j}")
    top = weight(theta[:m])
    p = level_tile(theta[:m][::-1], top, j)
    M = _sim_tuple(nm.compose(theta_frame(theta[:m]), nm.f_word(p)))
    return [(nm._float(q[:4]), nm._float(q[4:])) for q in (_apply_t(M, k) for k in _G_KEYS)]


def supertile_counts(n: int) -> tuple[int, int]:
    """(large, small) tile counts of the level-n supertile, by recurrence."""
    if n == 0:
        return (1, 0)
    L, S = 1, 1
    for _ in range(n - 1):
        L, S = L + S, L
    return (L, S)


def disk_patch(theta: Code, radius: float, center=(0.0, 0.0), min_k: int = 1) -> GeoPatch:
    """Tiles of a theta tiling meeting the disc of ``radius`` about ``center``.

    The prefix length k is grown until the supertile outline of T(theta, k)
    contains the disc; raises if ``theta`` runs out first.
    """
    theta = _check_code(theta)
    for k in range(min_k, len(theta) + 1):
        frame = theta_frame(theta[:k])
        outline = GeoPatch((), frame, 0).union_polygon_floats()
        if _disc_inside(outline, center, radius):
            break
    else:
        raise ValueError(
            f"code of length {len(theta)} does not cover a disc of radius {radius}; "
            "use a longer code")
    cx, cy = center

    def keep(c, r, leaf):
        d = math.hypot(c[0] - cx, c[1] - cy)
        return d - r <= radius

    patch = build_theta_patch(theta[:k], keep=keep)
    tiles = tuple(t for t in patch.tiles if _poly_disc_meet(t.float_polygon(), center, radius))
    return GeoPatch(tiles, patch.frame, patch.top, code=patch.code,
                    meta={"radius": radius, "center": tuple(center), "k": k})


def _point_in_poly(pt, poly) -> bool:
    x, y = pt
    inside = False
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            if x < x0 + (y - y0) * (x1 - x0) / (y1 - y0):
                inside = not inside
    return inside


def _seg_dist(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    L = dx * dx + dy * dy
    t = 0.0 if L == 0 else max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / L))
    return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)


def _poly_boundary_dist(pt, poly) -> float:
    return min(_seg_dist(pt, poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly)))


def _poly_disc_meet(poly, center, radius) -> bool:
    return _point_in_poly(center, poly) or _poly_boundary_dist(center, poly) <= radius


def _disc_inside(poly, center, radius) -> bool:
    return _point_in_poly(center, poly) and _poly_boundary_dist(center, poly) >= radius


# -- ground truth -------------------------------------------------------------

@dataclass(frozen=True)
class HierarchyGroundTruth:
    """Levels 0..N of the hierarchy of a generated patch.

    ``levels[j]`` maps each complete level-j tile address to its size class;
    ``children[j]`` maps a level-j address to its level-(j-1) constituents;
    ``partners[j]`` maps level-j small addresses to their large partners.
    """

    top: int
    levels: list
    children: list
    partners: list

    def pairs(self, j: int) -> set[tuple[str, str]]:
        return set(self.partners[j].items())


def hierarchy_of(patch: GeoPatch, depth: int) -> HierarchyGroundTruth:
    """Ground-truth hierarchy restricted to tiles whose leaves are all present."""
    top = patch.top
    leaves = {t.address for t in patch.tiles}
    levels, children, partners = [], [], []
    prev = {a: ("large" if weight(a) == top else "small") for a in leaves}
    levels.append(prev)
    children.append({})
    partners.append(_partners_at(prev, top, 0))
    for j in range(1, depth + 1):
        if top - j < 0:
            break
        cur: dict = {}
        kids: dict = {}
        for a in prev:
            p = level_tile(a, top, j)
            kids.setdefault(p, []).append(a)
        for p, ks in kids.items():
            expected = _expected_children(p, top, j)
            if set(ks) == expected:
                cur[p] = "large" if weight(p) == top - j else "small"
        kids = {p: sorted(kids[p]) for p in cur}
        levels.append(cur)
        children.append(kids)
        partners.append(_partners_at(cur, top, j))
        prev = cur
    return HierarchyGroundTruth(top, levels, children, partners)


def _expected_children(p: str, top: int, j: int) -> set:
    """Level-(j-1) constituents of level-j tile p."""
    if weight(p) == top - j:
        return {p + "1", p + "2"}
    return {p}


def _partners_at(tiles: dict, top: int, j: int) -> dict:
    out = {}
    for a, size in tiles.items():
        if size == "small":
            b = partner_address(a)
            if b in tiles:
                out[a] = b
    return out


def with_ground_truth(n: int, N: int | None = None) -> HierarchyGroundTruth:
    """Hierarchy of the level-n supertile down from level ``N`` (default n)."""
    patch = build_supertile(n)
    return hierarchy_of(patch, n if N is None else N)


# -- conversion to planar maps ---------------------------------------------------

def to_combinatorial(p: GeoPatch) -> CombTiling:
    """Planar map of a generated patch; face ids index ``p.tiles``.

    Overlapping tiles raise :class:`~ammann.planar_map.ConstructionError`.
    """
    polygons, floats, sizes, labels = {}, {}, {}, {}
    for i, t in enumerate(p.tiles):
        polygons[i] = t.corners
        for k in t.corners:
            if k not in floats:
                floats[k] = (nm._float(k[:4]), nm._float(k[4:]))
        sizes[i] = t.size
        labels[i] = t.address
    T = from_polygons(polygons, floats, sizes, labels)
    return T
