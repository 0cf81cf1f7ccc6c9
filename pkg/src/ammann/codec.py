"""Anchor codes: reading a 1/2 sequence off a tiling and building it back.

Reading needs nothing but the planar map. At each step the anchor face is
followed through one amalgamation (it absorbs a small partner: symbol 1)
or two (it first becomes small, then is absorbed: symbol 2).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

from . import numerics as nm
from .amalgamation import AmalgamationResult, amalgamate_patch
from .generator import (
    GeoPatch,
    build_theta_patch,
    disk_patch,
    to_combinatorial,
    weight,
    ancestor_outline,
    _check_code,
)
from .planar_map import CombTiling

__all__ = [
    "AnchoredTiling",
    "CodeExtraction",
    "CertificationShortfall",
    "g_step",
    "extract_code",
    "reconstruct",
    "anchor_alignment",
    "aligned_tiles",
    "compare_on_window",
    "anchor_center",
    "extract_adaptive",
]

log = logging.getLogger(__name__)


class CertificationShortfall(RuntimeError):
    """The anchor left the certified region before the step completed."""


@dataclass(frozen=True)
class AnchoredTiling:
    tiling: CombTiling
    anchor: int

    def __post_init__(self):
        if self.anchor not in self.tiling.faces:
            raise KeyError(f"anchor {self.anchor} is not a face of the tiling")


@dataclass(frozen=True)
class CodeExtraction:
    """Symbols read so far and how many of the requested ones are missing."""

    code: str
    requested: int
    steps: list = field(default_factory=list, repr=False, compare=False)

    @property
    def shortfall(self) -> int:
        return self.requested - len(self.code)

    @property
    def complete(self) -> bool:
        return self.shortfall == 0

    def __str__(self) -> str:
        return self.code if self.complete else f"{self.code}?{self.shortfall}"


def _step(T: CombTiling, anchor: int) -> AmalgamationResult:
    res = amalgamate_patch(T)
    if anchor not in res.certified:
        raise CertificationShortfall(f"anchor {anchor} not certified")
    return res


def g_step(a: AnchoredTiling) -> tuple[AnchoredTiling, str, list]:
    """One code symbol. Returns the new anchored tiling, the symbol, results."""
    if a.tiling.size_class.get(a.anchor) == "small":
        raise ValueError("anchor must be a large face")
    r1 = _step(a.tiling, a.anchor)
    larges = {b: s for s, b in r1.merges}
    smalls = {s for s, _ in r1.merges}
    if a.anchor in larges:
        return AnchoredTiling(r1.tiling, a.anchor), "1", [r1]
    if a.anchor in smalls:
        raise ValueError("anchor was merged as a small face; not an Ammann tiling")
    r2 = _step(r1.tiling, a.anchor)
    partner = dict(r2.merges).get(a.anchor)
    if partner is None:
        raise ValueError("anchor was not absorbed after two amalgamations; not an Ammann tiling")
    return AnchoredTiling(r2.tiling, partner), "2", [r1, r2]


def extract_code(a: AnchoredTiling, k: int) -> CodeExtraction:
    """Up to ``k`` code symbols of the anchor face.

    Stops early, with a positive ``shortfall``, once the anchor runs into
    the uncertified margin of the patch.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    symbols, steps = [], []
    cur = a
    for _ in range(k):
        try:
            cur, sym, rs = g_step(cur)
        except CertificationShortfall:
            break
        symbols.append(sym)
        steps.append(rs)
    return CodeExtraction("".join(symbols), k, steps)


def reconstruct(code: str) -> GeoPatch:
    """The patch T(code, len(code)) with its anchor at sG."""
    return build_theta_patch(_check_code(code))


# -- anchor alignment and exact comparison -------------------------------------

def _dihedral():
    one, zero = nm.ONE, nm.ZERO
    for a, b, c, d in ((1, 0, 0, 1), (0, -1, 1, 0), (-1, 0, 0, -1), (0, 1, -1, 0),
                       (1, 0, 0, -1), (-1, 0, 0, 1), (0, 1, 1, 0), (0, -1, -1, 0)):
        yield tuple(one if x == 1 else (-one if x == -1 else zero) for x in (a, b, c, d))


def _anchor_key_set() -> frozenset:
    sG = nm.golden_bee()
    return frozenset(nm.GoldenPoint(nm.S * p.x, nm.S * p.y).key() for p in sG)


def anchor_alignment(corners) -> nm.Similarity:
    """Exact isometry carrying a tile congruent to sG onto sG."""
    pts = [nm.GoldenPoint.from_key(k) for k in corners]
    target = _anchor_key_set()
    tmin = min((nm.GoldenPoint.from_key(k) for k in target), key=lambda p: (p.x, p.y))
    for a, b, c, d in _dihedral():
        img = [nm.GoldenPoint(a * p.x + b * p.y, c * p.x + d * p.y) for p in pts]
        m = min(img, key=lambda p: (p.x, p.y))
        tx, ty = tmin.x - m.x, tmin.y - m.y
        keys = frozenset(nm.GoldenPoint(p.x + tx, p.y + ty).key() for p in img)
        if keys == target:
            return nm.Similarity(a, b, c, d, tx, ty)
    raise ValueError("anchor polygon is not congruent to sG")


def aligned_tiles(patch: GeoPatch, anchor_address: str) -> dict[frozenset, str]:
    """Tile corner sets after moving ``anchor_address`` onto sG."""
    anchor = patch.by_address[anchor_address]
    iso = anchor_alignment(anchor.corners)
    out = {}
    for t in patch.tiles:
        keys = frozenset(nm.apply(iso, nm.GoldenPoint.from_key(k)).key() for k in t.corners)
        out[keys] = t.size
    return out


def compare_on_window(source: dict, recon: GeoPatch, window: Callable | None = None) -> dict:
    """Exact comparison of reconstructed tiles against aligned source tiles.

    Only reconstructed tiles accepted by ``window`` (a predicate on a float
    polygon; default all) are checked. Returns counts and the mismatches.
    """
    checked, missing = 0, []
    for t in recon.tiles:
        if window is not None and not window(t.float_polygon()):
            continue
        checked += 1
        key = frozenset(t.corners)
        if source.get(key) != t.size:
            missing.append(t.address)
    return {"checked": checked, "mismatched": missing, "equal": checked > 0 and not missing}


def anchor_center() -> tuple[float, float]:
    pts = [nm.GoldenPoint(nm.S * p.x, nm.S * p.y).to_float() for p in nm.golden_bee()]
    return (sum(p[0] for p in pts) / 6.0, sum(p[1] for p in pts) / 6.0)


def extract_adaptive(
    theta: str,
    k: int,
    transform: Callable[[CombTiling], CombTiling] | None = None,
    radius: float | None = None,
    center: tuple[float, float] | None = None,
    growth: float = 2.0,
    max_tiles: int = 400_000,
):
    """Grow a disc patch of T(theta) until ``k`` symbols can be read.

    The disc is centred on the level-(e+4) supertile holding the anchor,
    e = e(theta|k): that supertile is the last red region the reader has
    to certify. Only the cut-out uses the generator; the reader sees the
    planar map alone. ``transform`` maps the pristine map to the one read
    (e.g. a distortion) and must keep face ids. The radius is multiplied
    by ``growth`` after each shortfall.

    Returns (CodeExtraction, patch, pristine map).
    """
    theta = _check_code(theta)
    if len(theta) <= k:
        raise ValueError("theta must extend past the k symbols to be read")
    if center is None or radius is None:
        outline = ancestor_outline(theta, weight(theta[:k]) + 4)
        cx = sum(p[0] for p in outline) / len(outline)
        cy = sum(p[1] for p in outline) / len(outline)
        circ = max(math.hypot(p[0] - cx, p[1] - cy) for p in outline)
        center = center or (cx, cy)
        radius = radius or 1.25 * circ
    while True:
        patch = disk_patch(theta, radius, center=center)
        T = to_combinatorial(patch)
        anchor = next(i for i, t in enumerate(patch.tiles) if t.address == patch.anchor)
        src = transform(T) if transform is not None else T
        ext = extract_code(AnchoredTiling(src, anchor), k)
        log.debug("radius %.1f tiles %d read %s", radius, len(T.faces), ext)
        if ext.complete or len(T.faces) * growth ** 2 > max_tiles:
            return ext, patch, T
        radius *= growth
