"""End-to-end runs: generate, distort, ship through a document, read, rebuild."""
from __future__ import annotations

import json
import math
import random

from . import numerics as nm
from .codec import AnchoredTiling, aligned_tiles, compare_on_window, extract_adaptive, extract_code, reconstruct
from .distortion import apply, make_field
from .generator import GeoPatch, GeoTile, random_code
from .io import from_document, to_document
from .planar_map import CombTiling

__all__ = ["permute_ids", "ship", "place", "roundtrip_experiment"]


def permute_ids(T: CombTiling, rng: random.Random) -> tuple[CombTiling, dict, dict]:
    """Shuffle vertex and face ids; returns (map, vertex map, face map)."""
    vs = sorted(T.adjacency)
    fs = sorted(T.faces)
    vnew, fnew = vs[:], fs[:]
    rng.shuffle(vnew)
    rng.shuffle(fnew)
    vmap, fmap = dict(zip(vs, vnew)), dict(zip(fs, fnew))
    return T.relabel(vmap, fmap), vmap, fmap


def ship(T: CombTiling, annotations: dict | None = None) -> tuple[CombTiling, dict]:
    """Serialize to JSON text and parse back, as a separate process would."""
    return from_document(json.loads(json.dumps(to_document(T, annotations))))


def place(patch: GeoPatch, iso: nm.Similarity) -> GeoPatch:
    """The patch moved by an exact isometry (addresses kept)."""
    tiles = []
    for t in patch.tiles:
        corners = tuple(nm.apply(iso, nm.GoldenPoint.from_key(k)).key() for k in t.corners)
        if iso.is_reflection():
            corners = corners[::-1]
        tiles.append(GeoTile(t.address, t.size, nm.compose(iso, t.transform), corners))
    return GeoPatch(tuple(tiles), nm.compose(iso, patch.frame), patch.top, patch.code, dict(patch.meta))


def roundtrip_experiment(code: str, k: int, field_spec, delta: float = 0.05, seed: int = 0,
                         pad: int = 40) -> dict:
    """generate -> distort -> document -> extract k symbols -> reconstruct -> compare.

    The source is moved by a random exact isometry before comparison, so
    the anchor alignment is exercised. Returns a summary dict.
    """
    rng = random.Random(seed)
    theta = code + random_code(pad, rng)
    _, patch, T = extract_adaptive(theta, k, growth=1.4)
    anchor = next(i for i, t in enumerate(patch.tiles) if t.address == patch.anchor)
    f = make_field(field_spec)
    D = apply(f, T, delta).tiling
    D, _, fmap = permute_ids(D, rng)
    received, ann = ship(D, {"anchor": fmap[anchor]})
    ext = extract_code(AnchoredTiling(received, ann["anchor"]), k)
    recon = reconstruct(ext.code) if ext.code else None

    one, zero = nm.ONE, nm.ZERO
    iso = nm.Similarity(zero, -one, one, zero, nm.GoldenInt(3, 1, 0, -1), nm.GoldenInt(-2, 0, 2, 1))
    if rng.random() < 0.5:
        iso = nm.compose(iso, nm.Similarity(one, zero, zero, -one, zero, zero))
    source = place(patch, iso)
    src = aligned_tiles(source, source.anchor)

    # window: reconstructed tiles well inside the source disc (aligned frame)
    cx, cy = patch.meta["center"]
    R = patch.meta["radius"]

    def inside(poly):
        return all(math.hypot(x - cx, y - cy) <= R - 1.0 for x, y in poly)

    cmp = compare_on_window(src, recon, inside) if recon is not None else {
        "checked": 0, "mismatched": [], "equal": False}
    return {
        "theta": theta[:k],
        "extracted": str(ext),
        "tiles": len(T.faces),
        "checked": cmp["checked"],
        "recon_tiles": len(recon.tiles) if recon is not None else 0,
        "mismatched": cmp["mismatched"],
        "passed": ext.complete and ext.code == theta[:k] and cmp["equal"],
    }
