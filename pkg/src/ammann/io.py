"""TilingDocument: the JSON exchange format for planar maps and annotations.

Layout (all ids are integers)::

    {"format": "ammann-tiling", "version": 1,
     "vertices": [{"id", "xy": [x, y], "exact": [[4 ints], [4 ints]]?}],
     "edges":    [{"u", "v", "points": [[x, y], ...]?, "exact": [[8 ints], ...]?}],
     "faces":    [{"id", "cycle": [vertex ids, counter-clockwise], "size", "label"?}],
     "annotations": {...}}

Exact coordinates are integer coefficients over 1, tau, tau^2, tau^3 and
round-trip digit for digit. Floats are written with ``repr`` precision,
which Python reads back bit-exactly.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .planar_map import CombTiling, ConstructionError, _ekey

__all__ = ["DocumentError", "SCHEMA", "VERSION", "to_document", "from_document", "dump", "load"]

VERSION = 1

# envelope only; the large tables are checked item by item below (a full
# per-item schema pass is far too slow on documents with 10^5 faces)
SCHEMA = {
    "type": "object",
    "required": ["format", "version", "vertices", "faces"],
    "properties": {
        "format": {"const": "ammann-tiling"},
        "version": {"const": VERSION},
        "vertices": {"type": "array"},
        "edges": {"type": "array"},
        "faces": {"type": "array"},
        "annotations": {"type": "object"},
    },
}

_SIZES = ("large", "small", "unknown")


class DocumentError(ValueError):
    """Malformed TilingDocument; the message names the offending location."""


def to_document(T: CombTiling, annotations: dict | None = None) -> dict:
    verts = []
    for v in sorted(T.adjacency):
        rec: dict[str, Any] = {"id": int(v)}
        if v in T.positions:
            rec["xy"] = [float(c) for c in T.positions[v]]
        if v in T.exact:
            k = T.exact[v]
            rec["exact"] = [list(map(int, k[:4])), list(map(int, k[4:]))]
        verts.append(rec)
    edges = []
    for e in sorted(T.edge_faces):
        rec = {"u": int(e[0]), "v": int(e[1])}
        if e in T.edge_points:
            rec["points"] = np.asarray(T.edge_points[e], dtype=float).tolist()
        if T.edge_exact.get(e) is not None:
            rec["exact"] = [list(map(int, k)) for k in T.edge_exact[e]]
        edges.append(rec)
    faces = []
    for f in sorted(T.faces):
        rec = {"id": int(f), "cycle": [int(v) for v in T.faces[f]],
               "size": T.size_class.get(f, "unknown")}
        if f in T.labels:
            rec["label"] = T.labels[f]
        faces.append(rec)
    return {"format": "ammann-tiling", "version": VERSION, "vertices": verts,
            "edges": edges, "faces": faces, "annotations": _plain(annotations or {})}


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_plain(v) for v in items]
    if isinstance(x, np.generic):
        return x.item()
    return x


def _loc(path) -> str:
    return "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path) or "<root>"


def _need(ok: bool, where: str, msg: str) -> None:
    if not ok:
        raise DocumentError(f"{where}: {msg}")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_ints(x, n: int) -> bool:
    return isinstance(x, list) and len(x) == n and all(_is_int(c) for c in x)


def _is_xy(x) -> bool:
    return (isinstance(x, list) and len(x) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in x))


def from_document(doc: Any) -> tuple[CombTiling, dict]:
    """Parse and check a document; returns the map and its annotations."""
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as err:
        raise DocumentError(f"{_loc(err.absolute_path)}: {err.message}") from None
    positions, exact = {}, {}
    seen = set()
    for i, rec in enumerate(doc["vertices"]):
        where = f"vertices[{i}]"
        _need(isinstance(rec, dict) and _is_int(rec.get("id")), where, "needs an integer 'id'")
        v = rec["id"]
        _need(v not in seen, f"{where}.id", f"duplicate vertex id {v}")
        seen.add(v)
        if "xy" in rec:
            _need(_is_xy(rec["xy"]), f"{where}.xy", "must be [x, y] numbers")
            positions[v] = tuple(rec["xy"])
        if "exact" in rec:
            ex = rec["exact"]
            _need(isinstance(ex, list) and len(ex) == 2 and all(_is_ints(c, 4) for c in ex),
                  f"{where}.exact", "must be two lists of 4 integers")
            exact[v] = tuple(ex[0]) + tuple(ex[1])
    faces, sizes, labels = {}, {}, {}
    for i, rec in enumerate(doc["faces"]):
        where = f"faces[{i}]"
        _need(isinstance(rec, dict) and _is_int(rec.get("id")), where, "needs an integer 'id'")
        f = rec["id"]
        _need(f not in faces, f"{where}.id", f"duplicate face id {f}")
        cyc = rec.get("cycle")
        _need(isinstance(cyc, list) and len(cyc) >= 3, f"{where}.cycle", "needs at least 3 vertex ids")
        for j, v in enumerate(cyc):
            _need(v in seen, f"{where}.cycle[{j}]", f"unknown vertex {v!r}")
        size = rec.get("size", "unknown")
        _need(size in _SIZES, f"{where}.size", f"must be one of {_SIZES}")
        faces[f] = tuple(cyc)
        sizes[f] = size
        if "label" in rec:
            _need(isinstance(rec["label"], str), f"{where}.label", "must be a string")
            labels[f] = rec["label"]
    edge_points, edge_exact = {}, {}
    for i, rec in enumerate(doc.get("edges", [])):
        where = f"edges[{i}]"
        _need(isinstance(rec, dict), where, "must be an object")
        u, v = rec.get("u"), rec.get("v")
        for name, w in (("u", u), ("v", v)):
            _need(w in seen, f"{where}.{name}", f"unknown vertex {w!r}")
        e = _ekey(u, v)
        flip = e[0] != u
        if "points" in rec:
            pts = rec["points"]
            _need(isinstance(pts, list) and len(pts) >= 2 and all(_is_xy(q) for q in pts),
                  f"{where}.points", "must be a list of at least two [x, y] pairs")
            arr = np.asarray(pts, dtype=float)
            edge_points[e] = arr[::-1] if flip else arr
        if "exact" in rec:
            ch = rec["exact"]
            _need(isinstance(ch, list) and len(ch) >= 2 and all(_is_ints(k, 8) for k in ch),
                  f"{where}.exact", "must be a list of 8-integer points")
            chain = tuple(tuple(k) for k in ch)
            edge_exact[e] = chain[::-1] if flip else chain
    T = CombTiling(faces=faces, size_class=sizes, positions=positions, exact=exact,
                   edge_points=edge_points, edge_exact=edge_exact, labels=labels)
    try:
        T.validate()
    except ConstructionError as err:
        raise DocumentError(f"faces: {err}") from None
    described = set(edge_points) | set(edge_exact)
    unused = described - set(T.edge_faces)
    if unused:
        raise DocumentError(f"edges: {len(unused)} edge(s) not used by any face, e.g. {min(unused)}")
    bare = set(T.edge_faces) - described if described else set()
    if bare:
        raise DocumentError(f"edges: {len(bare)} face edge(s) have no geometry, e.g. {min(bare)}")
    return T, dict(doc.get("annotations", {}))


def dump(T: CombTiling, path: str | Path, annotations: dict | None = None) -> None:
    text = json.dumps(to_document(T, annotations), separators=(",", ":"), sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load(path: str | Path) -> tuple[CombTiling, dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise DocumentError(f"{path}: line {err.lineno} column {err.colno}: {err.msg}") from None
    except OSError as err:
        raise DocumentError(f"{path}: {err.strerror}") from None
    return from_document(doc)
