"""Finite planar maps built from tilings, and face-preserving isomorphism.

A :class:`CombTiling` stores faces as explicit vertex cycles (counter-
clockwise in the embedding they came from). Everything else, edges,
degrees, boundary flags, is derived from the cycles, so a distorted copy
with the same cycles is the same map no matter what its geometry looks like.
"""
from __future__ import annotations

import bisect
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "CombTiling",
    "MapIsomorphism",
    "ConstructionError",
    "DanglingEdgeError",
    "from_polygons",
    "vertex_degree",
    "induced_subtiling",
    "map_isomorphism",
    "automorphism_count",
    "rooted_code",
    "all_rooted_codes",
    "submap",
]

Edge = tuple  # (u, v) with u < v


class ConstructionError(ValueError):
    """Input polygons do not form a valid tiling patch."""


class DanglingEdgeError(ValueError):
    """A kept edge has the same region on both sides."""


def _ekey(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class CombTiling:
    """A finite planar map whose faces are tiles.

    Parameters
    ----------
    faces : mapping of face id to vertex cycle
        Cycles are counter-clockwise in the source embedding.
    size_class : mapping of face id to ``"small"``, ``"large"`` or ``"unknown"``
    positions : mapping of vertex id to float (x, y), optional
    exact : mapping of vertex id to exact point key (8 ints), optional
    edge_points : mapping of edge (u, v), u < v, to an (n, 2) float polyline
        running from u to v, optional
    edge_exact : mapping of edge to the exact point keys of its polyline, optional
    labels : mapping of face id to an address string, optional
        Ground-truth provenance for generated patches; never read by the
        combinatorial algorithms.
    """

    faces: Mapping[int, tuple]
    size_class: Mapping[int, str] = field(default_factory=dict)
    positions: Mapping[int, tuple] = field(default_factory=dict)
    exact: Mapping[int, tuple] = field(default_factory=dict)
    edge_points: Mapping[Edge, np.ndarray] = field(default_factory=dict)
    edge_exact: Mapping[Edge, tuple] = field(default_factory=dict)
    labels: Mapping[int, str] = field(default_factory=dict)

    # -- derived structure -------------------------------------------------
    @cached_property
    def edge_faces(self) -> dict[Edge, list[int]]:
        ef: dict[Edge, list[int]] = defaultdict(list)
        for f, cyc in self.faces.items():
            n = len(cyc)
            for i in range(n):
                ef[_ekey(cyc[i], cyc[(i + 1) % n])].append(f)
        return dict(ef)

    @cached_property
    def darts(self) -> dict[tuple, tuple]:
        """Directed edge (u, v) -> (face, index of u in that face's cycle)."""
        d = {}
        for f, cyc in self.faces.items():
            n = len(cyc)
            for i in range(n):
                d[(cyc[i], cyc[(i + 1) % n])] = (f, i)
        return d

    @property
    def edges(self) -> list[Edge]:
        return list(self.edge_faces)

    @cached_property
    def adjacency(self) -> dict[int, set]:
        adj: dict[int, set] = defaultdict(set)
        for u, v in self.edge_faces:
            adj[u].add(v)
            adj[v].add(u)
        return dict(adj)

    @property
    def vertices(self) -> list[int]:
        return list(self.adjacency)

    @cached_property
    def boundary_edges(self) -> frozenset:
        return frozenset(e for e, fs in self.edge_faces.items() if len(fs) == 1)

    @cached_property
    def boundary_vertices(self) -> frozenset:
        return frozenset(v for e in self.boundary_edges for v in e)

    @cached_property
    def vertex_faces(self) -> dict[int, list[int]]:
        vf: dict[int, list[int]] = defaultdict(list)
        for f, cyc in self.faces.items():
            for v in cyc:
                vf[v].append(f)
        return dict(vf)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbours(self, f: int) -> list[int]:
        """Faces sharing an edge with face ``f``."""
        out = []
        cyc = self.faces[f]
        n = len(cyc)
        for i in range(n):
            for g in self.edge_faces[_ekey(cyc[i], cyc[(i + 1) % n])]:
                if g != f:
                    out.append(g)
        return out

    def validate(self) -> None:
        """Check simplicity and the at-most-two-faces-per-edge rule."""
        for f, cyc in self.faces.items():
            if len(cyc) < 3:
                raise ConstructionError(f"face {f} has a cycle of length {len(cyc)}")
            if len(set(cyc)) != len(cyc):
                raise ConstructionError(f"face {f} repeats a vertex")
        for e, fs in self.edge_faces.items():
            if len(fs) > 2:
                raise ConstructionError(f"edge {e} borders {len(fs)} faces")
            if len(fs) == 2 and fs[0] == fs[1]:
                raise ConstructionError(f"edge {e} borders face {fs[0]} twice")
        if len(self.darts) != sum(len(c) for c in self.faces.values()):
            raise ConstructionError("inconsistent orientation: a directed edge is used twice")

    def euler_characteristic(self) -> int:
        """V - E + F with F counting bounded faces only."""
        return len(self.adjacency) - len(self.edge_faces) + len(self.faces)

    def edge_polyline(self, u: int, v: int) -> np.ndarray:
        """Float polyline from u to v; falls back to the straight segment."""
        e = _ekey(u, v)
        pts = self.edge_points.get(e)
        if pts is None:
            pts = np.array([self.positions[e[0]], self.positions[e[1]]], dtype=float)
        return pts if e[0] == u else pts[::-1]

    def face_polygon(self, f: int) -> np.ndarray:
        """Closed float outline of a face (first point not repeated)."""
        cyc = self.faces[f]
        chunks = []
        for i in range(len(cyc)):
            chunks.append(self.edge_polyline(cyc[i], cyc[(i + 1) % len(cyc)])[:-1])
        return np.concatenate(chunks, axis=0)

    def restrict(self, keep: Iterable[int]) -> CombTiling:
        """Sub-map on a set of faces; geometry and labels carried along."""
        keep = set(keep)
        faces = {f: self.faces[f] for f in self.faces if f in keep}
        used = {v for c in faces.values() for v in c}
        edges = {_ekey(c[i], c[(i + 1) % len(c)]) for c in faces.values() for i in range(len(c))}
        return CombTiling(
            faces=faces,
            size_class={f: self.size_class.get(f, "unknown") for f in faces},
            positions={v: p for v, p in self.positions.items() if v in used},
            exact={v: p for v, p in self.exact.items() if v in used},
            edge_points={e: p for e, p in self.edge_points.items() if e in edges},
            edge_exact={e: p for e, p in self.edge_exact.items() if e in edges},
            labels={f: self.labels[f] for f in faces if f in self.labels},
        )

    def relabel(self, vmap: Mapping[int, int], fmap: Mapping[int, int]) -> CombTiling:
        """Rename vertices and faces; edge polylines are re-oriented as needed."""
        def emap(e):
            a, b = vmap[e[0]], vmap[e[1]]
            return (a, b) if a < b else (b, a)

        def orient(e, pts):
            return pts if vmap[e[0]] < vmap[e[1]] else pts[::-1]

        return CombTiling(
            faces={fmap[f]: tuple(vmap[v] for v in c) for f, c in self.faces.items()},
            size_class={fmap[f]: s for f, s in self.size_class.items()},
            positions={vmap[v]: p for v, p in self.positions.items()},
            exact={vmap[v]: p for v, p in self.exact.items()},
            edge_points={emap(e): orient(e, p) for e, p in self.edge_points.items()},
            edge_exact={emap(e): orient(e, p) for e, p in self.edge_exact.items()},
            labels={fmap[f]: s for f, s in self.labels.items()},
        )


@dataclass(frozen=True)
class MapIsomorphism:
    vertex_map: dict
    edge_map: dict
    face_map: dict


# -- construction from exact rectilinear polygons ---------------------------

def from_polygons(
    polygons: Mapping[int, Sequence[tuple]],
    floats: Mapping[tuple, tuple] | None = None,
    size_class: Mapping[int, str] | None = None,
    labels: Mapping[int, str] | None = None,
) -> CombTiling:
    """Build the planar map of a patch of axis-parallel polygons.

    Parameters
    ----------
    polygons : mapping of face id to a cycle of exact point keys
        Keys are hashable and compare exactly; sides must be horizontal or
        vertical, which holds for every tile generated by this package.
    floats : mapping of key to float (x, y)
        Used for ordering points along a line and for orientation only.

    Vertices are points where three or more tiles meet, patch-boundary
    points where two tiles meet, and tile corners on the patch boundary.
    Interior points where exactly two tiles meet (a convex corner of one
    tile against a reflex corner of another) are not vertices.
    """
    if floats is None:
        raise ValueError("float coordinates are required for ordering")
    size_class = dict(size_class or {})
    labels = dict(labels or {})

    # Points on each axis-parallel line, sorted along the line.
    hlines: dict[tuple, list] = defaultdict(list)
    vlines: dict[tuple, list] = defaultdict(list)
    seen = set()
    for poly in polygons.values():
        for p in poly:
            if p in seen:
                continue
            seen.add(p)
            x, y = floats[p]
            hlines[p[4:]].append((x, p))
            vlines[p[:4]].append((y, p))
    for d in (hlines, vlines):
        for line in d.values():
            line.sort()
    hcoords = {k: [t for t, _ in v] for k, v in hlines.items()}
    vcoords = {k: [t for t, _ in v] for k, v in vlines.items()}

    refined: dict[int, list] = {}
    corner_of: dict[tuple, set] = defaultdict(set)
    for f, poly in polygons.items():
        pts = list(poly)
        area2 = 0.0
        for i in range(len(pts)):
            x0, y0 = floats[pts[i]]
            x1, y1 = floats[pts[(i + 1) % len(pts)]]
            area2 += x0 * y1 - x1 * y0
        if area2 < 0:
            pts.reverse()
        cyc = []
        n = len(pts)
        for i in range(n):
            p, q = pts[i], pts[(i + 1) % n]
            corner_of[p].add(f)
            cyc.append(p)
            if p[4:] == q[4:]:
                line, coords, a, b = hlines[p[4:]], hcoords[p[4:]], floats[p][0], floats[q][0]
            elif p[:4] == q[:4]:
                line, coords, a, b = vlines[p[:4]], vcoords[p[:4]], floats[p][1], floats[q][1]
            else:
                raise ConstructionError(f"face {f}: side {i} is not axis-parallel")
            lo, hi = (a, b) if a < b else (b, a)
            i0 = bisect.bisect_right(coords, lo)
            i1 = bisect.bisect_left(coords, hi)
            inner = [k for t, k in line[i0:i1] if k != p and k != q]
            if a > b:
                inner.reverse()
            cyc.extend(inner)
        refined[f] = cyc

    seg_faces: dict[tuple, list] = defaultdict(list)
    point_faces: dict[tuple, set] = defaultdict(set)
    for f, cyc in refined.items():
        n = len(cyc)
        for i in range(n):
            p, q = cyc[i], cyc[(i + 1) % n]
            seg_faces[(p, q) if p < q else (q, p)].append(f)
            point_faces[p].add(f)
    for s, fs in seg_faces.items():
        if len(fs) > 2:
            raise ConstructionError(f"overlapping tiles {fs} along a segment")
    on_boundary = set()
    for (p, q), fs in seg_faces.items():
        if len(fs) == 1:
            on_boundary.add(p)
            on_boundary.add(q)

    def is_vertex(p) -> bool:
        k = len(point_faces[p])
        if k >= 3:
            return True
        if p in on_boundary:
            return k >= 2 or bool(corner_of.get(p))
        return False

    vid: dict[tuple, int] = {}
    faces: dict[int, tuple] = {}
    edge_chain: dict[Edge, tuple] = {}
    seg_edge: dict[tuple, Edge] = {}
    for f, cyc in refined.items():
        n = len(cyc)
        starts = [i for i in range(n) if is_vertex(cyc[i])]
        if len(starts) < 3:
            raise ConstructionError(f"face {f} has fewer than 3 vertices")
        fcycle = []
        for j, i0 in enumerate(starts):
            i1 = starts[(j + 1) % len(starts)]
            chain = [cyc[i0]]
            i = i0
            while True:
                i = (i + 1) % n
                chain.append(cyc[i])
                if i == i1:
                    break
            for p in (chain[0], chain[-1]):
                if p not in vid:
                    vid[p] = len(vid)
            u, v = vid[chain[0]], vid[chain[-1]]
            fcycle.append(u)
            first = (chain[0], chain[1]) if chain[0] < chain[1] else (chain[1], chain[0])
            e = _ekey(u, v)
            known = seg_edge.get(first)
            if known is None:
                if e in edge_chain:
                    raise ConstructionError(f"multiple edges between vertices {e}")
                edge_chain[e] = tuple(chain) if u < v else tuple(reversed(chain))
                for a, b in zip(chain, chain[1:]):
                    seg_edge[(a, b) if a < b else (b, a)] = e
            elif known != e:
                raise ConstructionError("inconsistent edge chains")
        faces[f] = tuple(fcycle)

    exact = {i: p for p, i in vid.items()}
    positions = {i: floats[p] for p, i in vid.items()}
    edge_points = {e: np.array([floats[p] for p in ch], dtype=float) for e, ch in edge_chain.items()}
    return CombTiling(
        faces=faces,
        size_class={f: size_class.get(f, "unknown") for f in faces},
        positions=positions,
        exact=exact,
        edge_points=edge_points,
        edge_exact=edge_chain,
        labels={f: labels[f] for f in faces if f in labels},
    )


# -- queries ---------------------------------------------------------------

def vertex_degree(T: CombTiling, v: int) -> int:
    try:
        return len(T.adjacency[v])
    except KeyError:
        raise KeyError(f"unknown vertex id {v!r}") from None


@dataclass(frozen=True)
class InducedTiling:
    """Result of :func:`induced_subtiling`.

    ``tiling`` has one face per bounded region; ``members`` maps each region
    id to the original faces it encloses.
    """

    tiling: CombTiling
    members: dict
    unbounded: frozenset


def _regions(T: CombTiling, keep: set) -> tuple[dict, dict]:
    parent = {f: f for f in T.faces}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e, fs in T.edge_faces.items():
        if len(fs) == 2 and e not in keep:
            ra, rb = find(fs[0]), find(fs[1])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict = defaultdict(list)
    for f in T.faces:
        groups[find(f)].append(f)
    return groups, {f: find(f) for f in T.faces}


def induced_subtiling(T: CombTiling, keep_edges: Iterable[Edge]) -> InducedTiling:
    """Faces of the subgraph formed by ``keep_edges``.

    Each bounded complementary region of the kept subgraph becomes a face
    whose cycle runs over the kept edges around it. Regions that reach the
    patch boundary through an edge that is not kept are unbounded and
    dropped. A kept edge with the same region on both sides raises
    :class:`DanglingEdgeError`.
    """
    keep = {_ekey(*e) for e in keep_edges}
    unknown = keep - set(T.edge_faces)
    if unknown:
        raise KeyError(f"edges not in tiling: {sorted(unknown)[:5]}")
    groups, root = _regions(T, keep)
    for e in keep:
        fs = T.edge_faces[e]
        if len(fs) == 2 and root[fs[0]] == root[fs[1]]:
            raise DanglingEdgeError(f"kept edge {e} has region {root[fs[0]]} on both sides")
    unbounded = set()
    for e in T.boundary_edges:
        if e not in keep:
            unbounded.add(root[T.edge_faces[e][0]])
    faces, members = {}, {}
    for r, fs in groups.items():
        if r in unbounded:
            continue
        inside = set(fs)
        nxt = {}
        for f in fs:
            cyc = T.faces[f]
            n = len(cyc)
            for i in range(n):
                u, v = cyc[i], cyc[(i + 1) % n]
                other = [g for g in T.edge_faces[_ekey(u, v)] if g != f]
                if not other or other[0] not in inside:
                    if u in nxt:
                        raise ConstructionError(f"region {r} is not a disk")
                    nxt[u] = v
        start = min(nxt)
        cyc = [start]
        v = nxt[start]
        while v != start:
            cyc.append(v)
            v = nxt[v]
        if len(cyc) != len(nxt):
            raise ConstructionError(f"region {r} boundary is not a single cycle")
        faces[r] = tuple(cyc)
        members[r] = sorted(fs)
    used = {v for c in faces.values() for v in c}
    kept_edges = {_ekey(c[i], c[(i + 1) % len(c)]) for c in faces.values() for i in range(len(c))}
    out = CombTiling(
        faces=faces,
        size_class={r: "unknown" for r in faces},
        positions={v: p for v, p in T.positions.items() if v in used},
        exact={v: p for v, p in T.exact.items() if v in used},
        edge_points={e: p for e, p in T.edge_points.items() if e in kept_edges},
        edge_exact={e: p for e, p in T.edge_exact.items() if e in kept_edges},
    )
    return InducedTiling(out, members, frozenset(unbounded))


# -- rooted traversal and isomorphism -----------------------------------------

def _traverse(T: CombTiling, f0: int, i0: int, d: int):
    """Breadth-first walk from a rooted, oriented position.

    Returns (code, face_order, vertex_order). Equal codes from two roots
    are equivalent to a face-preserving isomorphism sending one root to
    the other.
    """
    faces, darts = T.faces, T.darts
    vlabel: dict = {}
    vorder: list = []
    forder: list = []
    code: list = []
    seen = {f0}
    queue = deque([(f0, i0)])
    while queue:
        f, i = queue.popleft()
        cyc = faces[f]
        n = len(cyc)
        forder.append(f)
        code.append(-n)
        seq = [cyc[(i + d * j) % n] for j in range(n)]
        for v in seq:
            lab = vlabel.get(v)
            if lab is None:
                lab = vlabel[v] = len(vorder)
                vorder.append(v)
            code.append(lab)
        for j in range(n):
            a, b = seq[j], seq[(j + 1) % n]
            # the neighbour holds the CCW dart (b, a) when d=+1 and (a, b) when d=-1
            hit = darts.get((b, a) if d == 1 else (a, b))
            if hit is None:
                continue
            g, k = hit
            if g in seen:
                continue
            seen.add(g)
            start = k if d == 1 else (k + 1) % len(faces[g])
            queue.append((g, start))
    if len(forder) != len(faces):
        code.append(-(10**9))  # face graph disconnected: mark the code partial
    return tuple(code), forder, vorder


def rooted_code(T: CombTiling, f: int, i: int = 0, d: int = 1) -> tuple:
    return _traverse(T, f, i, d)[0]


def _roots(T: CombTiling):
    for f, cyc in T.faces.items():
        for i in range(len(cyc)):
            for d in (1, -1):
                yield (f, i, d)


def all_rooted_codes(T: CombTiling) -> dict:
    """code -> first root producing it, over every rooted orientation."""
    out = {}
    for r in _roots(T):
        c = _traverse(T, *r)[0]
        out.setdefault(c, r)
    return out


def _build_iso(A: CombTiling, B: CombTiling, ra, rb) -> MapIsomorphism:
    _, fa, va = _traverse(A, *ra)
    _, fb, vb = _traverse(B, *rb)
    vmap = dict(zip(va, vb))
    fmap = dict(zip(fa, fb))
    emap = {}
    for u, v in A.edge_faces:
        emap[(u, v)] = _ekey(vmap[u], vmap[v])
    return MapIsomorphism(vmap, emap, fmap)


def map_isomorphism(A: CombTiling, B: CombTiling) -> MapIsomorphism | None:
    """A face-preserving isomorphism A -> B, or None.

    Orientation-reversing isomorphisms are allowed. Search is exhaustive
    over rooted traversals of B against one fixed root of A.
    """
    if len(A.faces) != len(B.faces) or len(A.edge_faces) != len(B.edge_faces):
        return None
    if len(A.adjacency) != len(B.adjacency):
        return None
    if sorted(len(c) for c in A.faces.values()) != sorted(len(c) for c in B.faces.values()):
        return None
    if not A.faces:
        return MapIsomorphism({}, {}, {})
    f0 = min(A.faces)
    ra = (f0, 0, 1)
    target = _traverse(A, *ra)[0]
    if target and target[-1] == -(10**9):
        raise ValueError("map isomorphism needs an edge-connected face graph")
    for rb in _roots(B):
        if len(B.faces[rb[0]]) != len(A.faces[f0]):
            continue
        if _traverse(B, *rb)[0] == target:
            return _build_iso(A, B, ra, rb)
    return None


def automorphism_count(A: CombTiling) -> int:
    """Number of face-preserving self-isomorphisms, reflections included."""
    if not A.faces:
        return 1
    f0 = min(A.faces)
    target = _traverse(A, f0, 0, 1)[0]
    return sum(1 for r in _roots(A) if _traverse(A, *r)[0] == target)


def submap(T: CombTiling, faces: Iterable[int]) -> CombTiling:
    """Combinatorial sub-map on ``faces`` (cycles only, no geometry)."""
    faces = list(faces)
    return CombTiling(
        faces={f: T.faces[f] for f in faces},
        size_class={f: T.size_class.get(f, "unknown") for f in faces},
    )
