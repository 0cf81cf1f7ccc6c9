"""Combinatorial amalgamation of (possibly distorted) Ammann patches.

Only face cycles are read. Geometry attached to a :class:`CombTiling` is
carried through merges but never consulted, so a patch and any
homeomorphic image of it with the same cycles produce identical results.

The pipeline per step is

1. red-colour every edge joining two degree-4 vertices and prune it to
   its cycles,
2. take the bounded regions of the red subgraph,
3. match each region's sub-map against the level-4/level-5 supertile maps
   (whose automorphism groups are trivial) and pull back the partner
   arrows,
4. merge each small face with its partner.

A region is *certified* when it matches a reference map and none of its
tiles has an edge on the patch boundary; only certified regions are
merged and kept.
"""
from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import numerics as nm
from .generator import build_supertile, partner_address, to_combinatorial, weight
from .planar_map import (
    CombTiling,
    _ekey,
    _regions,
    all_rooted_codes,
    rooted_code,
    submap,
    _traverse,
)

__all__ = [
    "RedColoring",
    "ReferenceMap",
    "AmalgamationResult",
    "NotAmmannError",
    "build_reference_maps",
    "color_red",
    "resolve_partners",
    "merge_faces",
    "amalgamate_patch",
    "amalgamate",
    "restrict_to_disk",
    "ground_truth_pairs",
    "R_HAT_SLACK",
]

log = logging.getLogger(__name__)

#: tau^6, the diameter allowance for one fifth-level supertile
R_HAT_SLACK = nm.TAU ** 6


class NotAmmannError(ValueError):
    """An interior red region matches neither reference map."""


@dataclass(frozen=True)
class RedColoring:
    edges: frozenset
    vertices: frozenset
    mode: str

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class ReferenceMap:
    """Sub-map of a generated supertile plus its partner arrows.

    ``arrows`` maps each small face to its large partner face.
    """

    level: int
    tiling: CombTiling
    arrows: dict
    codes: dict = field(repr=False, compare=False, default_factory=dict)

    def face_order(self, root) -> list:
        return _traverse(self.tiling, *root)[1]


@lru_cache(maxsize=None)
def build_reference_maps() -> tuple[ReferenceMap, ReferenceMap]:
    """Maps of the level-4 and level-5 supertiles with ground-truth arrows."""
    out = []
    for n in (4, 5):
        T = to_combinatorial(build_supertile(n))
        by_label = {a: f for f, a in T.labels.items()}
        arrows = {}
        for f, a in T.labels.items():
            if T.size_class[f] == "small":
                arrows[f] = by_label[partner_address(a)]
        # only cycles are used for matching
        bare = submap(T, T.faces)
        out.append(ReferenceMap(n, bare, arrows, all_rooted_codes(bare)))
    return tuple(out)


def _leaf_prune(red: set) -> set:
    red = set(red)
    deg = Counter()
    for u, v in red:
        deg[u] += 1
        deg[v] += 1
    by_vertex = defaultdict(set)
    for e in red:
        by_vertex[e[0]].add(e)
        by_vertex[e[1]].add(e)
    stack = [v for v, d in deg.items() if d == 1]
    while stack:
        v = stack.pop()
        if deg[v] != 1:
            continue
        (e,) = by_vertex[v]
        red.discard(e)
        for w in e:
            by_vertex[w].discard(e)
            deg[w] -= 1
            if deg[w] == 1:
                stack.append(w)
    return red


def _bridges(edges: set) -> set:
    """Bridges of an undirected simple graph (iterative Tarjan)."""
    adj = defaultdict(list)
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    disc, low = {}, {}
    out = set()
    counter = 0
    for root in adj:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        stack = [(root, None, iter(adj[root]))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w in disc:
                    low[v] = min(low[v], disc[w])
                else:
                    disc[w] = low[w] = counter
                    counter += 1
                    stack.append((w, v, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if parent is not None:
                    low[parent] = min(low[parent], low[v])
                    if low[v] > disc[parent]:
                        out.add(_ekey(parent, v))
    return out


def color_red(T: CombTiling, mode: str = "cycle", boundary_convention: bool = False) -> RedColoring:
    """Red edges: those joining two vertices of degree 4, pruned.

    ``mode="cycle"`` drops every red edge not lying on a red cycle;
    ``mode="leaf"`` repeatedly strips red edges with a red endpoint of red
    degree one (to a fixpoint). With ``boundary_convention`` the patch is
    treated as a whole supertile: boundary edges, and edges from a degree-4
    vertex to a boundary vertex, are red as well.
    """
    if mode not in ("cycle", "leaf"):
        raise ValueError(f"unknown pruning mode {mode!r}")
    adj = T.adjacency
    deg4 = {v for v, nb in adj.items() if len(nb) == 4}
    red = {e for e in T.edge_faces if e[0] in deg4 and e[1] in deg4}
    if boundary_convention:
        bv = T.boundary_vertices
        red |= set(T.boundary_edges)
        red |= {e for e in T.edge_faces
                if (e[0] in deg4 and e[1] in bv) or (e[1] in deg4 and e[0] in bv)}
    if mode == "leaf":
        red = _leaf_prune(red)
    else:
        red = red - _bridges(red)
        # isolated leftovers cannot bound anything
        red = _leaf_prune(red)
    verts = frozenset(v for e in red for v in e)
    return RedColoring(frozenset(red), verts, mode)


@dataclass(frozen=True)
class PartnerResolution:
    pairs: list  # (small face, large face)
    certified: dict  # region id -> (reference level, member faces)
    uncertified: dict  # region id -> member faces (bounded but not certified)
    unbounded: frozenset  # faces in regions reaching the patch boundary


def resolve_partners(
    T: CombTiling,
    red: RedColoring,
    refs: tuple[ReferenceMap, ReferenceMap] | None = None,
    strict: bool = True,
) -> PartnerResolution:
    """Match each red region against the reference maps and read off partners.

    Regions touching the patch boundary are left uncertified without
    complaint. An interior region that matches neither reference raises
    :class:`NotAmmannError` when ``strict``.
    """
    refs = refs or build_reference_maps()
    keep = set(red.edges)
    groups, root = _regions(T, keep)
    unbounded_roots = set()
    for e in T.boundary_edges:
        if e not in keep:
            unbounded_roots.add(root[T.edge_faces[e][0]])
    touches = set()
    for e in T.boundary_edges:
        touches.add(root[T.edge_faces[e][0]])
    pairs, certified, uncertified = [], {}, {}
    unbounded = set()
    sizes = {len(r.tiling.faces): r for r in refs}
    for r, members in groups.items():
        if r in unbounded_roots:
            unbounded.update(members)
            continue
        ref = sizes.get(len(members))
        match = None
        if ref is not None:
            sub = submap(T, members)
            f0 = min(members)
            code = rooted_code(sub, f0, 0, 1)
            ref_root = ref.codes.get(code)
            if ref_root is not None:
                match = (ref, ref_root, _traverse(sub, f0, 0, 1)[1])
        if match is None or r in touches:
            if match is None and r not in touches and strict:
                raise NotAmmannError(
                    f"red region with {len(members)} faces matches neither "
                    "reference map (expected 8 or 13 faces); the input is not a "
                    "homeomorphic image of an Ammann-A2 tiling")
            uncertified[r] = sorted(members)
            continue
        ref, ref_root, order = match
        ref_order = ref.face_order(ref_root)
        to_ref = dict(zip(order, ref_order))
        from_ref = {v: k for k, v in to_ref.items()}
        for small, large in ref.arrows.items():
            pairs.append((from_ref[small], from_ref[large]))
        certified[r] = (ref.level, sorted(members))
    pairs.sort()
    return PartnerResolution(pairs, certified, uncertified, frozenset(unbounded))


def merge_faces(
    T: CombTiling,
    pairs: Iterable[tuple[int, int]],
    keep: Iterable[int] | None = None,
) -> CombTiling:
    """Replace each (small, large) pair by its union and drop other faces.

    The merged face keeps the large face's id. Faces in ``keep`` that take
    part in no pair survive unchanged; with ``keep=None`` every face does.
    Vertices left with degree two inside the patch are spliced out, their
    two edges joined into one (polylines concatenated). Size classes move
    up one level: merged faces are large, unpaired survivors small. Labels
    of sibling pairs ``rho2``/``rho1`` become ``rho``.
    """
    pairs = list(pairs)
    keep = set(T.faces) if keep is None else set(keep)
    small_of, merged_small = {}, set()
    for s, b in pairs:
        if s in merged_small or b in small_of or s in small_of or b in merged_small:
            raise ValueError(f"face used in two merges: {(s, b)}")
        small_of[b] = s
        merged_small.add(s)
    keep |= merged_small | set(small_of)

    faces: dict[int, tuple] = {}
    for f in keep:
        if f in merged_small:
            continue
        if f not in small_of:
            faces[f] = T.faces[f]
            continue
        s = small_of[f]
        group = (f, s)
        darts = {}
        for g in group:
            cyc = T.faces[g]
            n = len(cyc)
            for i in range(n):
                darts[cyc[i]] = darts.get(cyc[i], [])
                darts[cyc[i]].append(cyc[(i + 1) % n])
        inner = set()
        for g in group:
            cyc = T.faces[g]
            n = len(cyc)
            for i in range(n):
                u, v = cyc[i], cyc[(i + 1) % n]
                if u in darts.get(v, ()):
                    inner.add((u, v))
        if not inner:
            raise ValueError(f"faces {s} and {f} are not adjacent")
        nxt = {}
        for g in group:
            cyc = T.faces[g]
            n = len(cyc)
            for i in range(n):
                u, v = cyc[i], cyc[(i + 1) % n]
                if (u, v) not in inner:
                    if u in nxt:
                        raise ValueError(f"union of {s} and {f} is not a disk")
                    nxt[u] = v
        start = T.faces[f][0] if T.faces[f][0] in nxt else min(nxt)
        cyc = [start]
        v = nxt[start]
        while v != start:
            cyc.append(v)
            v = nxt[v]
        if len(cyc) != len(nxt):
            raise ValueError(f"union of {s} and {f} has a disconnected boundary")
        faces[f] = tuple(cyc)

    sizes = {f: ("large" if f in small_of else "small") for f in faces}
    labels = {}
    for f in faces:
        if f in small_of:
            a, b = T.labels.get(small_of[f]), T.labels.get(f)
            if a is not None and b is not None and a.endswith("2") and partner_address(a) == b:
                labels[f] = a[:-1]
        elif f in T.labels:
            labels[f] = T.labels[f]

    out = CombTiling(faces=faces, size_class=sizes, labels=labels)
    return _splice_degree_two(out, T)


def _splice_degree_two(M: CombTiling, src: CombTiling) -> CombTiling:
    """Remove interior degree-2 vertices of ``M``; geometry comes from ``src``."""
    adj = M.adjacency
    bverts = M.boundary_vertices
    drop = {v for v, nb in adj.items() if len(nb) == 2 and v not in bverts}
    faces = {f: tuple(v for v in c if v not in drop) for f, c in M.faces.items()}

    def chain_float(c):
        return _concat(src, c, exact=False)

    def chain_exact(c):
        return _concat(src, c, exact=True)

    edge_points, edge_exact = {}, {}
    have_float = bool(src.edge_points) or bool(src.positions)
    have_exact = bool(src.edge_exact)
    for f, full in M.faces.items():
        n = len(full)
        idx = [i for i in range(n) if full[i] not in drop]
        for j, i0 in enumerate(idx):
            i1 = idx[(j + 1) % len(idx)]
            walk = [full[i0]]
            i = i0
            while i != i1:
                i = (i + 1) % n
                walk.append(full[i])
            e = _ekey(walk[0], walk[-1])
            if e in edge_points or e in edge_exact:
                continue
            if walk[0] > walk[-1]:
                walk.reverse()
            if have_float:
                edge_points[e] = chain_float(walk)
            if have_exact:
                edge_exact[e] = chain_exact(walk)
    used = {v for c in faces.values() for v in c}
    return CombTiling(
        faces=faces,
        size_class=M.size_class,
        positions={v: p for v, p in src.positions.items() if v in used},
        exact={v: p for v, p in src.exact.items() if v in used},
        edge_points=edge_points,
        edge_exact=edge_exact,
        labels=M.labels,
    )


def _concat(src: CombTiling, walk: list, exact: bool):
    parts = []
    for a, b in zip(walk, walk[1:]):
        e = _ekey(a, b)
        if exact:
            seg = src.edge_exact.get(e)
            if seg is None:
                return None
            seg = seg if e[0] == a else tuple(reversed(seg))
            parts.append(seg if not parts else seg[1:])
        else:
            seg = src.edge_polyline(a, b)
            parts.append(seg if not parts else seg[1:])
    if exact:
        return tuple(p for part in parts for p in part)
    return np.concatenate(parts, axis=0)


@dataclass(frozen=True)
class AmalgamationResult:
    """Output of one combinatorial amalgamation step.

    ``tiling`` holds only the merged certified region (unscaled; the
    amalgamation proper is this scaled by s). ``certified`` is the set of
    input faces lying in certified regions, ``merges`` the (small, large)
    log, ``processed`` the number of input tiles examined.
    """

    tiling: CombTiling
    certified: frozenset
    merges: list
    processed: int
    uncertified: frozenset = frozenset()
    regions: dict = field(default_factory=dict)
    r_hat: float | None = None

    @property
    def input_faces(self) -> frozenset:
        return self.certified | self.uncertified


def restrict_to_disk(T: CombTiling, radius: float, center=(0.0, 0.0)) -> CombTiling:
    """Faces of ``T`` whose outline meets the closed disc (float geometry)."""
    cx, cy = center
    keep = []
    for f in T.faces:
        poly = T.face_polygon(f)
        d = np.hypot(poly[:, 0] - cx, poly[:, 1] - cy)
        if d.min() <= radius or _contains(poly, (cx, cy)):
            keep.append(f)
        elif _seg_min_dist(poly, (cx, cy)) <= radius:
            keep.append(f)
    return T.restrict(keep)


def _contains(poly: np.ndarray, pt) -> bool:
    x, y = pt
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    cond = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    return bool(np.count_nonzero(cond & (x < xi)) % 2)


def _seg_min_dist(poly: np.ndarray, pt) -> float:
    a = poly
    b = np.roll(poly, -1, axis=0)
    d = b - a
    L = (d ** 2).sum(axis=1)
    p = np.asarray(pt, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(L > 0, ((p - a) * d).sum(axis=1) / L, 0.0)
    t = np.clip(t, 0.0, 1.0)
    q = a + t[:, None] * d
    return float(np.hypot(*(q - p).T).min())


def amalgamate_patch(
    T: CombTiling,
    C: float = 0.0,
    R: float | None = None,
    center=(0.0, 0.0),
    mode: str = "cycle",
    strict: bool = True,
) -> AmalgamationResult:
    """One combinatorial amalgamation of a finite patch.

    With ``R`` given, only tiles meeting the disc of radius
    ``R + 2C + tau^6`` are processed; otherwise the whole patch is.
    """
    r_hat = None
    if R is not None:
        r_hat = R + 2.0 * C + R_HAT_SLACK
        T = restrict_to_disk(T, r_hat, center)
    red = color_red(T, mode)
    res = resolve_partners(T, red, strict=strict)
    keep = {f for _, members in res.certified.values() for f in members}
    out = merge_faces(T, res.pairs, keep)
    return AmalgamationResult(
        tiling=out,
        certified=frozenset(keep),
        merges=res.pairs,
        processed=len(T.faces),
        uncertified=frozenset(set(T.faces) - keep),
        regions=res.certified,
        r_hat=r_hat,
    )


def amalgamate(T: CombTiling, iterations: int = 1, **kw) -> list[AmalgamationResult]:
    """Repeated amalgamation; each step runs on the previous certified output."""
    out = []
    for i in range(iterations):
        res = amalgamate_patch(T, **(kw if i == 0 else {"mode": kw.get("mode", "cycle"),
                                                       "strict": kw.get("strict", True)}))
        out.append(res)
        T = res.tiling
        if not T.faces:
            break
    return out


def ground_truth_pairs(T: CombTiling, top: int, level: int = 0) -> list[tuple[int, int]]:
    """(small, large) face pairs read from generator labels at a hierarchy level."""
    by_label = {a: f for f, a in T.labels.items()}
    out = []
    for f, a in T.labels.items():
        if a.endswith("2") and weight(a) == top - level + 1:
            b = by_label.get(partner_address(a))
            if b is not None:
                out.append((f, b))
    return sorted(out)
