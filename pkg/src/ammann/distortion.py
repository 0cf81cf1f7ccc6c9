"""Bounded-distortion homeomorphisms of the plane and their action on patches.

Every field is ``h = id + D`` with a displacement ``D`` that is bounded by
``C`` and has Lipschitz constant ``L < 1``; ``h`` is then a homeomorphism
(its inverse is a contraction fixed point), so no inverse is implemented.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.stats import qmc
from shapely import LineString, STRtree

from .planar_map import CombTiling

__all__ = [
    "DistortionField",
    "SineWarp",
    "RadialBumps",
    "Composition",
    "InvalidFieldError",
    "CertificationError",
    "DistortedPatch",
    "make_field",
    "apply",
    "verify_bound",
    "conjugation_error",
    "crossing_edges",
    "PRESETS",
]


class InvalidFieldError(ValueError):
    """Field parameters violate the homeomorphism condition."""


class CertificationError(RuntimeError):
    """Sampled displacement exceeds the declared bound."""


class DistortionField:
    """Base class: ``h(x) = x + displacement(x)``."""

    family = "identity"
    C: float = 0.0
    L: float = 0.0

    def displacement(self, pts: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(pts, dtype=float))

    def __call__(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts + self.displacement(pts)

    def sample_box(self) -> tuple[float, float, float, float]:
        return (-1.0, -1.0, 1.0, 1.0)

    def spec(self) -> dict:
        return {"family": "identity"}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(C={self.C:.4g}, L={self.L:.4g})"


@dataclass(frozen=True, repr=False)
class SineWarp(DistortionField):
    """``(x + A sin(w y + p1), y + A sin(w x + p2))``; C = A*sqrt(2), L = A*w."""

    amplitude: float
    omega: float = 1.0
    phase: tuple = (0.0, 0.0)
    family = "sine"

    def __post_init__(self):
        if self.amplitude < 0 or self.omega < 0:
            raise InvalidFieldError("amplitude and frequency must be non-negative")
        if self.L >= 1.0:
            raise InvalidFieldError(f"Lipschitz constant A*omega = {self.L:.4g} must be < 1")

    @property
    def C(self) -> float:
        return self.amplitude * math.sqrt(2.0)

    @property
    def L(self) -> float:
        return self.amplitude * self.omega

    def displacement(self, pts):
        pts = np.asarray(pts, dtype=float)
        A, w = self.amplitude, self.omega
        dx = A * np.sin(w * pts[..., 1] + self.phase[0])
        dy = A * np.sin(w * pts[..., 0] + self.phase[1])
        return np.stack([dx, dy], axis=-1)

    def sample_box(self):
        p = 2.0 * math.pi / self.omega if self.omega > 0 else 1.0
        return (0.0, 0.0, p, p)

    def spec(self):
        return {"family": "sine", "amplitude": self.amplitude, "omega": self.omega,
                "phase": list(self.phase)}


# profile g(t) = t (1 - t^2)^2 on [0, 1]; max at t = 1/sqrt(5)
_BUMP_PEAK = (1.0 / math.sqrt(5.0)) * (4.0 / 5.0) ** 2


@dataclass(frozen=True, repr=False)
class RadialBumps(DistortionField):
    """Sum of radial pushes ``height * g(|x-c|/r) / g_max`` along ``(x-c)/|x-c|``.

    Each bump moves points by at most its height and is supported in its
    disc. Its displacement has Lipschitz constant ``height / (g_max r)``.
    """

    bumps: tuple  # (cx, cy, height, radius)
    family = "bumps"

    def __post_init__(self):
        for b in self.bumps:
            if len(b) != 4 or b[3] <= 0 or b[2] < 0:
                raise InvalidFieldError(f"bad bump {b!r}; need (cx, cy, height>=0, radius>0)")
        if self.L >= 1.0:
            raise InvalidFieldError(f"summed bump slope {self.L:.4g} must be < 1")

    def _disjoint(self) -> bool:
        bs = self.bumps
        for i in range(len(bs)):
            for j in range(i + 1, len(bs)):
                if math.hypot(bs[i][0] - bs[j][0], bs[i][1] - bs[j][1]) < bs[i][3] + bs[j][3]:
                    return False
        return True

    @property
    def C(self) -> float:
        hs = [b[2] for b in self.bumps] or [0.0]
        return max(hs) if self._disjoint() else sum(hs)

    @property
    def L(self) -> float:
        ls = [b[2] / (_BUMP_PEAK * b[3]) for b in self.bumps] or [0.0]
        return max(ls) if self._disjoint() else sum(ls)

    def displacement(self, pts):
        pts = np.asarray(pts, dtype=float)
        out = np.zeros_like(pts)
        for cx, cy, h, r in self.bumps:
            v = pts - np.array([cx, cy])
            d = np.hypot(v[..., 0], v[..., 1])
            t = np.clip(d / r, 0.0, 1.0)
            mag = (h / _BUMP_PEAK) * t * (1.0 - t * t) ** 2
            with np.errstate(invalid="ignore", divide="ignore"):
                unit = np.where(d[..., None] > 0, v / d[..., None], 0.0)
            out += mag[..., None] * unit
        return out

    def sample_box(self):
        if not self.bumps:
            return super().sample_box()
        xs = [b[0] - b[3] for b in self.bumps] + [b[0] + b[3] for b in self.bumps]
        ys = [b[1] - b[3] for b in self.bumps] + [b[1] + b[3] for b in self.bumps]
        return (min(xs), min(ys), max(xs), max(ys))

    def spec(self):
        return {"family": "bumps",
                "bumps": [{"center": [b[0], b[1]], "height": b[2], "radius": b[3]}
                          for b in self.bumps]}


@dataclass(frozen=True, repr=False)
class Composition(DistortionField):
    """``h_n o ... o h_1`` for ``parts = (h_1, ..., h_n)``.

    Each factor is a homeomorphism, hence so is the composite. C is the
    sum of the factors' bounds; L is the Lipschitz bound of the composite
    displacement and is informational only.
    """

    parts: tuple
    family = "compose"

    @property
    def C(self) -> float:
        return float(sum(p.C for p in self.parts))

    @property
    def L(self) -> float:
        lip = 1.0
        for p in self.parts:
            lip *= 1.0 + p.L
        return lip - 1.0

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        for p in self.parts:
            pts = p(pts)
        return pts

    def displacement(self, pts):
        pts = np.asarray(pts, dtype=float)
        return self(pts) - pts

    def sample_box(self):
        boxes = [p.sample_box() for p in self.parts] or [super().sample_box()]
        return (min(b[0] for b in boxes), min(b[1] for b in boxes),
                max(b[2] for b in boxes), max(b[3] for b in boxes))

    def spec(self):
        return {"family": "compose", "fields": [p.spec() for p in self.parts]}


def make_field(spec: Mapping[str, Any] | DistortionField | None) -> DistortionField:
    """Build a field from a JSON-style spec (or a preset name)."""
    if spec is None:
        return DistortionField()
    if isinstance(spec, DistortionField):
        return spec
    if isinstance(spec, str):
        if spec not in PRESETS:
            raise KeyError(f"unknown preset {spec!r}; choose from {sorted(PRESETS)}")
        return make_field(PRESETS[spec])
    fam = spec.get("family")
    if fam == "identity":
        return DistortionField()
    if fam == "sine":
        if float(spec.get("amplitude", 0.0)) == 0.0:
            return DistortionField()
        ph = spec.get("phase", (0.0, 0.0))
        return SineWarp(float(spec["amplitude"]), float(spec.get("omega", 1.0)),
                        (float(ph[0]), float(ph[1])))
    if fam == "bumps":
        bs = tuple((float(b["center"][0]), float(b["center"][1]), float(b["height"]),
                    float(b["radius"])) for b in spec.get("bumps", ()))
        return RadialBumps(bs)
    if fam == "compose":
        return Composition(tuple(make_field(s) for s in spec["fields"]))
    raise InvalidFieldError(f"unknown field family {fam!r}")


def verify_bound(f: DistortionField, samples: int = 4096, seed: int = 0,
                 box: Sequence[float] | None = None) -> float:
    """Largest sampled displacement over a scrambled Halton set.

    Raises :class:`CertificationError` if it exceeds the declared C.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    x0, y0, x1, y1 = box if box is not None else f.sample_box()
    pts = qmc.Halton(d=2, seed=seed).random(samples)
    pts = qmc.scale(pts, [x0, y0], [x1, y1])
    d = f.displacement(pts)
    m = float(np.hypot(d[:, 0], d[:, 1]).max())
    if m > f.C + 1e-12:
        raise CertificationError(f"measured displacement {m:.6g} exceeds declared C={f.C:.6g}")
    return m


def conjugation_error(f: DistortionField, r: float, samples: int = 2048, seed: int = 0) -> float:
    """Sampled sup |x - (phi_r^-1 o h o phi_r)(x)| for phi_r(x) = r x."""
    x0, y0, x1, y1 = f.sample_box()
    pts = qmc.scale(qmc.Halton(d=2, seed=seed).random(samples), [x0 / r, y0 / r], [x1 / r, y1 / r])
    img = f(pts * r) / r
    return float(np.hypot(*(img - pts).T).max())


@dataclass(frozen=True)
class DistortedPatch:
    """Image of a planar map under a field; face/vertex ids are unchanged."""

    tiling: CombTiling
    field: DistortionField
    delta: float
    source: CombTiling | None = field(default=None, repr=False)


def apply(f: DistortionField | Mapping, T: CombTiling, delta: float = 0.05) -> DistortedPatch:
    """Subdivide every edge to pieces of length at most ``delta`` and map it.

    Exact coordinates are dropped: the image carries float geometry only.
    Shared edges are stored once, so adjacent faces share points exactly.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    f = make_field(f)
    edges = list(T.edge_faces)
    if not edges:
        return DistortedPatch(CombTiling(faces={}), f, delta, T)
    lines = [np.asarray(T.edge_polyline(*e), dtype=float) for e in edges]
    # all segments at once: start, end, owning edge, number of pieces
    a = np.concatenate([p[:-1] for p in lines])
    b = np.concatenate([p[1:] for p in lines])
    owner = np.repeat(np.arange(len(edges)), [len(p) - 1 for p in lines])
    n = np.maximum(1, np.ceil(np.hypot(*(b - a).T) / delta).astype(int))
    seg = np.repeat(np.arange(len(a)), n)
    step = np.arange(seg.size) - np.repeat(np.cumsum(n) - n, n) + 1
    t = (step / np.repeat(n, n))[:, None]
    fine = a[seg] + t * (b[seg] - a[seg])
    img = f(fine)
    starts = f(np.array([p[0] for p in lines]))
    counts = np.bincount(owner[seg], minlength=len(edges))
    split = np.split(img, np.cumsum(counts)[:-1])
    edge_points = {e: np.vstack([starts[i:i + 1], split[i]]) for i, e in enumerate(edges)}
    positions = {}
    for (u, v), pts in edge_points.items():
        positions.setdefault(u, tuple(pts[0]))
        positions.setdefault(v, tuple(pts[-1]))
    out = CombTiling(
        faces=dict(T.faces),
        size_class=dict(T.size_class),
        positions=positions,
        edge_points=edge_points,
        labels=dict(T.labels),
    )
    return DistortedPatch(out, f, delta, T)


def crossing_edges(T: CombTiling, limit: int | None = None) -> list[tuple]:
    """Pairs of distinct edges whose polylines meet away from shared endpoints."""
    edges = list(T.edge_faces)
    lines = [LineString(T.edge_polyline(*e)) for e in edges]
    tree = STRtree(lines)
    bad = []
    left, right = tree.query(lines, predicate="intersects")
    for i, j in zip(left.tolist(), right.tolist()):
        if i >= j:
            continue
        a, b = edges[i], edges[j]
        shared = set(a) & set(b)
        inter = lines[i].intersection(lines[j])
        if inter.is_empty:
            continue
        allowed = [T.positions[v] for v in shared]
        pts = [inter] if inter.geom_type == "Point" else getattr(inter, "geoms", [inter])
        ok = all(g.geom_type == "Point" and any(
            abs(g.x - p[0]) < 1e-9 and abs(g.y - p[1]) < 1e-9 for p in allowed) for g in pts)
        if not ok:
            bad.append((a, b))
            if limit is not None and len(bad) >= limit:
                break
    return bad


PRESETS: dict[str, dict] = {
    "sine-small": {"family": "sine", "amplitude": 0.08, "omega": 1.5, "phase": [0.3, 1.1]},
    "sine-042": {"family": "sine", "amplitude": 0.3, "omega": 1.0, "phase": [0.0, 0.0]},
    "sine-fast": {"family": "sine", "amplitude": 0.2, "omega": 2.5, "phase": [1.7, 0.4]},
    "bumps": {"family": "bumps", "bumps": [
        {"center": [1.5, 2.0], "height": 0.5, "radius": 3.0},
        {"center": [-6.0, -3.0], "height": 0.45, "radius": 2.5},
        {"center": [5.0, -7.0], "height": 0.4, "radius": 3.5},
    ]},
    "mixed": {"family": "compose", "fields": [
        {"family": "sine", "amplitude": 0.15, "omega": 1.2, "phase": [0.5, 2.0]},
        {"family": "bumps", "bumps": [{"center": [0.5, 0.5], "height": 0.35, "radius": 2.5}]},
    ]},
}
