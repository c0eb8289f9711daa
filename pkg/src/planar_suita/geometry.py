"""Multiply-connected planar domains, cycles and quadrature node sets.

A domain is an outer Jordan curve minus ``n - 1`` disjoint closed holes.
Boundary components are indexed ``0 .. n-2`` for the holes and ``n-1`` for
the outer curve. All curves are traversed counterclockwise; the outward
normal of the domain points into the holes on inner components.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

INNER_CUTOFF = 1e-8


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")

    def point(self, t):
        return self.center + self.radius * np.exp(1j * np.asarray(t))

    def tangent(self, t):
        return 1j * self.radius * np.exp(1j * np.asarray(t))

    def inside(self, z, tol=0.0):
        return np.abs(np.asarray(z) - self.center) < self.radius - tol

    def outside(self, z, tol=0.0):
        return np.abs(np.asarray(z) - self.center) > self.radius + tol

    @property
    def centroid(self) -> complex:
        return self.center

    @property
    def extent(self) -> float:
        return self.radius

    @property
    def length(self) -> float:
        return 2 * np.pi * self.radius

    def to_dict(self):
        return {"c": [self.center.real, self.center.imag], "r": self.radius}


@dataclass(frozen=True)
class FourierCurve:
    """Closed analytic curve ``z(t) = center + sum_k c_k exp(i k t)``.

    ``modes`` holds ``(k, c_k)`` pairs. The curve must be simple and
    counterclockwise. Support for these curves is best-effort.
    """

    center: complex
    modes: tuple

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(
            self, "modes", tuple((int(k), complex(c)) for k, c in self.modes)
        )
        if self.signed_area() <= 0:
            raise ValueError("parametric curve must be counterclockwise and non-degenerate")

    def point(self, t):
        t = np.asarray(t, dtype=float)
        z = np.full(t.shape, self.center, dtype=complex)
        for k, c in self.modes:
            z = z + c * np.exp(1j * k * t)
        return z

    def tangent(self, t):
        t = np.asarray(t, dtype=float)
        dz = np.zeros(t.shape, dtype=complex)
        for k, c in self.modes:
            dz = dz + 1j * k * c * np.exp(1j * k * t)
        return dz

    def polygon(self, m=2048):
        return self.point(2 * np.pi * np.arange(m) / m)

    def signed_area(self, m=2048):
        t = 2 * np.pi * np.arange(m) / m
        z, dz = self.point(t), self.tangent(t)
        return 0.5 * np.mean(np.imag(np.conj(z) * dz)) * 2 * np.pi

    @property
    def centroid(self) -> complex:
        m = 2048
        t = 2 * np.pi * np.arange(m) / m
        z, dz = self.point(t), self.tangent(t)
        # area centroid via Green's theorem: (1/2iA) * oint |z|^2 dz
        integral = np.mean(np.abs(z) ** 2 * dz) * 2 * np.pi
        return complex(integral / (2j * self.signed_area()))

    @property
    def extent(self) -> float:
        return float(np.max(np.abs(self.polygon() - self.centroid)))

    @property
    def length(self) -> float:
        m = 2048
        return float(np.mean(np.abs(self.tangent(2 * np.pi * np.arange(m) / m))) * 2 * np.pi)

    def inside(self, z, tol=0.0):
        z = np.asarray(z, dtype=complex)
        w = _winding(self.polygon(), z)
        ok = np.abs(w) > 0.5
        if tol > 0:
            ok &= _polyline_distance(self.polygon(), z) > tol
        return ok

    def outside(self, z, tol=0.0):
        z = np.asarray(z, dtype=complex)
        ok = np.abs(_winding(self.polygon(), z)) < 0.5
        if tol > 0:
            ok &= _polyline_distance(self.polygon(), z) > tol
        return ok

    def to_dict(self):
        return {
            "center": [self.center.real, self.center.imag],
            "modes": [[k, c.real, c.imag] for k, c in self.modes],
        }


def _winding(poly, z):
    """Winding number of the closed polygon ``poly`` about each point of ``z``."""
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=float)
    nxt = np.roll(poly, -1)
    for idx, p in np.ndenumerate(z):
        out[idx] = np.sum(np.angle((nxt - p) / (poly - p))) / (2 * np.pi)
    return out


def _polyline_distance(poly, z):
    z = np.atleast_1d(z)
    return np.array([np.min(np.abs(poly - p)) for p in z.ravel()]).reshape(z.shape)


def _curve_from_dict(d):
    if "r" in d:
        return Circle(complex(*d["c"]), d["r"])
    return FourierCurve(complex(*d["center"]), tuple((k, complex(re, im)) for k, re, im in d["modes"]))


@dataclass(frozen=True)
class DomainSpec:
    """Declarative description of a domain: disk, annulus(R), circular or parametric."""

    kind: str
    R: float | None = None
    outer: Circle | FourierCurve | None = None
    holes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "holes", tuple(self.holes))

    @classmethod
    def disk(cls):
        return cls("disk")

    @classmethod
    def annulus(cls, R):
        return cls("annulus", R=float(R))

    @classmethod
    def circular(cls, outer: Circle, holes: Sequence[Circle] = ()):
        return cls("circular", outer=outer, holes=tuple(holes))

    @classmethod
    def from_dict(cls, d: dict) -> "DomainSpec":
        kind = d.get("kind")
        if kind == "disk":
            return cls.disk()
        if kind == "annulus":
            return cls.annulus(d["R"])
        if kind in ("circular", "parametric"):
            outer = _curve_from_dict(d["outer"])
            holes = tuple(_curve_from_dict(h) for h in d.get("holes", []))
            return cls(kind, outer=outer, holes=holes)
        raise ValueError(f"unknown domain kind {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "disk":
            return {"kind": "disk"}
        if self.kind == "annulus":
            return {"kind": "annulus", "R": self.R}
        return {
            "kind": self.kind,
            "outer": self.outer.to_dict(),
            "holes": [h.to_dict() for h in self.holes],
        }


@dataclass(frozen=True)
class Cycle:
    """Counterclockwise (``orientation=1``) circle used as a homology cycle."""

    center: complex
    radius: float
    orientation: int = 1

    def nodes(self, m=256):
        """Trapezoid nodes ``z`` and weights ``dz`` for contour integrals."""
        t = 2 * np.pi * np.arange(m) / m
        z = self.center + self.radius * np.exp(1j * t)
        dz = 1j * self.radius * np.exp(1j * t) * (2 * np.pi / m) * self.orientation
        return z, dz

    def winding(self, p, m=256) -> float:
        """Numeric winding number ``(1/2 pi i) oint dz / (z - p)``."""
        z, dz = self.nodes(m)
        return float(np.real(np.sum(dz / (z - p)) / (2j * np.pi)))

    def encloses(self, p) -> bool:
        return abs(p - self.center) < self.radius


@dataclass(frozen=True)
class QuadratureSet:
    nodes: np.ndarray
    weights: np.ndarray
    normals: np.ndarray
    component: np.ndarray

    def select(self, k):
        mask = self.component == k
        return self.nodes[mask], self.weights[mask], self.normals[mask]


@dataclass(frozen=True)
class AreaQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    centers: tuple = ()

    def integrate(self, values):
        return np.sum(self.weights * values)


@dataclass(frozen=True, eq=False)
class Domain:
    spec: DomainSpec
    outer: Circle | FourierCurve
    holes: tuple
    anchors: tuple
    cycles: tuple
    hole_scales: tuple = field(default=())

    # identity hashing keeps frozen domains usable as cache keys
    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other

    @property
    def n(self) -> int:
        """Connectivity."""
        return len(self.holes) + 1

    @property
    def components(self) -> tuple:
        return tuple(self.holes) + (self.outer,)

    @property
    def is_circular(self) -> bool:
        return all(isinstance(c, Circle) for c in self.components)

    @property
    def outer_center(self) -> complex:
        return self.outer.centroid

    @property
    def outer_scale(self) -> float:
        return self.outer.extent

    def bounding_box(self):
        if isinstance(self.outer, Circle):
            c, r = self.outer.center, self.outer.radius
            return c.real - r, c.real + r, c.imag - r, c.imag + r
        p = self.outer.polygon()
        return p.real.min(), p.real.max(), p.imag.min(), p.imag.max()

    def clearance(self, z) -> np.ndarray:
        """Distance from ``z`` to the boundary (exact for circles)."""
        z = np.asarray(z, dtype=complex)
        dist = []
        for comp in self.components:
            if isinstance(comp, Circle):
                dist.append(np.abs(np.abs(z - comp.center) - comp.radius))
            else:
                dist.append(_polyline_distance(comp.polygon(), z))
        return np.min(dist, axis=0)


def _validate_circles(outer: Circle, holes):
    scale = outer.radius
    for i, h in enumerate(holes):
        if abs(h.center - outer.center) + h.radius >= outer.radius:
            raise ValueError(f"hole {i} is not strictly inside the outer curve")
        for j in range(i):
            o = holes[j]
            if abs(h.center - o.center) <= h.radius + o.radius + 1e-14 * scale:
                raise ValueError(f"overlapping holes {j} and {i}")


def _validate_general(outer, holes):
    for i, h in enumerate(holes):
        if not np.all(outer.inside(h.polygon() if isinstance(h, FourierCurve) else h.point(np.linspace(0, 2 * np.pi, 256)))):
            raise ValueError(f"hole {i} is not strictly inside the outer curve")
        pi = h.polygon() if isinstance(h, FourierCurve) else h.point(np.linspace(0, 2 * np.pi, 512))
        for j in range(i):
            o = holes[j]
            pj = o.polygon() if isinstance(o, FourierCurve) else o.point(np.linspace(0, 2 * np.pi, 512))
            if np.any(~o.outside(pi)) or np.any(~h.outside(pj)):
                raise ValueError(f"overlapping holes {j} and {i}")


def _make_cycle(k, holes, outer, anchor):
    """Circle around hole ``k``: 1.5x its extent, shrunk to clear other components."""
    hole = holes[k]
    rho = hole.extent if isinstance(hole, Circle) else float(np.max(np.abs(hole.polygon() - anchor)))
    clear = []
    if isinstance(outer, Circle):
        clear.append(outer.radius - abs(anchor - outer.center))
    else:
        clear.append(float(np.min(np.abs(outer.polygon() - anchor))))
    for j, other in enumerate(holes):
        if j == k:
            continue
        if isinstance(other, Circle):
            clear.append(abs(anchor - other.center) - other.radius)
        else:
            clear.append(float(np.min(np.abs(other.polygon() - anchor))))
    dmin = min(clear)
    if dmin <= rho:
        raise ValueError(f"no cycle fits around hole {k}")
    return Cycle(anchor, min(1.5 * rho, 0.5 * (rho + dmin)))


def build_domain(spec: DomainSpec) -> Domain:
    """Validate ``spec`` and attach anchors, homology cycles and basis scales."""
    if spec.kind == "disk":
        outer, holes = Circle(0, 1.0), ()
    elif spec.kind == "annulus":
        if spec.R is None or not spec.R > 1:
            raise ValueError(f"annulus requires R > 1, got {spec.R}")
        outer, holes = Circle(0, spec.R), (Circle(0, 1.0),)
    elif spec.kind in ("circular", "parametric"):
        outer, holes = spec.outer, tuple(spec.holes)
        if outer is None:
            raise ValueError("outer curve missing")
    else:
        raise ValueError(f"unknown domain kind {spec.kind!r}")

    if all(isinstance(c, Circle) for c in (outer,) + holes):
        _validate_circles(outer, holes)
    else:
        _validate_general(outer, holes)

    anchors = tuple(h.centroid for h in holes)
    for k, (h, a) in enumerate(zip(holes, anchors)):
        if not np.all(h.inside(a)):
            raise ValueError(f"centroid of hole {k} is not inside the hole")
    cycles = tuple(_make_cycle(k, holes, outer, anchors[k]) for k in range(len(holes)))
    scales = tuple(
        h.radius if isinstance(h, Circle) else float(np.max(np.abs(h.polygon() - a)))
        for h, a in zip(holes, anchors)
    )
    return Domain(spec, outer, holes, anchors, cycles, scales)


def contains(d: Domain, z, tol=None):
    """Strict interior test; boundary points are excluded."""
    z = np.asarray(z, dtype=complex)
    if tol is None:
        tol = 1e-12 * max(1.0, d.outer_scale)
    ok = d.outer.inside(z, tol)
    for h in d.holes:
        ok = ok & h.outside(z, tol)
    return bool(ok) if ok.ndim == 0 else ok


def boundary_nodes(d: Domain, per_component: int = 128) -> QuadratureSet:
    """Trapezoid nodes on every component with arc-length weights and outward normals."""
    if per_component < 16:
        raise ValueError("per_component must be at least 16")
    t = 2 * np.pi * np.arange(per_component) / per_component
    nodes, weights, normals, comp = [], [], [], []
    for k, curve in enumerate(d.components):
        z, dz = curve.point(t), curve.tangent(t)
        speed = np.abs(dz)
        unit = dz / speed
        # outer: right of travel; holes: left of travel (into the hole)
        nrm = -1j * unit if k == d.n - 1 else 1j * unit
        nodes.append(z)
        weights.append(speed * 2 * np.pi / per_component)
        normals.append(nrm)
        comp.append(np.full(per_component, k))
    return QuadratureSet(
        np.concatenate(nodes), np.concatenate(weights), np.concatenate(normals), np.concatenate(comp)
    )


def _gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1), 0.5 * w


def _graded_disk(center, radius, n_radial=6, n_angle=48, ratio=0.5, cutoff=INNER_CUTOFF):
    """Polar nodes about ``center`` on geometric rings down to ``cutoff``."""
    edges = [radius]
    while edges[-1] * ratio > cutoff:
        edges.append(edges[-1] * ratio)
    edges.append(0.0)
    s, ws = _gauss01(n_radial)
    theta = 2 * np.pi * np.arange(n_angle) / n_angle
    r_all, w_all = [], []
    for hi, lo in zip(edges[:-1], edges[1:]):
        r_all.append(lo + (hi - lo) * s)
        w_all.append((hi - lo) * ws * (lo + (hi - lo) * s))
    r = np.concatenate(r_all)
    wr = np.concatenate(w_all)
    z = center + np.outer(r, np.exp(1j * theta))
    w = np.outer(wr, np.full(n_angle, 2 * np.pi / n_angle))
    return z.ravel(), w.ravel()


def _ray_intervals(origin, theta, discs):
    """Radial intervals along the ray at angle ``theta`` covered by each disc."""
    e = np.exp(-1j * theta)
    out = []
    for c, rho in discs:
        q = (c - origin) * e
        disc = rho * rho - q.imag * q.imag
        if disc > 0:
            root = np.sqrt(disc)
            lo, hi = q.real - root, q.real + root
            if hi > 0:
                out.append((max(lo, 0.0), hi))
    out.sort()
    return out


def _polar_region(origin, r_outer, discs, n_theta, n_radial):
    """Quadrature for the disc ``|z - origin| < r_outer`` minus disjoint ``discs``.

    Angular breakpoints sit at tangent directions of discs not containing the
    origin; a cubic substitution with vanishing end derivatives removes the
    square-root behaviour of the segment endpoints there.
    """
    breaks = []
    for c, rho in discs:
        dist = abs(c - origin)
        if dist > rho:
            half = np.arcsin(rho / dist)
            phi = np.angle(c - origin)
            breaks += [(phi - half) % (2 * np.pi), (phi + half) % (2 * np.pi)]
    thetas, wth = [], []
    if not breaks:
        thetas = 2 * np.pi * np.arange(n_theta) / n_theta
        wth = np.full(n_theta, 2 * np.pi / n_theta)
    else:
        b = np.sort(np.array(breaks))
        b = np.append(b, b[0] + 2 * np.pi)
        for lo, hi in zip(b[:-1], b[1:]):
            span = hi - lo
            if span < 1e-14:
                continue
            # the end-clustering substitution costs about a factor two in resolution
            npts = max(12, int(np.ceil(2 * n_theta * span / (2 * np.pi))))
            s, ws = _gauss01(npts)
            thetas.append(lo + span * (3 * s**2 - 2 * s**3))
            wth.append(span * 6 * s * (1 - s) * ws)
        thetas = np.concatenate(thetas)
        wth = np.concatenate(wth)

    zs, ws_all = [], []
    for th, wt in zip(thetas, wth):
        cuts = _ray_intervals(origin, th, discs)
        start = 0.0
        segments = []
        for lo, hi in cuts:
            if lo > start:
                segments.append((start, min(lo, r_outer)))
            start = max(start, hi)
        if start < r_outer:
            segments.append((start, r_outer))
        direction = np.exp(1j * th)
        for a, bnd in segments:
            length = bnd - a
            if length <= 0:
                continue
            npts = max(8, int(np.ceil(n_radial * length / r_outer)))
            s, wr = _gauss01(npts)
            r = a + length * s
            zs.append(origin + r * direction)
            ws_all.append(wt * length * wr * r)
    return np.concatenate(zs), np.concatenate(ws_all)


def interior_mesh(d: Domain, target_nodes: int = 5000, singular_centers: Sequence[complex] = (),
                  n_theta: int | None = None, n_radial: int | None = None) -> AreaQuadrature:
    """Area quadrature for the domain, polar-graded around ``singular_centers``.

    Each singular center is surrounded by a small disk meshed with geometric
    rings down to radius 1e-8; the rest of the domain is meshed by rays from
    the outer center. ``n_theta`` and ``n_radial`` override the resolution
    derived from ``target_nodes``. Parametric domains fall back to a masked
    tensor grid.
    """
    centers = tuple(complex(c) for c in singular_centers)
    if centers and not np.all(contains(d, np.array(centers))):
        raise ValueError("singular center outside the domain")

    if not d.is_circular:
        return _masked_grid(d, target_nodes, centers)

    radii = []
    for i, c in enumerate(centers):
        limit = float(d.clearance(c))
        for j, o in enumerate(centers):
            if j != i:
                limit = min(limit, 0.5 * abs(c - o))
        radii.append(0.5 * min(limit, 0.5 * d.outer.radius))

    if n_theta is None:
        n_theta = max(64, int(np.sqrt(2.0 * target_nodes)))
    if n_radial is None:
        n_radial = max(16, int(target_nodes / n_theta))

    # collar rings about each hole carry the steep reciprocal powers
    parts_z, parts_w = [], []
    collars = []
    for k, h in enumerate(d.holes):
        gap = d.outer.radius - abs(h.center - d.outer.center) - h.radius
        for l, o in enumerate(d.holes):
            if l != k:
                gap = min(gap, abs(h.center - o.center) - h.radius - o.radius)
        r_out = h.radius + 0.5 * gap
        for c, r in zip(centers, radii):
            r_out = min(r_out, abs(c - h.center) - r)
        collars.append((h.center, r_out))
        gz, gw = _ring(h.center, h.radius, r_out, n_theta, max(8, n_radial // 2))
        parts_z.append(gz)
        parts_w.append(gw)

    discs = collars + list(zip(centers, radii))
    z, w = _polar_region(d.outer.center, d.outer.radius, discs, n_theta, n_radial)
    parts_z.append(z)
    parts_w.append(w)
    for c, r in zip(centers, radii):
        gz, gw = _graded_disk(c, r, n_angle=max(48, n_theta // 2))
        parts_z.append(gz)
        parts_w.append(gw)
    return AreaQuadrature(np.concatenate(parts_z), np.concatenate(parts_w), centers)


def _ring(center, r_in, r_out, n_angle, n_radial):
    """Trapezoid-in-angle, Gauss-in-radius nodes for ``r_in < |z - center| < r_out``."""
    s, ws = _gauss01(n_radial)
    r = r_in + (r_out - r_in) * s
    wr = (r_out - r_in) * ws * r
    theta = 2 * np.pi * np.arange(n_angle) / n_angle
    z = center + np.outer(r, np.exp(1j * theta))
    w = np.outer(wr, np.full(n_angle, 2 * np.pi / n_angle))
    return z.ravel(), w.ravel()


def _masked_grid(d, target_nodes, centers):
    x0, x1, y0, y1 = d.bounding_box()
    area_box = (x1 - x0) * (y1 - y0)
    h = np.sqrt(area_box / (4 * target_nodes))
    xs = np.arange(x0 + h / 2, x1, h)
    ys = np.arange(y0 + h / 2, y1, h)
    X, Y = np.meshgrid(xs, ys)
    z = (X + 1j * Y).ravel()
    z = z[contains(d, z)]
    return AreaQuadrature(z, np.full(z.shape, h * h), centers)


def random_interior_points(d: Domain, count: int, rng: np.random.Generator, clearance: float = 0.0,
                           separation: float = 0.0):
    """Uniform samples in the domain by rejection from the bounding box."""
    x0, x1, y0, y1 = d.bounding_box()
    out = []
    while len(out) < count:
        z = rng.uniform(x0, x1, 4 * count) + 1j * rng.uniform(y0, y1, 4 * count)
        z = z[contains(d, z)]
        if clearance > 0:
            z = z[d.clearance(z) > clearance]
        for p in z:
            if len(out) == count:
                break
            if separation > 0 and any(abs(p - q) < separation for q in out):
                continue
            out.append(p)
    return np.array(out)
