"""Convex polygonal bodies, their Gauss map and boundary tri-partitions.

The boundary of a body is parametrised by normalised arc length
``t in [0, 1)`` starting at vertex 0 and running counterclockwise.  Angles
are radians in ``[0, 2*pi)``; arc lengths on the unit circle are computed
from an unwrapped turning function, never by reducing negative numbers
modulo ``2*pi``.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    CollinearVertices,
    DegenerateCone,
    IsParallelogram,
    NotConvex,
    TooFewSegments,
    WrongOrientation,
)

TWO_PI = 2.0 * math.pi
# relative tolerance used to decide that a parameter sits on a vertex
_VERTEX_TOL = 1e-12
# tri-partitions with less angular slack than this are rejected
MIN_SLACK = 1e-9


def _wrap(angle):
    a = math.fmod(angle, TWO_PI)
    if a < 0:
        a += TWO_PI
    # fmod can return 2*pi - tiny for -tiny inputs; also normalise -0.0
    return 0.0 if a >= TWO_PI else a + 0.0


def _ccw_gap(a, b):
    """Counterclockwise angle from direction ``a`` to direction ``b`` in [0, 2pi)."""
    return _wrap(b - a)


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def unit(angle):
    return np.array([math.cos(angle), math.sin(angle)])


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Strictly convex polygon with counterclockwise vertices.

    Build instances with :func:`make_polygon` or :func:`make_disk_approx`;
    the constructor assumes the vertices were already validated.
    """

    vertices: np.ndarray
    perimeter: float = field(init=False)
    cumulative_edge_lengths: np.ndarray = field(init=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        object.__setattr__(self, "perimeter", float(cum[-1]))
        object.__setattr__(self, "cumulative_edge_lengths", cum)
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_lengths", lengths)
        # outward normal of a ccw edge (dx, dy) is (dy, -dx)
        normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1) / lengths[:, None]
        object.__setattr__(self, "_normals", normals)
        object.__setattr__(self, "_offsets", np.einsum("ij,ij->i", normals, v))
        phi = np.array([_wrap(math.atan2(n[1], n[0])) for n in normals])
        object.__setattr__(self, "_normal_angles", phi)
        # unwrapped turning angle of each edge normal
        theta = np.empty(len(v))
        theta[0] = phi[0]
        for e in range(1, len(v)):
            theta[e] = theta[e - 1] + _ccw_gap(phi[e - 1], phi[e])
        object.__setattr__(self, "_theta", theta)
        centroid = v.mean(axis=0)
        object.__setattr__(self, "_centroid", centroid)
        ang = np.arctan2(v[:, 1] - centroid[1], v[:, 0] - centroid[0])
        start = int(np.argmin(ang))
        order = np.roll(np.arange(len(v)), -start)
        object.__setattr__(self, "_sector_order", order)
        object.__setattr__(self, "_sector_angles", ang[order])

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def edge_normals(self):
        return self._normals

    @property
    def normal_angles(self):
        return self._normal_angles

    @property
    def centroid(self):
        return self._centroid

    def vertex_param(self, i):
        return float(self.cumulative_edge_lengths[i % self.n_vertices] / self.perimeter)

    def edge_midpoint_param(self, e):
        e %= self.n_vertices
        cum = self.cumulative_edge_lengths
        return float(0.5 * (cum[e] + cum[e + 1]) / self.perimeter)

    def locate(self, t):
        """Return ``(edge, vertex)`` for parameter ``t``.

        ``vertex`` is the vertex index when ``t`` sits on a vertex, else None;
        ``edge`` is the edge whose half-open parameter range contains ``t``.
        """
        t = float(t) % 1.0
        s = t * self.perimeter
        cum = self.cumulative_edge_lengths
        e = int(np.searchsorted(cum, s, side="right")) - 1
        e = min(max(e, 0), self.n_vertices - 1)
        tol = _VERTEX_TOL * self.perimeter
        if abs(s - cum[e]) <= tol:
            return e, e
        if abs(cum[e + 1] - s) <= tol:
            nxt = (e + 1) % self.n_vertices
            return nxt, nxt
        return e, None

    def point_at(self, t):
        """Boundary point ``gamma(t)``."""
        t = float(t) % 1.0
        e, vtx = self.locate(t)
        if vtx is not None:
            return self.vertices[vtx].copy()
        s = t * self.perimeter - self.cumulative_edge_lengths[e]
        return self.vertices[e] + self._edges[e] * (s / self._lengths[e])

    def points_at(self, ts):
        return np.array([self.point_at(t) for t in np.atleast_1d(ts)])

    def _turn_minus(self, t):
        e, vtx = self.locate(t)
        if vtx is None:
            return self._theta[e]
        if vtx == 0:
            return self._theta[-1] - TWO_PI
        return self._theta[vtx - 1]

    def _turn_plus(self, t):
        e, vtx = self.locate(t)
        if vtx is None:
            return self._theta[e]
        return self._theta[vtx]

    def contains(self, points, closed=True, tol=0.0):
        """Vectorised point-in-body test for an array of shape ``(..., 2)``.

        Uses an angular sector search around the centroid, so the cost per
        point is logarithmic in the number of vertices.
        """
        return self.boundary_offset(points) <= tol if closed else self.boundary_offset(points) < -tol

    def boundary_offset(self, points):
        """Signed distance-like offset to the relevant edge line (<0 inside)."""
        p = np.asarray(points, dtype=float)
        c = self._centroid
        ang = np.arctan2(p[..., 1] - c[1], p[..., 0] - c[0])
        k = np.searchsorted(self._sector_angles, ang, side="right") - 1
        k %= self.n_vertices
        e = self._sector_order[k]
        return (
            self._normals[e, 0] * p[..., 0]
            + self._normals[e, 1] * p[..., 1]
            - self._offsets[e]
        )

    def edge_at_point(self, q):
        """Index of the edge whose supporting line is closest to boundary point ``q``."""
        q = np.asarray(q, dtype=float)
        d = np.abs(self._normals @ q - self._offsets)
        # restrict to edges whose segment actually reaches q
        a = self.vertices
        b = np.roll(a, -1, axis=0)
        proj = np.einsum("ij,ij->i", q - a, b - a) / (self._lengths**2)
        d = d + np.where((proj < -1e-9) | (proj > 1 + 1e-9), np.inf, 0.0)
        return int(np.argmin(d))

    def scaled(self, factor):
        return ConvexBody(self.vertices * float(factor))

    def to_json(self):
        return {"type": "polygon", "vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class GaussRange:
    """Arc of outer normals at a boundary point, from ``minus`` ccw to ``plus``."""

    minus: float
    plus: float

    @property
    def length(self):
        return _ccw_gap(self.minus, self.plus)

    @property
    def mid(self):
        return _wrap(self.minus + 0.5 * self.length)


@dataclass(frozen=True)
class Cone:
    """Closed cone with apex at the origin, spanned ccw from ``ray_cw`` to ``ray_ccw``."""

    ray_cw: tuple
    ray_ccw: tuple

    def __post_init__(self):
        cw = np.asarray(self.ray_cw, dtype=float)
        ccw = np.asarray(self.ray_ccw, dtype=float)
        cw = cw / np.hypot(*cw)
        ccw = ccw / np.hypot(*ccw)
        object.__setattr__(self, "ray_cw", (float(cw[0]), float(cw[1])))
        object.__setattr__(self, "ray_ccw", (float(ccw[0]), float(ccw[1])))
        if not 0.0 < self.angle < math.pi:
            raise DegenerateCone(f"cone angle {self.angle} not in (0, pi)")

    @property
    def angle(self):
        a = math.atan2(self.ray_cw[1], self.ray_cw[0])
        b = math.atan2(self.ray_ccw[1], self.ray_ccw[0])
        return _ccw_gap(a, b)

    @property
    def bisector(self):
        v = np.array(self.ray_cw) + np.array(self.ray_ccw)
        return v / np.hypot(*v)

    def __neg__(self):
        return Cone((-self.ray_cw[0], -self.ray_cw[1]), (-self.ray_ccw[0], -self.ray_ccw[1]))

    @classmethod
    def from_angles(cls, cw_angle, ccw_angle):
        return cls(tuple(unit(cw_angle)), tuple(unit(ccw_angle)))


@dataclass(frozen=True)
class TriPartition:
    body: ConvexBody
    t: tuple
    epsilon: float
    tangents: tuple
    slack: float

    @property
    def t1(self):
        return self.t[0]

    @property
    def t2(self):
        return self.t[1]

    @property
    def t3(self):
        return self.t[2]

    @property
    def anchor_params(self):
        """Per index ``i``: parameters of tau--, tau-, tau, tau+, tau++."""
        eps = self.epsilon
        return tuple(
            tuple((ti + d) % 1.0 for d in (-eps, -eps / 2, 0.0, eps / 2, eps))
            for ti in self.t
        )

    def extended_arc(self, i, margin=None):
        """``(start, span)`` of the arc from ``t_i - margin`` to ``t_{i+1} + margin``."""
        margin = self.epsilon if margin is None else margin
        a, b = self.t[i % 3], self.t[(i + 1) % 3]
        span = (b - a) % 1.0 + 2 * margin
        return (a - margin) % 1.0, span

    def extended_arc_lengths(self):
        return tuple(arc_length_by_span(self.body, *self.extended_arc(i)) for i in range(3))


def make_polygon(vertices):
    """Validate ``vertices`` and return a :class:`ConvexBody`.

    Clockwise input is reversed with a :class:`UserWarning`.
    """
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise NotConvex("a polygon needs at least 3 two-dimensional vertices")
    if not np.all(np.isfinite(v)):
        raise NotConvex("vertices must be finite")
    edges = np.roll(v, -1, axis=0) - v
    cr = _cross(edges, np.roll(edges, -1, axis=0))
    scale = float(np.max(np.abs(edges))) ** 2
    if np.any(np.abs(cr) <= 1e-12 * scale):
        raise CollinearVertices("three consecutive vertices are collinear or repeated")
    if np.all(cr < 0):
        warnings.warn("vertices were clockwise; reversed to counterclockwise", UserWarning)
        v = v[::-1].copy()
        edges = np.roll(v, -1, axis=0) - v
    elif not np.all(cr > 0):
        raise NotConvex("polygon is not convex")
    # a star polygon turns more than once around
    ang = np.arctan2(edges[:, 1], edges[:, 0])
    turning = sum(_ccw_gap(ang[i], ang[(i + 1) % len(v)]) for i in range(len(v)))
    if abs(turning - TWO_PI) > 1e-6:
        raise NotConvex("polygon is self-intersecting")
    return ConvexBody(v)


def make_disk_approx(radius, n_segments):
    """Regular ``n_segments``-gon inscribed in a circle, vertex 0 at angle 0."""
    if n_segments < 8:
        raise TooFewSegments(f"need at least 8 segments, got {n_segments}")
    if radius <= 0:
        raise ValueError("radius must be positive")
    ang = TWO_PI * np.arange(n_segments) / n_segments
    return ConvexBody(np.stack([radius * np.cos(ang), radius * np.sin(ang)], axis=1))


def body_from_json(obj):
    kind = obj.get("type")
    if kind == "polygon":
        return make_polygon(obj["vertices"])
    if kind == "disk":
        return make_disk_approx(float(obj["radius"]), int(obj["segments"]))
    raise ValueError(f"unknown body type {kind!r}")


def gauss_range(body, t):
    e, vtx = body.locate(t)
    phi = body.normal_angles
    if vtx is None:
        return GaussRange(float(phi[e]), float(phi[e]))
    return GaussRange(float(phi[vtx - 1]), float(phi[vtx]))


def arc_length_by_span(body, t_a, span):
    """Gauss length of the boundary piece starting at ``t_a`` of parameter length ``span``."""
    if span >= 1.0:
        return TWO_PI
    t_a %= 1.0
    t_b = (t_a + span) % 1.0
    wraps = t_a + span >= 1.0
    # a parameter that rounds onto vertex 0 from below counts as wrapped
    if not wraps and t_b < t_a:
        wraps = True
    length = body._turn_plus(t_b) - body._turn_minus(t_a) + (TWO_PI if wraps else 0.0)
    return min(max(length, 0.0), TWO_PI)


def arc_gauss_length(body, t_a, t_b):
    """Length of the Gauss image of the ccw boundary piece from ``t_a`` to ``t_b``.

    ``t_a == t_b`` denotes the whole boundary and returns ``2*pi``.
    """
    t_a %= 1.0
    t_b %= 1.0
    if t_a == t_b:
        return TWO_PI
    return arc_length_by_span(body, t_a, (t_b - t_a) % 1.0)


def supporting_line(body, t):
    """``(point, normal)`` of the tangent at ``gamma(t)``; the normal bisects the Gauss range."""
    g = gauss_range(body, t)
    return body.point_at(t), unit(g.mid)


def diameter(body):
    v = body.vertices
    d = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((d**2).sum(-1)).max())


def is_parallelogram(body, tol=1e-12):
    if body.n_vertices != 4:
        return False
    e = body._edges
    scale = float(np.max(np.abs(e))) ** 2
    return abs(_cross(e[0], e[2])) <= tol * scale and abs(_cross(e[1], e[3])) <= tol * scale


_TARGET_NORMALS = (math.pi / 2, math.pi / 2 + TWO_PI / 3, math.pi / 2 + 2 * TWO_PI / 3)


def _target_deviation(mids):
    best = math.inf
    for shift in range(3):
        dev = 0.0
        for i in range(3):
            d = abs(_wrap(mids[(i + shift) % 3] - _TARGET_NORMALS[i]))
            dev += min(d, TWO_PI - d)
        best = min(best, dev)
    return best


def tri_partition(body):
    """Pick ``t1 < t2 < t3`` and ``epsilon`` whose extended Gauss arcs stay below pi.

    Candidates are all vertices and edge midpoints, which realise every
    distinct Gauss range of a polygon.  The triple maximising the minimal
    slack ``pi - arc`` wins; ties prefer normals closest to an upright
    equilateral triangle so disk approximations give the classic choice.
    """
    if is_parallelogram(body):
        raise IsParallelogram("parallelogram bodies cannot be tri-partitioned")
    n = body.n_vertices
    params, minus, plus = [], [], []
    for i in range(n):
        for t in (body.vertex_param(i), body.edge_midpoint_param(i)):
            params.append(t)
            minus.append(body._turn_minus(t))
            plus.append(body._turn_plus(t))
    params = np.array(params)
    minus = np.array(minus)
    plus = np.array(plus)
    m = len(params)
    g = plus + minus
    best_slack = -math.inf
    found = []
    idx = np.arange(m)
    for a in range(m - 2):
        bs = idx[a + 1 : m - 1]
        # best c for (a, b) balances arc(b, c) against arc(c, a)
        target = plus[a] + TWO_PI + minus[bs]
        cstar = np.searchsorted(g, target)
        for cand in (cstar - 1, cstar):
            c = np.clip(cand, bs + 1, m - 1)
            arc_ab = plus[bs] - minus[a]
            arc_bc = plus[c] - minus[bs]
            arc_ca = plus[a] + TWO_PI - minus[c]
            slack = math.pi - np.maximum(np.maximum(arc_ab, arc_bc), arc_ca)
            top = slack.max()
            if top > best_slack + 1e-12:
                best_slack = top
                found = []
            if top >= best_slack - 1e-12:
                for j in np.nonzero(slack >= best_slack - 1e-12)[0]:
                    found.append((a, int(bs[j]), int(c[j])))
    if best_slack < MIN_SLACK:
        raise IsParallelogram(f"no tri-partition with positive slack (best {best_slack:.3g})")

    def mids(tr):
        return [gauss_range(body, params[i]).mid for i in tr]

    found = sorted(set(found), key=lambda tr: (_target_deviation(mids(tr)), tr))
    a, b, c = found[0]
    ts = (float(params[a]), float(params[b]), float(params[c]))
    eps = _max_epsilon(body, ts) / 2.0
    tangents = tuple(supporting_line(body, t) for t in ts)
    tp = TriPartition(body, ts, eps, tangents, float(best_slack))
    for arc in tp.extended_arc_lengths():
        if not arc < math.pi - MIN_SLACK:
            raise IsParallelogram("extended arcs could not be kept below pi")
    return tp


def _max_epsilon(body, ts, iters=60):
    def ok(eps):
        for i in range(3):
            a, b = ts[i], ts[(i + 1) % 3]
            span = (b - a) % 1.0 + 2 * eps
            if not arc_length_by_span(body, (a - eps) % 1.0, span) < math.pi - MIN_SLACK:
                return False
        return True

    lo, hi = 0.0, 0.5
    if ok(hi):
        return hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def cones_from_normals(angles):
    """Tri-partition cones for tangent lines with outer normal ``angles`` (ccw order).

    ``K_{i,i+1}`` sits at the corner of the circumscribed triangle where
    tangent ``i`` meets tangent ``i+1``.
    """
    if len(angles) != 3:
        raise ValueError("need exactly three tangent normals")
    cones = []
    for i in range(3):
        a, b = angles[i], angles[(i + 1) % 3]
        gap = _ccw_gap(a, b)
        if not 1e-12 < gap < math.pi - 1e-12:
            raise DegenerateCone(f"tangents {i} and {(i + 1) % 3} do not bound a corner")
        cones.append(Cone.from_angles(b + math.pi / 2, a - math.pi / 2))
    total = sum(_ccw_gap(angles[i], angles[(i + 1) % 3]) for i in range(3))
    if abs(total - TWO_PI) > 1e-9:
        raise DegenerateCone("tangent normals are not in counterclockwise order")
    return tuple(cones)


def tri_partition_cones(tp):
    return cones_from_normals([math.atan2(n[1], n[0]) for _, n in tp.tangents])


def equilateral_cones(rotation=0.0):
    return cones_from_normals([math.pi / 2 + rotation + k * TWO_PI / 3 for k in range(3)])
