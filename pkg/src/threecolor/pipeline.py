"""Grid-localized three-coloring for translates of a convex polygon, and for cones.

Per cell of side ``r``: dominate the cone multidigraph (k=3, l=2), color the
dominating sets with colors 1 and 2, split the remaining points by their
dominating class into ``P_0, P_1, P_2``, and for each ``P_i`` combine two
polychromatic colorings of the ranges whose boundary inside the cell runs
along the two other arcs.  Every cell result is verified against the
brute-force range oracle before it is returned.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from ._validation import check_points, make_rng, stream_seed
from .body import diameter, tri_partition, tri_partition_cones
from .cones import build_multidigraph
from .essw import PAPER, PRACTICAL, EsswParams, dominate, paper_constants, practical_params
from .exceptions import ClassificationAmbiguous, DegenerateAnchors, NoColoringFound
from .oracle import enumerate_cone_ranges, enumerate_translate_ranges, verify_coloring
from .polychromatic import Coloring, RangeHypergraph, polychromatic_color, union_combine

logger = logging.getLogger(__name__)

HEAVY = 5
POCKET = 13
_TOL = 1e-12


@dataclass
class PipelineConfig:
    """``m`` is the requested per-cell threshold; the run reports what it achieved."""

    m: int = 13
    mode: str = PRACTICAL
    essw: EsswParams = None
    r: object = "auto"
    seed: int = 0
    max_repairs: int = 5
    verify: bool = True

    def __post_init__(self):
        if int(self.m) < 2:
            raise ValueError("m must be at least 2")
        if self.mode not in (PAPER, PRACTICAL):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.r != "auto" and not float(self.r) > 0:
            raise ValueError("r must be positive or 'auto'")
        if self.essw is None:
            self.essw = paper_constants(3, 2) if self.mode == PAPER else practical_params()
        if (self.essw.k, self.essw.l) != (3, 2):
            raise ValueError("the pipeline needs domination parameters with k=3, l=2")


@dataclass(frozen=True)
class GridCell:
    coords: tuple
    indices: np.ndarray
    r: float

    @property
    def square(self):
        """``(x0, y0, x1, y1)`` of the closed cell."""
        cx, cy = self.coords
        return (cx * self.r, cy * self.r, (cx + 1) * self.r, (cy + 1) * self.r)


class RangeClass(str, Enum):
    OUTSIDE = "outside"
    C0 = "C0"
    C1_ARC1 = "C1_arc1"
    C1_ARC2 = "C1_arc2"
    C1_ARC3 = "C1_arc3"
    C2 = "C2"
    C3 = "C3"


_C1 = (RangeClass.C1_ARC1, RangeClass.C1_ARC2, RangeClass.C1_ARC3)


def _point_segment_distance(p, a, b):
    ab = b - a
    t = float(np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0))
    return float(np.hypot(*(p - (a + t * ab))))


def anchor_distances(body, tp):
    """The twelve distances that bound the cell diagonal, four per index ``i``.

    For each ``i``: ``tau_i^+`` and ``tau_{i+1}^-`` to the segment
    ``tau_i tau_{i+1}``, then ``|tau_i^- tau_i^--|`` and ``|tau_i^+ tau_i^++|``.
    """
    pts = [body.points_at(a) for a in tp.anchor_params]  # rows: --, -, tau, +, ++
    out = []
    for i in range(3):
        j = (i + 1) % 3
        a, b = pts[i][2], pts[j][2]
        out.append(_point_segment_distance(pts[i][3], a, b))
        out.append(_point_segment_distance(pts[j][1], a, b))
        out.append(float(np.hypot(*(pts[i][1] - pts[i][0]))))
        out.append(float(np.hypot(*(pts[i][3] - pts[i][4]))))
    return out


def choose_r(body, tp, safety=0.99):
    """Cell side with ``r * sqrt(2)`` below every anchor distance."""
    dists = anchor_distances(body, tp)
    if min(dists) <= _TOL * diameter(body):
        raise DegenerateAnchors("two anchor points coincide; use a larger epsilon")
    return safety * min(dists) / math.sqrt(2.0)


def m_prime(m, body, r):
    """``ceil(m * (diam / r + 2)^2)``, with exact rational arithmetic on the floats."""
    if m < 1 or not r > 0:
        raise ValueError("need m >= 1 and r > 0")
    q = Fraction(diameter(body)) / Fraction(r) + 2
    return math.ceil(m * q * q)


def _cell_index(x, r):
    # closed cells; a point on a shared edge goes to the smaller index
    return math.ceil(x / r) - 1


def grid_partition(points, r):
    """Cells of the axis-parallel grid with origin ``(0, 0)``, in row-major order."""
    P = check_points(points)
    if not r > 0:
        raise ValueError("r must be positive")
    groups = {}
    for idx, (x, y) in enumerate(P):
        groups.setdefault((_cell_index(x, r), _cell_index(y, r)), []).append(idx)
    return [GridCell(key, np.array(groups[key], dtype=int), float(r)) for key in sorted(groups, key=lambda c: (c[1], c[0]))]


def boundary_intervals(body, square, translate):
    """Parameter intervals of the translated boundary that lie inside ``square``."""
    x0, y0, x1, y1 = square
    A = body.vertices + np.asarray(translate, dtype=float)
    D = np.roll(A, -1, axis=0) - A
    t0 = np.zeros(len(A))
    t1 = np.ones(len(A))
    keep = np.ones(len(A), dtype=bool)
    for p, q in ((-D[:, 0], A[:, 0] - x0), (D[:, 0], x1 - A[:, 0]), (-D[:, 1], A[:, 1] - y0), (D[:, 1], y1 - A[:, 1])):
        par = np.abs(p) < 1e-300
        keep &= ~(par & (q < 0))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = q / p
        t0 = np.where(~par & (p < 0), np.maximum(t0, ratio), t0)
        t1 = np.where(~par & (p > 0), np.minimum(t1, ratio), t1)
    keep &= t0 <= t1
    cum, L = body.cumulative_edge_lengths, body.perimeter
    lengths = np.diff(cum)
    e = np.nonzero(keep)[0]
    return [((cum[k] + t0[k] * lengths[k]) / L, (cum[k] + t1[k] * lengths[k]) / L) for k in e]


def _rel(a, start):
    r = (a - start) % 1.0
    return r - 1.0 if r > 1.0 - _TOL else r


def _within(intervals, start, span):
    return all(_rel(a, start) + (b - a) <= span + _TOL for a, b in intervals)


def _meets(intervals, start, span):
    for a, b in intervals:
        ra = _rel(a, start)
        if ra <= span + _TOL or ra + (b - a) >= 1.0 - _TOL:
            return True
    return False


def _arc(t_from, t_to):
    """``(start, span)`` of the ccw parameter arc from ``t_from`` to ``t_to``."""
    return t_from % 1.0, (t_to - t_from) % 1.0


def check_property_b(tp, intervals):
    """Indices ``j`` whose half-extended arc meets the square but whose boundary escapes the full extension."""
    eps = tp.epsilon
    bad = []
    for j in range(3):
        if _meets(intervals, *tp.extended_arc(j, eps / 2)) and not _within(intervals, *tp.extended_arc(j, eps)):
            bad.append(j)
    return bad


def classify_intervals(tp, intervals, corners_inside, meets_square, arc=0):
    if corners_inside:
        return RangeClass.C0
    if not intervals:
        if not meets_square:
            return RangeClass.OUTSIDE
        raise ClassificationAmbiguous("translate lies strictly inside the cell")
    bad = check_property_b(tp, intervals)
    if bad:
        raise ClassificationAmbiguous(f"boundary inside the cell leaves the extended arc {bad[0] + 1}")
    t = tp.t
    eps = tp.epsilon
    i, j, k = arc % 3, (arc + 1) % 3, (arc + 2) % 3
    if _within(intervals, *_arc(t[i] + eps / 2, t[j] - eps / 2)):
        return _C1[i]
    if _meets(intervals, *_arc(t[j] - eps / 2, t[k])):
        return RangeClass.C2
    return RangeClass.C3


def classify_translate(body, tp, cell, translate, arc=0):
    """Class of translate ``C + translate`` with respect to the cell and arc ``arc``."""
    square = cell.square if isinstance(cell, GridCell) else tuple(cell)
    x0, y0, x1, y1 = square
    corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]) - np.asarray(translate, dtype=float)
    inside = bool(body.contains(corners).all())
    intervals = boundary_intervals(body, square, translate)
    meets = inside or bool(intervals) or bool(body.contains(np.array([(x0 + x1) / 2, (y0 + y1) / 2]) - translate))
    return classify_intervals(tp, intervals, inside, meets, arc)


@dataclass
class CellResult:
    coords: tuple
    indices: list
    colors: list
    m_effective: int
    s_size: int
    part_sizes: list
    n_ranges: int = 0
    attempts: int = 1
    repairs: int = 0
    violations: list = field(default_factory=list)

    def to_json(self):
        return {
            "cell": list(self.coords),
            "n": len(self.indices),
            "m_effective": self.m_effective,
            "s_size": self.s_size,
            "parts": self.part_sizes,
            "ranges": self.n_ranges,
            "attempts": self.attempts,
            "repairs": self.repairs,
            "violations": len(self.violations),
        }


def _dominate_and_split(points, cones, config, seed):
    D = build_multidigraph(points, cones)
    fam = dominate(D, config.essw, seed=seed)
    colors = np.zeros(len(points), dtype=int)
    for row in fam.sets:
        colors[sorted(row[0])] = 1
        colors[sorted(row[1])] = 2
    parts = [[] for _ in range(3)]
    for v, (i, _) in sorted(fam.assignment.items()):
        parts[i].append(v)
    s_size = len(fam.union())
    if config.mode == PAPER:
        m_eff = config.essw.f_bound + POCKET
    else:
        m_eff = s_size + POCKET
    return fam, colors, parts, s_size, m_eff


def _color_part(n_part, families):
    """Union of polychromatic colorings of the two hypergraphs on one part."""
    cs = []
    for edges in families:
        h = RangeHypergraph.from_edges(n_part, edges) if edges else RangeHypergraph(n_part)
        cs.append(polychromatic_color(h, 3))
    return union_combine(*cs, k=3).colors


def _solve_parts(colors, parts, families):
    for i, part in enumerate(parts):
        if part:
            colors[part] = _color_part(len(part), families[i])


def _repair(colors, parts, families, violations, local_of):
    """Add the traces of violating ranges to a family of the parts they hit."""
    changed = False
    for viol in violations:
        X = set(viol["edge"])
        for i, part in enumerate(parts):
            trace = sorted(local_of[i][p] for p in X if p in local_of[i])
            if len(trace) >= HEAVY:
                for fam in families[i]:
                    if trace not in fam:
                        fam.append(trace)
                        changed = True
                        break
    return changed


def _finish(points_h, colors, parts, families, config, m_eff, local_of):
    repairs = 0
    report = verify_coloring(points_h, colors, m_eff) if config.verify else None
    while report is not None and not report.ok and repairs < config.max_repairs:
        if not _repair(colors, parts, families, report.violations, local_of):
            break
        repairs += 1
        try:
            _solve_parts(colors, parts, families)
        except NoColoringFound:
            logger.warning("repair made a part uncolorable")
            break
        report = verify_coloring(points_h, colors, m_eff)
    return repairs, ([] if report is None else report.violations)


def color_cell(points, body, tp, cones, config, seed=0, coords=(0, 0), cell=None):
    """Three-color the points of one cell; see the module docstring."""
    P = check_points(points)
    n = len(P)
    if cell is None:
        lo = P.min(axis=0) if n else np.zeros(2)
        side = float(np.ptp(P, axis=0).max()) if n > 1 else 1.0
        square = (lo[0], lo[1], lo[0] + side, lo[1] + side)
    else:
        square = cell.square
    if n == 0:
        return CellResult(tuple(coords), [], [], POCKET, 0, [0, 0, 0])
    fam, colors, parts, s_size, m_eff = _dominate_and_split(P, cones, config, seed)
    h = enumerate_translate_ranges(P, body)
    local_of = [{p: q for q, p in enumerate(part)} for part in parts]
    families = [([list(range(len(part)))] if len(part) >= HEAVY else [], []) for part in parts]
    x0, y0, x1, y1 = square
    corner_pts = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    for mask, tag in zip(h.masks, h.tags):
        heavy = [i for i, part in enumerate(parts) if part and mask[part].sum() >= HEAVY]
        if not heavy:
            continue
        inside = bool(body.contains(corner_pts - tag).all())
        intervals = boundary_intervals(body, square, tag)
        for i in heavy:
            cls = classify_intervals(tp, intervals, inside, True, arc=i)
            if cls in (RangeClass.C2, RangeClass.C3):
                trace = [local_of[i][p] for p in parts[i] if mask[p]]
                families[i][0 if cls == RangeClass.C2 else 1].append(trace)
    _solve_parts(colors, parts, families)
    repairs, violations = _finish(h, colors, parts, families, config, m_eff, local_of)
    return CellResult(
        tuple(coords), [], [int(c) for c in colors], int(m_eff), s_size,
        [len(p) for p in parts], h.n_edges, fam.attempts, repairs, violations,
    )


@dataclass
class PipelineResult:
    coloring: Coloring
    achieved_m_prime: int
    r: float
    cells: list
    tri_partition: object = None

    @property
    def max_m_effective(self):
        return max((c.m_effective for c in self.cells), default=POCKET)

    @property
    def ok(self):
        return all(not c.violations for c in self.cells)

    def to_json(self):
        return {
            "colors": self.coloring.to_list(),
            "achieved_m_prime": self.achieved_m_prime,
            "m_effective": self.max_m_effective,
            "r": self.r,
            "cells": [c.to_json() for c in self.cells],
        }


def color_points(points, body, config=None, tp=None, max_halvings=6):
    """Color ``points`` so no translate of ``body`` with many points is monochromatic.

    Returns a :class:`PipelineResult`; ``achieved_m_prime`` is the largest
    ``m_prime(m_effective, body, r)`` over the cells.
    """
    config = PipelineConfig() if config is None else config
    P = check_points(points)
    tp = tri_partition(body) if tp is None else tp
    cones = tri_partition_cones(tp)
    r = choose_r(body, tp) if config.r == "auto" else float(config.r)
    for _ in range(max_halvings + 1):
        try:
            return _color_grid(P, body, tp, cones, config, r)
        except ClassificationAmbiguous as exc:
            logger.warning("cell side %.6g too large (%s); halving", r, exc)
            r /= 2.0
    raise ClassificationAmbiguous(f"no valid cell side found after {max_halvings} halvings")


def _color_grid(P, body, tp, cones, config, r):
    colors = np.ones(len(P), dtype=int)
    cells = []
    for cell in grid_partition(P, r):
        res = color_cell(P[cell.indices], body, tp, cones, config, stream_seed(config.seed, *cell.coords), cell.coords, cell)
        res.indices = [int(i) for i in cell.indices]
        colors[cell.indices] = res.colors
        cells.append(res)
    m_eff = max((c.m_effective for c in cells), default=POCKET)
    return PipelineResult(Coloring(colors, 3), m_prime(m_eff, body, r), r, cells, tp)


def cone_color_points(points, cones, config=None):
    """Color ``points`` so no translate of the three cones with many points is monochromatic."""
    config = PipelineConfig() if config is None else config
    P = check_points(points)
    n = len(P)
    if n == 0:
        return PipelineResult(Coloring(np.zeros(0, dtype=int), 3), POCKET, math.inf, [])
    fam, colors, parts, s_size, m_eff = _dominate_and_split(P, cones, config, stream_seed(config.seed, 0))
    local_of = [{p: q for q, p in enumerate(part)} for part in parts]
    families = []
    for i, part in enumerate(parts):
        fams = []
        for other in ((i + 1) % 3, (i + 2) % 3):
            if len(part) >= HEAVY:
                hh = enumerate_cone_ranges(P[part], cones[other])
                fams.append([sorted(e) for e in hh.edges if len(e) >= HEAVY])
            else:
                fams.append([])
        families.append(tuple(fams))
    _solve_parts(colors, parts, families)
    full = None
    if config.verify:
        hs = [enumerate_cone_ranges(P, K, family_id=f"cone{q}") for q, K in enumerate(cones)]
        full = RangeHypergraph(n, np.vstack([x.masks for x in hs]), sum((x.tags for x in hs), []), "cones")
    repairs, violations = _finish(full, colors, parts, families, config, m_eff, local_of) if full is not None else (0, [])
    res = CellResult((0, 0), list(range(n)), [int(c) for c in colors], int(m_eff), s_size,
                     [len(p) for p in parts], 0 if full is None else full.n_edges, fam.attempts, repairs, violations)
    return PipelineResult(Coloring(colors, 3), int(m_eff), math.inf, [res])


def _clip_cone_to_square(apex, cone, square):
    """Vertices of ``(apex + cone)`` intersected with the square, in Fractions."""
    F = Fraction
    x0, y0, x1, y1 = (F(v) for v in square)
    poly = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    ax, ay = F(apex[0]), F(apex[1])
    cw = (F(cone.ray_cw[0]), F(cone.ray_cw[1]))
    ccw = (F(cone.ray_ccw[0]), F(cone.ray_ccw[1]))
    # inside: left of the cw ray and right of the ccw ray
    halfplanes = [lambda x, y: cw[0] * (y - ay) - cw[1] * (x - ax), lambda x, y: (x - ax) * ccw[1] - (y - ay) * ccw[0]]
    for f in halfplanes:
        out = []
        for k in range(len(poly)):
            p, q = poly[k], poly[(k + 1) % len(poly)]
            fp, fq = f(*p), f(*q)
            if fp >= 0:
                out.append(p)
            if (fp >= 0) != (fq >= 0):
                s = fp / (fp - fq)
                out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
        poly = out
        if not poly:
            break
    return poly


def _inside_exact(vertices, translate, pts):
    F = Fraction
    W = [(F(x) + F(translate[0]), F(y) + F(translate[1])) for x, y in vertices]
    m = len(W)
    for px, py in pts:
        for k in range(m):
            (ax, ay), (bx, by) = W[k], W[(k + 1) % m]
            if (bx - ax) * (py - ay) - (by - ay) * (px - ax) < 0:
                return False
    return True


def _sample_square_at(rng, point, r):
    u = rng.random(2)
    x0, y0 = point[0] - u[0] * r, point[1] - u[1] * r
    return (x0, y0, x0 + r, y0 + r)


def sample_property_a(body, tp, cones, r, n_samples, seed=0, max_tries=200):
    """Failures of the cone-in-body property on sampled (translate, square, apex) triples.

    Each sample puts a square of side ``r`` on a boundary point of the
    shrunk arc ``i``, keeps it only if the boundary inside the square stays
    within that arc, and checks ``(apex + K_i) & Q`` lies in the body exactly.
    Returns ``(n_checked, failures)``.
    """
    rng = make_rng(seed, 1)
    eps = tp.epsilon
    failures, checked = [], 0
    for s in range(n_samples):
        i = s % 3
        start, span = _arc(tp.t[i] + eps / 2, tp.t[(i + 1) % 3] - eps / 2)
        for _ in range(max_tries):
            t = start + span * rng.random()
            Q = _sample_square_at(rng, body.point_at(t), r)
            if not _within(boundary_intervals(body, Q, (0.0, 0.0)), start, span):
                continue
            apex = None
            for _ in range(max_tries):
                cand = np.array([Q[0] + r * rng.random(), Q[1] + r * rng.random()])
                if body.contains(cand):
                    apex = cand
                    break
            if apex is None:
                continue
            checked += 1
            poly = _clip_cone_to_square(apex, cones[i], Q)
            if not _inside_exact(body.vertices, (0.0, 0.0), poly):
                failures.append({"arc": i, "square": Q, "apex": apex.tolist()})
            break
    return checked, failures


def sample_property_b(body, tp, r, n_samples, seed=0):
    """Failures of the arc-localisation property on sampled squares.

    Returns ``(n_checked, failures)``.
    """
    rng = make_rng(seed, 2)
    eps = tp.epsilon
    failures = []
    for s in range(n_samples):
        j = s % 3
        start, span = tp.extended_arc(j, eps / 2)
        t = start + span * rng.random()
        Q = _sample_square_at(rng, body.point_at(t), r)
        intervals = boundary_intervals(body, Q, (0.0, 0.0))
        if not _within(intervals, *tp.extended_arc(j, eps)):
            failures.append({"arc": j, "square": Q})
    return n_samples, failures
