"""Brute-force range enumeration and coloring verification.

Translates ``C + v`` containing a point ``p`` are the ``v`` in ``p - C``;
distinct ranges are the faces of the arrangement of these ``n`` regions.
Every bounded face touches a crossing of two region boundaries (translates
of one convex curve cannot nest), so crossings, each opened into its four
incident faces, plus one interior sample per region enumerate all ranges.
Cones work the same way with apexes playing the role of isolated faces.

Each face is recorded with a translate that realizes it; the realizing
translates are re-checked by direct membership before being returned.
"""

import numpy as np

from ._validation import check_points
from .body import diameter
from .cones import cone_contains, cone_offsets
from .exceptions import DegeneratePerturbation
from .polychromatic import ColoringReport, RangeHypergraph

_CHUNK = 1 << 20
_REL_TOL = 1e-10


def _offsets_translate(body, P, V):
    """``offs[t, p]``: boundary offset of ``P[p]`` w.r.t. ``C + V[t]`` (negative inside)."""
    out = np.empty((len(V), len(P)))
    step = max(1, _CHUNK // max(1, len(P)))
    for s in range(0, len(V), step):
        out[s : s + step] = body.boundary_offset(P[None, :, :] - V[s : s + step, None, :])
    return out


def _chord_translates(body, d):
    """Boundary points ``c`` of the body with ``c - d`` also on the boundary.

    Works in a frame with ``x`` along ``d``: the horizontal width of the body
    is concave in ``y`` and each solution of ``width(y) = |d|`` gives one
    chord.  Returns ``(c, edge_of_c, edge_of_c_minus_d)`` triples.
    """
    L = float(np.hypot(*d))
    u = d / L
    nrm = np.array([-u[1], u[0]])
    V = body.vertices
    x, y = V @ u, V @ nrm
    m = len(V)
    lo_i, hi_i = int(np.argmin(y)), int(np.argmax(y))
    up = np.array([(lo_i + s) % m for s in range((hi_i - lo_i) % m + 1)])
    down = np.array([(hi_i + s) % m for s in range((lo_i - hi_i) % m + 1)][::-1])
    ys = np.unique(y)
    w = np.interp(ys, y[up], x[up]) - np.interp(ys, y[down], x[down]) - L
    neg = w < 0
    out = []
    for a in np.nonzero(neg[:-1] != neg[1:])[0]:
        yy = ys[a] + w[a] / (w[a] - w[a + 1]) * (ys[a + 1] - ys[a])
        ku = min(max(int(np.searchsorted(y[up], yy, side="right")) - 1, 0), len(up) - 2)
        kd = min(max(int(np.searchsorted(y[down], yy, side="right")) - 1, 0), len(down) - 2)
        c = np.interp(yy, y[up], x[up]) * u + yy * nrm
        # up runs ccw, down runs cw
        out.append((c, int(up[ku]), int(down[kd + 1])))
    return out


def _face_tags(v, rows, signs, scale):
    """Translates near ``v`` that move two boundary points to the requested sides.

    ``rows`` holds the gradients (w.r.t. the translate) of the two boundary
    offsets and ``signs`` the wanted offset signs, one pair per row of
    ``signs``.  Returns ``v + Delta`` with ``|Delta| = scale``.
    """
    A = np.asarray(rows, dtype=float)
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) < 1e-12:
        return None
    S = np.atleast_2d(np.asarray(signs, dtype=float))
    inv = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]]) / det
    step = S @ inv.T
    step *= (np.asarray(scale, dtype=float).reshape(-1, 1) / np.hypot(step[:, 0], step[:, 1])[:, None])
    out = v + step
    return out if np.ndim(signs) == 2 else out[0]


_SIGNS = ((-1, -1), (-1, 1), (1, -1), (1, 1))


def _collect(n, masks, tags, family):
    if not len(masks):
        return RangeHypergraph(n, np.zeros((0, n), bool), [], family)
    M = np.asarray(masks, dtype=bool)
    packed = np.packbits(M, axis=1)
    _, first = np.unique(packed, axis=0, return_index=True)
    return RangeHypergraph(n, M[first], [tags[i] for i in first], family)


def enumerate_translate_ranges(points, body, family_id="translates"):
    """All distinct non-empty ``P`` intersect ``C + v``, each tagged with its ``v``."""
    P = check_points(points)
    n = len(P)
    if n == 0:
        return RangeHypergraph(0, None, None, family_id)
    diam = diameter(body)
    tol = _REL_TOL * diam
    normals = body.edge_normals
    cands, owners = [], []
    for i in range(n):
        for j in range(i + 1, n):
            d = P[i] - P[j]
            if np.hypot(*d) > diam + tol:
                continue
            for c, ei, ej in _chord_translates(body, d):
                cands.append(P[i] - c)
                owners.append((i, j, ei, ej))
    masks, tags = [], []
    centroid = body.centroid
    interior = P - centroid
    offs = _offsets_translate(body, P, interior)
    for i in range(n):
        masks.append(offs[i] <= 0)
        tags.append(interior[i])
    if not cands:
        return _collect(n, masks, tags, family_id)
    V = np.array(cands)
    offs = _offsets_translate(body, P, V)
    want, trial = [], []
    for t, (i, j, ei, ej) in enumerate(owners):
        row = offs[t]
        others = np.abs(np.delete(row, [i, j])) if n > 2 else np.array([diam])
        if others.size and others.min() < tol:
            k = int(np.delete(np.arange(n), [i, j])[np.argmin(others)])
            raise DegeneratePerturbation(
                f"point {k} lies on the boundary of the translate through points {i} and {j}"
            )
        base = row < 0
        base[[i, j]] = False
        # offset of p - v on edge e changes by -n_e . Delta
        rows = [-normals[ei], -normals[ej]]
        scale = 0.25 * min(others.min() if others.size else diam, 1e-3 * diam)
        face = _face_tags(V[t], rows, _SIGNS, scale)
        if face is None:
            raise DegeneratePerturbation(f"boundaries of points {i} and {j} meet tangentially")
        for (si, sj), tag in zip(_SIGNS, face):
            m = base.copy()
            m[i], m[j] = si < 0, sj < 0
            want.append(m)
            trial.append((tag, V[t], rows, (si, sj), scale))
    got = _realize(want, trial, lambda T: _offsets_translate(body, P, T) <= 0)
    return _collect(n, masks + want, tags + got, family_id)


def _realize(want, trial, member, shrink=8.0, rounds=6):
    """Shrink the perturbation of each face translate until membership matches."""
    tags = [t[0] for t in trial]
    todo = list(range(len(want)))
    for _ in range(rounds):
        if not todo:
            return tags
        T = np.array([tags[q] for q in todo])
        ok = (member(T) == np.array([want[q] for q in todo])).all(axis=1)
        todo = [q for q, good in zip(todo, ok) if not good]
        for q in todo:
            _, v, rows, signs, scale = trial[q]
            scale /= shrink
            trial[q] = (None, v, rows, signs, scale)
            tags[q] = _face_tags(v, rows, signs, scale)
    if todo:
        raise DegeneratePerturbation(f"{len(todo)} faces could not be realized by a perturbed translate")
    return tags


def _cone_member(cone, P, T):
    out = np.empty((len(T), len(P)), dtype=bool)
    step = max(1, _CHUNK // max(1, len(P)))
    for s in range(0, len(T), step):
        out[s : s + step] = cone_contains(cone, T[s : s + step, None, :], P[None, :, :])
    return out


def enumerate_cone_ranges(points, cone, family_id="cones"):
    """All distinct non-empty ``P`` intersect ``v + K``, each tagged with the apex ``v``."""
    P = check_points(points)
    n = len(P)
    if n == 0:
        return RangeHypergraph(0, None, None, family_id)
    scale0 = float(np.ptp(P, axis=0).max()) if n > 1 else 1.0
    scale0 = scale0 or 1.0
    tol = _REL_TOL * scale0
    cw, ccw = np.asarray(cone.ray_cw, dtype=float), np.asarray(cone.ray_ccw, dtype=float)
    # gradients of the two inside-offsets of p - v with respect to v
    g_cw = np.array([cw[1], -cw[0]])
    g_ccw = np.array([-ccw[1], ccw[0]])
    masks, tags = [], []
    bisector = np.asarray(cone.bisector, dtype=float)
    for i in range(n):
        diff = P - P[i]
        a, b = cone_offsets(cone, diff)
        m = (a >= 0) & (b >= 0)
        close = (np.minimum(a, b) > -tol) & (np.minimum(a, b) < tol)
        close[i] = False
        if close.any():
            raise DegeneratePerturbation(f"point {int(np.nonzero(close)[0][0])} lies on a boundary ray of the cone at point {i}")
        m[i] = True
        # back the apex off along the bisector by less than any outside point's slack
        slack = -np.minimum(a, b)[~m]
        shift = min(1e-7 * scale0, 0.25 * float(slack.min())) if len(slack) else 1e-7 * scale0
        tag = P[i] - shift * bisector
        if not (_cone_member(cone, P, tag[None, :])[0] == m).all():
            raise DegeneratePerturbation(f"points crowd the apex at point {i}")
        masks.append(m)
        tags.append(tag)
    B = np.column_stack([cw, -ccw])
    I, J = np.nonzero(~np.eye(n, dtype=bool))
    # p_i on the cw ray and p_j on the ccw ray of the same apex
    st = (P[I] - P[J]) @ np.linalg.inv(B).T
    ok = (st[:, 0] > 0) & (st[:, 1] > 0)
    I, J, S = I[ok], J[ok], st[ok, 0]
    if len(I):
        V = P[I] - S[:, None] * cw
        inside = np.empty((len(V), n))
        step = max(1, _CHUNK // n)
        for lo in range(0, len(V), step):
            a, b = cone_offsets(cone, P[None, :, :] - V[lo : lo + step, None, :])
            inside[lo : lo + step] = np.minimum(a, b)
        rows_ix = np.arange(len(V))
        others = np.abs(inside)
        others[rows_ix, I] = np.inf
        others[rows_ix, J] = np.inf
        gap = others.min(axis=1) if n > 2 else np.full(len(V), scale0)
        if (gap < tol).any():
            q = int(np.argmin(gap))
            raise DegeneratePerturbation(f"a third point lies on the cone through points {I[q]} and {J[q]}")
        base = inside > 0
        scale = 0.25 * np.minimum(gap, 1e-3 * scale0)
        # offsets are positive inside, so a wanted sign -1 (inside) raises them
        unit = _face_tags(np.zeros(2), [-g_cw, -g_ccw], _SIGNS, np.ones(4))
        want = np.repeat(base, 4, axis=0)
        sign_in = np.array([[si < 0, sj < 0] for si, sj in _SIGNS])
        r = np.arange(len(want))
        want[r, np.repeat(I, 4)] = np.tile(sign_in[:, 0], len(V))
        want[r, np.repeat(J, 4)] = np.tile(sign_in[:, 1], len(V))
        scale4 = np.repeat(scale, 4)
        centers = np.repeat(V, 4, axis=0)
        steps = np.tile(unit, (len(V), 1))
        todo = r
        for _ in range(6):
            got = _cone_member(cone, P, centers[todo] + scale4[todo, None] * steps[todo])
            todo = todo[(got != want[todo]).any(axis=1)]
            if not len(todo):
                break
            scale4[todo] /= 8.0
        if len(todo):
            raise DegeneratePerturbation(f"{len(todo)} cone faces could not be realized")
        T = centers + scale4[:, None] * steps
        masks = np.vstack([np.array(masks), want])
        tags = tags + list(T)
    return _collect(n, masks, tags, family_id)


def verify_coloring(h, coloring, m):
    """Every edge with at least ``m`` points that is monochromatic."""
    colors = [int(c) for c in getattr(coloring, "colors", coloring)]
    if len(colors) != h.n_points:
        raise ValueError("coloring length differs from the number of points")
    report = ColoringReport()
    for e, tag in zip(h.edges, h.tags):
        if len(e) >= m and len({colors[p] for p in e}) == 1:
            report.violations.append({"edge": sorted(e), "color": colors[next(iter(e))], "tag": _plain(tag)})
    return report


def _plain(tag):
    if tag is None:
        return None
    return [float(x) for x in np.asarray(tag, dtype=float).reshape(-1)]


def _unique_rows(M):
    if not len(M):
        return set()
    packed = np.unique(np.packbits(M, axis=1), axis=0)
    n = M.shape[1]
    rows = np.unpackbits(packed, axis=1)[:, :n].astype(bool)
    return {frozenset(int(p) for p in np.nonzero(r)[0]) for r in rows if r.any()}


def grid_translate_ranges(points, body, resolution=1e-3):
    """Ranges seen by translates on a square grid of step ``resolution * diam``."""
    P = check_points(points)
    diam = diameter(body)
    step = resolution * diam
    V = body.vertices
    lo = P.min(axis=0) - V.max(axis=0) - step
    hi = P.max(axis=0) - V.min(axis=0) + step
    xs = np.arange(lo[0], hi[0] + step, step)
    ys = np.arange(lo[1], hi[1] + step, step)
    found = set()
    rows = max(1, _CHUNK // max(1, len(P) * len(xs)))
    for s in range(0, len(ys), rows):
        gx, gy = np.meshgrid(xs, ys[s : s + rows])
        T = np.column_stack([gx.ravel(), gy.ravel()])
        found |= _unique_rows(_offsets_translate(body, P, T) <= 0)
    return found


def local_translate_ranges(points, body, centers, resolution=1e-6, half_width=4):
    """Ranges seen on small grids around the given translates."""
    P = check_points(points)
    step = resolution * diameter(body)
    offs = np.arange(-half_width, half_width + 1) * step
    gx, gy = np.meshgrid(offs, offs)
    local = np.column_stack([gx.ravel(), gy.ravel()])
    found = set()
    for c in centers:
        found |= _unique_rows(_offsets_translate(body, P, np.asarray(c) + local) <= 0)
    return found


def grid_cone_ranges(points, cone, resolution=1e-3, margin=1.0):
    """Ranges seen by cone apexes on a grid over the bounding box plus a margin."""
    P = check_points(points)
    span = float(np.ptp(P, axis=0).max()) if len(P) > 1 else 1.0
    span = span or 1.0
    step = resolution * span
    lo = P.min(axis=0) - margin * span
    hi = P.max(axis=0) + margin * span
    xs = np.arange(lo[0], hi[0] + step, step)
    ys = np.arange(lo[1], hi[1] + step, step)
    found = set()
    rows = max(1, _CHUNK // max(1, len(P) * len(xs)))
    for s in range(0, len(ys), rows):
        gx, gy = np.meshgrid(xs, ys[s : s + rows])
        T = np.column_stack([gx.ravel(), gy.ravel()])
        found |= _unique_rows(_cone_member(cone, P, T))
    return found


def local_cone_ranges(points, cone, centers, resolution=1e-6, half_width=4):
    """Ranges seen by apexes on small grids around the given apexes."""
    P = check_points(points)
    span = float(np.ptp(P, axis=0).max()) if len(P) > 1 else 1.0
    step = resolution * (span or 1.0)
    offs = np.arange(-half_width, half_width + 1) * step
    gx, gy = np.meshgrid(offs, offs)
    local = np.column_stack([gx.ravel(), gy.ravel()])
    found = set()
    for c in centers:
        found |= _unique_rows(_cone_member(cone, P, np.asarray(c) + local))
    return found
