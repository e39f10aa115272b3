import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from threecolor.body import (
    Cone,
    arc_gauss_length,
    body_from_json,
    cones_from_normals,
    diameter,
    equilateral_cones,
    gauss_range,
    make_disk_approx,
    make_polygon,
    supporting_line,
    tri_partition,
    tri_partition_cones,
)
from threecolor.exceptions import CollinearVertices, DegenerateCone, IsParallelogram, NotConvex, TooFewSegments

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
TWO_PI = 2 * math.pi


def _ang_close(a, b, tol=1e-9):
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d) <= tol


def _naive_vertex_arcs(vertices):
    # exterior angle at each vertex from raw edge directions
    v = np.asarray(vertices, float)
    e = np.roll(v, -1, axis=0) - v
    ang = np.arctan2(e[:, 1], e[:, 0])
    return [(ang[i] - ang[i - 1]) % TWO_PI for i in range(len(v))]


def test_triangle_perimeter():
    b = make_polygon([(0, 0), (1, 0), (0, 1)])
    assert b.perimeter == pytest.approx(2 + math.sqrt(2), abs=1e-12)


def test_rectangle_builds_but_is_parallelogram():
    b = make_polygon([(0, 0), (2, 0), (2, 1), (0, 1)])
    assert b.n_vertices == 4
    with pytest.raises(IsParallelogram):
        tri_partition(b)


def test_collinear_rejected():
    with pytest.raises(CollinearVertices):
        make_polygon([(0, 0), (1, 0), (2, 0), (0, 1)])


def test_nonconvex_rejected():
    with pytest.raises(NotConvex):
        make_polygon([(0, 0), (2, 0), (1, 0.2), (1, 2)])
    with pytest.raises(NotConvex):
        make_polygon([(0, 0), (1, 0)])


def test_clockwise_reversed_with_warning():
    with pytest.warns(UserWarning):
        b = make_polygon(SQUARE[::-1])
    assert b.perimeter == pytest.approx(4.0)


def test_disk_too_few_segments():
    with pytest.raises(TooFewSegments):
        make_disk_approx(1, 4)


def test_octagon_perimeter():
    b = make_disk_approx(2, 8)
    # 2 n R sin(pi / n) with R = 2
    assert b.perimeter == pytest.approx(32 * math.sin(math.pi / 8), rel=1e-12)
    assert make_disk_approx(1, 8).perimeter == pytest.approx(16 * math.sin(math.pi / 8), rel=1e-12)
    assert np.allclose(b.vertices[0], (2, 0))


def test_disk_vertex_arcs():
    b = make_disk_approx(1, 360)
    for i in (0, 17, 359):
        assert gauss_range(b, b.vertex_param(i)).length == pytest.approx(TWO_PI / 360, abs=1e-12)


def test_square_gauss_ranges():
    b = make_polygon(SQUARE)
    g = gauss_range(b, 0.125)
    assert g.minus == g.plus
    assert _ang_close(g.minus, -math.pi / 2)
    g = gauss_range(b, 0.25)
    assert _ang_close(g.minus, -math.pi / 2) and _ang_close(g.plus, 0.0)


def test_vertex_gauss_ranges_match_edge_directions():
    verts = [(0, 0), (3, 0.5), (4, 2), (1, 3), (-1, 1.5)]
    b = make_polygon(verts)
    for i, arc in enumerate(_naive_vertex_arcs(verts)):
        assert gauss_range(b, b.vertex_param(i)).length == pytest.approx(arc, abs=1e-12)


def test_arc_gauss_length_examples():
    b = make_polygon(SQUARE)
    assert arc_gauss_length(b, 0.3, 0.3) == pytest.approx(TWO_PI)
    assert arc_gauss_length(b, 0.05, 0.2) == pytest.approx(0.0, abs=1e-12)
    # corner to corner along one edge: both corner arcs count
    assert arc_gauss_length(b, 0.25, 0.5) == pytest.approx(math.pi, abs=1e-12)
    d = make_disk_approx(1, 360)
    assert abs(arc_gauss_length(d, 0.0, 0.5) - math.pi) <= TWO_PI / 360 + 1e-9


@given(st.floats(0, 0.999), st.floats(0, 0.999), st.floats(0, 0.999))
def test_arc_subadditive(a, b, c):
    body = make_polygon([(0, 0), (3, 0.5), (4, 2), (1, 3), (-1, 1.5)])
    # a -> b -> c ccw with a, b, c distinct and ordered
    if len({a, b, c}) < 3:
        return
    ab, bc = (b - a) % 1.0, (c - b) % 1.0
    if ab + bc >= 1.0:
        return
    assert arc_gauss_length(body, a, b) + arc_gauss_length(body, b, c) >= arc_gauss_length(body, a, c) - 1e-12


def test_gauss_monotone():
    b = make_polygon([(0, 0), (3, 0.5), (4, 2), (1, 3), (-1, 1.5)])
    ts = np.linspace(0, 0.999, 400)
    plus = np.unwrap([gauss_range(b, t).plus for t in ts])
    assert np.all(np.diff(plus) >= -1e-12)


def test_supporting_line_examples():
    b = make_polygon(SQUARE)
    p, n = supporting_line(b, 0.125)
    assert np.allclose(p, (0.5, 0)) and np.allclose(n, (0, -1))
    p, n = supporting_line(b, 0.25)
    assert np.allclose(p, (1, 0)) and np.allclose(n, (math.sqrt(0.5), -math.sqrt(0.5)))
    d = make_disk_approx(1, 360)
    _, n = supporting_line(d, 0.0)
    assert abs(math.atan2(n[1], n[0])) <= TWO_PI / 720 + 1e-12


@given(st.floats(0, 0.999))
def test_body_behind_supporting_line(t):
    b = make_polygon([(0, 0), (3, 0.5), (4, 2), (1, 3), (-1, 1.5)])
    p, n = supporting_line(b, t)
    assert np.all((b.vertices - p) @ n <= 1e-9)


def test_diameter():
    assert diameter(make_polygon(SQUARE)) == pytest.approx(math.sqrt(2))
    assert diameter(make_disk_approx(1, 360)) == pytest.approx(2, abs=1e-4)


def test_tri_partition_disk():
    b = make_disk_approx(1, 360)
    tp = tri_partition(b)
    normals = sorted(math.atan2(n[1], n[0]) % TWO_PI for _, n in tp.tangents)
    targets = sorted(x % TWO_PI for x in (math.pi / 2, math.pi / 2 + TWO_PI / 3, math.pi / 2 + 2 * TWO_PI / 3))
    for got, want in zip(normals, targets):
        assert _ang_close(got, want, TWO_PI / 360)
    assert tp.t1 < tp.t2 < tp.t3 and tp.epsilon > 0
    for arc in tp.extended_arc_lengths():
        assert arc < math.pi - 1e-9


def test_tri_partition_square_rejected():
    with pytest.raises(IsParallelogram):
        tri_partition(make_polygon(SQUARE))


def test_tri_partition_triangle_arcs_below_pi():
    b = make_polygon([(0, 0), (1, 0), (0, 1)])
    tp = tri_partition(b)
    for i in range(3):
        a, c = tp.t[i], tp.t[(i + 1) % 3]
        assert arc_gauss_length(b, a, c) < math.pi
    for arc in tp.extended_arc_lengths():
        assert arc < math.pi - 1e-9


def test_triangle_vertices_do_not_work():
    # arcs between two vertices include both vertex fans, so they exceed pi
    b = make_polygon([(0, 0), (1, 0), (0, 1)])
    ts = [b.vertex_param(i) for i in range(3)]
    assert all(arc_gauss_length(b, ts[i], ts[(i + 1) % 3]) > math.pi for i in range(3))


def test_tri_partition_anchors():
    tp = tri_partition(make_disk_approx(1, 180))
    for ti, anchors in zip(tp.t, tp.anchor_params):
        mm, m, t, p, pp = anchors
        assert t == pytest.approx(ti)
        assert (ti - mm) % 1.0 == pytest.approx(tp.epsilon)
        assert (pp - ti) % 1.0 == pytest.approx(tp.epsilon)
        assert 0 < (ti - m) % 1.0 < tp.epsilon and 0 < (p - ti) % 1.0 < tp.epsilon


def test_equilateral_cones_angles():
    for K in tri_partition_cones(tri_partition(make_disk_approx(1, 360))):
        assert K.angle == pytest.approx(math.pi / 3, abs=TWO_PI / 360 * 2)
    for K in equilateral_cones():
        assert K.angle == pytest.approx(math.pi / 3)


def test_cones_30_60_90():
    deg = math.pi / 180
    cones = cones_from_normals([0.0, 150 * deg, 270 * deg])
    assert sorted(round(K.angle / deg, 9) for K in cones) == [30, 60, 90]


def test_parallel_tangents_degenerate():
    with pytest.raises(DegenerateCone):
        cones_from_normals([0.0, math.pi, 1.5 * math.pi])


def test_six_cones_alternate():
    # K1, -K3, K2, -K1, K3, -K2 tile the circle with no overlap
    cones = equilateral_cones(0.3)
    six = [cones[0], -cones[2], cones[1], -cones[0], cones[2], -cones[1]]
    total = sum(K.angle for K in six)
    assert total == pytest.approx(TWO_PI)
    rays = [math.atan2(K.ray_cw[1], K.ray_cw[0]) for K in six]
    ends = [math.atan2(K.ray_ccw[1], K.ray_ccw[0]) for K in six]
    for i in range(6):
        assert _ang_close(ends[i], rays[(i + 1) % 6]) or _ang_close(ends[i - 1], rays[i])


def test_degenerate_cone():
    with pytest.raises(DegenerateCone):
        Cone((1, 0), (-1, 0))


def test_body_json():
    b = body_from_json({"type": "disk", "radius": 1, "segments": 12})
    assert b.n_vertices == 12
    b2 = body_from_json(b.to_json())
    assert np.allclose(b2.vertices, b.vertices)
    with pytest.raises(ValueError):
        body_from_json({"type": "blob"})
