import dataclasses
import math

import numpy as np
import pytest

from threecolor.body import equilateral_cones, make_disk_approx, make_polygon, tri_partition, tri_partition_cones
from threecolor.exceptions import ClassificationAmbiguous, DegenerateAnchors
from threecolor.oracle import enumerate_cone_ranges, enumerate_translate_ranges
from threecolor.pipeline import (
    HEAVY,
    POCKET,
    GridCell,
    PipelineConfig,
    RangeClass,
    _dominate_and_split,
    choose_r,
    classify_translate,
    color_cell,
    color_points,
    cone_color_points,
    grid_partition,
    m_prime,
    sample_property_a,
    sample_property_b,
)

DISK = make_disk_approx(1.0, 180)
TP = tri_partition(DISK)
CONES = tri_partition_cones(TP)
R = choose_r(DISK, TP)


def seg_dist(p, a, b):
    # closest point on segment ab, by projection clamped to [0, 1]
    ab, ap = b - a, p - a
    s = min(1.0, max(0.0, float(ap @ ab) / float(ab @ ab)))
    return float(np.linalg.norm(p - (a + s * ab)))


def bullet_distances(body, tp):
    out = []
    eps = tp.epsilon
    for i in range(3):
        t, u = tp.t[i], tp.t[(i + 1) % 3]
        a, b = body.point_at(t), body.point_at(u)
        out.append(seg_dist(body.point_at(t + eps / 2), a, b))
        out.append(seg_dist(body.point_at(u - eps / 2), a, b))
        out.append(float(np.linalg.norm(body.point_at(t - eps / 2) - body.point_at(t - eps))))
        out.append(float(np.linalg.norm(body.point_at(t + eps / 2) - body.point_at(t + eps))))
    return out


def own_monochromatic(P, colors, vertices, tags, edges, m):
    # recheck oracle edges from their tags with a separate membership test
    W0 = np.asarray(vertices)
    E = np.roll(W0, -1, axis=0) - W0
    colors = np.asarray(colors)
    bad = []
    for e, v in zip(edges, tags):
        d = P[:, None, :] - (W0 + v)[None, :, :]
        inside = np.nonzero((E[:, 0] * d[..., 1] - E[:, 1] * d[..., 0] >= 0).all(axis=1))[0]
        assert set(inside.tolist()) == set(e)
        if len(inside) >= m and len(set(colors[inside].tolist())) == 1:
            bad.append(inside.tolist())
    return bad


# --- r and m' ----------------------------------------------------------------


def test_choose_r_below_all_bullets():
    d = bullet_distances(DISK, TP)
    assert len(d) == 12
    assert R * math.sqrt(2) < min(d)
    assert R * math.sqrt(2) == pytest.approx(0.99 * min(d), rel=1e-9)


def test_choose_r_scales():
    big = make_disk_approx(2.0, 180)
    assert choose_r(big, tri_partition(big)) == pytest.approx(2 * R, rel=1e-9)


def test_degenerate_anchors():
    with pytest.raises(DegenerateAnchors):
        choose_r(DISK, dataclasses.replace(TP, epsilon=0.0))


def test_m_prime():
    tri = make_polygon([(0, 0), (2, 0), (1, 0.5)])
    assert m_prime(10, tri, 0.5) == 360
    assert m_prime(1, tri, 2.0) == 9
    assert m_prime(3, tri, 2e7) == math.ceil(3 * (1e-7 + 2) ** 2) == 13
    with pytest.raises(ValueError):
        m_prime(0, tri, 1.0)


# --- grid --------------------------------------------------------------------


def test_grid_single_cell():
    cells = grid_partition([(0.1, 0.1), (0.2, 0.3)], 1.0)
    assert len(cells) == 1 and cells[0].coords == (0, 0)


def test_grid_tie_rule():
    cells = grid_partition([(1.0, 0.5), (1.5, 0.5)], 1.0)
    assert [(c.coords, c.indices.tolist()) for c in cells] == [((0, 0), [0]), ((1, 0), [1])]


def test_grid_partitions(rng):
    P = rng.random((100, 2))
    cells = grid_partition(P, 0.05)
    assert len(cells) <= 100
    idx = np.concatenate([c.indices for c in cells])
    assert sorted(idx.tolist()) == list(range(100))
    for c in cells:
        x0, y0, x1, y1 = c.square
        assert np.all((P[c.indices] >= (x0, y0)) & (P[c.indices] <= (x1, y1)))


# --- classification ----------------------------------------------------------


def _place(t, square):
    # translate that puts boundary point gamma(t) at the square's centre
    x0, y0, x1, y1 = square
    return np.array([(x0 + x1) / 2, (y0 + y1) / 2]) - DISK.point_at(t)


def test_classify_examples():
    cell = GridCell((0, 0), np.array([], int), R)
    sq = cell.square
    assert classify_translate(DISK, TP, cell, np.array([R / 2, R / 2])) == RangeClass.C0
    assert classify_translate(DISK, TP, cell, np.array([10.0, 10.0])) == RangeClass.OUTSIDE
    t1, t2, t3 = TP.t
    mid12, mid23 = (t1 + t2) / 2, (t2 + t3) / 2
    mid31 = (t3 + (t1 + 1)) / 2 % 1.0
    assert classify_translate(DISK, TP, cell, _place(mid12, sq), arc=0) == RangeClass.C1_ARC1
    assert classify_translate(DISK, TP, cell, _place(mid23, sq), arc=1) == RangeClass.C1_ARC2
    assert classify_translate(DISK, TP, cell, _place(mid31, sq), arc=2) == RangeClass.C1_ARC3
    assert classify_translate(DISK, TP, cell, _place(mid23, sq), arc=0) == RangeClass.C2
    assert classify_translate(DISK, TP, cell, _place(mid31, sq), arc=0) == RangeClass.C3


def test_classify_oversized_cell_ambiguous():
    cell = GridCell((0, 0), np.array([], int), R * 100)
    with pytest.raises(ClassificationAmbiguous):
        classify_translate(DISK, TP, cell, _place(TP.t[0], cell.square))


def test_properties_a_b():
    checked, fails = sample_property_a(DISK, TP, CONES, R, 60, seed=1)
    assert checked == 60 and not fails
    n, fails = sample_property_b(DISK, TP, R, 200, seed=1)
    assert n == 200 and not fails
    _, fails = sample_property_b(DISK, TP, R * 100, 200, seed=1)
    assert fails


# --- cells -------------------------------------------------------------------


def test_small_cell():
    P = np.random.default_rng(0).random((10, 2)) * R
    res = color_cell(P, DISK, TP, CONES, PipelineConfig(), cell=GridCell((0, 0), np.arange(10), R))
    assert len(res.colors) == 10 and set(res.colors) <= {1, 2, 3}
    assert res.m_effective == res.s_size + POCKET
    assert not res.violations


@pytest.mark.parametrize("scale", [1.0, 0.01])
def test_cell_sixty(scale):
    rng = np.random.default_rng(5)
    P = (0.5 + (rng.random((60, 2)) - 0.5) * scale) * R
    res = color_cell(P, DISK, TP, CONES, PipelineConfig(), cell=GridCell((0, 0), np.arange(60), R))
    h = enumerate_translate_ranges(P, DISK)
    bad = own_monochromatic(P, res.colors, DISK.vertices, h.tags, h.edges, res.m_effective)
    assert not bad and not res.violations
    assert set(res.colors) <= {1, 2, 3}


def test_pigeonhole_identity():
    rng = np.random.default_rng(2)
    P = rng.random((60, 2)) * R
    config = PipelineConfig()
    fam, _, parts, s_size, m_eff = _dominate_and_split(P, CONES, config, 0)
    S = fam.union()
    for e in enumerate_translate_ranges(P, DISK).edges:
        if len(e) >= m_eff:
            assert len(e - S) >= POCKET
            assert max(len(e & set(p)) for p in parts) >= HEAVY


# --- whole point sets --------------------------------------------------------


def test_color_points_trivial():
    assert color_points(np.zeros((0, 2)), DISK).coloring.to_list() == []
    res = color_points([(0.3, 0.3)], DISK)
    assert res.coloring.to_list() in ([1], [2], [3])
    assert res.achieved_m_prime == m_prime(res.max_m_effective, DISK, res.r)


def test_color_points_two_hundred():
    P = np.random.default_rng(11).random((200, 2)) * 0.6
    res = color_points(P, DISK)
    assert res.ok
    h = enumerate_translate_ranges(P, DISK)
    colors = res.coloring.colors
    for e in h.edges:
        if len(e) >= res.achieved_m_prime:
            assert len({colors[q] for q in e}) >= 2
    again = color_points(P, DISK)
    assert np.array_equal(again.coloring.colors, colors)


def test_cone_pipeline_small():
    res = cone_color_points([(0, 0), (1, 0.2), (0.3, 1)], equilateral_cones())
    assert res.ok and res.max_m_effective >= 4


@pytest.mark.parametrize("line", [False, True])
def test_cone_pipeline(line):
    rng = np.random.default_rng(3)
    if line:
        t = np.sort(rng.random(80))
        P = np.column_stack([t, 0.3 * t]) + rng.uniform(-1e-9, 1e-9, (80, 2))
    else:
        P = rng.random((150, 2))
    cones = equilateral_cones()
    res = cone_color_points(P, cones)
    colors = res.coloring.colors
    assert res.ok
    for K in cones:
        for e in enumerate_cone_ranges(P, K).edges:
            if len(e) >= res.max_m_effective:
                assert len({colors[q] for q in e}) >= 2


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(m=1)
    with pytest.raises(ValueError):
        PipelineConfig(r=-1.0)
    with pytest.raises(ValueError):
        PipelineConfig(mode="fast")
