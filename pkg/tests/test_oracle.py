import numpy as np
import pytest

from threecolor.body import Cone, equilateral_cones, make_disk_approx, make_polygon
from threecolor.oracle import enumerate_cone_ranges, enumerate_translate_ranges, verify_coloring
from threecolor.polychromatic import RangeHypergraph

QUADRANT = Cone((1, 0), (0, 1))
PENTAGON = make_polygon([(0, 0), (1, 0), (1.2, 0.8), (0.3, 1.1), (-0.2, 0.5)])


# membership written from scratch: a point is in V + v iff it is left of every edge
def translate_masks(vertices, T, P):
    W = np.asarray(vertices)
    e = np.roll(W, -1, axis=0) - W
    # d[t, p, j] = P[p] - (W[j] + T[t])
    d = P[None, :, None, :] - (W[None, None, :, :] + T[:, None, None, :])
    cross = e[:, 0] * d[..., 1] - e[:, 1] * d[..., 0]
    return (cross >= 0).all(axis=2)


def cone_masks(cone, A, P):
    Rinv = np.linalg.inv(np.column_stack([cone.ray_cw, cone.ray_ccw]))
    coef = np.einsum("ij,tpj->tpi", Rinv, P[None, :, :] - A[:, None, :])
    return (coef >= 0).all(axis=2)


def in_translate(vertices, v, P):
    return translate_masks(vertices, np.asarray(v, float)[None], P)[0]


def in_cone(cone, apex, P):
    return cone_masks(cone, np.asarray(apex, float)[None], P)[0]


def _grid(lo, hi, step):
    xs = np.arange(lo[0], hi[0] + step, step)
    ys = np.arange(lo[1], hi[1] + step, step)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def _subsets(masks):
    return {frozenset(np.nonzero(r)[0].tolist()) for r in np.unique(masks, axis=0) if r.any()}


def sampled_translate_ranges(P, vertices, step):
    V = np.asarray(vertices)
    T = _grid(P.min(axis=0) - V.max(axis=0) - step, P.max(axis=0) - V.min(axis=0) + step, step)
    return set().union(*(_subsets(translate_masks(V, T[i : i + 20000], P)) for i in range(0, len(T), 20000)))


def sampled_cone_ranges(P, cone, step, margin=1.0):
    A = _grid(P.min(axis=0) - margin, P.max(axis=0) + margin, step)
    return set().union(*(_subsets(cone_masks(cone, A[i : i + 50000], P)) for i in range(0, len(A), 50000)))


def assert_tags_realize(h, member):
    for e, tag in zip(h.edges, h.tags):
        got = frozenset(np.nonzero(member(np.asarray(tag)))[0].tolist())
        assert got == e


def test_single_point():
    h = enumerate_translate_ranges([(0.3, 0.4)], PENTAGON)
    assert h.edge_set() == {frozenset({0})}
    assert enumerate_cone_ranges([(0.3, 0.4)], QUADRANT).edge_set() == {frozenset({0})}


def test_far_points():
    h = enumerate_translate_ranges([(0, 0), (10, 10)], make_polygon([(0, 0), (1, 0), (0, 1)]))
    assert h.edge_set() == {frozenset({0}), frozenset({1})}


def test_tight_cluster_all_subsets():
    square = make_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    P = np.array([(0.5, 0.5), (0.51, 0.52), (0.53, 0.505)])
    h = enumerate_translate_ranges(P, square)
    assert len(h.edge_set()) == 7
    assert sampled_translate_ranges(P, square.vertices, 1.4e-3) == h.edge_set()


def test_quadrant_example():
    h = enumerate_cone_ranges([(0, 0), (1, 1)], QUADRANT)
    assert h.edge_set() == {frozenset({1}), frozenset({0, 1})}


@pytest.mark.parametrize("seed", range(4))
def test_translate_oracle_vs_sampling(seed):
    rng = np.random.default_rng(seed)
    P = rng.random((6, 2)) * 1.2
    h = enumerate_translate_ranges(P, PENTAGON)
    assert_tags_realize(h, lambda v: in_translate(PENTAGON.vertices, v, P))
    sampled = sampled_translate_ranges(P, PENTAGON.vertices, 0.01)
    assert sampled <= h.edge_set()


@pytest.mark.parametrize("seed", range(4))
def test_cone_oracle_vs_sampling(seed):
    rng = np.random.default_rng(100 + seed)
    P = rng.random((7, 2))
    for K in equilateral_cones(0.1):
        h = enumerate_cone_ranges(P, K)
        assert_tags_realize(h, lambda a: in_cone(K, a, P))
        assert sampled_cone_ranges(P, K, 0.004) <= h.edge_set()


def test_disk_oracle_sound(rng):
    P = rng.random((25, 2)) * 2
    body = make_disk_approx(1.0, 60)
    h = enumerate_translate_ranges(P, body)
    assert_tags_realize(h, lambda v: in_translate(body.vertices, v, P))


def test_order_independent(rng):
    P = rng.random((8, 2))
    perm = rng.permutation(8)
    a = enumerate_translate_ranges(P, PENTAGON).edge_set()
    b = enumerate_translate_ranges(P[perm], PENTAGON).edge_set()
    assert {frozenset(int(perm[i]) for i in e) for e in b} == a


def test_verify_coloring_examples():
    h = RangeHypergraph.from_edges(3, [{0, 1}, {0, 1, 2}])
    assert verify_coloring(h, [1, 1, 1], 4).ok
    rep = verify_coloring(h, [1, 1, 1], 3)
    assert [v["edge"] for v in rep.violations] == [[0, 1, 2]]
    assert verify_coloring(h, [1, 2, 1], 2).ok
    with pytest.raises(ValueError):
        verify_coloring(h, [1, 2], 2)
