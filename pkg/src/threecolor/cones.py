"""Cone membership, cone quasi orders and complete multidigraphs.

A multidigraph with ``k`` arc classes is stored as a boolean array
``arcs[i, u, v]`` meaning ``u -> v`` is an arc of class ``i``.  Dense
boolean matrices make the closed in-neighbourhood queries of the
domination engine single vectorised products.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_points
from .exceptions import NotComplete


def cone_contains(cone, apex, p):
    """True iff ``p`` lies in the closed cone ``apex + cone`` (vectorised over ``p``)."""
    d = np.asarray(p, dtype=float) - np.asarray(apex, dtype=float)
    cw, ccw = cone.ray_cw, cone.ray_ccw
    left_of_cw = cw[0] * d[..., 1] - cw[1] * d[..., 0]
    right_of_ccw = d[..., 0] * ccw[1] - d[..., 1] * ccw[0]
    return (left_of_cw >= 0) & (right_of_ccw >= 0)


def cone_offsets(cone, d):
    """Both half-plane offsets of displacement ``d`` (positive means strictly inside)."""
    cw, ccw = cone.ray_cw, cone.ray_ccw
    return (
        cw[0] * d[..., 1] - cw[1] * d[..., 0],
        d[..., 0] * ccw[1] - d[..., 1] * ccw[0],
    )


def quasi_order_arcs(points, cone):
    """Boolean matrix ``A`` with ``A[q, p]`` iff ``q`` lies in ``p + cone``, ``q != p``."""
    P = check_points(points)
    # diff[q, p] = P[q] - P[p]
    diff = P[:, None, :] - P[None, :, :]
    A = cone_contains(cone, np.zeros(2), diff)
    np.fill_diagonal(A, False)
    return A


@dataclass(eq=False)
class QuasiOrderMultiDigraph:
    """Vertex set ``range(n)`` with ``k`` transitive arc classes."""

    arcs: np.ndarray

    def __post_init__(self):
        arcs = np.asarray(self.arcs, dtype=bool)
        if arcs.ndim != 3 or arcs.shape[1] != arcs.shape[2]:
            raise ValueError("arcs must have shape (k, n, n)")
        arcs = arcs.copy()
        for i in range(arcs.shape[0]):
            np.fill_diagonal(arcs[i], False)
        self.arcs = arcs

    @property
    def n(self):
        return self.arcs.shape[1]

    @property
    def k(self):
        return self.arcs.shape[0]

    def closed_in(self, i=None):
        """Matrix ``M`` with ``M[x, y]`` iff ``y`` is in the closed in-neighbourhood of ``x``.

        ``i=None`` uses the union of all classes.
        """
        A = self.arcs.any(axis=0) if i is None else self.arcs[i]
        return A.T | np.eye(self.n, dtype=bool)

    def induced(self, subset):
        subset = np.asarray(subset, dtype=int)
        return QuasiOrderMultiDigraph(self.arcs[:, subset][:, :, subset])

    def transitivity_violations(self):
        out = []
        for i in range(self.k):
            A = self.arcs[i].astype(np.int32)
            two_step = (A @ A) > 0
            np.fill_diagonal(two_step, False)
            bad = np.argwhere(two_step & ~self.arcs[i])
            out.extend((i, int(u), int(v)) for u, v in bad)
        return out

    def is_transitive(self):
        return not self.transitivity_violations()

    def incomparable_pairs(self):
        U = self.arcs.any(axis=0)
        comparable = U | U.T | np.eye(self.n, dtype=bool)
        return [(int(u), int(v)) for u, v in np.argwhere(np.triu(~comparable, 1))]

    def is_complete(self):
        return not self.incomparable_pairs()

    def to_json(self):
        return {
            "n": self.n,
            "k": self.k,
            "arcs": [np.argwhere(self.arcs[i]).tolist() for i in range(self.k)],
        }

    @classmethod
    def from_json(cls, obj):
        n, k = int(obj["n"]), int(obj["k"])
        if len(obj["arcs"]) != k:
            raise ValueError(f"expected {k} arc classes, got {len(obj['arcs'])}")
        arcs = np.zeros((k, n, n), dtype=bool)
        for i, cls_arcs in enumerate(obj["arcs"]):
            for u, v in cls_arcs:
                if not (0 <= u < n and 0 <= v < n) or u == v:
                    raise ValueError(f"bad arc ({u}, {v})")
                arcs[i, u, v] = True
        return cls(arcs)


def build_multidigraph(points, cones, check=True):
    """Union of the cone quasi orders as a complete multidigraph.

    Raises :class:`NotComplete` when some pair of points is comparable in
    none of the orders, which means ``cones`` is not a tri-partition set.
    """
    P = check_points(points)
    arcs = np.stack([quasi_order_arcs(P, K) for K in cones]) if len(P) else np.zeros((len(cones), 0, 0), bool)
    D = QuasiOrderMultiDigraph(arcs)
    if check:
        bad = D.incomparable_pairs()
        if bad:
            raise NotComplete(f"{len(bad)} incomparable pairs, e.g. {bad[0]}")
    return D
