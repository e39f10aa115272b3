"""Instance generators: random point sets and the red/blue hypergraphs H(k, l)."""

from dataclasses import dataclass

import numpy as np

from ._validation import make_rng
from .exceptions import SizeOverflow, TooLarge

SHAPES = ("uniform-square", "gaussian", "cluster", "collinear")


@dataclass
class AbstractHypergraph:
    """Vertices ``0..n-1`` with red edges, blue edges and the recursion roots."""

    n_vertices: int
    red_edges: list
    blue_edges: list
    roots: list

    def to_json(self):
        return {
            "n": self.n_vertices,
            "red": [sorted(e) for e in self.red_edges],
            "blue": [sorted(e) for e in self.blue_edges],
            "roots": list(self.roots),
        }


def hkl_size(k, l):
    if k == 1:
        return l
    if l == 1:
        return k
    return hkl_size(k - 1, l) + hkl_size(k, l - 1) + 1


def build_Hkl(k, l, cap=12):
    """Recursive hypergraph where every red/blue coloring has an all-red
    ``k``-edge or an all-blue ``l``-edge."""
    if k < 1 or l < 1:
        raise ValueError("k and l must be positive")
    if k + l > cap:
        raise SizeOverflow(f"k + l = {k + l} exceeds the cap {cap}")
    counter = [0]

    def fresh(count):
        out = list(range(counter[0], counter[0] + count))
        counter[0] += count
        return out

    def rec(a, b):
        if a == 1:
            vs = fresh(b)
            return [frozenset([v]) for v in vs], [frozenset(vs)], []
        if b == 1:
            vs = fresh(a)
            return [frozenset(vs)], [frozenset([v]) for v in vs], []
        red1, blue1, roots1 = rec(a - 1, b)
        red2, blue2, roots2 = rec(a, b - 1)
        (p,) = fresh(1)
        red = [e | {p} for e in red1] + red2
        blue = blue1 + [e | {p} for e in blue2]
        return red, blue, roots1 + roots2 + [p]

    red, blue, roots = rec(k, l)
    return AbstractHypergraph(counter[0], red, blue, roots)


def check_not_two_colorable(h, limit=24, chunk=1 << 20):
    """Exhaustive scan of all red/blue colorings.

    Returns ``(True, None)`` if every coloring has an all-red red edge or an
    all-blue blue edge, else ``(False, witness)`` with ``witness[v]`` in
    ``{"red", "blue"}``.
    """
    n = h.n_vertices
    if n > limit:
        raise TooLarge(f"{n} vertices exceed the exhaustive limit {limit}")
    red = np.array([sum(1 << v for v in e) for e in h.red_edges], dtype=np.int64)
    blue = np.array([sum(1 << v for v in e) for e in h.blue_edges], dtype=np.int64)
    total = 1 << n
    for start in range(0, total, chunk):
        c = np.arange(start, min(total, start + chunk), dtype=np.int64)  # bit set = red
        hit = np.zeros(len(c), dtype=bool)
        for m in red:
            hit |= (c & m) == m
        for m in blue:
            hit |= (c & m) == 0
        if not hit.all():
            bad = int(c[np.argmin(hit)])
            return False, ["red" if bad >> v & 1 else "blue" for v in range(n)]
    return True, None


def random_points(n, shape="uniform-square", seed=0, sigma=0.05, jitter=1e-9):
    """Seeded point sets; ``collinear`` lies on the diagonal up to ``jitter``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if shape not in SHAPES:
        raise ValueError(f"shape must be one of {SHAPES}")
    rng = make_rng(seed, SHAPES.index(shape))
    if n == 0:
        return np.zeros((0, 2))
    if shape == "uniform-square":
        return rng.random((n, 2))
    if shape == "gaussian":
        return rng.normal(size=(n, 2))
    if shape == "cluster":
        centers = rng.random((max(1, n // 20), 2))
        which = rng.integers(0, len(centers), size=n)
        return centers[which] + sigma * rng.normal(size=(n, 2))
    t = np.sort(rng.random(n))
    base = np.column_stack([t, t])
    return base + rng.uniform(-jitter, jitter, size=(n, 2)) / np.sqrt(2.0)
