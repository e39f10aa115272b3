"""Range hypergraphs, polychromatic colorings and the union combiner.

Colors are 1-based (``1..k``) everywhere a coloring is exposed.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NoColoringFound


def _tag_json(tag):
    if isinstance(tag, np.ndarray):
        return [float(x) for x in tag]
    if isinstance(tag, (tuple, list)):
        return [_tag_json(x) for x in tag]
    if isinstance(tag, (np.integer,)):
        return int(tag)
    if isinstance(tag, (np.floating,)):
        return float(tag)
    return tag


@dataclass(eq=False)
class RangeHypergraph:
    """Distinct point subsets cut out by one geometric family.

    ``masks[e, p]`` is True iff point ``p`` lies in edge ``e``; ``tags[e]``
    records the realizing geometry.  Duplicate vertex sets are merged
    (first tag wins) and empty edges dropped.
    """

    n_points: int
    masks: np.ndarray = None
    tags: list = None
    family_id: object = None

    def __post_init__(self):
        n = int(self.n_points)
        masks = np.zeros((0, n), dtype=bool) if self.masks is None else np.asarray(self.masks, dtype=bool)
        masks = masks.reshape(-1, n)
        tags = list(self.tags) if self.tags is not None else [None] * len(masks)
        if len(tags) != len(masks):
            raise ValueError("one tag per edge is required")
        keep = masks.any(axis=1)
        masks, tags = masks[keep], [t for t, k in zip(tags, keep) if k]
        if len(masks):
            packed = np.packbits(masks, axis=1)
            _, first = np.unique(packed, axis=0, return_index=True)
            first = np.sort(first)
            masks, tags = masks[first], [tags[i] for i in first]
        self.n_points = n
        self.masks = masks
        self.tags = tags

    @classmethod
    def from_edges(cls, n_points, edges, tags=None, family_id=None):
        edges = list(edges)
        masks = np.zeros((len(edges), n_points), dtype=bool)
        for e, pts in enumerate(edges):
            pts = list(pts)
            if pts and (min(pts) < 0 or max(pts) >= n_points):
                raise ValueError(f"edge {e} has a vertex outside range({n_points})")
            masks[e, pts] = True
        return cls(n_points, masks, tags, family_id)

    @property
    def n_edges(self):
        return len(self.masks)

    @property
    def edges(self):
        return [frozenset(int(p) for p in np.nonzero(row)[0]) for row in self.masks]

    @property
    def sizes(self):
        return self.masks.sum(axis=1)

    def edge_set(self):
        return set(self.edges)

    def heavy(self, m):
        """Sub-hypergraph of edges with at least ``m`` vertices."""
        keep = self.sizes >= m
        return RangeHypergraph(self.n_points, self.masks[keep], [t for t, k in zip(self.tags, keep) if k], self.family_id)

    def restrict(self, subset):
        """Trace on ``subset``, re-indexed to ``0..len(subset)-1``."""
        subset = np.asarray(sorted(subset), dtype=int)
        return RangeHypergraph(len(subset), self.masks[:, subset], self.tags, self.family_id)

    def union(self, other):
        if other.n_points != self.n_points:
            raise ValueError("hypergraphs live on different point sets")
        return RangeHypergraph(
            self.n_points,
            np.vstack([self.masks, other.masks]),
            self.tags + other.tags,
            (self.family_id, other.family_id),
        )

    def minimal_edges(self, m):
        """Inclusion-minimal edges among those of size at least ``m``."""
        heavy = [e for e in self.edges if len(e) >= m]
        heavy.sort(key=len)
        bits = []
        out = []
        for e in heavy:
            b = sum(1 << p for p in e)
            if any(c & b == c for c in bits):
                continue
            bits.append(b)
            out.append(e)
        return out

    def to_json(self):
        return {
            "n": self.n_points,
            "family": _tag_json(self.family_id),
            "edges": [{"pts": sorted(e), "tag": _tag_json(t)} for e, t in zip(self.edges, self.tags)],
        }

    @classmethod
    def from_json(cls, obj):
        edges = obj["edges"]
        return cls.from_edges(int(obj["n"]), [e["pts"] for e in edges], [e.get("tag") for e in edges], obj.get("family"))


@dataclass
class Coloring:
    colors: np.ndarray
    k: int = 3

    def __post_init__(self):
        self.colors = np.asarray(self.colors, dtype=int).reshape(-1)
        if len(self.colors) and (self.colors.min() < 1 or self.colors.max() > self.k):
            raise ValueError(f"colors must lie in 1..{self.k}")

    def __len__(self):
        return len(self.colors)

    def to_list(self):
        return [int(c) for c in self.colors]


@dataclass
class ColoringReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def to_json(self):
        return {"ok": self.ok, "violations": self.violations}


def _colors(coloring):
    return coloring.colors if isinstance(coloring, Coloring) else np.asarray(coloring, dtype=int)


def check_polychromatic(h, coloring, k, heaviness):
    """Edges with at least ``heaviness`` vertices that miss some color in ``1..k``."""
    c = _colors(coloring)
    if len(c) != h.n_points:
        raise ValueError("coloring length differs from the number of points")
    report = ColoringReport()
    if not h.n_edges:
        return report
    sizes = h.sizes
    present = np.stack([(h.masks & (c == col)).any(axis=1) for col in range(1, k + 1)], axis=1)
    for e in np.nonzero((sizes >= heaviness) & ~present.all(axis=1))[0]:
        report.violations.append(
            {
                "edge": sorted(int(p) for p in np.nonzero(h.masks[e])[0]),
                "missing": [col for col in range(1, k + 1) if not present[e, col - 1]],
                "tag": _tag_json(h.tags[e]),
            }
        )
    return report


def check_proper(h, coloring, heaviness):
    """Monochromatic edges with at least ``heaviness`` vertices."""
    c = _colors(coloring)
    if len(c) != h.n_points:
        raise ValueError("coloring length differs from the number of points")
    report = ColoringReport()
    if not h.n_edges:
        return report
    big = np.where(h.masks, c[None, :], np.iinfo(int).max).min(axis=1)
    small = np.where(h.masks, c[None, :], np.iinfo(int).min).max(axis=1)
    for e in np.nonzero((h.sizes >= heaviness) & (big == small))[0]:
        report.violations.append(
            {
                "edge": sorted(int(p) for p in np.nonzero(h.masks[e])[0]),
                "color": int(big[e]),
                "tag": _tag_json(h.tags[e]),
            }
        )
    return report


def union_combine(*colorings, k=None):
    """Per vertex, the smallest color in ``1..k`` used by none of the inputs.

    With ``k - 1`` colorings that are polychromatic on ``H_1..H_{k-1}``,
    the result is proper on their union.
    """
    if not colorings:
        raise ValueError("at least one coloring is required")
    arrays = [_colors(c) for c in colorings]
    if len({len(a) for a in arrays}) != 1:
        raise ValueError("colorings have different lengths")
    k = len(arrays) + 1 if k is None else k
    out = np.zeros(len(arrays[0]), dtype=int)
    for v in range(len(out)):
        taken = {int(a[v]) for a in arrays}
        out[v] = next(c for c in range(1, k + 1) if c not in taken)
    return Coloring(out, k)


def _sweep(n, edges, k, order=None):
    """Greedy pass: each vertex takes the color most needed by its edges."""
    order = range(n) if order is None else order
    colors = np.zeros(n, dtype=int)
    missing = [set(range(1, k + 1)) for _ in edges]
    uncolored = [len(e) for e in edges]
    incident = [[] for _ in range(n)]
    for idx, e in enumerate(edges):
        for v in e:
            incident[v].append(idx)
    for v in order:
        score = np.zeros(k + 1)
        for idx in incident[v]:
            slack = uncolored[idx] - len(missing[idx])
            for c in missing[idx]:
                score[c] += 1.0 / (1 + slack)
        score[0] = -np.inf
        c = int(np.argmax(score)) if np.isfinite(score[1:]).any() and score[1:].max() > 0 else 1
        colors[v] = c
        for idx in incident[v]:
            missing[idx].discard(c)
            uncolored[idx] -= 1
    return colors


class _Search:
    """Backtracking over color domains with per-edge support counting."""

    def __init__(self, n, edges, k, node_limit):
        self.n, self.k = n, k
        self.edges = [list(e) for e in edges]
        self.incident = [[] for _ in range(n)]
        for idx, e in enumerate(self.edges):
            for v in e:
                self.incident[v].append(idx)
        self.full = (1 << k) - 1
        self.node_limit = node_limit
        self.nodes = 0

    def propagate(self, dom, queue):
        seen = set(queue)
        while queue:
            idx = queue.pop()
            seen.discard(idx)
            e = self.edges[idx]
            for c in range(self.k):
                bit = 1 << c
                sup = [v for v in e if dom[v] & bit]
                if not sup:
                    return False
                if len(sup) == 1:
                    v = sup[0]
                    if dom[v] != bit:
                        dom[v] = bit
                        for j in self.incident[v]:
                            if j not in seen:
                                seen.add(j)
                                queue.append(j)
        return True

    def run(self):
        dom = [self.full] * self.n
        if not self.propagate(dom, list(range(len(self.edges)))):
            return None
        return self._solve(dom)

    def _solve(self, dom):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise NoColoringFound(f"search node limit {self.node_limit} reached")
        free = [v for v in range(self.n) if dom[v] & (dom[v] - 1)]
        if not free:
            return dom
        v = min(free, key=lambda u: (bin(dom[u]).count("1"), -len(self.incident[u]), u))
        used = 0
        for u in range(self.n):
            if not dom[u] & (dom[u] - 1):
                used |= dom[u]
        fresh_tried = False
        for c in range(self.k):
            bit = 1 << c
            if not dom[v] & bit:
                continue
            if not used & bit:
                if fresh_tried:
                    continue
                fresh_tried = True
            child = list(dom)
            child[v] = bit
            if self.propagate(child, list(self.incident[v])):
                got = self._solve(child)
                if got is not None:
                    return got
        return None


def polychromatic_color(h, k=3, backend="auto", node_limit=2_000_000, order=None):
    """Coloring in which every edge with at least ``2k - 1`` vertices is rainbow.

    ``backend`` is ``"sweep"`` (greedy, re-checked; raises if it fails),
    ``"search"`` (complete backtracking) or ``"auto"`` (sweep, then search).
    Raises :class:`NoColoringFound` when no such coloring exists or the
    node limit is hit.
    """
    n = h.n_points
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return Coloring(np.ones(n, dtype=int), 1)
    m = 2 * k - 1
    edges = [sorted(e) for e in h.minimal_edges(m)]
    if not edges:
        return Coloring(np.ones(n, dtype=int), k)
    if backend in ("auto", "sweep"):
        colors = _sweep(n, edges, k, order)
        if check_polychromatic(h, colors, k, m).ok:
            return Coloring(colors, k)
        if backend == "sweep":
            raise NoColoringFound("sweep backend produced a violating coloring")
    elif backend != "search":
        raise ValueError(f"unknown backend {backend!r}")
    dom = _Search(n, edges, k, node_limit).run()
    if dom is None:
        raise NoColoringFound("hypergraph has no polychromatic coloring")
    colors = np.array([d.bit_length() if d else 1 for d in dom], dtype=int)
    assert check_polychromatic(h, colors, k, m).ok
    return Coloring(colors, k)


FANO_LINES = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]


def _rainbow_table(n, lines, k):
    cols = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int8)
    ok = np.ones((len(cols), len(lines)), dtype=bool)
    for j, line in enumerate(lines):
        sub = cols[:, list(line)]
        for c in range(k):
            ok[:, j] &= (sub == c).any(axis=1)
    return ok


def sharpness_fixture():
    """Two hypergraphs on 7 vertices, each with a rainbow 3-coloring, whose union is not 2-colorable.

    Found by exhaustive search over splits of the Fano plane's lines.
    Returns ``(H1, H2)``.
    """
    n = 7
    if _rainbow_table(n, FANO_LINES, 2).all(axis=1).any():
        raise AssertionError("Fano plane unexpectedly 2-colorable")
    table = _rainbow_table(n, FANO_LINES, 3)
    for mask in range(1, 1 << len(FANO_LINES)):
        first = [j for j in range(len(FANO_LINES)) if mask >> j & 1]
        second = [j for j in range(len(FANO_LINES)) if not mask >> j & 1]
        if not second:
            continue
        if table[:, first].all(axis=1).any() and table[:, second].all(axis=1).any():
            h1 = RangeHypergraph.from_edges(n, [FANO_LINES[j] for j in first], family_id="fano-a")
            h2 = RangeHypergraph.from_edges(n, [FANO_LINES[j] for j in second], family_id="fano-b")
            return h1, h2
    raise AssertionError("no split found")
