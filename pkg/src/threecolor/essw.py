"""Disjoint dominating families in complete multidigraphs of quasi orders.

Given a complete multidigraph whose arcs are the union of ``k`` quasi
orders, the engine finds pairwise disjoint vertex sets ``S[i][j]``
(``i < k``, ``j < l``) such that every vertex outside their union has a
class ``i`` with an arc of class ``i`` into it from each ``S[i][j]``.

The construction builds a partition tree with capped LP distributions,
samples the sets from those distributions and verifies the result, retrying
with fresh randomness on failure (a Las Vegas loop).  All indices are
0-based: classes ``0..k-1``, witness slots ``0..l-1``.
"""

import logging
import math
from dataclasses import dataclass, field
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np

from ._validation import make_rng
from .exceptions import RetriesExhausted, SubsetTooSmall
from .lp import dominating_weights, neighbourhood_mass

logger = logging.getLogger(__name__)

PAPER = "paper"
PRACTICAL = "practical"
_TOL = 1e-9


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def sample_count(k, epsilon):
    """``floor(ln(eps) / ln(1 - 1/(2k))) + 1``.

    The logarithm ratio is estimated with 50 digits, then pinned down
    exactly: the result ``g`` satisfies ``q^(g-1) >= eps > q^g`` in
    rationals, which matters when the ratio is an integer.
    """
    epsilon = Fraction(epsilon)
    getcontext().prec = 50
    eps = Decimal(epsilon.numerator) / Decimal(epsilon.denominator)
    q = Fraction(2 * k - 1, 2 * k)
    g = int(math.floor(eps.ln() / (Decimal(q.numerator) / Decimal(q.denominator)).ln())) + 1
    while q ** g >= epsilon:
        g += 1
    while g > 1 and q ** (g - 1) < epsilon:
        g -= 1
    return g


@dataclass(frozen=True)
class EsswParams:
    k: int
    l: int
    epsilon: Fraction
    delta: Fraction
    sample_size: int
    f_bound: int = None
    max_retries: int = 50
    mode: str = PRACTICAL
    prune_dumped: bool = True

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise ValueError("k and l must be positive")
        if not 0 < self.epsilon < 1 or not 0 < self.delta < 1:
            raise ValueError("epsilon and delta must lie in (0, 1)")
        if self.sample_size < 1:
            raise ValueError("sample_size must be at least 1")
        if self.mode not in (PAPER, PRACTICAL):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def rounds(self):
        """Number of LP rounds in a capped distribution, ``floor(1/delta)``."""
        return math.floor(1 / self.delta)

    def to_json(self):
        return {
            "k": self.k,
            "l": self.l,
            "epsilon": str(self.epsilon),
            "delta": str(self.delta),
            "epsilon_decimal": float(self.epsilon),
            "delta_decimal": float(self.delta),
            "g": self.sample_size,
            "f_bound": self.f_bound,
            "mode": self.mode,
            "max_retries": self.max_retries,
        }


def paper_constants(k, l, max_retries=50):
    """Closed-form constants of the existence proof.

    ``eps = 1/(4 l k^(k+3))``, ``g = g(eps)``,
    ``delta = 1/(8 l^3 k^(3k+7) g^2)`` and the size bound
    ``(2/delta) k^(k+2) + l k^(k+2) g``.
    """
    if k < 1 or l < 1:
        raise ValueError("k and l must be positive")
    eps = Fraction(1, 4 * l * k ** (k + 3))
    g = sample_count(k, eps)
    delta = Fraction(1, 8 * l**3 * k ** (3 * k + 7) * g**2)
    f_bound = int(2 / delta) * k ** (k + 2) + l * k ** (k + 2) * g
    return EsswParams(k, l, eps, delta, g, f_bound, max_retries, PAPER, prune_dumped=False)


def practical_params(k=3, l=2, delta=0.1, g=None, max_retries=50, prune_dumped=True):
    """Desk-scale parameters: user ``delta``, sample cap ``g`` (default: the proof's ``g``)."""
    eps = Fraction(1, 4 * l * k ** (k + 3))
    if g is None:
        g = sample_count(k, eps)
    return EsswParams(k, l, eps, _as_fraction(delta), int(g), None, max_retries, PRACTICAL, prune_dumped)


@dataclass
class Distribution:
    """Weights indexed by global vertex; Fractions in exact mode, floats otherwise."""

    weights: object
    support: frozenset

    @property
    def exact(self):
        return not isinstance(self.weights, np.ndarray)

    def as_float(self):
        return np.array([float(x) for x in self.weights]) if self.exact else self.weights

    def total(self):
        return sum(self.weights) if self.exact else float(self.weights.sum())


def _scatter(n, subset, local, exact):
    if exact:
        out = [Fraction(0)] * n
        for v, x in zip(subset, local):
            out[v] = x
        return out
    out = np.zeros(n)
    out[list(subset)] = local
    return out


def fractional_dominating_distribution(digraph, subset=None, exact=False):
    """Distribution on ``subset`` with ``w(N^-(x)) >= 1/2`` for each ``x`` in it.

    ``N^-`` is the closed in-neighbourhood in the union of all classes,
    restricted to ``subset``.
    """
    subset = sorted(range(digraph.n) if subset is None else subset)
    if not subset:
        raise SubsetTooSmall("subset must be non-empty")
    M = digraph.closed_in()[np.ix_(subset, subset)]
    local = dominating_weights(M, exact=exact)
    return Distribution(_scatter(digraph.n, subset, local, exact), frozenset(subset))


def capped_distribution(digraph, subset, delta, exact=False):
    """Average of ``floor(1/delta)`` LP distributions with saturated vertices removed.

    Returns ``(w, capped)`` where ``capped`` is the set of vertices whose
    accumulated weight reached 1.  Vertices outside ``capped`` have
    ``w(x) <= 2 delta`` and ``w(N^-(x)) >= 1/2``; those inside have
    ``delta <= w(x) <= 4 delta``.
    """
    delta = _as_fraction(delta)
    subset = sorted(subset)
    if not len(subset) > 1 / delta:
        raise SubsetTooSmall(f"|subset| = {len(subset)} is not larger than 1/delta = {float(1 / delta):.6g}")
    rounds = math.floor(1 / delta)
    n = digraph.n
    acc = [Fraction(0)] * n if exact else np.zeros(n)
    capped = set()
    last_active, w_i = None, None
    for _ in range(rounds):
        active = [v for v in subset if v not in capped]
        # the LP only depends on the active set, so an unchanged set reuses w_i
        if active != last_active:
            w_i = fractional_dominating_distribution(digraph, active, exact=exact).weights
            last_active = active
        if exact:
            for v in active:
                acc[v] += w_i[v]
            capped = {v for v in subset if acc[v] >= 1}
        else:
            acc += w_i
            capped = {v for v in subset if acc[v] >= 1 - _TOL}
    if exact:
        w = [x / rounds for x in acc]
    else:
        w = acc / rounds
    return Distribution(w, frozenset(subset)), frozenset(capped)


def partition_step(digraph, subset, delta, exact=False):
    """Split ``subset`` into ``T_0..T_{k-1}`` and a residual ``R``.

    ``x`` joins the lowest ``T_i`` with ``w(N^-_i(x)) >= 1/(2k)``; capped
    vertices (and, defensively, any vertex meeting no threshold) form ``R``.
    """
    dist, capped = capped_distribution(digraph, subset, delta, exact=exact)
    subset = sorted(subset)
    k = digraph.k
    w_local = [dist.weights[v] for v in subset]
    masses = []
    for i in range(k):
        M = digraph.closed_in(i)[np.ix_(subset, subset)]
        masses.append(neighbourhood_mass(M, w_local))
    parts = [set() for _ in range(k)]
    residual = set(capped)
    for pos, v in enumerate(subset):
        if v in capped:
            continue
        i = lowest_class([masses[i][pos] for i in range(k)], exact=exact)
        if i is None:
            logger.warning("vertex %d meets no class threshold; moved to residual", v)
            residual.add(v)
        else:
            parts[i].add(v)
    return [frozenset(p) for p in parts], frozenset(residual), dist


def lowest_class(masses, exact=False):
    """Smallest ``i`` with ``masses[i] >= 1/(2k)``, or None."""
    k = len(masses)
    for i, m in enumerate(masses):
        if (m >= Fraction(1, 2 * k)) if exact else (m >= 1.0 / (2 * k) - _TOL):
            return i
    return None


SPLIT, SMALL, REPEAT, RESIDUAL = "split", "small", "repeat", "residual"


@dataclass
class TreeNode:
    key: tuple
    members: frozenset
    kind: str
    residual: frozenset = None
    dist: Distribution = None


@dataclass
class PartitionTree:
    nodes: dict
    k: int

    def leaves(self):
        """``(kind, key, members)`` for every leaf; their member sets partition V."""
        out = []
        for key in sorted(self.nodes, key=lambda t: (len(t), t)):
            node = self.nodes[key]
            if node.kind == SPLIT:
                out.append((RESIDUAL, key, node.residual))
            else:
                out.append((node.kind, key, node.members))
        return out

    @property
    def n_splits(self):
        return sum(1 for nd in self.nodes.values() if nd.kind == SPLIT)

    def repeat_leaves(self):
        return [(key, m) for kind, key, m in self.leaves() if kind == REPEAT]

    def dumped(self):
        """Vertices of residual and small leaves."""
        out = set()
        for kind, _, m in self.leaves():
            if kind in (SMALL, RESIDUAL):
                out |= m
        return frozenset(out)


def _has_repeat(key):
    return len(set(key)) < len(key)


def build_partition_tree(digraph, params, exact=False):
    """Repeatedly split large nodes with pairwise distinct index sequences."""
    limit = 1 / params.delta
    k = digraph.k
    nodes = {}
    queue = [((), frozenset(range(digraph.n)))]
    while queue:
        queue.sort(key=lambda item: (len(item[0]), item[0]))
        key, members = queue.pop(0)
        if _has_repeat(key):
            nodes[key] = TreeNode(key, members, REPEAT)
            continue
        if not len(members) > limit:
            nodes[key] = TreeNode(key, members, SMALL)
            continue
        parts, residual, dist = partition_step(digraph, members, params.delta, exact=exact)
        nodes[key] = TreeNode(key, members, SPLIT, residual, dist)
        for i in range(k):
            queue.append((key + (i,), parts[i]))
    tree = PartitionTree(nodes, k)
    assert tree.n_splits <= max_splits(k)
    return tree


def max_splits(k):
    """Number of index sequences with distinct entries, the most nodes that can split."""
    return sum(math.perm(k, i) for i in range(k + 1))


@dataclass
class DominationReport:
    overlaps: list = field(default_factory=list)
    undominated: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.overlaps and not self.undominated

    def to_json(self):
        return {
            "ok": self.ok,
            "overlaps": [[list(a), list(b), sorted(c)] for a, b, c in self.overlaps],
            "undominated": self.undominated,
        }


@dataclass
class DominationFamily:
    """Sets ``sets[i][j]`` plus the dumped vertices (already included in ``sets[0][0]``)."""

    sets: list
    dumped: frozenset = frozenset()
    assignment: dict = field(default_factory=dict)
    attempts: int = 1

    @property
    def k(self):
        return len(self.sets)

    @property
    def l(self):
        return len(self.sets[0])

    def union(self):
        out = set()
        for row in self.sets:
            for s in row:
                out |= s
        return frozenset(out)

    def outside(self, n):
        u = self.union()
        return [v for v in range(n) if v not in u]

    def to_json(self):
        return {
            "S": [[sorted(int(v) for v in s) for s in row] for row in self.sets],
            "dumped": sorted(int(v) for v in self.dumped),
            "witnesses": {
                str(v): {"i": i, "per_j": [int(w) for w in per_j]}
                for v, (i, per_j) in sorted(self.assignment.items())
            },
            "attempts": self.attempts,
        }

    @classmethod
    def from_json(cls, obj):
        sets = [[frozenset(s) for s in row] for row in obj["S"]]
        assignment = {int(v): (int(a["i"]), list(a["per_j"])) for v, a in obj.get("witnesses", {}).items()}
        return cls(sets, frozenset(obj.get("dumped", [])), assignment, int(obj.get("attempts", 1)))


def _dominated_by(arcs_i, S, n):
    if not S:
        return np.zeros(n, dtype=bool)
    return arcs_i[sorted(S)].any(axis=0)


def verify_domination(digraph, family, l=None):
    """Check disjointness and the witness property; record witnesses.

    The returned report is empty (``report.ok``) iff the family is valid.
    ``family.assignment`` is filled for every dominated outside vertex.
    """
    n = digraph.n
    l = family.l if l is None else l
    flat = [((i, j), family.sets[i][j]) for i in range(family.k) for j in range(family.l)]
    report = DominationReport()
    for a in range(len(flat)):
        for b in range(a + 1, len(flat)):
            common = flat[a][1] & flat[b][1]
            if common:
                report.overlaps.append((flat[a][0], flat[b][0], common))
    if len(family.sets[0]) < l:
        raise ValueError("family has fewer witness slots than l")
    dom = [[_dominated_by(digraph.arcs[i], family.sets[i][j], n) for j in range(l)] for i in range(family.k)]
    assignment = {}
    for v in family.outside(n):
        for i in range(family.k):
            if all(dom[i][j][v] for j in range(l)):
                per_j = [min(s for s in family.sets[i][j] if digraph.arcs[i, s, v]) for j in range(l)]
                assignment[v] = (i, per_j)
                break
        else:
            report.undominated.append(v)
    report.witnesses = assignment
    family.assignment = assignment
    return report


def _sample_sets(digraph, tree, params, rng):
    """One sampling attempt; returns ``(sets, used)``.

    Shortfalls are not detected here: verification reports them, which
    keeps a diagnosable family for every attempt.
    """
    n, k, l = digraph.n, digraph.k, params.l
    sets = [[set() for _ in range(l)] for _ in range(k)]
    used = set()
    for key, members in tree.repeat_leaves():
        if not members:
            continue
        i = key[-1]
        prefix = key[: key.index(i)]
        probs0 = tree.nodes[prefix].dist.as_float()
        for o in range(l):
            if params.mode == PAPER:
                V = set(int(s) for s in rng.choice(n, size=params.sample_size, p=probs0 / probs0.sum()))
                used |= V
                sets[i][o] |= V
                continue
            probs = probs0.copy()
            if used:
                probs[list(used)] = 0.0
            todo = np.zeros(n, dtype=bool)
            todo[list(members - used)] = True
            todo &= ~_dominated_by(digraph.arcs[i], sets[i][o], n)
            V = set()
            for _ in range(params.sample_size):
                total = probs.sum()
                if not todo.any() or total <= 0:
                    break
                s = int(rng.choice(n, p=probs / total))
                V.add(s)
                probs[s] = 0.0
                todo &= ~digraph.arcs[i, s]
                todo[s] = False
            used |= V
            sets[i][o] |= V
    return sets, used


def sample_dominating_family(digraph, tree, params, seed=0):
    """Sample, verify and retry until a valid :class:`DominationFamily` is found."""
    dumped_all = tree.dumped()
    best, best_report, best_bad = None, None, math.inf
    for attempt in range(params.max_retries):
        rng = make_rng(seed, attempt)
        sets, used = _sample_sets(digraph, tree, params, rng)
        dumped = set(dumped_all) - used
        if params.prune_dumped and dumped:
            probe = DominationFamily([[frozenset(s) for s in row] for row in sets])
            dom = [
                np.logical_and.reduce([_dominated_by(digraph.arcs[i], probe.sets[i][j], digraph.n) for j in range(params.l)])
                for i in range(digraph.k)
            ]
            dumped = {v for v in dumped if not any(d[v] for d in dom)}
        sets[0][0] |= dumped
        family = DominationFamily([[frozenset(s) for s in row] for row in sets], frozenset(dumped), attempts=attempt + 1)
        report = verify_domination(digraph, family, params.l)
        if report.ok:
            if params.mode == PRACTICAL and params.prune_dumped:
                family = prune_family(digraph, family, params.l)
            return family
        bad = len(report.overlaps) + len(report.undominated)
        if bad < best_bad:
            best, best_report, best_bad = family, report, bad
    raise RetriesExhausted(
        f"no valid family after {params.max_retries} attempts", best=best, report=best_report
    )


def prune_family(digraph, family, l=None):
    """Drop members of a valid family while every outside vertex stays dominated.

    Members covering the fewest vertices go first.  The result is
    re-verified, so this never trades validity for size.
    """
    n, k = digraph.n, family.k
    l = family.l if l is None else l
    sets = [[set(s) for s in row] for row in family.sets]
    arcs = digraph.arcs.astype(np.int32)
    cnt = np.stack([[arcs[i][sorted(sets[i][j])].sum(axis=0) if sets[i][j] else np.zeros(n, np.int32) for j in range(l)] for i in range(k)])
    inside = np.zeros(n, dtype=bool)
    inside[list(family.union())] = True
    members = [(int(arcs[i, s].sum()), s, i, j) for i in range(k) for j in range(l) for s in sets[i][j]]
    for _, s, i, j in sorted(members):
        cnt[i, j] -= arcs[i, s]
        inside[s] = False
        covered = (cnt > 0).all(axis=1).any(axis=0)
        if (covered | inside).all():
            sets[i][j].discard(s)
        else:
            cnt[i, j] += arcs[i, s]
            inside[s] = True
    pruned = DominationFamily(
        [[frozenset(x) for x in row] for row in sets], frozenset(family.dumped) & frozenset().union(*sum(sets, [])), attempts=family.attempts
    )
    report = verify_domination(digraph, pruned, l)
    assert report.ok
    return pruned


def dominate(digraph, params, seed=0, exact=False):
    """Partition tree plus sampling in one call."""
    tree = build_partition_tree(digraph, params, exact=exact)
    return sample_dominating_family(digraph, tree, params, seed)
