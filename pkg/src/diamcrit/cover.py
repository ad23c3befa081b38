"""Greedy covering of the edge set by critical paths, and the counting built on it.

Association here is always at level 3 (d <= 3 before deletion, >= 4
after), which is the right notion for every diameter-critical graph of
diameter at least 3. Critical and 2-critical structure is computed once on
the input graph; only the unsettled set U evolves.

Every choice is deterministic: edges are scanned in edge-index order and
candidate paths in (length, lexicographic) order. All paths are stored as
vertex tuples oriented from their smaller endpoint. Each iteration is
checked as it happens and any breach raises InternalInvariant with the
iteration index.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .criticality import (
    count_paths_upto,
    critical_structure,
    multiplicities,
    normalize_path,
    path_edges,
    two_critical_paths,
)
from .exceptions import InternalInvariant, LemmaViolation, NotDiameterCritical
from .graph import Graph
from .metric import INF, diameter
from .stats import disjoint_neighborhood_pairs

LEVEL = 3
CASES = ("C1", "C2", "C3-1", "C3-2", "C4", "C5", "C6")


def _key(path):
    return (len(path), path)


@dataclass
class CoverContext:
    """Frozen per-graph data the algorithm consults."""

    g: Graph
    structure: object
    two_critical: list
    mult: dict
    p1: Dict[Tuple[int, int], List[Tuple[int, ...]]]
    assoc: Dict[Tuple[int, ...], Tuple[Tuple[int, int], ...]]
    two_paths: set

    @classmethod
    def build(cls, g, check=True):
        if g.m == 0:
            raise NotDiameterCritical("graph has no edges")
        d = diameter(g)
        if d == INF or d < 3:
            raise NotDiameterCritical(f"diameter {d} is not in 3..inf")
        if check:
            from .criticality import is_diameter_k_critical

            verdict = is_diameter_k_critical(g, d)
            if not verdict:
                raise NotDiameterCritical(f"not diameter-{d}-critical; edge {verdict.witness_edge} is not critical")
        structure = critical_structure(g, LEVEL)
        two = two_critical_paths(g)
        mult = multiplicities(g, LEVEL, structure=structure, two_critical=two)
        p1 = {}
        for i, e in enumerate(g.edges):
            paths = sorted((r.path for r in structure.by_edge[i]), key=_key)
            if not paths:
                raise NotDiameterCritical(f"edge {e} has no associated critical path")
            p1[e] = paths
        assoc = {r.path: r.assoc_edges for r in structure.pairs.values()}
        two_paths = {r.path for r in two}
        return cls(g, structure, two, mult, p1, assoc, two_paths)

    def joins_two_critical(self, e, f):
        """The 2-critical length-2 path formed by edges e and f, or None."""
        shared = set(e) & set(f)
        if len(shared) != 1:
            return None
        (c,) = shared
        x = e[0] if e[1] == c else e[1]
        y = f[0] if f[1] == c else f[1]
        path = normalize_path((x, c, y))
        return path if path in self.two_paths else None


def _middle(path):
    return (min(path[1], path[2]), max(path[1], path[2]))


def edge_type(ctx, U, e):
    """Smallest applicable type 1..6 of edge e in U."""
    paths = ctx.p1[e]
    for p in paths:
        if sum(1 for f in ctx.assoc[p] if f in U) >= 2:
            return 1
    for p in paths:
        if len(p) == 4 and _middle(p) == e:
            return 2
    a, b = e
    rows = ctx.g.rows
    for c in (a, b):
        for w in _nbrs(rows[c]):
            if w in e:
                continue
            f = (min(c, w), max(c, w))
            if f in U and ctx.joins_two_critical(e, f):
                return 3
    for p in paths:
        if len(p) == 4:
            return 4
    for p in paths:
        if len(p) == 3:
            return 5
    if paths != [e]:
        raise InternalInvariant(f"type-6 edge {e} has critical paths {paths}")
    return 6


def _nbrs(row):
    while row:
        low = row & -row
        yield low.bit_length() - 1
        row ^= low


@dataclass
class CoverIteration:
    index: int
    case: str
    t: int
    edges: Tuple[Tuple[int, int], ...]
    P: Tuple[Tuple[int, ...], ...]
    P2: Tuple[Tuple[int, ...], ...]
    settled: Tuple[Tuple[int, int], ...]

    def to_dict(self):
        return {
            "i": self.index,
            "case": self.case,
            "t": self.t,
            "edges": [list(e) for e in self.edges],
            "P": [list(p) for p in self.P],
            "P2": [list(p) for p in self.P2],
            "settled": [list(e) for e in self.settled],
        }


@dataclass
class CoverTrace:
    n: int
    m: int
    iterations: List[CoverIteration]
    initial_types: Dict[Tuple[int, int], int]
    context: CoverContext = field(repr=False, default=None)

    @property
    def s(self):
        return len(self.iterations)

    @property
    def family(self):
        return [p for it in self.iterations for p in it.P]

    def histogram(self):
        c = Counter(it.case for it in self.iterations)
        return {case: c.get(case, 0) for case in CASES}

    def to_dict(self):
        return {
            "n": self.n,
            "m": self.m,
            "s": self.s,
            "histogram": self.histogram(),
            "initial_types": [[list(e), t] for e, t in sorted(self.initial_types.items())],
            "iterations": [it.to_dict() for it in self.iterations],
            "family": [list(p) for p in self.family],
            "final_unsettled": [],
        }


def _minus_end(path, end):
    """Drop endpoint ``end`` (0 = first, -1 = last) and renormalize."""
    return normalize_path(path[1:] if end == 0 else path[:-1])


def _choose(ctx, U, tmin, types):
    """Pick (case, chosen edges, P(i), P²(i), per-case deletions)."""
    order = [e for e in ctx.g.edges if e in U]
    if tmin == 1:
        for e in order:
            if types[e] != 1:
                continue
            for p in ctx.p1[e]:
                if sum(1 for f in ctx.assoc[p] if f in U) >= 2:
                    dele = tuple(f for f in ctx.assoc[p] if f in U)
                    return "C1", (e,), (p,), (_minus_end(p, 0), _minus_end(p, -1)), dele
    if tmin == 2:
        for e in order:
            for p in ctx.p1[e]:
                if len(p) == 4 and _middle(p) == e:
                    return "C2", (e,), (p,), (_minus_end(p, 0), _minus_end(p, -1)), (e,)
    if tmin == 3:
        best = None
        for e in order:
            for p in ctx.p1[e]:
                if len(p) != 3:
                    continue
                others = [f for f in path_edges(p) if f != e]
                if len(others) != 1 or others[0] not in U:
                    continue
                f = others[0]
                for q in ctx.p1[f]:
                    key = (-len(q), ctx.structure.index[e], ctx.structure.index[f], q)
                    if best is None or key < best[0]:
                        best = (key, e, f, p, q)
        if best is not None:
            _, e, f, p, q = best
            return "C3-1", (e, f), (p, q), (), (e, f)
        for e in order:
            if types[e] != 3:
                continue
            a, b = e
            cands = []
            for c in (a, b):
                for w in _nbrs(ctx.g.rows[c]):
                    if w in e:
                        continue
                    f = (min(c, w), max(c, w))
                    if f in U:
                        path = ctx.joins_two_critical(e, f)
                        if path:
                            cands.append((ctx.structure.index[f], f, path))
            if cands:
                _, f, path = min(cands)
                return "C3-2", (e, f), (ctx.p1[e][0], ctx.p1[f][0]), (path,), (e, f)
    if tmin == 4:
        for e in order:
            for p in ctx.p1[e]:
                if len(p) != 4:
                    continue
                if (min(p[0], p[1]), max(p[0], p[1])) == e:
                    return "C4", (e,), (p,), (_minus_end(p, -1),), (e,)
                if (min(p[2], p[3]), max(p[2], p[3])) == e:
                    return "C4", (e,), (p,), (_minus_end(p, 0),), (e,)
    if tmin == 5:
        for e in order:
            for p in ctx.p1[e]:
                if len(p) == 3:
                    return "C5", (e,), (p,), (e,), (e,)
    if tmin == 6:
        e = order[0]
        return "C6", (e,), (e,), (), (e,)
    raise InternalInvariant(f"no move found for minimum type {tmin}")


def run_cover(g, check=True, context=None):
    """Run the greedy covering until every edge is settled.

    Returns a :class:`CoverTrace`. NotDiameterCritical if ``g`` is not a
    diameter-critical graph of diameter >= 3.
    """
    ctx = context or CoverContext.build(g, check=check)
    U = set(g.edges)
    types = {e: edge_type(ctx, U, e) for e in U}
    initial = dict(types)
    seen_pairs = {}
    iterations = []
    settled_at = {}
    single = 0
    prev_t = 0
    i = 0
    while U:
        i += 1
        tmin = min(types.values())
        case, chosen, P, P2, dele = _choose(ctx, U, tmin, types)
        settled = tuple(sorted(f for p in P for f in ctx.assoc[p] if f in U))

        def fail(msg):
            raise InternalInvariant(f"iteration {i} ({case}): {msg}")

        if set(settled) != set(dele):
            fail(f"settled {settled} differs from case deletions {dele}")
        if tmin < prev_t:
            fail(f"t dropped from {prev_t} to {tmin}")
        prev_t = tmin
        for e in settled:
            settled_at[e] = i
        for p in P:
            if p not in ctx.assoc:
                fail(f"{p} is not a critical path")
            if not set(path_edges(p)) & set(settled):
                fail(f"{p} contains no edge settled now")
        for p in P2:
            if p not in ctx.two_paths:
                fail(f"{p} is not 2-critical")
            es = path_edges(p)
            now = [e for e in es if settled_at.get(e) == i]
            if not now:
                fail(f"{p} contains no edge settled now")
            if len(now) != len(es):
                earlier = [e for e in es if settled_at.get(e, i) < i]
                if not (len(es) == 2 and len(now) == 1 and len(earlier) == 1):
                    fail(f"2-critical path {p} mixes settlement times badly")
        group = set(P) | set(P2)
        if len(group) == 1:
            single += 1
            if case != "C6":
                fail("single-path iteration outside the last case")
        for p in group:
            pair = (p[0], p[-1])
            if pair in seen_pairs:
                fail(f"{p} repeats a pair already used at iteration {seen_pairs[pair]}")
            seen_pairs[pair] = i
        iterations.append(CoverIteration(i, case, tmin, chosen, P, P2, settled))
        U.difference_update(settled)
        new_types = {}
        for e in U:
            te = edge_type(ctx, U, e)
            if check and te < types[e]:
                fail(f"type of {e} dropped from {types[e]} to {te}")
            new_types[e] = te
        types = new_types
    if 2 * single > g.n:
        raise InternalInvariant(f"{single} single-path iterations exceed n/2")
    covered = set()
    for it in iterations:
        for p in it.P:
            covered.update(ctx.assoc[p])
    if covered != set(g.edges):
        raise InternalInvariant("family does not cover every edge")
    return CoverTrace(g.n, g.m, iterations, initial, ctx)


# -- G0 and the counting ----------------------------------------------------

def default_t(n):
    """ceil(n^(2/3)), computed exactly."""
    t = max(1, round(n ** (2 / 3)))
    while t ** 3 < n * n:
        t += 1
    while t > 1 and (t - 1) ** 3 >= n * n:
        t -= 1
    return t


@dataclass
class G0Report:
    t: int
    heavy: List[Tuple[int, int]]
    light: List[Tuple[int, int]]
    light_paths: int
    edges_left: int
    di: int

    def to_dict(self):
        return {
            "t": self.t,
            "deleted_heavy": [list(e) for e in self.heavy],
            "deleted_light": [list(e) for e in self.light],
            "t_light_paths": self.light_paths,
            "e_g0": self.edges_left,
            "di_g0": self.di,
        }


def build_g0(g, t, context=None):
    """Delete heavy edges (multiplicity >= t) and the edges of t-light paths.

    Asserts that every length-2 2-critical path lost an edge and that every
    critical or 2-critical pair has disjoint neighborhoods afterwards.
    """
    from .graph import build

    ctx = context or CoverContext.build(g, check=False)
    heavy = [e for e in g.edges if ctx.mult[e].m >= t]
    light_paths = [
        r.path for r in ctx.two_critical
        if len(r.path) == 3 and all(ctx.mult[e].m < t for e in path_edges(r.path))
    ]
    light = sorted({e for p in light_paths for e in path_edges(p)} - set(heavy))
    gone = set(heavy) | set(light)
    g0 = build(g.n, [e for e in g.edges if e not in gone])
    for r in ctx.two_critical:
        if len(r.path) == 3 and not set(path_edges(r.path)) & gone:
            raise LemmaViolation(f"2-critical path {r.path} survives in G0")
    _, di = disjoint_neighborhood_pairs(g0)
    rows = g0.rows
    for pair in list(ctx.structure.pairs) + [r.pair for r in ctx.two_critical]:
        if rows[pair[0]] & rows[pair[1]]:
            raise LemmaViolation(f"pair {pair} keeps a common neighbor in G0")
    return g0, G0Report(int(t) if t != math.inf else -1, heavy, light, len(light_paths), g0.m, di)


def settled_in_g0(trace, g0):
    """S(i): edges settled at iteration i that survive in G0."""
    keep = set(g0.edges)
    return [tuple(e for e in it.settled if e in keep) for it in trace.iterations]


def extract_p_t(g, t, context=None):
    """Length-3 critical paths with >= 2 associated edges, heavy middle, light ends.

    Each returned path is asserted to be the only path of length <= 3
    between its endpoints.
    """
    ctx = context or CoverContext.build(g, check=False)
    out = []
    for p, edges in sorted(ctx.assoc.items()):
        if len(edges) < 2 or len(p) != 4:
            continue
        es = path_edges(p)
        if not (ctx.mult[es[1]].m >= t and ctx.mult[es[0]].m < t and ctx.mult[es[2]].m < t):
            continue
        if count_paths_upto(g, p[0], p[-1], 3) != 1:
            raise LemmaViolation(f"{p} is not the unique short path between its ends")
        if set(edges) != set(es):
            raise LemmaViolation(f"{p} has unassociated edges")
        out.append(p)
    return out


@dataclass
class SBoundReport:
    s: int
    n: int
    e_g0: int
    di_g0: int
    group_total: int
    sizes: List[int]
    c1_in_p_t: int

    @property
    def disjoint_pairs_bound(self):
        return self.di_g0 >= self.group_total and 2 * self.group_total >= 4 * self.s - self.n

    def to_dict(self):
        return {
            "s": self.s,
            "e_g0": self.e_g0,
            "di_g0": self.di_g0,
            "sum_group_sizes": self.group_total,
            "two_s_minus_half_n": 2 * self.s - self.n / 2,
            "disjoint_pairs_bound": self.disjoint_pairs_bound,
            "c1_iterations_in_p_t": self.c1_in_p_t,
            "e_g0_le_s_plus_c1_in_p_t": self.e_g0 <= self.s + self.c1_in_p_t,
            "max_settled_in_g0": max(self.sizes, default=0),
        }


def verify_s_bound(trace, g0, p_t):
    """Check that G0's edges split by iteration with |S(i)| <= 1 except on paths of P_t, and di(G0) >= 2s - n/2."""
    sets = settled_in_g0(trace, g0)
    sizes = [len(s) for s in sets]
    if sum(sizes) != g0.m:
        raise LemmaViolation(f"settled G0 edges {sum(sizes)} != e(G0) = {g0.m}")
    p_t = set(p_t)
    c1_in = 0
    for it, size in zip(trace.iterations, sizes):
        in_pt = it.case == "C1" and it.P[0] in p_t
        c1_in += in_pt
        if size >= 2 and not in_pt:
            raise LemmaViolation(f"iteration {it.index} ({it.case}) keeps {size} edges in G0")
        if size > 2:
            raise LemmaViolation(f"iteration {it.index} keeps {size} > 2 edges in G0")
    _, di = disjoint_neighborhood_pairs(g0)
    total = sum(len(set(it.P) | set(it.P2)) for it in trace.iterations)
    rep = SBoundReport(trace.s, g0.n, g0.m, di, total, sizes, c1_in)
    if not rep.disjoint_pairs_bound:
        raise LemmaViolation(f"di(G0) = {di}, sum = {total}, s = {trace.s}: di(G0) >= 2s - n/2 fails")
    if g0.m > trace.s + c1_in:
        raise LemmaViolation(f"e(G0) = {g0.m} > s + {c1_in}")
    return rep
