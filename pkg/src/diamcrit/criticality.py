"""Everything built on "deleting an edge pushes a distance above k".

A pair {x, y} and an edge e are *k-associated* when d(x, y) <= k but
d_{G-e}(x, y) > k. A pair with at least one associated edge is *critical*;
its *critical path* is the canonical shortest path from
:func:`~diamcrit.metric.canonical_shortest_path` (smallest-index neighbor
first), which fixes every downstream choice.

Operations that assume criticality raise typed errors instead of returning
garbage when the assumption fails.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from ._bits import iter_bits
from .exceptions import (
    ChargingViolation,
    CountingViolation,
    InternalInvariant,
    NotATriangle,
    NotFound,
    OutOfRange,
)
from .graph import Graph, degree_square_sum
from .metric import (
    INF,
    bfs_layers,
    deletion_scan,
    diameter,
    distance,
    distance_without_edge,
    edge_on_all_shortest,
)

Pair = Tuple[int, int]
Path = Tuple[int, ...]


def _pair(x, y):
    return (x, y) if x < y else (y, x)


def path_edges(path):
    return [_pair(a, b) for a, b in zip(path, path[1:])]


def normalize_path(path):
    """Orient a path so its first vertex is the smaller endpoint."""
    path = tuple(path)
    return path if path[0] <= path[-1] else path[::-1]


def edge_lookup(g):
    return {e: i for i, e in enumerate(g.edges)}


@dataclass(frozen=True)
class CriticalPathRecord:
    pair: Pair
    path: Path
    assoc_edges: Tuple[Pair, ...]

    @property
    def length(self):
        return len(self.path) - 1


class TwoCriticalRecord(NamedTuple):
    pair: Pair
    path: Path


class EdgeMultiplicity(NamedTuple):
    p1: int
    p2: int

    @property
    def m(self):
        return self.p1 + self.p2


@dataclass
class CriticalityVerdict:
    """Outcome of :func:`is_diameter_k_critical`; truthy iff critical."""

    critical: bool
    k: int
    diameter: float
    witness_edge: Optional[Pair] = None
    reason: str = ""

    def __bool__(self):
        return self.critical

    def to_dict(self):
        return {
            "critical": self.critical,
            "k": self.k,
            "diameter": None if self.diameter == INF else self.diameter,
            "witness_edge": list(self.witness_edge) if self.witness_edge else None,
            "reason": self.reason,
        }


# -- association ------------------------------------------------------------

def k_associated(g, k, pair, e):
    """True iff d(x, y) <= k and d_{G-e}(x, y) > k."""
    x, y = pair
    if x == y:
        raise OutOfRange("pair endpoints must differ")
    if distance(g, x, y) > k:
        return False
    return distance_without_edge(g, x, y, e, limit=k) > k


def is_diameter_k_critical(g, k):
    """Exhaustive per-edge criticality check.

    Returns a :class:`CriticalityVerdict`. On failure the witness is either
    the diameter mismatch (``reason == "diameter"``) or the first edge, in
    edge-index order, whose deletion leaves the diameter at ``k``. When the
    diameter is below ``k`` the witness is the first edge whose deletion
    keeps it at most ``k``, if any.
    """
    if g.n < 2:
        return CriticalityVerdict(False, k, 0 if g.n == 1 else INF, None, "diameter")
    d = diameter(g)
    if d != k:
        witness = None
        if d < k:
            witness = next((e for e in g.edges if diameter(g.without_edge(*e)) <= k), None)
        return CriticalityVerdict(False, k, d, witness, "diameter")
    n = g.n
    confirmed = set()

    def skip(u, v):
        return (u * n + v if u < v else v * n + u) in confirmed

    for _x, u, v, far in deletion_scan(g, k, skip=skip):
        if far:
            confirmed.add(u * n + v if u < v else v * n + u)
            if len(confirmed) == g.m:
                break
    if len(confirmed) == g.m:
        return CriticalityVerdict(True, k, d)
    for u, v in g.edges:
        if u * n + v not in confirmed:
            return CriticalityVerdict(False, k, d, (u, v), "edge")
    raise InternalInvariant("confirmed-edge bookkeeping out of sync")


# -- critical structure -----------------------------------------------------

@dataclass
class CriticalStructure:
    """Critical pairs of ``g`` at association level ``k``.

    ``pairs`` maps each critical pair to its record; ``by_edge[i]`` lists the
    records associated with edge ``i`` (sorted by pair). Unpacks as
    ``pairs, by_edge``.
    """

    g: Graph
    k: int
    pairs: Dict[Pair, CriticalPathRecord]
    by_edge: List[List[CriticalPathRecord]]
    index: Dict[Pair, int] = field(repr=False, default_factory=dict)

    def __iter__(self):
        yield self.pairs
        yield self.by_edge

    def p1(self, e):
        return self.by_edge[self.index[_pair(*e)]]

    def to_dict(self, two_critical=None):
        """JSON-ready dump with per-edge p1/p2; 2-critical paths are computed if not given."""
        if two_critical is None:
            two_critical = two_critical_paths(self.g)
        p2 = _p2_counts(self.g, two_critical, self.index)
        return {
            "pairs": [
                {"pair": list(r.pair), "path": list(r.path), "assoc_edges": [list(e) for e in r.assoc_edges]}
                for _, r in sorted(self.pairs.items())
            ],
            "edges": [
                {"edge": list(e), "p1": len(self.by_edge[i]), "p2": int(p2[i])}
                for i, e in enumerate(self.g.edges)
            ],
        }


def count_paths_upto(g, x, y, max_len):
    """Number of simple (x, y)-paths with at most ``max_len`` edges (brute force)."""
    rows = g.rows
    count = 0
    stack = [(x, 1 << x, 0)]
    while stack:
        cur, seen, length = stack.pop()
        if cur == y:
            count += 1
            continue
        if length == max_len:
            continue
        for w in iter_bits(rows[cur] & ~seen):
            stack.append((w, seen | (1 << w), length + 1))
    return count


def critical_structure(g, k, check=True):
    """All critical pairs, their canonical paths and associated edges.

    Association is computed in one pass of the deletion kernel: for each
    source x and each edge uv that is the unique BFS parent link of v, the
    vertices y that end up beyond distance k are exactly the partners of x
    associated with uv.
    """
    index = edge_lookup(g)
    assoc = defaultdict(set)
    for x, u, v, far in deletion_scan(g, k, truncate=True):
        if not far:
            continue
        e = _pair(u, v)
        for y in iter_bits(far >> (x + 1)):
            assoc[(x, x + 1 + y)].add(e)
    layer_cache = {}
    rows = g.rows

    def path_between(x, y):
        layers = layer_cache.get(y)
        if layers is None:
            layers = layer_cache[y] = bfs_layers(g, y, max_depth=k)
        level = next(j for j, layer in enumerate(layers) if (layer >> x) & 1)
        path = [x]
        cur = x
        for j in range(level - 1, -1, -1):
            step = rows[cur] & layers[j]
            cur = (step & -step).bit_length() - 1
            path.append(cur)
        return tuple(path)

    pairs = {}
    by_edge = [[] for _ in range(g.m)]
    for pair in sorted(assoc):
        path = path_between(*pair)
        edges = tuple(sorted(assoc[pair], key=index.__getitem__))
        rec = CriticalPathRecord(pair, path, edges)
        pairs[pair] = rec
        for e in edges:
            by_edge[index[e]].append(rec)
        if check:
            on_path = set(path_edges(path))
            if not set(edges) <= on_path:
                raise InternalInvariant(f"associated edge off the critical path of {pair}")
            if rec.length > k:
                raise InternalInvariant(f"critical path of {pair} longer than {k}")
            if len(edges) >= 2 and k <= 3 and count_paths_upto(g, pair[0], pair[1], k) != 1:
                raise InternalInvariant(f"critical path of {pair} is not the unique short path")
    return CriticalStructure(g, k, pairs, by_edge, index)


def two_critical_paths(g):
    """Pairs joined by exactly one path of length at most 2."""
    rows = g.rows
    out = []
    for x in range(g.n):
        rx = rows[x]
        for y in range(x + 1, g.n):
            common = rx & rows[y]
            if (rx >> y) & 1:
                if not common:
                    out.append(TwoCriticalRecord((x, y), (x, y)))
            elif common and not common & (common - 1):
                out.append(TwoCriticalRecord((x, y), (x, common.bit_length() - 1, y)))
    return out


def _p2_counts(g, two_critical, index):
    p2 = np.zeros(g.m, dtype=np.int64)
    for rec in two_critical:
        for e in path_edges(rec.path):
            p2[index[e]] += 1
    return p2


def multiplicities(g, k=3, structure=None, two_critical=None):
    """Per-edge multiplicity: |critical paths associated| + |2-critical paths through|.

    ``k`` is the association threshold. The covering machinery always uses 3,
    which is the correct reading for every diameter at least 3.
    """
    if structure is None:
        structure = critical_structure(g, k)
    if two_critical is None:
        two_critical = two_critical_paths(g)
    p2 = _p2_counts(g, two_critical, structure.index)
    return {
        e: EdgeMultiplicity(len(structure.by_edge[i]), int(p2[i]))
        for i, e in enumerate(g.edges)
    }


# -- triangles, feet, arms --------------------------------------------------

def triangles(g):
    rows = g.rows
    out = []
    for x, y in g.edges:
        for z in iter_bits(rows[x] & rows[y] & ~((2 << y) - 1)):
            out.append((x, y, z))
    return out


def _check_triangle(g, T):
    x, y, z = sorted(T)
    if len({x, y, z}) != 3 or not (g.has_edge(x, y) and g.has_edge(y, z) and g.has_edge(x, z)):
        raise NotATriangle(f"{tuple(T)} is not a triangle")
    return x, y, z


def feet(g, T):
    """Feet of triangle T: v outside T with v-x-y the unique short (v, y)-path, x, y in T."""
    tri = _check_triangle(g, T)
    rows = g.rows
    tmask = sum(1 << t for t in tri)
    found = set()
    for x in tri:
        for y in tri:
            if x == y:
                continue
            xbit = 1 << x
            for v in iter_bits(rows[x] & ~rows[y] & ~tmask):
                if rows[v] & rows[y] == xbit:
                    found.add(v)
    return found


def feet_triples(g, T):
    """Triples {v, y, z}: v a foot of T adjacent to neither y nor z (y, z in T)."""
    tri = _check_triangle(g, T)
    out = set()
    for v in feet(g, T):
        touching = [t for t in tri if g.has_edge(v, t)]
        if len(touching) != 1:
            raise InternalInvariant(f"foot {v} of {tri} touches {len(touching)} triangle vertices")
        rest = tuple(sorted(t for t in tri if t != touching[0]))
        out.add(tuple(sorted((v,) + rest)))
    return out


def t3_star(g):
    """Triangles with at least three feet."""
    return [T for T in triangles(g) if len(feet(g, T)) >= 3]


def arms(g, e, within=None):
    """Outside vertices x' of 2-critical paths x'-x-y through e = xy.

    With ``within`` (a vertex set D), only edges inside D have arms and only
    arms outside D are reported.
    """
    x, y = g.edge_id(e)[1:]
    rows = g.rows
    if within is not None:
        within = set(within)
        if x not in within or y not in within:
            return set()
    out = set()
    for a, b in ((x, y), (y, x)):
        abit = 1 << a
        for w in iter_bits(rows[a] & ~rows[b] & ~(1 << b)):
            if rows[w] & rows[b] == abit:
                out.add(w)
    if within is not None:
        out -= within
    return out


# -- matched pairs ----------------------------------------------------------

def matched(g, pair, e):
    """True iff e touches x or y and lies on every shortest (x, y)-path."""
    x, y = pair
    u, v = g.edge_id(e)[1:]
    if not ({u, v} & {x, y}):
        return False
    if distance(g, x, y) == INF:
        return False
    return edge_on_all_shortest(g, x, y, e)


@dataclass
class MatchedCounts:
    per_pair: Dict[Pair, int]
    per_edge: np.ndarray
    total: int
    min_required: int

    def to_dict(self, g):
        return {
            "total": self.total,
            "max_per_pair": max(self.per_pair.values(), default=0),
            "min_per_edge": int(self.per_edge.min()) if len(self.per_edge) else None,
            "min_required": self.min_required,
            "n_squared": g.n * g.n,
            "edge_bound_3n2_over_k_holds": bool(len(self.per_edge) * self.min_required <= g.n * g.n),
        }


def matched_counts(g, k, check=True):
    """Count matched (pair, edge) incidences.

    An edge xw is matched with {x, y} exactly when w is the only neighbor of
    x one step closer to y, so every pair matches at most two edges. With
    ``check`` the per-edge lower bound ceil(k/3) is enforced (CountingViolation
    otherwise), as are ``m <= 3 n^2 / k`` and the pair bound.
    """
    rows = g.rows
    n = g.n
    index = edge_lookup(g)
    per_pair = defaultdict(set)
    for y in range(n):
        layers = bfs_layers(g, y)
        for j in range(1, len(layers)):
            closer = layers[j - 1]
            for x in iter_bits(layers[j]):
                step = rows[x] & closer
                if not step & (step - 1):
                    per_pair[_pair(x, y)].add(_pair(x, step.bit_length() - 1))
    per_edge = np.zeros(g.m, dtype=np.int64)
    counts = {}
    for pair, edges in per_pair.items():
        counts[pair] = len(edges)
        for e in edges:
            per_edge[index[e]] += 1
    need = math.ceil(k / 3)
    result = MatchedCounts(counts, per_edge, int(per_edge.sum()), need)
    if check:
        if any(c > 2 for c in counts.values()):
            raise CountingViolation("a pair matched more than two edges")
        if result.total > n * n:
            raise CountingViolation("more matched incidences than n^2")
        if g.m and per_edge.min() < need:
            i = int(per_edge.argmin())
            raise CountingViolation(
                f"edge {g.edges[i]} matched with {int(per_edge[i])} pairs, need {need}"
            )
        if 3 * n * n < k * g.m:
            raise CountingViolation(f"m = {g.m} exceeds 3n^2/k")
    return result


def find_k3_associated_path(g, k, e):
    """A path of length ceil(k/3) through e whose endpoints are ceil(k/3)-associated with e.

    Candidates are enumerated exhaustively and tried in lexicographic order
    (paths oriented from the smaller endpoint). NotFound means the input is
    not diameter-k-critical.
    """
    eid = g.edge_id(e)
    a, b = eid.u, eid.v
    L = math.ceil(k / 3)
    rows = g.rows

    def walks(start, avoid, steps):
        out = []
        stack = [((start,), avoid | (1 << start))]
        while stack:
            seq, seen = stack.pop()
            if len(seq) - 1 == steps:
                out.append(seq)
                continue
            for w in iter_bits(rows[seq[-1]] & ~seen):
                stack.append((seq + (w,), seen | (1 << w)))
        return out

    candidates = set()
    for left in range(L):
        right = L - 1 - left
        for p, q in ((a, b), (b, a)):
            for lw in walks(p, 1 << q, left):
                used = 0
                for t in lw:
                    used |= 1 << t
                for rw in walks(q, used, right):
                    candidates.add(normalize_path(lw[::-1] + rw))
    for path in sorted(candidates):
        x, y = path[0], path[-1]
        if distance_without_edge(g, x, y, eid, limit=L) > L:
            return path
    raise NotFound(f"no {L}-associated path through edge {(a, b)}")


# -- triangle charging ------------------------------------------------------

@dataclass
class ChargingReport:
    k: int
    triangles: int
    charged_triples: int
    min_charge: Optional[int]
    t1: int
    t3: int
    sum_d2: int
    nm: int

    @property
    def certificate(self):
        return self.t1 >= self.charged_triples >= self.k * self.triangles

    def to_dict(self):
        return {
            "k": self.k,
            "triangles": self.triangles,
            "charged_triples": self.charged_triples,
            "min_charge": self.min_charge,
            "t1": self.t1,
            "t3": self.t3,
            "t1_ge_k_t3": self.certificate,
            "sum_d2": self.sum_d2,
            "nm": self.nm,
            "sum_d2_le_nm": self.sum_d2 <= self.nm,
        }


def _edges_in_triple(rows, a, b, c):
    return ((rows[a] >> b) & 1) + ((rows[a] >> c) & 1) + ((rows[b] >> c) & 1)


def verify_triangle_charging(g, k, structure=None):
    """Charge each triangle with >= k one-edge triples, disjointly across triangles.

    For triangle {x, y, z} (sorted) take the lexicographically least critical
    paths through each of its edges. On the path through xy, take the
    neighbor t of x (or of y if x is an end of that path). Each vertex s of
    the path through the other edge {b, z} (b the endpoint of xy opposite t's
    anchor) together with t yields a triple with exactly one edge. Any failed
    step raises ChargingViolation.
    """
    if structure is None:
        structure = critical_structure(g, k)
    rows = g.rows

    def least(e):
        recs = structure.p1(e)
        if not recs:
            raise ChargingViolation(f"edge {e} has no associated critical path")
        return min(normalize_path(r.path) for r in recs)

    owner = {}
    tris = triangles(g)
    min_charge = None
    for T in tris:
        x, y, z = T
        paths = {(x, y): least((x, y)), (y, z): least((y, z)), (x, z): least((x, z))}
        for e, p in paths.items():
            if len(p) - 1 != k:
                raise ChargingViolation(f"critical path {p} through {e} in triangle {T} has length {len(p) - 1} != {k}")
        p1 = paths[(x, y)]
        ix, iy = p1.index(x), p1.index(y)
        tx = [p1[i] for i in (ix - 1, ix + 1) if 0 <= i < len(p1) and p1[i] != y]
        ty = [p1[i] for i in (iy - 1, iy + 1) if 0 <= i < len(p1) and p1[i] != x]
        if tx:
            a, b, t = x, y, tx[0]
        elif ty:
            a, b, t = y, x, ty[0]
        else:
            raise ChargingViolation(f"path {p1} has no edge adjacent to {(x, y)}")
        if t == z:
            raise ChargingViolation(f"triangle {T}: anchor vertex equals z")
        p2 = paths[_pair(b, z)]
        if t in p2:
            raise ChargingViolation(f"triangle {T}: anchor {t} lies on {p2}")
        ib, iz = p2.index(b), p2.index(z)
        if ib > iz:
            p2 = p2[::-1]
            ib, iz = len(p2) - 1 - ib, len(p2) - 1 - iz
        charged = {tuple(sorted((t, b, z)))}
        for pos, s in enumerate(p2):
            if s in (b, z):
                continue
            if s == a:
                raise ChargingViolation(f"triangle {T}: {a} on {p2}")
            other = (a, z) if pos < ib else (a, b)
            charged.add(tuple(sorted((s,) + other)))
        for trip in charged:
            if _edges_in_triple(rows, *trip) != 1:
                raise ChargingViolation(f"triple {trip} charged to {T} is not in T1")
            if trip in owner:
                raise ChargingViolation(f"triple {trip} charged to both {owner[trip]} and {T}")
            owner[trip] = T
        if len(charged) < k:
            raise ChargingViolation(f"triangle {T} charged only {len(charged)} < {k} triples")
        min_charge = len(charged) if min_charge is None else min(min_charge, len(charged))
    from .stats import triple_counts

    tc = triple_counts(g)
    report = ChargingReport(k, len(tris), len(owner), min_charge, tc.t1, tc.t3, degree_square_sum(g), g.n * g.m)
    if not report.certificate:
        raise ChargingViolation("|T1| >= k|T3| certificate failed")
    return report


def assoc_ratio(g):
    return Fraction(degree_square_sum(g), g.n * g.m) if g.m else None
