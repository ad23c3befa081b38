"""3-uniform hypergraphs with center/handle annotations, and the H1 -> H4 chain.

Starting from length-3 paths x-a-b-y (the set extracted by
:func:`diamcrit.cover.extract_p_t`), the chain produces a linear,
3-partite, triangle-free hypergraph while losing at most a factor 54t of
the edges. Every bound along the way is asserted; a failure raises
BoundViolation.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import BoundViolation

Triple = Tuple[int, int, int]


@dataclass
class Hypergraph3:
    """3-edges over vertices 0..n-1; ``center[i]`` and ``handle[i]`` belong to edge i."""

    n: int
    edges: List[Triple] = field(default_factory=list)
    center: List[int] = field(default_factory=list)
    handle: List[int] = field(default_factory=list)
    parts: Optional[np.ndarray] = None

    def add(self, triple, center, handle):
        self.edges.append(tuple(sorted(triple)))
        self.center.append(center)
        self.handle.append(handle)

    def __len__(self):
        return len(self.edges)

    def subgraph(self, keep):
        h = Hypergraph3(self.n, parts=self.parts)
        for i in keep:
            h.add(self.edges[i], self.center[i], self.handle[i])
        return h

    def pair_degrees(self):
        deg = defaultdict(int)
        for e in self.edges:
            for p in itertools.combinations(e, 2):
                deg[p] += 1
        return deg

    def is_linear(self):
        return all(c <= 1 for c in self.pair_degrees().values())

    def is_partite(self, parts=None):
        parts = self.parts if parts is None else parts
        if parts is None:
            return False
        return all(len({int(parts[v]) for v in e}) == 3 for e in self.edges)

    def triangles(self):
        """All triangles {{1,2,3},{3,4,5},{5,6,1}}: three edges pairwise meeting in one vertex, six vertices total.

        Exhaustive over pairs of edges sharing a vertex, then over edges
        through the far vertices; equivalent to scanning every triple.
        """
        inc = defaultdict(list)
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        edge_sets = [set(e) for e in self.edges]
        found = set()
        for i, ei in enumerate(edge_sets):
            for v in ei:
                for j in inc[v]:
                    if j <= i or len(ei & edge_sets[j]) != 1:
                        continue
                    for a in ei - {v}:
                        for l in inc[a]:
                            if l in (i, j):
                                continue
                            el = edge_sets[l]
                            if len(el & ei) != 1 or len(el & edge_sets[j]) != 1:
                                continue
                            if len(ei | edge_sets[j] | el) == 6:
                                found.add(tuple(sorted((i, j, l))))
        return sorted(found)

    def triangles_brute(self):
        out = []
        sets = [set(e) for e in self.edges]
        for i, j, l in itertools.combinations(range(len(sets)), 3):
            a, b, c = sets[i], sets[j], sets[l]
            if len(a & b) == 1 and len(b & c) == 1 and len(a & c) == 1 and len(a | b | c) == 6:
                out.append((i, j, l))
        return out

    def to_dict(self):
        return {
            "n": self.n,
            "edges": [
                {"edge": list(e), "center": c, "handle": h}
                for e, c, h in zip(self.edges, self.center, self.handle)
            ],
        }


@dataclass
class ChainReport:
    t: int
    seed: int
    sizes: Tuple[int, int, int, int]
    h1_max_overlap: int
    h2_linear: bool
    h3_partite: bool
    h3_linear: bool
    h3_attempts: int
    h3_derandomized: bool
    h4_class: Tuple[int, int]
    h4_linear: bool
    h4_triangle_free: bool

    @property
    def bounds(self):
        e1, e2, e3, e4 = self.sizes
        return {
            "h2_ge_h1_over_2t": 2 * self.t * e2 >= e1,
            "h3_ge_2_9_h2": 9 * e3 >= 2 * e2,
            "h4_ge_h3_over_6": 6 * e4 >= e3,
            "p_t_le_54t_h4": e1 <= 54 * self.t * e4,
        }

    def to_dict(self):
        e1, e2, e3, e4 = self.sizes
        return {
            "t": self.t,
            "seed": self.seed,
            "h1": e1,
            "h2": e2,
            "h3": e3,
            "h4": e4,
            "h1_max_two_vertex_overlaps": self.h1_max_overlap,
            "h2_linear": self.h2_linear,
            "h3_partite": self.h3_partite,
            "h3_linear": self.h3_linear,
            "h3_attempts": self.h3_attempts,
            "h3_derandomized": self.h3_derandomized,
            "h4_handle_center_parts": list(self.h4_class),
            "h4_linear": self.h4_linear,
            "h4_triangle_free": self.h4_triangle_free,
            "bounds": self.bounds,
        }


def _rainbow(edges, labels):
    return [i for i, e in enumerate(edges) if len({int(labels[v]) for v in e}) == 3]


def _derandomized_partition(n, edges):
    """Greedy conditional expectations: final rainbow count >= (2/9)|E|."""
    labels = np.full(n, -1, dtype=np.int64)
    inc = defaultdict(list)
    for e in edges:
        for v in e:
            inc[v].append(e)

    def prob(e):
        fixed = [int(labels[v]) for v in e if labels[v] >= 0]
        if len(set(fixed)) < len(fixed):
            return 0.0
        return (1.0, 1 / 3, 2 / 9, 2 / 9)[3 - len(fixed)]

    for v in range(n):
        best, best_gain = 0, -1.0
        for lab in range(3):
            labels[v] = lab
            gain = sum(prob(e) for e in inc[v])
            if gain > best_gain + 1e-12:
                best, best_gain = lab, gain
        labels[v] = best
    return labels


def hypergraph_chain(p_t, t, seed=0, n=None, max_resamples=1000):
    """Build H1..H4 from length-3 paths and assert every bound.

    H1 takes {x, a, y} from x-a-b-y (center a, handle x). H2 is the greedy
    linear subfamily in insertion order. H3 keeps the rainbow edges of a
    seeded uniform 3-coloring (PCG64), resampled until 9|E(H3)| >= 2|E(H2)|,
    with a conditional-expectation coloring as fallback. H4 keeps the
    largest of the six (handle part, center part) classes; parts are then
    relabelled so handles sit in V1 and centers in V2.
    """
    t = int(t)
    if n is None:
        n = 1 + max((v for p in p_t for v in p), default=-1)
    h1 = Hypergraph3(n)
    for x, a, _b, y in p_t:
        h1.add((x, a, y), a, x)
    pdeg = h1.pair_degrees()
    overlap = 0
    for e in h1.edges:
        meets = sum(pdeg[p] - 1 for p in itertools.combinations(e, 2))
        overlap = max(overlap, meets)
    if overlap > max(0, 2 * t - 2):
        raise BoundViolation(f"an H1 edge meets {overlap} others in two vertices, above 2t-2 = {2 * t - 2}")

    used = set()
    keep = []
    for i, e in enumerate(h1.edges):
        pairs = list(itertools.combinations(e, 2))
        if any(p in used for p in pairs):
            continue
        used.update(pairs)
        keep.append(i)
    h2 = h1.subgraph(keep)
    h2_linear = h2.is_linear()
    if not h2_linear or 2 * t * len(h2) < len(h1):
        raise BoundViolation(f"H2 has {len(h2)} edges from {len(h1)} (t = {t}), linear = {h2_linear}")

    rng = np.random.Generator(np.random.PCG64(seed))
    derand = False
    attempts = 0
    while True:
        attempts += 1
        labels = rng.integers(0, 3, size=n)
        rainbow = _rainbow(h2.edges, labels)
        if 9 * len(rainbow) >= 2 * len(h2):
            break
        if attempts >= max_resamples:
            derand = True
            labels = _derandomized_partition(n, h2.edges)
            rainbow = _rainbow(h2.edges, labels)
            break
    h3 = h2.subgraph(rainbow)
    h3.parts = labels
    h3_partite, h3_linear = h3.is_partite(), h3.is_linear()
    if not (h3_partite and h3_linear) or 9 * len(h3) < 2 * len(h2):
        raise BoundViolation(f"H3 has {len(h3)} edges from {len(h2)}")

    best = None
    for hp, cp in itertools.permutations(range(3), 2):
        cls = [i for i in range(len(h3)) if labels[h3.handle[i]] == hp and labels[h3.center[i]] == cp]
        if best is None or len(cls) > len(best[2]):
            best = (hp, cp, cls)
    hp, cp, cls = best
    third = 3 - hp - cp
    relabel = np.array([0, 0, 0])
    relabel[hp], relabel[cp], relabel[third] = 1, 2, 3
    h4 = h3.subgraph(cls)
    h4.parts = relabel[labels]
    h4_linear = h4.is_linear()
    h4_tri_free = not h4.triangles()
    if 6 * len(h4) < len(h3) or not h4_linear or not h4_tri_free:
        raise BoundViolation(
            f"H4 has {len(h4)} edges from {len(h3)}, linear = {h4_linear}, triangle-free = {h4_tri_free}"
        )
    report = ChainReport(
        t, seed, (len(h1), len(h2), len(h3), len(h4)), overlap, h2_linear,
        h3_partite, h3_linear, attempts, derand, (hp + 1, cp + 1), h4_linear, h4_tri_free,
    )
    if not all(report.bounds.values()):
        raise BoundViolation(f"chain bounds failed: {report.bounds}")
    return h1, h2, h3, h4, report
