"""Exhaustive enumeration (n <= 8) and local search for diameter-critical graphs.

Small graphs are encoded as ints: bit ``j*(j-1)/2 + i`` is the pair
(i, j), i < j (the graph6 bit order), so a code on n-1 vertices is a prefix
of every extension to n vertices. The canonical form is the minimum code
over all n! relabelings, evaluated with 7-bit lookup tables per
permutation.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np

from .criticality import is_diameter_k_critical
from .exceptions import BadParams, InternalInvariant, TheoremViolation, TooLarge
from .graph import Graph, build, complete_bipartite, degree_square_sum, to_graph6
from .metric import diameter

log = logging.getLogger(__name__)

MAX_EXHAUSTIVE_N = 8
BATCH = 1 << 18


def pair_bit(i, j):
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i


def _pairs(n):
    return [(i, j) for j in range(n) for i in range(j)]


def code_of(g):
    code = 0
    for u, v in g.edges:
        code |= 1 << pair_bit(u, v)
    return code


def graph_of(code, n):
    return build(n, [p for b, p in enumerate(_pairs(n)) if (code >> b) & 1])


# -- batched primitives on codes --------------------------------------------

def _rows_batch(codes, n):
    """(B, n) uint16 adjacency rows for an array of codes."""
    rows = np.zeros((len(codes), n), dtype=np.uint16)
    for b, (i, j) in enumerate(_pairs(n)):
        bit = ((codes >> b) & 1).astype(np.uint16)
        rows[:, i] |= bit << j
        rows[:, j] |= bit << i
    return rows


def _within(rows, n, k):
    """Boolean per graph: every pair at distance <= k."""
    full = (1 << n) - 1
    eye = (np.uint16(1) << np.arange(n, dtype=np.uint16))[None, :]
    reach = rows | eye
    for _ in range(k - 1):
        new = reach.copy()
        for u in range(n):
            has = ((reach >> u) & 1).astype(bool)
            new |= np.where(has, rows[:, u][:, None], 0).astype(np.uint16)
        if (new == reach).all():
            break
        reach = new
    return (reach == full).all(axis=1)


def critical_mask(codes, n, k):
    """Boolean mask of codes whose graph is diameter-k-critical."""
    codes = np.asarray(codes, dtype=np.int64)
    if n < 2 or k < 1:
        return np.zeros(len(codes), dtype=bool)
    rows = _rows_batch(codes, n)
    ok = _within(rows, n, k)
    if k > 1:
        ok &= ~_within(rows, n, k - 1)
    for b, (i, j) in enumerate(_pairs(n)):
        has = ((codes >> b) & 1).astype(bool) & ok
        idx = np.flatnonzero(has)
        if not len(idx):
            continue
        sub = rows[idx].copy()
        sub[:, i] &= ~np.uint16(1 << j)
        sub[:, j] &= ~np.uint16(1 << i)
        ok[idx[_within(sub, n, k)]] = False
    return ok


def _perm_tables(perm, n):
    pairs = _pairs(n)
    weights = np.array([1 << pair_bit(perm[i], perm[j]) for i, j in pairs], dtype=np.int64)
    nchunks = (len(pairs) + 6) // 7
    vals = ((np.arange(128)[:, None] >> np.arange(7)) & 1).astype(np.int64)
    tables = []
    for c in range(nchunks):
        w = np.zeros(7, dtype=np.int64)
        part = weights[7 * c: 7 * c + 7]
        w[: len(part)] = part
        tables.append(vals @ w)
    return tables


def canonical_codes(codes, n):
    """Minimum code over all relabelings, for each code."""
    if n > MAX_EXHAUSTIVE_N:
        raise TooLarge(f"canonical form only for n <= {MAX_EXHAUSTIVE_N}")
    codes = np.asarray(codes, dtype=np.int64)
    if n <= 1 or not len(codes):
        return codes.copy()
    nchunks = (n * (n - 1) // 2 + 6) // 7
    chunks = [(codes >> (7 * c)) & 127 for c in range(nchunks)]
    best = codes.copy()
    for perm in itertools.permutations(range(n)):
        tables = _perm_tables(perm, n)
        cand = tables[0][chunks[0]]
        for c in range(1, nchunks):
            cand |= tables[c][chunks[c]]
        np.minimum(best, cand, out=best)
    return best


def canonical_form(g):
    """Canonical code of a graph with at most 8 vertices."""
    return int(canonical_codes(np.array([code_of(g)]), g.n)[0])


def unlabeled_graphs(n):
    """Canonical codes of all graphs on n vertices up to isomorphism (n <= 8)."""
    if n > MAX_EXHAUSTIVE_N:
        raise TooLarge(f"n = {n} above {MAX_EXHAUSTIVE_N}")
    reps = np.array([0], dtype=np.int64)
    for m in range(2, n + 1):
        reps = np.unique(canonical_codes(_extend(reps, m), m))
    return reps


def _extend(reps, n):
    """All codes on n vertices whose first n-1 vertices induce a code in ``reps``."""
    shift = (n - 1) * (n - 2) // 2
    subsets = np.arange(1 << (n - 1), dtype=np.int64) << shift
    return (reps[:, None] | subsets[None, :]).ravel()


# -- results ----------------------------------------------------------------

@dataclass
class SearchResult:
    n: int
    k: int
    mode: str
    best_m: Optional[int]
    best_ratio: Optional[Fraction]
    witnesses: List[str]
    ratio_witnesses: List[str]
    count: Optional[int] = None
    graphs: List[str] = field(default_factory=list)
    alarms: List[str] = field(default_factory=list)
    history: List[int] = field(default_factory=list)

    def to_dict(self):
        return {
            "n": self.n,
            "k": self.k,
            "mode": self.mode,
            "best_m": self.best_m,
            "best_ratio": None if self.best_ratio is None else f"{self.best_ratio.numerator}/{self.best_ratio.denominator}",
            "best_ratio_float": None if self.best_ratio is None else float(self.best_ratio),
            "witnesses": self.witnesses,
            "ratio_witnesses": self.ratio_witnesses,
            "count": self.count,
            "graphs": self.graphs,
            "alarms": self.alarms,
        }


def _g6(g):
    return to_graph6(g).decode()


def _ratio(g):
    return Fraction(degree_square_sum(g), g.n * g.m) if g.m else Fraction(0)


def _summarize(n, k, mode, graphs, count=None):
    if not graphs:
        return SearchResult(n, k, mode, None, None, [], [], count)
    best_m = max(g.m for g in graphs)
    best_r = max(_ratio(g) for g in graphs)
    return SearchResult(
        n, k, mode, best_m, best_r,
        [_g6(g) for g in graphs if g.m == best_m],
        [_g6(g) for g in graphs if _ratio(g) == best_r],
        count,
        [_g6(g) for g in graphs],
    )


def enumerate_critical(n, k):
    """All diameter-k-critical graphs on n vertices, up to isomorphism.

    n <= 7 filters all 2^C(n,2) labelled graphs; n = 8 extends every
    unlabeled 7-vertex graph by one vertex. Every reported graph is
    re-verified with the exact per-edge checker.
    """
    n, k = int(n), int(k)
    if n > MAX_EXHAUSTIVE_N:
        raise TooLarge(f"exhaustive enumeration is capped at n = {MAX_EXHAUSTIVE_N}")
    if n < 2 or k < 1:
        return SearchResult(n, k, "exhaustive", None, None, [], [], 0)
    found = []
    if n <= 7:
        total = 1 << (n * (n - 1) // 2)
        for lo in range(0, total, BATCH):
            codes = np.arange(lo, min(total, lo + BATCH), dtype=np.int64)
            found.append(codes[critical_mask(codes, n, k)])
    else:
        base = unlabeled_graphs(n - 1)
        for lo in range(0, len(base), 2048):
            codes = _extend(base[lo: lo + 2048], n)
            found.append(codes[critical_mask(codes, n, k)])
    crit = np.concatenate(found) if found else np.zeros(0, dtype=np.int64)
    classes = np.unique(canonical_codes(crit, n))
    graphs = [graph_of(int(c), n) for c in classes]
    for g in graphs:
        if not is_diameter_k_critical(g, k):
            raise InternalInvariant(f"enumerated graph {_g6(g)} fails the exact check")
    res = _summarize(n, k, "exhaustive", graphs, len(graphs))
    if k == 2 and res.best_m is not None and res.best_m != n * n // 4:
        raise TheoremViolation(f"n = {n}: extremal diameter-2-critical graph has {res.best_m} != floor(n^2/4) edges")
    return res


# -- local search -----------------------------------------------------------

def seed_graph(n, k):
    """Starting construction for local search."""
    from .constructions import build_clique_matching, build_layered_dk

    if k == 1:
        return build(n, itertools.combinations(range(n), 2))
    if k == 2:
        return complete_bipartite(n // 2, n - n // 2)
    if k == 3 and n % 2 == 0 and n >= 6:
        return build_clique_matching(n)
    b = max(1, n // (2 * (k - 1)))
    c = n - 1 - b * (k - 1)
    if c < 1:
        b = max(1, (n - 2) // (k - 1))
        c = n - 1 - b * (k - 1)
    if b < 1 or c < 1:
        raise BadParams(f"no seed construction with n = {n}, k = {k}")
    return build_layered_dk(k, 1, b, c)


def repair(g, k):
    """Delete non-critical edges (first witness each round) until g is critical.

    Returns None if the diameter is not k to begin with.
    """
    if g.n < 2 or diameter(g) != k:
        return None
    while True:
        verdict = is_diameter_k_critical(g, k)
        if verdict:
            return g
        if verdict.reason != "edge":
            return None
        g = g.without_edge(*verdict.witness_edge)


def local_search(n, k, objective="edges", seed=0, budget=100, start=None, max_n=60):
    """Hill climbing over single edge flips with deletion-only repair.

    A move is accepted when the repaired graph is critical and its objective
    is at least the current one. Deterministic given ``seed``.
    """
    n, k = int(n), int(k)
    if n > max_n:
        raise TooLarge(f"local search capped at n = {max_n}")
    if objective not in ("edges", "ratio"):
        raise BadParams("objective must be 'edges' or 'ratio'")
    score = (lambda h: h.m) if objective == "edges" else _ratio
    cur = start if start is not None else seed_graph(n, k)
    if not is_diameter_k_critical(cur, k):
        raise BadParams("start graph is not diameter-k-critical")
    rng = np.random.Generator(np.random.PCG64(seed))
    best = cur
    alarms = []
    history = [cur.m]
    for _ in range(int(budget)):
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        cand = cur.without_edge(u, v) if cur.has_edge(u, v) else cur.with_edge(u, v)
        cand = repair(cand, k)
        if cand is None or score(cand) < score(cur):
            history.append(cur.m)
            continue
        cur = cand
        history.append(cur.m)
        if k >= 3 and k * cur.m > 3 * n * n:
            raise TheoremViolation(f"verified diameter-{k}-critical graph with m = {cur.m} > 3n^2/k")
        if k == 2 and 4 * cur.m > n * n:
            w = _g6(cur)
            log.warning("diameter-2-critical graph above n^2/4: %s", w)
            alarms.append(w)
        if score(cur) > score(best):
            best = cur
    if not is_diameter_k_critical(best, k):
        raise InternalInvariant("best graph fails re-verification")
    res = _summarize(n, k, "local", [best])
    res.alarms = alarms
    res.history = history
    return res
