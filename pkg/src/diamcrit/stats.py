"""Triple counts, degree statistics and the bound predicates.

All arithmetic is exact: Python ints for sums, ``Fraction`` for ratios.
Functions that only need ``n``, ``m`` and the degree-square sum also accept
an :class:`~diamcrit.constructions.ImplicitStats`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from ._bits import iter_bits
from .exceptions import LemmaViolation, OutOfRange, TheoremViolation
from .graph import degree_square_sum, degrees


@dataclass(frozen=True)
class TripleCounts:
    t0: int
    t1: int
    t2: int
    t3: int

    def as_tuple(self):
        return (self.t0, self.t1, self.t2, self.t3)

    def residuals(self, n, m, deg):
        """Left minus right side of the three counting identities (all zero when consistent)."""
        deg = [int(d) for d in deg]
        return (
            m * (n - 2) - (3 * self.t3 + 2 * self.t2 + self.t1),
            sum(d * (d - 1) // 2 for d in deg) - (3 * self.t3 + self.t2),
            sum(d * d for d in deg) - m * n - (3 * self.t3 - self.t1),
        )


def triangle_count(g):
    rows = g.rows
    total = 0
    for x, y in g.edges:
        total += (rows[x] & rows[y]).bit_count()
    return total // 3


def triple_counts(g, method="fast"):
    """|T0|..|T3|: 3-sets of vertices inducing 0..3 edges.

    ``fast`` derives t2, t1, t0 from the triangle count through the
    counting identities; ``brute`` inspects every triple and exists as an
    independent check. Both re-verify all identities.
    """
    n, m = g.n, g.m
    if n < 3:
        raise OutOfRange("triple counts need at least 3 vertices")
    deg = degrees(g)
    if method == "fast":
        t3 = triangle_count(g)
        pairs_at = sum(int(d) * (int(d) - 1) // 2 for d in deg)
        t2 = pairs_at - 3 * t3
        t1 = m * (n - 2) - 3 * t3 - 2 * t2
        t0 = math.comb(n, 3) - t1 - t2 - t3
        tc = TripleCounts(t0, t1, t2, t3)
    elif method == "brute":
        rows = g.rows
        counts = [0, 0, 0, 0]
        for a, b, c in itertools.combinations(range(g.n), 3):
            counts[((rows[a] >> b) & 1) + ((rows[a] >> c) & 1) + ((rows[b] >> c) & 1)] += 1
        tc = TripleCounts(*counts)
    else:
        raise OutOfRange(f"unknown method {method!r}")
    if sum(tc.as_tuple()) != math.comb(n, 3) or any(tc.residuals(n, m, deg)) or min(tc.as_tuple()) < 0:
        raise LemmaViolation(f"triple counts {tc.as_tuple()} break the counting identities")
    return tc


def _nm_sd2(g):
    if hasattr(g, "rows"):
        return g.n, g.m, degree_square_sum(g)
    return g.n, g.m, g.sum_d2


@dataclass
class EdgeDegreeVerdict:
    n: int
    m: int
    sum_d2: int
    nm: int
    ratio: Optional[Fraction]
    conjecture_holds: bool
    below_six_fifths: bool
    theorem_applies: bool

    def to_dict(self):
        return {
            "sum_d2": self.sum_d2,
            "nm": self.nm,
            "ratio": _frac(self.ratio),
            "ratio_float": None if self.ratio is None else float(self.ratio),
            "sum_d2_le_nm": self.conjecture_holds,
            "sum_d2_le_six_fifths_nm": self.below_six_fifths,
            "k_ge_3": self.theorem_applies,
        }


def _frac(x):
    return None if x is None else f"{x.numerator}/{x.denominator}"


def check_edge_degree_bounds(g, k, critical=True):
    """Compare Σd² with nm and (6/5)nm.

    For k >= 3 on an input known to be diameter-k-critical (the default
    assumption) a violation is a bug and raises TheoremViolation.
    """
    n, m, sd2 = _nm_sd2(g)
    nm = n * m
    ratio = Fraction(sd2, nm) if nm else None
    v = EdgeDegreeVerdict(n, m, sd2, nm, ratio, sd2 <= nm, 5 * sd2 <= 6 * nm, k >= 3)
    if critical and k >= 3 and not v.conjecture_holds:
        raise TheoremViolation(f"Σd² = {sd2} > nm = {nm} on a diameter-{k}-critical input")
    return v


@dataclass
class EdgeCountVerdict:
    n: int
    m: int
    k: int
    le_3n2_over_k: bool
    le_n2_over_4: bool
    le_n2_over_6: Optional[bool]

    def to_dict(self):
        return {
            "m": self.m,
            "three_n2_over_k": _frac(Fraction(3 * self.n * self.n, self.k)),
            "m_le_3n2_over_k": self.le_3n2_over_k,
            "m_le_n2_over_4": self.le_n2_over_4,
            "m_le_n2_over_6": self.le_n2_over_6,
        }


def check_edge_count_bounds(g, k):
    """Exact comparisons of m with 3n²/k, n²/4 and, for k = 3, n²/6 (reported only)."""
    n, m, _ = _nm_sd2(g)
    return EdgeCountVerdict(
        n, m, k,
        k * m <= 3 * n * n,
        4 * m <= n * n,
        6 * m <= n * n if k == 3 else None,
    )


def disjoint_neighborhood_pairs(g):
    """Pairs {u, v} with N(u) ∩ N(v) = ∅, and their number.

    Every graph satisfies e(H) + di(H) <= n²/2; a breach raises LemmaViolation.
    """
    rows = g.rows
    out = []
    for u in range(g.n):
        ru = rows[u]
        for v in range(u + 1, g.n):
            if not ru & rows[v]:
                out.append((u, v))
    if 2 * (g.m + len(out)) > g.n * g.n:
        raise LemmaViolation(f"e + di = {g.m + len(out)} > n²/2")
    return out, len(out)


def t_light_paths(g, t, mult=None):
    """Length-2 2-critical paths whose two edges both have multiplicity < t."""
    from .criticality import multiplicities, path_edges, two_critical_paths

    two = two_critical_paths(g)
    if mult is None:
        mult = multiplicities(g, 3, two_critical=two)
    out = [
        rec.path for rec in two
        if len(rec.path) == 3 and all(mult[e].m < t for e in path_edges(rec.path))
    ]
    return len(out), out


@dataclass
class StatsReport:
    n: int
    m: int
    sum_d2: int
    avg_edge_degree: Optional[Fraction]
    ratio: Optional[Fraction]
    triples: Optional[TripleCounts]
    di: Optional[int]
    t3_star: Optional[int]
    degree_bounds: Optional[EdgeDegreeVerdict] = None
    count_bounds: Optional[EdgeCountVerdict] = None
    k: Optional[int] = None
    extra: Dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "sum_d2": self.sum_d2,
            "nm": self.n * self.m,
            "avg_edge_degree": _frac(self.avg_edge_degree),
            "ratio": _frac(self.ratio),
            "ratio_float": None if self.ratio is None else float(self.ratio),
            "triples": None if self.triples is None else dict(zip(("t0", "t1", "t2", "t3"), self.triples.as_tuple())),
            "di": self.di,
            "t3_star": self.t3_star,
            "degree_bounds": None if self.degree_bounds is None else self.degree_bounds.to_dict(),
            "count_bounds": None if self.count_bounds is None else self.count_bounds.to_dict(),
        }
        out.update(self.extra)
        return out


def stats_report(g, k=None, diameter_two_extras=True, critical=True):
    """Everything cheap to compute about ``g``; bound verdicts when ``k`` is given.

    t3_star is filled only when k == 2.
    """
    if not hasattr(g, "rows"):
        n, m, sd2 = _nm_sd2(g)
        return StatsReport(
            n, m, sd2,
            Fraction(sd2, m) if m else None,
            Fraction(sd2, n * m) if m else None,
            None, None, None,
            check_edge_degree_bounds(g, k, critical) if k is not None else None,
            check_edge_count_bounds(g, k) if k is not None else None,
            k,
        )
    n, m = g.n, g.m
    sd2 = degree_square_sum(g)
    triples = triple_counts(g) if n >= 3 else None
    _, di = disjoint_neighborhood_pairs(g)
    t3s = None
    if k == 2 and diameter_two_extras:
        from .criticality import t3_star

        t3s = len(t3_star(g))
    return StatsReport(
        n, m, sd2,
        Fraction(sd2, m) if m else None,
        Fraction(sd2, n * m) if m else None,
        triples, di, t3s,
        check_edge_degree_bounds(g, k, critical) if k is not None else None,
        check_edge_count_bounds(g, k) if k is not None else None,
        k,
    )


def brute_triple_counts_all(n):
    """Triple counts for every labelled graph on ``n <= 7`` vertices at once.

    Returns an (2^C(n,2), 4) int64 array indexed by edge code, where bit j of
    the code is the j-th pair in ``itertools.combinations(range(n), 2)``
    order. Used for exhaustive identity checks.
    """
    pairs = list(itertools.combinations(range(n), 2))
    npairs = len(pairs)
    if npairs > 21:
        raise OutOfRange("exhaustive triple counts only for n <= 7")
    codes = np.arange(1 << npairs, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(npairs)) & 1).astype(np.int8)
    pos = {p: j for j, p in enumerate(pairs)}
    out = np.zeros((len(codes), 4), dtype=np.int64)
    for a, b, c in itertools.combinations(range(n), 3):
        s = bits[:, pos[(a, b)]] + bits[:, pos[(a, c)]] + bits[:, pos[(b, c)]]
        out += np.eye(4, dtype=np.int64)[s]
    return out
