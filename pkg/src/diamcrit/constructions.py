"""Generators for the diameter-critical families, plus the seeded G(n, p) sampler.

Vertex layouts are fixed so edge indices are reproducible:

* ``build_d2_bip``: A = 0..n-1 carries g, B = n..2n-1 carries the
  complement, matching i <-> n+i.
* ``build_d2_trip``: as above plus C = 2n..2n+r-1 joined to all of B.
* ``build_layered_dk``: V0 = 0..a-1, then V1..V_{k-1} of size b each
  (chain j uses the j-th vertex of every middle layer), then Vk of size c.
* ``build_clique_matching``: clique on 0..n/2-1, matching i <-> i+n/2.

Random graphs use numpy's PCG64 bit generator seeded with the 64-bit seed.
Edges are produced by geometric gap skipping over the row-major upper
triangle (pair (i, j), i < j, has index i*n - i*(i+1)/2 + j - i - 1), with
gaps drawn in chunks of 2^16 via ``Generator.geometric(p)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .exceptions import BadParams, PreconditionFailed, SamplingExhausted
from .graph import Graph, build, complement, degree_square_sum, degrees
from .metric import INF, diameter

GAP_CHUNK = 1 << 16
MAX_ATTEMPTS = 100


def _check_d2_generator(g):
    if g.n == 0:
        raise PreconditionFailed("generator graph is empty")
    if diameter(g) > 2:
        raise PreconditionFailed("diameter(g) <= 2 fails")
    if diameter(complement(g)) > 2:
        raise PreconditionFailed("diameter(complement(g)) <= 2 fails")


def _d2_edges(g, r):
    n = g.n
    a = g.edge_array
    comp = complement(g).edge_array + n
    match = np.stack([np.arange(n), np.arange(n) + n], axis=1)
    parts = [a, comp, match]
    if r:
        b = np.repeat(np.arange(n, 2 * n), r)
        c = np.tile(np.arange(2 * n, 2 * n + r), n)
        parts.append(np.stack([b, c], axis=1))
    return np.concatenate(parts).astype(np.int64)


def build_d2_bip(g):
    """g on A, its complement on B, a perfect matching between them.

    Requires diam(g) <= 2 and diam(complement) <= 2 (PreconditionFailed
    otherwise). The output has m = C(n, 2) + n.
    """
    _check_d2_generator(g)
    return build(2 * g.n, _d2_edges(g, 0))


def build_d2_trip(g, r):
    """``build_d2_bip(g)`` plus r new vertices joined to every vertex of B."""
    r = int(r)
    if r < 0:
        raise BadParams("r must be non-negative")
    if r == 0:
        warnings.warn("r = 0 gives the two-part construction", stacklevel=2)
    _check_d2_generator(g)
    return build(2 * g.n + r, _d2_edges(g, r))


def build_layered_dk(k, a, b, c):
    """Layered graph with complete ends and b parallel chains; diameter-k-critical."""
    k, a, b, c = (int(v) for v in (k, a, b, c))
    if k < 3:
        raise BadParams("layered construction needs k >= 3")
    if min(a, b, c) < 1:
        raise BadParams("a, b, c must be positive")

    def layer(i):
        return np.arange(a + (i - 1) * b, a + i * b)

    v0 = np.arange(a)
    vk = np.arange(a + (k - 1) * b, a + (k - 1) * b + c)
    parts = [
        np.stack(np.meshgrid(v0, layer(1), indexing="ij"), -1).reshape(-1, 2),
        np.stack(np.meshgrid(layer(k - 1), vk, indexing="ij"), -1).reshape(-1, 2),
    ]
    for i in range(1, k - 1):
        parts.append(np.stack([layer(i), layer(i + 1)], axis=1))
    return build(a + (k - 1) * b + c, np.concatenate(parts))


def build_clique_matching(n):
    """Clique on n/2 vertices with a pendant edge at each; diameter-3-critical."""
    n = int(n)
    if n < 6 or n % 2:
        raise BadParams("clique-plus-matching needs an even n >= 6")
    h = n // 2
    iu = np.triu_indices(h, 1)
    clique = np.stack(iu, axis=1)
    match = np.stack([np.arange(h), np.arange(h) + h], axis=1)
    return build(n, np.concatenate([clique, match]))


# -- G(n, p) ----------------------------------------------------------------

def gnp_edge_chunks(n, p, seed):
    """Yield ``(k, 2)`` int64 edge arrays of a seeded G(n, p) sample, in row-major order."""
    n = int(n)
    if not 0 <= p <= 1:
        raise BadParams("p must lie in [0, 1]")
    total = n * (n - 1) // 2
    if total == 0 or p == 0:
        return
    offsets = np.array([i * n - i * (i + 1) // 2 for i in range(n)], dtype=np.int64)

    def to_pairs(idx):
        i = np.searchsorted(offsets, idx, side="right") - 1
        j = idx - offsets[i] + i + 1
        return np.stack([i, j], axis=1)

    if p == 1:
        step = 1 << 22
        for lo in range(0, total, step):
            yield to_pairs(np.arange(lo, min(total, lo + step), dtype=np.int64))
        return
    rng = np.random.Generator(np.random.PCG64(seed))
    pos = -1
    while True:
        gaps = rng.geometric(p, size=GAP_CHUNK)
        idx = pos + np.cumsum(gaps)
        pos = int(idx[-1])
        idx = idx[idx < total]
        if len(idx):
            yield to_pairs(idx)
        if pos >= total:
            return


def sample_gnp(n, p, seed):
    chunks = list(gnp_edge_chunks(n, p, seed))
    edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
    return build(n, edges)


def gnp_degrees(n, p, seed):
    """Degree sequence of ``sample_gnp(n, p, seed)`` without building the graph."""
    deg = np.zeros(n, dtype=np.int64)
    for chunk in gnp_edge_chunks(n, p, seed):
        deg += np.bincount(chunk.ravel(), minlength=n)
    return deg


def diameter_at_most_two(g):
    """Exact test of diam(g) <= 2, stopping at the first vertex whose 2-ball is short."""
    if g.n <= 1:
        return True
    rows = g.rows
    full = (1 << g.n) - 1
    for x in range(g.n):
        ball = rows[x] | (1 << x)
        if ball == full:
            continue
        acc = ball
        r = rows[x]
        while r:
            low = r & -r
            acc |= rows[low.bit_length() - 1]
            if acc == full:
                break
            r ^= low
        if acc != full:
            return False
    return True


@dataclass
class GeneratorChecks:
    diameter_le_2: Optional[bool]
    complement_diameter_le_2: Optional[bool]
    max_degree_ok: bool
    max_degree: int
    degree_cap: float
    complement_certified: bool = False

    @property
    def passed(self):
        return all(v is not False for v in (self.diameter_le_2, self.complement_diameter_le_2, self.max_degree_ok))

    def to_dict(self):
        return {
            "diameter_le_2": self.diameter_le_2,
            "complement_diameter_le_2": self.complement_diameter_le_2,
            "complement_certified_by_degree": self.complement_certified,
            "max_degree": self.max_degree,
            "degree_cap_2np": self.degree_cap,
            "max_degree_ok": self.max_degree_ok,
            "passed": self.passed,
        }


def _generator_checks(n, p, deg, g=None):
    dmax = int(deg.max()) if len(deg) else 0
    cap = 2 * n * p
    certified = 2 * dmax < n - 2
    if certified:
        comp_ok = True
    elif g is not None:
        comp_ok = diameter_at_most_two(complement(g))
    else:
        comp_ok = None
    diam_ok = diameter_at_most_two(g) if g is not None else None
    return GeneratorChecks(diam_ok, comp_ok, dmax <= cap, dmax, cap, certified)


def check_lemma23(g, p):
    """Check the three high-probability events on a concrete sample.

    diam(g) <= 2, diam(complement) <= 2 and max degree <= 2np, each exact.
    The complement check is skipped when 2Δ < n - 2 certifies it.
    """
    return _generator_checks(g.n, p, degrees(g), g)


# -- counterexample ---------------------------------------------------------

def counterexample_p(n):
    return 2 * math.sqrt(math.log(n) / n)


def closed_form_ratio(p):
    """Leading-order ratio Σd²/(Nm) of the three-part construction with r = n."""
    return (p * p + (2 - p) ** 2 + 1) / 4.5


@dataclass
class ImplicitStats:
    """Exact n, m, Σd² of the three-part construction, from G's degrees alone."""

    n: int
    m: int
    sum_d2: int
    generator_n: int
    r: int

    @classmethod
    def from_degrees(cls, deg, r):
        k = len(deg)
        d = [int(v) for v in deg]
        sum_d2 = sum((di + 1) ** 2 for di in d) + sum((k - di + r) ** 2 for di in d) + r * k * k
        return cls(2 * k + r, k * (k - 1) // 2 + k + k * r, sum_d2, k, r)

    @property
    def ratio(self):
        return Fraction(self.sum_d2, self.n * self.m)


@dataclass
class CounterexampleReport:
    n: int
    x: Fraction
    r: int
    p: float
    seed: int
    seed_used: int
    attempts: int
    mode: str
    N: int
    m: int
    sum_d2: int
    generator_checks: GeneratorChecks
    explicit_critical: Optional[bool] = None
    extra: dict = field(default_factory=dict)

    @property
    def ratio(self):
        return Fraction(self.sum_d2, self.N * self.m)

    def to_dict(self):
        out = {
            "n": self.n,
            "x": f"{self.x.numerator}/{self.x.denominator}",
            "r": self.r,
            "p": self.p,
            "seed": self.seed,
            "seed_used": self.seed_used,
            "attempts": self.attempts,
            "mode": self.mode,
            "N": self.N,
            "m": self.m,
            "sum_d2": self.sum_d2,
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "ratio_float": float(self.ratio),
            "closed_form_ratio": closed_form_ratio(self.p),
            "generator_checks": self.generator_checks.to_dict(),
            "explicit_critical": self.explicit_critical,
        }
        out.update(self.extra)
        return out


def build_counterexample(n, x=1, seed=0, n_explicit=2000, verify_limit=20000,
                         max_attempts=MAX_ATTEMPTS, verify=False):
    """Sample G ~ G(n, 2√(ln n / n)) until the generator checks pass (diameter <= 2 for G and its complement, max degree <= 2np), then add r = xn vertices.

    Returns ``(Graph, report)`` for n <= n_explicit, otherwise
    ``(ImplicitStats, report)``. Generators with n <= verify_limit are
    materialized so diam(G) <= 2 is checked exactly; above it that check is
    reported as ``None`` and only the degree conditions are enforced.
    ``verify`` additionally runs the exhaustive criticality check on the
    explicit output.
    """
    n = int(n)
    if n < 50:
        raise BadParams("counterexample needs n >= 50")
    x = Fraction(x)
    if x <= 0 or (x * n).denominator != 1:
        raise BadParams("x must be positive with x*n integral")
    r = int(x * n)
    p = counterexample_p(n)
    for attempt in range(max_attempts):
        s = seed + attempt
        if n <= verify_limit:
            g = sample_gnp(n, p, s)
            deg = degrees(g)
            rep = _generator_checks(n, p, deg, g)
        else:
            g = None
            deg = gnp_degrees(n, p, s)
            rep = _generator_checks(n, p, deg)
        if rep.passed:
            break
    else:
        raise SamplingExhausted(f"generator checks failed for seeds {seed}..{seed + max_attempts - 1}")
    stats = ImplicitStats.from_degrees(deg, r)
    report = CounterexampleReport(n, x, r, p, seed, s, attempt + 1, "explicit" if n <= n_explicit else "implicit",
                                  stats.n, stats.m, stats.sum_d2, rep)
    if n <= n_explicit:
        h = build_d2_trip(g, r)
        if (h.m, degree_square_sum(h)) != (stats.m, stats.sum_d2):
            raise AssertionError("explicit and implicit statistics disagree")
        if verify:
            from .criticality import is_diameter_k_critical

            report.explicit_critical = bool(is_diameter_k_critical(h, 2))
        return h, report
    return stats, report


VARIANTS = ("d2bip", "d2trip", "dk", "clique-matching", "gnp", "counterexample")


def construct(variant, params, seed=0):
    """Dispatch by variant name; ``params`` is a dict of strings or numbers.

    Returns ``(Graph or ImplicitStats, info dict)``.
    """
    from .graph import cycle_graph, from_graph6

    def base():
        if "g6" in params:
            return from_graph6(str(params["g6"]).encode())
        if "cycle" in params:
            return cycle_graph(int(params["cycle"]))
        raise BadParams("give the generator graph as g6=<graph6> or cycle=<n>")

    try:
        if variant == "d2bip":
            return build_d2_bip(base()), {}
        if variant == "d2trip":
            return build_d2_trip(base(), int(params.get("r", 1))), {}
        if variant == "dk":
            return build_layered_dk(*(int(params[key]) for key in "kabc")), {}
        if variant == "clique-matching":
            return build_clique_matching(int(params["n"])), {}
        if variant == "gnp":
            n = int(params["n"])
            p = float(params["p"]) if "p" in params else counterexample_p(n)
            g = sample_gnp(n, p, seed)
            return g, {"generator_checks": check_lemma23(g, p).to_dict(), "p": p}
        if variant == "counterexample":
            kwargs = {}
            if "n_explicit" in params:
                kwargs["n_explicit"] = int(params["n_explicit"])
            if "verify_limit" in params:
                kwargs["verify_limit"] = int(params["verify_limit"])
            obj, rep = build_counterexample(int(params["n"]), Fraction(str(params.get("x", 1))), seed, **kwargs)
            return obj, rep.to_dict()
    except KeyError as exc:
        raise BadParams(f"missing parameter {exc.args[0]!r} for variant {variant}") from None
    raise BadParams(f"unknown variant {variant!r}; choose from {', '.join(VARIANTS)}")
