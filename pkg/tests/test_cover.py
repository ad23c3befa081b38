"""Covering algorithm, G0 pruning and threshold path extraction.

The edge-type cascade and the trace invariants are re-derived here from the
networkx association oracle rather than from the library's own structures.
"""

import itertools
from types import SimpleNamespace

import pytest

from diamcrit.constructions import build_clique_matching, build_layered_dk
from diamcrit.cover import (
    CoverContext,
    build_g0,
    default_t,
    edge_type,
    extract_p_t,
    run_cover,
    settled_in_g0,
    verify_s_bound,
)
from diamcrit.criticality import multiplicities
from diamcrit.exceptions import NotDiameterCritical
from diamcrit.graph import build, cycle_graph, path_graph

import oracles


def _canon(g, pair):
    x, y = pair
    d = oracles.dist(oracles.to_nx(g), x, y)
    path = min(p for p in oracles.paths_upto(g, x, y, d) if len(p) == d + 1)
    return path


class OracleView:
    """Critical paths, their associated edges and 2-critical paths, from networkx."""

    def __init__(self, g):
        self.g = g
        assoc = oracles.associations(g, 3)
        self.path_of = {}
        self.assoc = {}
        for e, pairs in assoc.items():
            for pair in pairs:
                p = _canon(g, pair)
                self.path_of[pair] = p
                self.assoc.setdefault(p, set()).add(e)
        self.p1 = {e: {self.path_of[pair] for pair in pairs} for e, pairs in assoc.items()}
        self.two = set(oracles.two_critical(g).values())
        self.two |= {p[::-1] for p in self.two}

    def edge_type(self, U, e):
        paths = self.p1[e]
        if any(len(self.assoc[p] & U) >= 2 for p in paths):
            return 1
        if any(len(p) == 4 and {p[1], p[2]} == set(e) for p in paths):
            return 2
        for f in U:
            shared = set(e) & set(f)
            if f != e and len(shared) == 1:
                (c,) = shared
                (a,) = set(e) - shared
                (b,) = set(f) - shared
                if (a, c, b) in self.two:
                    return 3
        if any(len(p) == 4 for p in paths):
            return 4
        if any(len(p) == 3 for p in paths):
            return 5
        return 6


INSTANCES = {
    "clique_matching_8": build_clique_matching(8),
    "clique_matching_10": build_clique_matching(10),
    "clique_matching_12": build_clique_matching(12),
    "layered_3_1_2_3": build_layered_dk(3, 1, 2, 3),
    "layered_3_1_1_10": build_layered_dk(3, 1, 1, 10),
    "broom_3_3_1_3": build_layered_dk(3, 3, 1, 3),
    "broom_3_5_1_7": build_layered_dk(3, 5, 1, 7),
    "layered_4_1_3_5": build_layered_dk(4, 1, 3, 5),
    "cycle_7": cycle_graph(7),
    "path_4": path_graph(4),
}

# (s, nonzero case histogram) under the pinned tie-breaking
COVER_REGRESSION = {
    "clique_matching_8": (6, {"C1": 3, "C2": 3}),
    "clique_matching_10": (10, {"C1": 4, "C2": 6}),
    "clique_matching_12": (15, {"C1": 5, "C2": 10}),
    "layered_3_1_2_3": (8, {"C1": 2, "C5": 6}),
    "layered_3_1_1_10": (6, {"C1": 6}),
    "layered_4_1_3_5": (18, {"C1": 6, "C4": 12}),
}


@pytest.fixture(scope="module")
def traces():
    return {name: run_cover(g) for name, g in INSTANCES.items()}


# -- edge types ---------------------------------------------------------------

def test_type_six_when_only_path_is_the_edge():
    g = path_graph(2)
    e = (0, 1)
    ctx = SimpleNamespace(g=g, p1={e: [e]}, assoc={e: (e,)}, joins_two_critical=lambda a, b: None)
    assert edge_type(ctx, {e}, e) == 6


def test_initial_types_clique_matching_8():
    g = INSTANCES["clique_matching_8"]
    ctx = CoverContext.build(g)
    U = set(g.edges)
    types = {e: edge_type(ctx, U, e) for e in g.edges}
    assert types == {e: 1 for e in g.edges}
    view = OracleView(g)
    assert types == {e: view.edge_type(U, e) for e in g.edges}


@pytest.mark.parametrize("name", sorted(INSTANCES))
def test_types_match_independent_cascade(name, traces):
    g = INSTANCES[name]
    ctx = traces[name].context
    view = OracleView(g)
    edges = list(g.edges)
    subsets = [set(edges)] + [set(edges[i::3]) for i in range(3)] + [set(edges[:len(edges) // 2])]
    for U in subsets:
        for e in U:
            assert edge_type(ctx, U, e) == view.edge_type(U, e), (e, sorted(U))


@pytest.mark.parametrize("name", sorted(INSTANCES))
def test_type_three_clause(name, traces):
    g = INSTANCES[name]
    ctx = traces[name].context
    U = set(g.edges)
    for e, f in itertools.permutations(g.edges, 2):
        if ctx.joins_two_critical(e, f):
            assert edge_type(ctx, U, e) <= 3


# -- the covering run ------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(COVER_REGRESSION))
def test_cover_regression(name, traces):
    tr = traces[name]
    s, hist = COVER_REGRESSION[name]
    assert tr.s == s
    assert {k: v for k, v in tr.histogram().items() if v} == hist


@pytest.mark.parametrize("name", sorted(INSTANCES))
def test_trace_invariants_against_oracle(name, traces):
    g = INSTANCES[name]
    tr = traces[name]
    view = OracleView(g)
    crit_paths = set(view.assoc) | {p[::-1] for p in view.assoc}
    family = [tuple(p) for p in tr.family]

    # every edge associated with a path of the family
    covered = set()
    for p in family:
        covered |= view.assoc[p]
    assert covered == set(g.edges)

    seen = set()
    singles = 0
    prev_t = 0
    for it in tr.iterations:
        assert it.t >= prev_t
        prev_t = it.t
        group = set(it.P) | set(it.P2)
        assert not group & seen
        seen |= group
        singles += len(group) == 1
        for p in it.P:
            assert p in crit_paths
        for p in it.P2:
            assert p in view.two
    assert 2 * singles <= g.n


@pytest.mark.parametrize("name", sorted(INSTANCES))
def test_settled_edges_partition(name, traces):
    g = INSTANCES[name]
    tr = traces[name]
    settled = [e for it in tr.iterations for e in it.settled]
    assert sorted(settled) == sorted(g.edges)


def test_cover_rejects_non_critical():
    g = cycle_graph(6).with_edge(0, 3)
    with pytest.raises(NotDiameterCritical):
        run_cover(g)


def test_cover_rejects_diameter_two():
    with pytest.raises(NotDiameterCritical):
        run_cover(cycle_graph(5))


def test_cover_rejects_disconnected():
    with pytest.raises(NotDiameterCritical):
        run_cover(build(4, [(0, 1), (2, 3)]))


def test_trace_json(traces):
    d = traces["clique_matching_8"].to_dict()
    assert d["s"] == 6 and d["final_unsettled"] == []
    assert len(d["iterations"]) == 6


def test_cover_deterministic():
    g = INSTANCES["layered_4_1_3_5"]
    assert run_cover(g).to_dict() == run_cover(g).to_dict()


# -- G0 ------------------------------------------------------------------------------

def _check_g0_properties(g, g0):
    two = oracles.two_critical(g)
    for p in two.values():
        if len(p) == 3:
            assert not (g0.has_edge(p[0], p[1]) and g0.has_edge(p[1], p[2]))
    di = oracles.disjoint_pairs(g0)
    crit = set().union(*oracles.associations(g, 3).values())
    for pair in crit | set(two):
        assert pair in di


def test_g0_t1_empty(traces):
    g = INSTANCES["clique_matching_10"]
    g0, rep = build_g0(g, 1, context=traces["clique_matching_10"].context)
    assert g0.m == 0
    assert len(rep.to_dict()["deleted_heavy"]) == g.m
    assert all(not s for s in settled_in_g0(traces["clique_matching_10"], g0))


def test_g0_large_t_only_light_rule(traces):
    g = INSTANCES["layered_3_1_2_3"]
    top = max(m.m for m in multiplicities(g).values())
    g0, rep = build_g0(g, top + 1, context=traces["layered_3_1_2_3"].context)
    d = rep.to_dict()
    assert d["deleted_heavy"] == []
    assert d["deleted_light"]
    _check_g0_properties(g, g0)


def test_g0_clique_matching_10_t3(traces):
    g = INSTANCES["clique_matching_10"]
    g0, rep = build_g0(g, 3, context=traces["clique_matching_10"].context)
    d = rep.to_dict()
    # every multiplicity is at least 3, so all edges go by the heavy rule
    assert d["deleted_heavy"] == [list(e) for e in g.edges]
    assert d["deleted_light"] == [] and d["t_light_paths"] == 0
    assert (d["e_g0"], d["di_g0"]) == (0, 45)
    _check_g0_properties(g, g0)


def test_g0_clique_matching_10_default_t(traces):
    g = INSTANCES["clique_matching_10"]
    t = default_t(g.n)
    assert t == 5
    g0, rep = build_g0(g, t, context=traces["clique_matching_10"].context)
    # clique edges (multiplicity 3) survive, matching edges (14) go
    assert sorted(map(tuple, g0.edges)) == sorted(itertools.combinations(range(5), 2))
    assert rep.to_dict()["di_g0"] == 35
    _check_g0_properties(g, g0)


@pytest.mark.parametrize("name", sorted(INSTANCES))
def test_g0_properties_all_t(name, traces):
    g = INSTANCES[name]
    for t in (2, 3, default_t(g.n)):
        g0, _ = build_g0(g, t, context=traces[name].context)
        _check_g0_properties(g, g0)


# -- S(i) bound ------------------------------------------------------------------------

def test_s_bound_clique_matching_10_t3(traces):
    tr = traces["clique_matching_10"]
    g = INSTANCES["clique_matching_10"]
    g0, _ = build_g0(g, 3, context=tr.context)
    rep = verify_s_bound(tr, g0, extract_p_t(g, 3, context=tr.context)).to_dict()
    assert rep["s"] == 10 and rep["e_g0"] == 0 and rep["di_g0"] == 45
    assert rep["sum_group_sizes"] == 30
    assert rep["disjoint_pairs_bound"] and rep["e_g0_le_s_plus_c1_in_p_t"]


@pytest.mark.parametrize("name", sorted(INSTANCES))
def test_disjoint_pairs_bound(name, traces):
    g = INSTANCES[name]
    tr = traces[name]
    for t in (2, 3, default_t(g.n)):
        g0, _ = build_g0(g, t, context=tr.context)
        pt = extract_p_t(g, t, context=tr.context)
        rep = verify_s_bound(tr, g0, pt)
        d = rep.to_dict()
        assert 2 * d["di_g0"] + g.n >= 4 * tr.s
        sizes = settled_in_g0(tr, g0)
        assert sum(len(s) for s in sizes) == g0.m


# -- threshold paths -------------------------------------------------------------------

def _p_t_oracle(g, t):
    view = OracleView(g)
    mult = multiplicities(g)
    out = []
    for p, edges in view.assoc.items():
        if len(p) != 4 or len(edges) < 2:
            continue
        a, b, c = (tuple(sorted(e)) for e in zip(p, p[1:]))
        if mult[b].m >= t and mult[a].m < t and mult[c].m < t:
            out.append(p)
    return sorted(out)


def test_p_t_t1_empty():
    assert extract_p_t(INSTANCES["broom_3_5_1_7"], 1) == []


def test_p_t_huge_t_empty():
    assert extract_p_t(INSTANCES["broom_3_5_1_7"], 10**6) == []


@pytest.mark.parametrize("n", [10, 12])
def test_p_t_clique_matching_empty(n):
    # end (matching) edges are heavier than middle (clique) edges
    assert extract_p_t(build_clique_matching(n), 2) == []


@pytest.mark.parametrize("name, t, size", [("broom_3_3_1_3", 12, 9), ("broom_3_5_1_7", 22, 35)])
def test_p_t_brooms(name, t, size):
    g = INSTANCES[name]
    pt = extract_p_t(g, t)
    assert len(pt) == size
    assert sorted(map(tuple, pt)) == _p_t_oracle(g, t)
    for p in pt:
        assert len(oracles.paths_upto(g, p[0], p[-1], 3)) == 1
