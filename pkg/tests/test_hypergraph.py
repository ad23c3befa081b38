import itertools

import numpy as np
import pytest

from diamcrit.constructions import build_clique_matching, build_layered_dk
from diamcrit.cover import extract_p_t
from diamcrit.hypergraph import Hypergraph3, hypergraph_chain

import oracles


def _broom_p_t(a, c, t):
    g = build_layered_dk(3, a, 1, c)
    return g, extract_p_t(g, t)


def test_empty_chain():
    h1, h2, h3, h4, rep = hypergraph_chain([], 3)
    assert (len(h1), len(h2), len(h3), len(h4)) == (0, 0, 0, 0)
    assert all(rep.bounds.values())
    assert rep.h4_triangle_free


def test_single_path():
    h1, h2, h3, h4, rep = hypergraph_chain([(0, 1, 2, 3)], 2)
    assert h1.edges == h2.edges == [(0, 1, 3)]
    assert h1.center == [1] and h1.handle == [0]
    assert len(h4) <= 1
    assert rep.h4_triangle_free


def test_clique_matching_12_runs():
    g = build_clique_matching(12)
    pt = extract_p_t(g, 2)
    *_, h4, rep = hypergraph_chain(pt, 2, seed=11, n=g.n)
    assert rep.h4_linear and rep.h4_triangle_free
    assert not oracles.has_triangle(h4.edges)


BROOMS = [(2, 2, 9), (3, 3, 12), (4, 4, 15), (5, 7, 22), (8, 8, 27), (8, 8, 60)]


@pytest.mark.parametrize("a, c, t", BROOMS)
@pytest.mark.parametrize("seed", [0, 1, 7])
def test_chain_bounds_on_brooms(a, c, t, seed):
    g, pt = _broom_p_t(a, c, t)
    assert pt
    h1, h2, h3, h4, rep = hypergraph_chain(pt, t, seed=seed, n=g.n)
    e1, e2, e3, e4 = len(h1), len(h2), len(h3), len(h4)
    assert e1 == len(pt)
    assert 2 * t * e2 >= e1
    assert 9 * e3 >= 2 * e2
    assert 6 * e4 >= e3
    assert oracles.linear(h2.edges) and oracles.linear(h3.edges) and oracles.linear(h4.edges)
    assert h3.is_partite()
    assert all(len({int(h3.parts[v]) for v in e}) == 3 for e in h3.edges)
    assert not oracles.has_triangle(h4.edges)
    # handles in V1, centers in V2
    for e, c_, h_ in zip(h4.edges, h4.center, h4.handle):
        assert int(h4.parts[h_]) == 1 and int(h4.parts[c_]) == 2


def test_chain_sizes_double_broom_8_8():
    g, pt = _broom_p_t(8, 8, 27)
    *_, rep = hypergraph_chain(pt, 27, seed=0, n=g.n)
    assert len(pt) == 64
    assert rep.sizes == (64, 8, 2, 1)


def test_chain_deterministic_by_seed():
    g, pt = _broom_p_t(5, 7, 22)
    a = hypergraph_chain(pt, 22, seed=3, n=g.n)[4].to_dict()
    b = hypergraph_chain(pt, 22, seed=3, n=g.n)[4].to_dict()
    assert a == b


def test_h1_keeps_earlier_interior_vertex():
    g, pt = _broom_p_t(3, 3, 12)
    h1 = hypergraph_chain(pt, 12, n=g.n)[0]
    for (x, a, _b, y), e, c in zip(pt, h1.edges, h1.center):
        assert e == tuple(sorted((x, a, y))) and c == a


def test_linear_and_partite_helpers():
    h = Hypergraph3(6)
    h.add((0, 1, 2), 1, 0)
    h.add((2, 3, 4), 3, 2)
    assert h.is_linear()
    h.add((0, 1, 5), 1, 0)
    assert not h.is_linear()
    assert not h.is_partite()
    assert h.is_partite(np.array([0, 1, 2, 0, 1, 2]))
    assert not h.is_partite(np.array([0, 1, 2, 0, 1, 1]))


def test_triangle_pattern():
    h = Hypergraph3(6)
    for e in [(0, 1, 2), (2, 3, 4), (4, 5, 0)]:
        h.add(e, e[1], e[0])
    assert len(h.triangles()) == 1
    # three edges through one common vertex are not a triangle
    s = Hypergraph3(7)
    for e in [(0, 1, 2), (0, 3, 4), (0, 5, 6)]:
        s.add(e, e[1], e[0])
    assert s.triangles() == [] and not oracles.has_triangle(s.edges)


@pytest.mark.parametrize("seed", range(6))
def test_triangle_scan_matches_brute(seed):
    rng = np.random.default_rng(seed)
    n = 9
    all_triples = list(itertools.combinations(range(n), 3))
    pick = rng.choice(len(all_triples), size=14, replace=False)
    h = Hypergraph3(n)
    for i in pick:
        e = all_triples[i]
        h.add(e, e[1], e[0])
    assert sorted(h.triangles()) == sorted(h.triangles_brute())
    assert bool(h.triangles()) == oracles.has_triangle(h.edges)


def test_report_json():
    g, pt = _broom_p_t(4, 4, 15)
    d = hypergraph_chain(pt, 15, n=g.n)[4].to_dict()
    assert d["h1"] == 16 and d["h4_triangle_free"] and d["h2_linear"]
