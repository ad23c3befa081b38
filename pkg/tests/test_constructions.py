import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from diamcrit.constructions import (
    ImplicitStats,
    build_clique_matching,
    build_counterexample,
    build_d2_bip,
    build_d2_trip,
    build_layered_dk,
    check_lemma23,
    closed_form_ratio,
    construct,
    counterexample_p,
    diameter_at_most_two,
    gnp_degrees,
    sample_gnp,
)
from diamcrit.criticality import is_diameter_k_critical
from diamcrit.exceptions import BadParams, PreconditionFailed
from diamcrit.graph import (
    Graph,
    build,
    complete_graph,
    cycle_graph,
    degree_square_sum,
    degrees,
    path_graph,
    petersen_graph,
)
from diamcrit.metric import diameter

import oracles

C5 = cycle_graph(5)


# -- two- and three-part diameter-2 constructions ------------------------------

def test_d2_bip_c5():
    g = build_d2_bip(C5)
    assert (g.n, g.m) == (10, 15)
    assert is_diameter_k_critical(g, 2)
    assert oracles.is_critical(g, 2)


def test_d2_bip_k1_degenerate():
    g = build_d2_bip(build(1, []))
    assert (g.n, g.m) == (2, 1)
    v = is_diameter_k_critical(g, 2)
    assert not v and v.diameter == 1


def test_d2_bip_p3_rejected():
    with pytest.raises(PreconditionFailed, match="complement"):
        build_d2_bip(path_graph(3))


@pytest.mark.parametrize("r, n, m", [(1, 11, 20), (2, 12, 25), (5, 15, 40)])
def test_d2_trip_c5(r, n, m):
    g = build_d2_trip(C5, r)
    assert (g.n, g.m) == (n, m)
    # C(5,2) edges across G and its complement, 5 matching edges, r*5 to C
    assert m == math.comb(5, 2) + 5 + 5 * r
    assert is_diameter_k_critical(g, 2)


def test_d2_trip_zero_warns():
    with pytest.warns(UserWarning):
        g = build_d2_trip(C5, 0)
    assert g == build_d2_bip(C5)


def test_d2_trip_negative():
    with pytest.raises(BadParams):
        build_d2_trip(C5, -1)


def test_d2_trip_petersen():
    g = build_d2_trip(petersen_graph(), 3)
    assert is_diameter_k_critical(g, 2)


# -- layered diameter-k construction -----------------------------------------------

def test_layered_3_1_2_3():
    g = build_layered_dk(3, 1, 2, 3)
    assert (g.n, g.m) == (8, 10)
    assert degree_square_sum(g) == 56 and g.n * g.m == 80
    assert is_diameter_k_critical(g, 3)
    assert oracles.is_critical(g, 3)


def test_layered_3_1_1_97():
    g = build_layered_dk(3, 1, 1, 97)
    assert (g.n, g.m) == (100, 99)
    assert sorted(degrees(g)) == [1] * 98 + [2, 98]
    assert Fraction(degree_square_sum(g), g.n * g.m) == Fraction(9706, 9900)


@pytest.mark.parametrize("k, a, b, c", [(3, 1, 1, 10), (4, 1, 3, 5), (6, 1, 1, 14), (6, 2, 2, 8), (5, 3, 2, 4)])
def test_layered_critical(k, a, b, c):
    g = build_layered_dk(k, a, b, c)
    assert g.n == a + (k - 1) * b + c
    assert g.m == a * b + (k - 2) * b + b * c
    assert is_diameter_k_critical(g, k)


def test_layered_edge_count_asymptotics():
    # a = 1, b ~ n/(2(k-1)): m = n^2/(4(k-1)) + o(n^2)
    k, n = 4, 600
    b = n // (2 * (k - 1))
    g = build_layered_dk(k, 1, b, n - 1 - (k - 1) * b)
    assert abs(g.m / (n * n / (4 * (k - 1))) - 1) < 0.02


def test_layered_rejects():
    with pytest.raises(BadParams):
        build_layered_dk(2, 1, 1, 1)
    with pytest.raises(BadParams):
        build_layered_dk(3, 0, 1, 1)


# -- clique plus matching --------------------------------------------------------

@pytest.mark.parametrize("n, m", [(6, 6), (8, 10), (10, 15), (20, 55)])
def test_clique_matching(n, m):
    g = build_clique_matching(n)
    assert g.m == m == math.comb(n // 2, 2) + n // 2
    assert is_diameter_k_critical(g, 3)


def test_clique_matching_oracle():
    assert oracles.is_critical(build_clique_matching(8), 3)


@pytest.mark.parametrize("n", [4, 7, 2])
def test_clique_matching_rejected(n):
    with pytest.raises(BadParams):
        build_clique_matching(n)


# -- G(n, p) ------------------------------------------------------------------------

def test_gnp_reproducible():
    assert sample_gnp(200, 0.1, 7) == sample_gnp(200, 0.1, 7)
    assert sample_gnp(200, 0.1, 7) != sample_gnp(200, 0.1, 8)


def test_gnp_edge_count_in_band():
    n, p = 300, 0.05
    pairs = n * (n - 1) // 2
    sd = math.sqrt(pairs * p * (1 - p))
    for seed in range(5):
        m = sample_gnp(n, p, seed).m
        assert abs(m - pairs * p) < 5 * sd


def test_gnp_pairs_uniform():
    # each pair (u, v) appears with frequency ~ p across seeds
    n, p, runs = 12, 0.3, 400
    hits = np.zeros((n, n))
    for s in range(runs):
        for u, v in sample_gnp(n, p, s).edges:
            hits[u, v] += 1
    freq = hits[np.triu_indices(n, 1)] / runs
    assert abs(freq.mean() - p) < 0.01
    assert freq.min() > p - 0.1 and freq.max() < p + 0.1


def test_gnp_degrees_match_sample():
    n, p = 500, 0.04
    assert list(gnp_degrees(n, p, 3)) == list(degrees(sample_gnp(n, p, 3)))


def test_gnp_extremes():
    assert sample_gnp(30, 0.0, 1).m == 0
    assert sample_gnp(30, 1.0, 1) == complete_graph(30)
    rep0 = check_lemma23(sample_gnp(30, 0.0, 1), 0.0)
    assert rep0.diameter_le_2 is False and not rep0.passed
    rep1 = check_lemma23(sample_gnp(30, 1.0, 1), 1.0)
    assert rep1.complement_diameter_le_2 is False and not rep1.passed


def test_generator_checks_pass_rate_n400():
    n = 400
    p = counterexample_p(n)
    assert abs(p - 0.2448) < 1e-3
    passed = sum(check_lemma23(sample_gnp(n, p, s), p).passed for s in range(50))
    assert passed / 50 >= 0.9


def test_diameter_at_most_two_matches_bfs():
    for s in range(10):
        g = sample_gnp(40, 0.25, s)
        assert diameter_at_most_two(g) == (diameter(g) <= 2)


# -- counterexample ----------------------------------------------------------------

def test_counterexample_300_explicit():
    g, rep = build_counterexample(300, 1, seed=0, verify=True)
    assert isinstance(g, Graph)
    assert g.n == 900
    assert rep.to_dict()["explicit_critical"] is True
    ratio = float(rep.ratio)
    assert abs(ratio - closed_form_ratio(counterexample_p(300))) <= 0.03
    assert ratio < 1


def test_counterexample_implicit_matches_explicit():
    g, rep = build_counterexample(300, 1, seed=4)
    imp, rep2 = build_counterexample(300, 1, seed=4, n_explicit=0)
    assert isinstance(imp, ImplicitStats)
    assert (imp.n, imp.m, imp.sum_d2) == (g.n, g.m, degree_square_sum(g))
    assert rep.ratio == rep2.ratio


def test_closed_form_limit():
    assert closed_form_ratio(0.0) == pytest.approx(10 / 9)
    assert closed_form_ratio(counterexample_p(10**12)) > closed_form_ratio(counterexample_p(10**6))


def test_counterexample_p():
    assert counterexample_p(300) == pytest.approx(2 * math.sqrt(math.log(300) / 300))


# -- dispatcher ------------------------------------------------------------------

def test_construct_dispatch():
    g, _ = construct("dk", {"k": "3", "a": "1", "b": "2", "c": "3"})
    assert g == build_layered_dk(3, 1, 2, 3)
    g, _ = construct("d2trip", {"cycle": "5", "r": "2"})
    assert g == build_d2_trip(C5, 2)
    g, info = construct("gnp", {"n": "50", "p": "0.3"}, seed=2)
    assert g == sample_gnp(50, 0.3, 2) and "generator_checks" in info


def test_construct_errors():
    with pytest.raises(BadParams):
        construct("nope", {})
    with pytest.raises(BadParams):
        construct("dk", {"k": "3"})
    with pytest.raises(BadParams):
        construct("d2bip", {})


def test_construct_no_warnings_for_valid_r():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        construct("d2trip", {"cycle": "5", "r": "1"})
