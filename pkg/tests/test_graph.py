import itertools
import json
import math

import numpy as np
import pytest

from sphere_ramsey import graph
from sphere_ramsey.constants import threshold_constants
from sphere_ramsey.errors import DomainError, ResourceLimitError
from sphere_ramsey.mc import substream


def brute_force_clique(adj, size):
    n = adj.shape[0]
    for comb in itertools.combinations(range(n), size):
        if all(adj[a][b] for a, b in itertools.combinations(comb, 2)):
            return comb
    return None


def random_coloring(rng, n):
    m = rng.random((n, n)) < rng.random()
    red = np.triu(m, 1)
    red = red | red.T
    return red


def test_build_graph_determinism():
    g1 = graph.build_graph(50, 0.382, 40, substream(3, "t-graph"))
    g2 = graph.build_graph(50, 0.382, 40, substream(3, "t-graph"))
    assert np.array_equal(g1.points, g2.points)
    assert np.array_equal(g1.red, g2.red)


def test_colors_re_derivable():
    g = graph.build_graph(80, 0.3, 60, substream(4, "t-graph"))
    again = graph.colors_from_points(g.points, g.c)
    assert np.array_equal(g.red, again)
    assert np.array_equal(g.red, g.red.T)
    assert not np.any(np.diag(g.red))


def test_red_fraction_half_at_symmetric_p():
    g = graph.build_graph(60, 0.5, 450, substream(5, "t-graph"))
    assert g.c == 0.0
    assert g.red_fraction() == pytest.approx(0.5, abs=0.005)


def test_red_fraction_matches_p():
    g = graph.build_graph(100, 0.382, 1000, substream(6, "t-graph"))
    n_pairs = 1000 * 999 / 2
    se = math.sqrt(0.382 * 0.618 / n_pairs)
    # pairs sharing a vertex are weakly dependent; allow a generous margin
    assert g.red_fraction() == pytest.approx(0.382, abs=8 * se)


def test_vertex_guard():
    with pytest.raises(ResourceLimitError):
        graph.build_graph(10, 0.4, 2 ** 14 + 1, substream(7, "t-graph"))
    with pytest.raises(DomainError):
        graph.build_graph(10, 0.4, 1, substream(7, "t-graph"))


def test_all_red_k4_contains_triangle():
    adj = np.ones((4, 4), dtype=bool)
    np.fill_diagonal(adj, False)
    got = graph.find_clique(adj, 3)
    assert got is not None and len(got) == 3


def test_five_cycle_has_no_mono_triangle():
    n = 5
    red = np.zeros((n, n), dtype=bool)
    for i in range(n):
        red[i, (i + 1) % n] = red[(i + 1) % n, i] = True
    blue = ~red
    np.fill_diagonal(blue, False)
    assert graph.find_clique(red, 3) is None
    assert graph.find_clique(blue, 3) is None
    # sanity: brute force agrees over all 10 triangles
    assert brute_force_clique(red, 3) is None
    assert brute_force_clique(blue, 3) is None


def test_find_clique_agrees_with_brute_force():
    rng = substream(8, "t-graph")
    for _ in range(100):
        n = int(rng.integers(4, 13))
        red = random_coloring(rng, n)
        blue = ~red
        np.fill_diagonal(blue, False)
        for adj in (red, blue):
            for size in (2, 3, 4, 5):
                got = graph.find_clique(adj, size)
                expect = brute_force_clique(adj, size)
                assert (got is None) == (expect is None)
                if got is not None:
                    assert all(adj[a][b] for a, b in itertools.combinations(got, 2))


def test_find_mono_clique_witness_validates():
    g = graph.build_graph(30, 0.45, 40, substream(9, "t-graph"))
    for color in ("red", "blue"):
        w = graph.find_mono_clique(g, color, 3)
        if w is not None:
            assert w.validate(g)
    assert graph.find_mono_clique(g, "red", 41) is None
    with pytest.raises(DomainError):
        graph.find_mono_clique(g, "red", 1)


def test_certificate_found_for_n5():
    res = graph.certify_lower_bound(1.0, 3, 50, 0.5, 5, 10_000, seed=7)
    assert res.found and res.attempts_used <= 10_000
    g = res.graph
    assert graph.find_mono_clique(g, "red", 3) is None
    assert graph.find_mono_clique(g, "blue", 3) is None


def test_certificate_trivial_for_n2():
    res = graph.certify_lower_bound(1.0, 3, 20, 0.5, 2, 5, seed=1)
    assert res.found and res.attempts_used == 1


def test_certificate_never_for_n6():
    # two-coloring of K6 always holds a monochromatic triangle
    res = graph.certify_lower_bound(1.0, 3, 50, 0.5, 6, 800, seed=7)
    assert not res.found
    assert res.attempts_used == 800


def test_certificate_roundtrip():
    res = graph.certify_lower_bound(1.0, 3, 50, 0.5, 5, 10_000, seed=7)
    text = graph.certificate_to_json(res)
    doc = json.loads(text)
    assert doc["witness_checks"] == "pass"
    loaded, ok = graph.certificate_from_json(text)
    assert ok
    assert np.allclose(loaded.points, res.graph.points)


def test_triangle_frequency_approaches_independence():
    # red-triangle frequency rises towards p^3 from below as k grows
    from sphere_ramsey.estimators import estimate_clique_prob
    p = 0.382
    vals = {}
    for k in (100, 1000, 10_000):
        est = estimate_clique_prob(k, p, 3, "red", 400_000, seed=21, method="chain")
        vals[k] = est.value
        assert est.value < p ** 3
    assert vals[100] < vals[1000] < vals[10_000]


def test_union_bound_grid():
    for C in (1.5, 2.0, 5.0):
        for ell in (100, 1000, 10_000):
            rep = graph.union_bound_report(C, ell)
            assert rep.bound_lt_1
            assert rep.final_bound_minus_one < 0.0
            assert rep.aux_inequality_holds
            assert rep.kappa_base_sum_lt_1


def test_union_bound_eps_zero_degenerate():
    rep = graph.union_bound_report(2.0, 100, eps_override=0.0)
    assert rep.final_bound == 1.0
    assert rep.final_bound_minus_one == 0.0
    assert not rep.bound_lt_1


def test_union_bound_base_terms():
    tc = threshold_constants(2.0)
    rep = graph.union_bound_report(2.0, 1000)
    assert rep.red_base == pytest.approx(tc.p_C - tc.eps0 / tc.D, rel=1e-12)
    assert rep.blue_base == pytest.approx(1 - tc.p_C - tc.eps0 / tc.D, rel=1e-12)
    assert rep.log_n == pytest.approx(1000 * math.log(tc.M_C + tc.eps), rel=1e-12)
