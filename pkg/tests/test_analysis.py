import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import graph_and_sets
from sitepercolation.analysis import (ExpansionParams, ThresholdParams, bad_choices, bad_positions,
                                      bad_vertex_count, check_subcritical, check_supercritical,
                                      enumerate_non_expanding, is_non_expanding, max_window_sum,
                                      pause_check, percolation_p, stack_window_check,
                                      stream_properties, subcritical_component_bound,
                                      supercritical_targets)
from sitepercolation.exploration import run_dfs_percolation
from sitepercolation.generators import complete, cycle, disjoint_cliques, random_regular
from sitepercolation.graph import GraphInputError, VertexSet
from sitepercolation.spectral import low_degree_bound, low_degree_set, spectral_report


def matrix_non_expanding(g, m, alpha0):
    """Independent count: |N(S)| from A @ 1_S over every m-subset."""
    A = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v in g.edges():
        A[u, v] = A[v, u] = 1
    n, d = g.n, g.degree_bound
    rhs = (1 - alpha0) * (d * m - d * d * m * m / (2 * n))
    subsets = np.array(list(itertools.combinations(range(n), m)))
    ind = np.zeros((len(subsets), n), dtype=np.int64)
    np.put_along_axis(ind, subsets, 1, axis=1)
    reach = ind @ A
    nbhd = ((reach > 0) & (ind == 0)).sum(axis=1)
    return int((nbhd < rhs).sum())


class TestThresholds:
    def test_bound_at_e10(self):
        assert subcritical_component_bound(22026, 1) == 40

    def test_bound_against_high_precision(self):
        mpmath.mp.dps = 50
        exact = mpmath.ceil(4 / mpmath.mpf("0.3") ** 2 * mpmath.log(10**5))
        assert subcritical_component_bound(10**5, 0.3) == int(exact) == 512

    @pytest.mark.parametrize("eps", [0, -0.1, 2])
    def test_bound_range(self, eps):
        with pytest.raises(GraphInputError):
            subcritical_component_bound(1000, eps)

    def test_targets(self):
        assert supercritical_targets(10**5, 100, 0.3) == {"giant_min": 300, "path_min": 18}
        assert supercritical_targets(10**5, 20, 0.3) == {"giant_min": 1500, "path_min": 90}
        assert supercritical_targets(1000, 10, 0.5) == {"giant_min": 50, "path_min": 5}

    def test_threshold_params(self):
        assert ThresholdParams(0.3, 1000, 20, "subcritical").p == Fraction(7, 200)
        assert ThresholdParams(0.3, 1000, 100, "supercritical").p == Fraction(13, 1000)
        assert percolation_p(0.3, 100, "supercritical") == Fraction(13, 1000)
        with pytest.raises(GraphInputError):
            ThresholdParams(0.5, 1000, 1, "supercritical")

    def test_expansion_params(self):
        ep = ExpansionParams(alpha0=0.2, c=0.1, n=10_000, d=10)
        assert ep.alpha == pytest.approx(math.sqrt(0.2))
        assert (ep.m_low, ep.m_high, ep.non_vacuous) == (100, 333, True)
        with pytest.raises(GraphInputError):
            ExpansionParams(alpha0=0.6, c=0.1, n=100, d=3)


class TestChecks:
    def test_p0_subcritical(self):
        rep = run_dfs_percolation(random_regular(500, 5, seed=1), 0, seed=0)
        assert check_subcritical(rep, 0.3)

    def test_cliques_capped(self):
        g = disjoint_cliques(21000, 20)
        rep = run_dfs_percolation(g, 0.5, seed=1)
        assert rep.largest_component <= 21 < subcritical_component_bound(21000, 0.3)
        assert check_subcritical(rep, 0.3)

    def test_supercritical_verdict(self):
        rep = run_dfs_percolation(complete(50), 1, seed=0)
        assert check_supercritical(rep, 0.5) == {"giant": True, "path": True, "both": True}


class TestNonExpanding:
    def test_single_vertex_expands(self):
        g = random_regular(1000, 10, seed=1)
        for a0 in (0.01, 0.2, 0.5):
            out = is_non_expanding(g, [17], a0)
            assert out["lhs"] == 10
            assert out["rhs"] == pytest.approx((1 - a0) * (10 - 100 / 2000))
            assert not out["verdict"]

    def test_isolated_clique(self):
        out = is_non_expanding(disjoint_cliques(12, 3), [0, 1, 2, 3], 0.2)
        assert out["lhs"] == 0 and out["verdict"]

    def test_complete_exact(self):
        out = is_non_expanding(complete(20), range(5), 0.2)
        rhs = Fraction(4, 5) * (19 * 5 - Fraction(19 * 19 * 25, 40))
        assert out["lhs"] == 15 and out["rhs"] == pytest.approx(float(rhs)) and not out["verdict"]

    def test_empty_set(self):
        with pytest.raises(GraphInputError):
            is_non_expanding(cycle(5), [], 0.2)

    @settings(max_examples=60)
    @given(graph_and_sets(k=1), st.floats(0.01, 0.5))
    def test_lhs_matches_adjacency_scan(self, data, a0):
        g, S = data
        if not S:
            return
        edges = g.edges().tolist()
        nb = {v for u, w in edges for v in ((w,) if u in S else ()) + ((u,) if w in S else ())} - S
        assert is_non_expanding(g, S, a0)["lhs"] == len(nb)


class TestEnumeration:
    def test_cliques(self):
        out = enumerate_non_expanding(disjoint_cliques(12, 3), 4, 0.2)
        assert out["total"] == 495 and out["non_expanding"] >= 3

    def test_complete_pairs(self):
        assert enumerate_non_expanding(complete(10), 2, 0.2)["non_expanding"] == 0

    @pytest.mark.parametrize("m", [3, 4, 5])
    def test_random_regular_matches_matrix_oracle(self, m):
        g = random_regular(16, 4, seed=5)
        out = enumerate_non_expanding(g, m, 0.2)
        assert out["total"] == math.comb(16, m)
        assert out["non_expanding"] == matrix_non_expanding(g, m, 0.2)

    @pytest.mark.parametrize("g,m", [(cycle(9), 3), (random_regular(10, 3, seed=2), 4)])
    def test_matches_predicate(self, g, m):
        expected = sum(is_non_expanding(g, S, 0.3)["verdict"]
                       for S in itertools.combinations(range(g.n), m))
        assert enumerate_non_expanding(g, m, 0.3, chunk=7)["non_expanding"] == expected

    def test_wide_graph_branch(self):
        g = cycle(70)
        assert enumerate_non_expanding(g, 2, 0.1)["non_expanding"] == matrix_non_expanding(g, 2, 0.1)

    def test_guard(self):
        with pytest.raises(GraphInputError, match="enumeration limit"):
            enumerate_non_expanding(random_regular(100, 4, seed=1), 10, 0.2)


class TestBadVertices:
    def test_first_vertex_never_bad(self):
        g = random_regular(1000, 10, seed=1)
        assert bad_vertex_count(g, [5], 0.1) == 0

    def test_clique_prefix(self):
        assert bad_positions(disjoint_cliques(12, 3), [0, 1, 2, 3], 0.3) == [2, 3, 4]

    def test_duplicates(self):
        with pytest.raises(GraphInputError):
            bad_vertex_count(cycle(6), [0, 1, 0], 0.2)

    def test_bad_choices_agree_with_positions(self):
        g = random_regular(300, 8, seed=4)
        rng = np.random.default_rng(1)
        prefix = rng.choice(300, size=12, replace=False).tolist()
        for i in range(1, len(prefix)):
            assert (i + 1 in bad_positions(g, prefix[: i + 1], 0.3)) == (prefix[i] in bad_choices(g, prefix[:i], 0.3))

    def test_bad_choices_bounded_by_low_degree_set(self):
        g = random_regular(2000, 100, seed=2)
        lam = spectral_report(g).lam
        alpha = math.sqrt(0.2)
        rng = np.random.default_rng(7)
        bound = low_degree_bound(g.n, g.degree_bound, lam, alpha)
        assert bound < g.n / 2
        for _ in range(5):
            prefix = rng.choice(g.n, size=9, replace=False).tolist()
            S = VertexSet.of(g.n, prefix)
            from sitepercolation.graph import external_neighborhood
            open_ = (S | external_neighborhood(g, S)).complement()
            assert len(open_) >= g.n / 2
            bad = bad_choices(g, prefix, alpha)
            assert bad.issubset(low_degree_set(g, open_, alpha))
            assert len(bad) <= bound


class TestStreamProperties:
    def test_zeros_subcritical(self):
        assert stream_properties(np.zeros(5000), 0.3, 10, 5000, "subcritical") == {"1": True}

    def test_ones_supercritical(self):
        out = stream_properties(np.ones(10_000), 0.3, 10, 10_000, "supercritical")
        assert out == {"2": False, "3": False, "4": True}

    def test_too_short(self):
        with pytest.raises(GraphInputError):
            stream_properties(np.zeros(10), 0.3, 10, 5000, "subcritical")
        with pytest.raises(GraphInputError):
            stream_properties(np.zeros(10), 0.3, 10, 5000, "supercritical")

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32), st.floats(0.05, 0.6))
    def test_window_matches_naive_recount(self, seed, p):
        rng = np.random.default_rng(seed)
        n, d, eps = 3000, 2, 0.9
        x = (rng.random(n) < p).astype(np.int64)
        k = subcritical_component_bound(n, eps)
        L = k * d
        naive = max(sum(x[i:i + L]) for i in range(n - L + 1))
        assert max_window_sum(x, L) == naive
        assert stream_properties(x, eps, d, n, "subcritical")["1"] == (naive < k)

    def test_prefix_properties_naive(self):
        rng = np.random.default_rng(3)
        n, d, eps = 20_000, 10, 0.5
        x = (rng.random(n) < 0.15).astype(np.int64)
        lo, hi = math.ceil(eps**3 * n), math.floor(eps * n)
        want = {
            "2": x[:math.floor(eps**3 * n)].sum() <= 2 * eps**3 * n / d,
            "3": x[:hi].sum() <= 2 * eps * n / d,
            "4": all(x[:t].sum() >= (1 + 0.75 * eps) * t / d for t in range(lo, hi + 1, 1)),
        }
        assert stream_properties(x, eps, d, n, "supercritical") == want


class TestMechanisms:
    def test_pause(self):
        g = random_regular(5000, 20, seed=1)
        out = pause_check(g, percolation_p(0.3, 20, "supercritical"), 4, 0.3)
        assert out["flips"] == 1500 and out["queried_matches"] and out["frontier_ok"]
        assert len(out["path"]) == out["stack"]

    def test_stack_window(self):
        g = random_regular(20_000, 20, seed=1)
        out = stack_window_check(g, percolation_p(0.3, 20, "supercritical"), 2, 0.3)
        assert set(out) == {"nonempty", "property4", "heads_in_window", "epoch_ok"}
        if out["nonempty"]:
            assert out["epoch_ok"]
