import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from convgeom.errors import ValidationError
from convgeom.geometry import (check_norm_bound, convolved_norm_bound,
                               degree_gap_leading_term, m_constant,
                               neighborhood_degree_stats,
                               noise_distance_bound, noise_distance_bounds,
                               structural_replica_distances)
from convgeom.graphs import build_graph, generate_random_connected_graph
from convgeom.operators import ConvParams, build_operator


def cycle(n):
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves):
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def brute_force_stats(graph, beta):
    """Per-node neighborhood degree moments via explicit loops."""
    d = graph.degrees
    n = graph.num_nodes
    bar = np.zeros(n)
    sq = np.zeros(n)
    a = graph.dense_adjacency()
    for u in range(n):
        denom = d[u] + beta
        if denom <= 0:
            continue
        for v in range(n):
            if a[u, v]:
                bar[u] += a[u, v] * (d[v] - d[u]) / denom
                sq[u] += a[u, v] * (d[v] - d[u]) ** 2 / denom
    return bar, sq


class TestNeighborhoodStats:
    @pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 2.0])
    def test_matches_brute_force(self, random_graphs, beta):
        for g in random_graphs:
            stats = neighborhood_degree_stats(g, beta)
            bar, sq = brute_force_stats(g, beta)
            np.testing.assert_allclose(stats.delta_bar, bar, atol=1e-13)
            np.testing.assert_allclose(stats.delta_sq_bar, sq, atol=1e-13)

    def test_star_leaf_values(self):
        stats = neighborhood_degree_stats(star(3), beta=1.0)
        # leaf: single neighbor of degree 3, own degree 1, normalizer 2
        assert stats.delta_bar[1] == pytest.approx(1.0)
        assert stats.delta_sq_bar[1] == pytest.approx(2.0)
        # hub: three neighbors of degree 1, own degree 3, normalizer 4
        assert stats.delta_bar[0] == pytest.approx(3 * (1 - 3) / 4)
        assert stats.delta_sq_bar[0] == pytest.approx(3 * 4 / 4)

    def test_cycle_is_flat(self):
        stats = neighborhood_degree_stats(cycle(5), beta=1.0)
        np.testing.assert_array_equal(stats.delta_bar, np.zeros(5))
        np.testing.assert_array_equal(stats.delta_sq_bar, np.zeros(5))

    def test_weighted_graph(self):
        g = build_graph(3, [(0, 1, 2.0), (1, 2, 1.0)])
        stats = neighborhood_degree_stats(g, beta=1.0)
        d = g.degrees  # [2, 3, 1]
        expected0 = 2.0 * (d[1] - d[0]) / (d[0] + 1.0)
        assert stats.delta_bar[0] == pytest.approx(expected0)

    def test_negative_beta_rejected(self):
        with pytest.raises(ValidationError):
            neighborhood_degree_stats(cycle(4), beta=-0.1)


class TestMConstant:
    def test_orderings(self):
        for alpha in (0.1, 0.5, 1.0):
            conservative = m_constant(6.0, alpha, 1.0, "conservative")
            matched = m_constant(6.0, alpha, 1.0, "matched")
            squared = m_constant(6.0, alpha, 1.0, "squared")
            assert conservative >= matched >= squared

    def test_squared_ignores_alpha(self):
        assert m_constant(4.0, 0.1, 1.0, "squared") == m_constant(
            4.0, 0.9, 1.0, "squared") == pytest.approx(6.25)

    def test_order_two_exponent(self):
        # order=2 doubles the alpha contribution in the exponent
        v1 = m_constant(3.0, 0.5, 0.0, "conservative", order=1)
        v2 = m_constant(3.0, 0.5, 0.0, "conservative", order=2)
        assert v1 == pytest.approx(3.0 ** 2.5)
        assert v2 == pytest.approx(3.0 ** 3.0)

    def test_bad_variant(self):
        with pytest.raises(ValidationError):
            m_constant(3.0, 0.5, 1.0, "exact")


class TestNormBound:
    def test_regular_graph_closed_form(self):
        # on a d-regular graph both correction terms vanish
        g = cycle(7)
        for alpha, beta in [(0.0, 1.0), (0.5, 1.0), (1.0, 2.0)]:
            bound = convolved_norm_bound(g, alpha, beta, z_norm_max=2.5)
            expected = 2.5 * (2.0 + beta) ** (1.0 - 2.0 * alpha)
            np.testing.assert_allclose(bound, np.full(7, expected), atol=1e-13)

    def test_alpha_zero_is_augmented_degree(self):
        g = star(4)
        bound = convolved_norm_bound(g, 0.0, 1.0, z_norm_max=1.0)
        np.testing.assert_allclose(bound, g.degrees + 1.0, atol=1e-13)

    def test_single_node(self):
        g = build_graph(1, [])
        report = check_norm_bound(g, 0.5, 1.0, np.array([[3.0, 4.0]]))
        # S is the 1x1 matrix [beta * (0+beta)^(-2*alpha)] = [1]
        assert report.empirical[0] == pytest.approx(5.0)
        assert report.all_satisfied

    def test_zero_violations_random(self, random_graphs):
        for g in random_graphs:
            rng = np.random.default_rng(g.num_nodes)
            z = rng.normal(size=(g.num_nodes, 3))
            for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
                for beta in (0.0, 1.0, 2.0):
                    if beta == 0.0 and g.degrees.min() == 0:
                        continue
                    report = check_norm_bound(g, alpha, beta, z,
                                              m_variant="conservative")
                    assert report.all_satisfied, (
                        f"violated at alpha={alpha} beta={beta}")

    def test_report_slack_shape(self):
        g = cycle(4)
        report = check_norm_bound(g, 0.5, 1.0, np.ones((4, 2)))
        assert report.slack.shape == (4,)
        assert report.num_violations == 0

    def test_isolated_node_beta_zero_rejected(self):
        g = build_graph(3, [(0, 1)])
        with pytest.raises(ValidationError):
            convolved_norm_bound(g, 0.5, 0.0, 1.0)

    def test_weighted_graph_rejected(self):
        g = build_graph(2, [(0, 1, 2.0)])
        with pytest.raises(ValidationError):
            convolved_norm_bound(g, 0.5, 1.0, 1.0)


class TestNoiseBounds:
    def montecarlo(self, graph, alpha, beta, family, sigma, w_fro, draws,
                   seed, row_mu="holder"):
        params = ConvParams(alpha, beta, family)
        op = build_operator(graph, params)
        rng = np.random.default_rng(seed)
        k, out_dim = 3, 2
        w = rng.normal(size=(k, out_dim))
        w *= w_fro / np.linalg.norm(w)
        samples = np.zeros((draws, graph.num_nodes))
        for t in range(draws):
            eps = sigma * rng.standard_normal((graph.num_nodes, k))
            samples[t] = np.sum((op.apply(eps) @ w) ** 2, axis=1)
        return samples

    @pytest.mark.parametrize("family", ["symmetric", "row_normalized"])
    def test_mc_mean_and_quantile(self, family):
        g = generate_random_connected_graph(12, 0.3, seed=5)
        alpha, beta, sigma, w_fro, delta = 0.5, 1.0, 0.7, 1.3, 0.1
        draws = 4000
        samples = self.montecarlo(g, alpha, beta, family, sigma, w_fro,
                                  draws, seed=0)
        mu, high = noise_distance_bounds(g, alpha, beta, sigma, w_fro, delta,
                                         family, m_variant="conservative")
        mean = samples.mean(axis=0)
        se = samples.std(axis=0, ddof=1) / np.sqrt(draws)
        assert np.all(mean <= mu + 5 * se)
        q = np.quantile(samples, 1.0 - delta, axis=0)
        assert np.all(q <= high + 1e-9)

    def test_sigma_zero(self):
        g = cycle(5)
        mu, high = noise_distance_bounds(g, 0.5, 1.0, 0.0, 1.0, 0.1,
                                         "symmetric")
        np.testing.assert_array_equal(mu, np.zeros(5))
        np.testing.assert_array_equal(high, np.zeros(5))

    def test_display_formula_can_undershoot(self):
        # the closed-form variant in augmented degrees only is not a valid
        # expectation bound for beta > 1; on a star it drops below the exact
        # row-entry version that replaces it
        g = star(3)
        mu_holder, _ = noise_distance_bounds(g, 0.0, 2.0, 1.0, 1.0, 0.1,
                                             "row_normalized", row_mu="holder")
        mu_display, _ = noise_distance_bounds(g, 0.0, 2.0, 1.0, 1.0, 0.1,
                                              "row_normalized",
                                              row_mu="display")
        assert mu_display[0] < mu_holder[0]

    def test_single_node_wrapper(self):
        g = cycle(4)
        mu, high = noise_distance_bound(g, 2, 0.5, 1.0, 1.0, 1.0, 0.1,
                                        "symmetric")
        mus, highs = noise_distance_bounds(g, 0.5, 1.0, 1.0, 1.0, 0.1,
                                           "symmetric")
        assert mu == mus[2]
        assert high == highs[2]
        with pytest.raises(ValidationError):
            noise_distance_bound(g, 9, 0.5, 1.0, 1.0, 1.0, 0.1, "symmetric")

    def test_parameter_validation(self):
        g = cycle(4)
        with pytest.raises(ValidationError):
            noise_distance_bounds(g, 0.5, 1.0, -1.0, 1.0, 0.1, "symmetric")
        with pytest.raises(ValidationError):
            noise_distance_bounds(g, 0.5, 1.0, 1.0, 1.0, 0.0, "symmetric")
        with pytest.raises(ValidationError):
            noise_distance_bounds(g, 0.5, 1.0, 1.0, 1.0, 1.5, "symmetric")
        with pytest.raises(ValidationError):
            noise_distance_bounds(g, 0.5, 1.0, 1.0, 1.0, 0.1,
                                  "row_normalized", row_mu="bogus")


class TestDegreeGap:
    def test_reference_values(self):
        assert degree_gap_leading_term(9, 1, 0.0, 1.0) == pytest.approx(8.0)
        assert degree_gap_leading_term(9, 1, 0.5, 1.0) == 0.0
        assert degree_gap_leading_term(9, 1, 1.0, 1.0) == pytest.approx(
            1.0 / 10.0 - 1.0 / 2.0)

    @given(st.floats(0, 50), st.floats(0, 50),
           st.floats(0, 1), st.floats(0.1, 3))
    def test_antisymmetric(self, da, db, alpha, beta):
        gap = degree_gap_leading_term(da, db, alpha, beta)
        flipped = degree_gap_leading_term(db, da, alpha, beta)
        assert gap == pytest.approx(-flipped, abs=1e-10)

    def test_zero_degree_large_alpha_rejected(self):
        with pytest.raises(ValidationError):
            degree_gap_leading_term(0.0, 3.0, 0.8, 0.0)


class TestStructuralReplicas:
    def test_zero_noise_distances_vanish(self):
        template = generate_random_connected_graph(10, 0.3, seed=2)
        for family in ("symmetric", "row_normalized"):
            result = structural_replica_distances(
                template, 0.5, 1.0, family, sigma=0.0, trials=3, seed=0)
            assert result.emb_mean_distance.max() < 1e-9
            assert result.conv_mean_sq.max() < 1e-18

    def test_noisy_convolution_respects_bounds(self):
        template = generate_random_connected_graph(12, 0.3, seed=3)
        for family in ("symmetric", "row_normalized"):
            result = structural_replica_distances(
                template, 0.5, 1.0, family, sigma=0.8, trials=60, seed=1,
                m_variant="conservative")
            # twin noise is a difference of two iid draws: variance doubles,
            # so the single-draw expectation factor is scaled by 2
            assert np.all(result.conv_mean_sq <=
                          2.0 * result.conv_high_factor)

    def test_class_rows_cover_all_nodes(self):
        template = generate_random_connected_graph(9, 0.4, seed=4)
        result = structural_replica_distances(
            template, 0.3, 1.0, "symmetric", sigma=0.5, trials=2, seed=0)
        assert sum(r.count for r in result.class_rows) == 9
        degs = [r.degree for r in result.class_rows]
        assert degs == sorted(degs)
        for row in result.class_rows:
            assert row.q10 <= row.q50 <= row.q90

    def test_trials_validation(self):
        with pytest.raises(ValidationError):
            structural_replica_distances(cycle(4), 0.5, 1.0, "symmetric",
                                         sigma=0.1, trials=0, seed=0)
