"""Structural distance, quantile neighborhoods, and the rank-transfer check.

The distance tests compare the production kernel against a literal
triple-loop implementation of the defining formula; the oracle lives here
so other test modules can reuse it.
"""
import numpy as np
import pytest

from nettransfer import (
    ObservationSplit,
    build_prob_matrix,
    graph_distance_block,
    graph_distance_matrix,
    planted_block_model,
    quantile_neighborhoods,
    rankings_constant,
    sample_adjacency,
)


def distance_oracle(matrix):
    """Definitional distance: for each pair, walk every unmasked coordinate."""
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    g = m @ m
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            total = 0.0
            for l in range(n):
                if l == i or l == j:
                    continue
                total += (g[i, l] - g[j, l]) ** 2
            d[i, j] = total
    return d


def _random_symmetric(rng, n, binary=False):
    m = rng.random((n, n))
    if binary:
        m = (m < 0.4).astype(float)
        np.fill_diagonal(m, 0.0)
    return (m + m.T) / 2.0


# ---------------------------------------------------------------------------
# distance kernel


def test_identical_rows_have_zero_distance():
    m = np.array(
        [
            [0.2, 0.5, 0.5, 0.1],
            [0.5, 0.3, 0.3, 0.4],
            [0.5, 0.3, 0.3, 0.4],
            [0.1, 0.4, 0.4, 0.6],
        ]
    )
    d = graph_distance_matrix(m)
    assert d[1, 2] == pytest.approx(0.0, abs=1e-12)


def test_path_graph_hand_values():
    a = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    d = graph_distance_matrix(a)
    # endpoints share their two-step profile; endpoint vs middle differs by 1
    assert d[0, 2] == pytest.approx(0.0, abs=1e-12)
    assert d[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert d[1, 2] == pytest.approx(1.0, abs=1e-12)


def test_distance_matches_oracle_random_cases():
    rng = np.random.default_rng(17)
    for case in range(25):
        n = int(rng.integers(2, 17))
        m = _random_symmetric(rng, n, binary=case % 2 == 0)
        np.testing.assert_allclose(
            graph_distance_matrix(m), distance_oracle(m), rtol=1e-9, atol=1e-9
        )


def test_distance_block_matches_full_matrix_columns():
    rng = np.random.default_rng(23)
    m = _random_symmetric(rng, 12)
    cols = np.array([0, 3, 7, 11])
    block = graph_distance_block(m, cols)
    full = distance_oracle(m)
    np.testing.assert_allclose(block, full[:, cols], rtol=1e-9, atol=1e-9)


def test_distance_permutation_equivariance():
    rng = np.random.default_rng(31)
    m = _random_symmetric(rng, 10)
    perm = rng.permutation(10)
    d = graph_distance_matrix(m)
    d_perm = graph_distance_matrix(m[np.ix_(perm, perm)])
    np.testing.assert_allclose(d_perm, d[np.ix_(perm, perm)], rtol=1e-9, atol=1e-12)


def test_distance_quartic_scaling():
    rng = np.random.default_rng(37)
    m = _random_symmetric(rng, 9) * 0.5  # keep c*m inside [0, 1]
    c = 1.7
    np.testing.assert_allclose(
        graph_distance_matrix(c * m), c**4 * graph_distance_matrix(m), rtol=1e-9, atol=1e-12
    )


def test_distance_shape_contracts():
    rng = np.random.default_rng(41)
    m = _random_symmetric(rng, 8)
    d = graph_distance_matrix(m)
    np.testing.assert_array_equal(d, d.T)
    assert np.all(np.diag(d) == 0.0)
    assert d.min() >= 0.0
    with pytest.raises(ValueError):
        graph_distance_matrix(rng.random((3, 4)))
    with pytest.raises(ValueError):
        graph_distance_block(rng.random((4, 4)), [0])  # asymmetric


# ---------------------------------------------------------------------------
# quantile neighborhoods


def _toy_instance(seed, n=20, n_obs=8):
    rng = np.random.default_rng(seed)
    a = _random_symmetric(rng, n, binary=True)
    idx = np.sort(rng.choice(n, size=n_obs, replace=False))
    split = ObservationSplit(n=n, indices=idx)
    return graph_distance_matrix(a), split


def test_full_bandwidth_takes_whole_subset():
    d, split = _toy_instance(seed=2)
    nbhd = quantile_neighborhoods(d, split, 1.0)
    observed = set(split.indices.tolist())
    for i, members in enumerate(nbhd.sets):
        expected = observed | {i} if i in observed else observed
        assert set(members.tolist()) == expected


def test_neighborhood_size_contract():
    d, split = _toy_instance(seed=5, n=30, n_obs=10)
    for h, want in ((0.3, 3), (0.05, 1), (0.99, 9)):
        nbhd = quantile_neighborhoods(d, split, h)
        for i, members in enumerate(nbhd.sets):
            if i in split.indices:
                assert i in members
                assert members.size == min(want, split.n_observed - 1) + 1
            else:
                assert members.size == want
            assert set(members.tolist()) <= set(split.indices.tolist()) | {i}


def test_equal_distances_pick_smallest_indices():
    n = 12
    split = ObservationSplit(n=n, indices=[2, 4, 6, 8, 10])
    d = np.ones((n, n)) - np.eye(n)
    nbhd = quantile_neighborhoods(d, split, 0.5)
    np.testing.assert_array_equal(nbhd.sets[0], [2, 4])
    # an observed row skips itself, then appends itself
    np.testing.assert_array_equal(nbhd.sets[4], [2, 6, 4])


def test_neighborhoods_monotone_in_bandwidth():
    d, split = _toy_instance(seed=13, n=25, n_obs=12)
    levels = (0.1, 0.25, 0.5, 0.75, 1.0)
    previous = None
    for h in levels:
        nbhd = quantile_neighborhoods(d, split, h)
        current = [set(s.tolist()) for s in nbhd.sets]
        if previous is not None:
            assert all(p <= c for p, c in zip(previous, current))
        previous = current


def test_neighborhood_input_validation():
    d, split = _toy_instance(seed=19)
    with pytest.raises(ValueError):
        quantile_neighborhoods(d, split, 0.0)
    with pytest.raises(ValueError):
        quantile_neighborhoods(d, split, 1.5)
    with pytest.raises(ValueError):
        quantile_neighborhoods(d[:10, :10], split, 0.5)


# ---------------------------------------------------------------------------
# rank transfer between two matrices


def test_rankings_identical_matrices_need_no_widening():
    rng = np.random.default_rng(29)
    d = graph_distance_matrix(_random_symmetric(rng, 15))
    report = rankings_constant(d, d, 0.25)
    assert report.c_hat == 1.0
    assert report.witness is None
    assert 0.0 < report.required_quantile <= 0.25 + 1e-9


def test_rankings_nested_communities():
    # coarsening the communities preserves bottom-quantile membership
    source = build_prob_matrix(planted_block_model(40, 4, 0.9, 0.1))
    target = build_prob_matrix(planted_block_model(40, 2, 0.9, 0.1))
    report = rankings_constant(
        graph_distance_matrix(source), graph_distance_matrix(target), 0.25
    )
    assert report.c_hat == 1.0


def test_rankings_reversed_row_fails_tight_grid():
    rng = np.random.default_rng(43)
    base = _random_symmetric(rng, 30)
    dp = graph_distance_matrix(base)
    dq = dp.copy()
    # invert the ordering of one row/column pair's distances
    dq[0] = dp[0].max() - dp[0]
    dq[:, 0] = dq[0]
    np.fill_diagonal(dq, 0.0)
    report = rankings_constant(dp, dq, 0.1, grid=(1.0,))
    assert report.c_hat is None
    assert report.witness is not None
    assert report.required_quantile > 0.1


def test_rankings_grid_validation():
    d = graph_distance_matrix(np.full((5, 5), 0.5) - 0.5 * np.eye(5))
    with pytest.raises(ValueError):
        rankings_constant(d, d, 0.2, grid=())
    with pytest.raises(ValueError):
        rankings_constant(d, d, 0.2, grid=(2.0, 1.0))
    with pytest.raises(ValueError):
        rankings_constant(d, d, 0.2, grid=(0.5, 1.0))
    with pytest.raises(ValueError):
        rankings_constant(d, d[:4, :4], 0.2)


def test_rankings_ties_do_not_depend_on_order():
    # block distances are full of exact ties; identical inputs must pass at C=1
    m = build_prob_matrix(planted_block_model(24, 3, 0.8, 0.2))
    a = sample_adjacency(m, seed=55)
    d = graph_distance_matrix(a)
    report = rankings_constant(d, d, 1.0 / 3.0)
    assert report.c_hat == 1.0
