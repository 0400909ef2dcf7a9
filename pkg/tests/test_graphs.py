"""Weighted digraph container and the three capacity-related metrics."""

import numpy as np
import pytest

from netfeedback import (
    WeightedDigraph,
    build_canonical,
    inf_norm,
    is_strongly_connected,
    random_strongly_connected,
    sharp_metric,
    sign_pattern,
)


def test_inf_norm_is_max_abs_row_sum():
    g = WeightedDigraph([[1.0, -2.0], [0.5, 0.0]])
    assert inf_norm(g) == 3.0


def test_unit_cycle_metrics():
    g = build_canonical("cycle", 5)
    assert inf_norm(g) == 1.0
    assert sharp_metric(g) == 1.0


def test_sharp_metric_smallest_nonzero_magnitude():
    g = WeightedDigraph([[0.0, -0.25], [4.0, 0.0]])
    assert sharp_metric(g) == 0.25


def test_zero_matrix_degenerate():
    g = WeightedDigraph(np.zeros((3, 3)))
    assert inf_norm(g) == 0.0
    assert sharp_metric(g) == 0.0
    assert not is_strongly_connected(g)


def test_sign_patterns():
    assert sign_pattern(WeightedDigraph([[0.0, 1.0], [2.0, 0.0]])) == "all_nonnegative"
    assert sign_pattern(WeightedDigraph([[0.0, -1.0], [-2.0, 0.0]])) == "all_nonpositive"
    assert sign_pattern(WeightedDigraph([[0.0, -1.0], [2.0, 0.0]])) == "mixed"
    # a zero matrix counts as nonnegative, not mixed
    assert sign_pattern(WeightedDigraph(np.zeros((2, 2)))) == "all_nonnegative"


def test_cycle_orientation_and_neighbor_sets():
    # node i is fed by node i-1 (mod n); arcs are stored as (source, sink)
    g = build_canonical("cycle", 3)
    assert g.neighbors(0) == (2,)
    assert g.neighbors(1) == (0,)
    assert g.out_neighbors(2) == (0,)
    assert (2, 0) in g.arcs
    assert (0, 2) not in g.arcs


def test_self_arc_is_a_neighbor():
    g = build_canonical("single_selfloop", 1, a11=0.7)
    assert g.neighbors(0) == (0,)
    assert inf_norm(g) == 0.7
    assert is_strongly_connected(g)


def test_weights_read_only():
    g = build_canonical("cycle", 3)
    with pytest.raises(ValueError):
        g.weights[0, 0] = 5.0


def test_strong_connectivity():
    assert is_strongly_connected(build_canonical("cycle", 4))
    assert not is_strongly_connected(build_canonical("path_root_selfloop", 3))
    # single node with no arcs is trivially strongly connected
    assert is_strongly_connected(WeightedDigraph([[0.0]]))


def test_self_arcs_do_not_create_connectivity():
    w = np.zeros((2, 2))
    w[0, 0] = 1.0
    w[1, 1] = 1.0
    assert not is_strongly_connected(WeightedDigraph(w))


def test_path_root_selfloop_shape():
    g = build_canonical("path_root_selfloop", 4)
    # root feeds itself, each later node is fed by its predecessor
    assert g.neighbors(0) == (0,)
    assert g.neighbors(1) == (0,)
    assert g.neighbors(3) == (2,)
    assert not is_strongly_connected(g)


def test_bad_canonical_kind():
    with pytest.raises(ValueError):
        build_canonical("torus", 3)


def test_non_square_rejected():
    with pytest.raises(ValueError):
        WeightedDigraph(np.ones((2, 3)))


def test_random_strongly_connected_seeded():
    for seed in range(25):
        g = random_strongly_connected(4, seed=seed)
        assert is_strongly_connected(g)
    g1 = random_strongly_connected(5, seed=7)
    g2 = random_strongly_connected(5, seed=7)
    assert np.array_equal(g1.weights, g2.weights)
    g3 = random_strongly_connected(5, seed=8)
    assert not np.array_equal(g1.weights, g3.weights)


def test_random_graph_weight_range():
    g = random_strongly_connected(6, seed=3, weight_range=(0.4, 2.0))
    mags = np.abs(g.weights[g.weights != 0.0])
    assert mags.min() >= 0.4 - 1e-12
    assert mags.max() <= 2.0 + 1e-12
    assert sharp_metric(g) >= 0.4 - 1e-12
