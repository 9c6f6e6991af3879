import itertools

import numpy as np
import pytest

from heptagons import walkgraph
from heptagons.walkgraph import EDGES, LABELS, adjacency_matrix, closed_walks
from oracles import dfs_closed_walks


def test_adjacency_shape_and_degrees():
    A = adjacency_matrix()
    assert A.shape == (12, 12)
    assert (A == A.T).all() and not A.diagonal().any()
    degrees = dict(zip(LABELS, A.sum(axis=1)))
    for i in (1, 2, 3):
        assert degrees[f"p{i}"] == 3 and degrees[f"q{i}"] == 3
        assert degrees[f"a{i}"] == 1 and degrees[f"b{i}"] == 1
    assert len(EDGES) == 12


def test_no_leaf_pair_edge():
    for i in (1, 2, 3):
        assert (f"a{i}", f"b{i}") not in EDGES and (f"b{i}", f"a{i}") not in EDGES


@pytest.mark.parametrize("k,expected", [(0, 12), (2, 24), (7, 504)])
def test_closed_walks_values(k, expected):
    assert closed_walks(k) == expected


@pytest.mark.parametrize("k", range(0, 8))
def test_closed_walks_match_dfs(k):
    assert closed_walks(k) == dfs_closed_walks(k, LABELS, EDGES)


@pytest.mark.parametrize("perm", list(itertools.permutations((1, 2, 3))))
def test_symmetric_relabeling(perm):
    def relabel(v):
        return v[0] + str(perm[int(v[1]) - 1])

    edges = [(relabel(u), relabel(v)) for u, v in EDGES]
    A = adjacency_matrix(LABELS, edges)
    assert closed_walks(7, A) == 504


def test_negative_length_rejected():
    with pytest.raises(ValueError):
        closed_walks(-1)


def test_excluded_configurations():
    assert walkgraph.excluded_configurations() == 4032
    assert walkgraph.excluded_configurations(walks=6) == 48
    assert walkgraph.closed_walks(7) % 6 == 0


def test_upper_bound_and_ledger():
    assert walkgraph.heptagon_upper_bound() == 336
    ledger = walkgraph.bound_ledger()
    assert ledger == {
        "biscribed_triangles": 48,
        "closed_walks_7": 504,
        "excluded_configurations": 4032,
        "excluded_configurations_alt": 4032,
        "scorza_cycle_product_7": 4368,
        "heptagon_upper_bound": 336,
        "dihedral_order": 14,
        "per_theta_modulo_dihedral": 24,
        "even_theta_characteristics": 36,
        "per_quartic_modulo_dihedral": 864,
    }


def test_numpy_power_is_exact():
    A = adjacency_matrix()
    assert int(np.trace(np.linalg.matrix_power(A, 7))) == 504
