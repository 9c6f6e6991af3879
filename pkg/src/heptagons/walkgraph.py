"""Closed walks on the biscribed-triangle incidence graph and the count ledger.

The graph has vertices p1..p3 (a triangle), q_i hanging off p_i, and two
leaves a_i, b_i hanging off each q_i.  Closed walks of length 7 are the
degenerate seven-point configurations attached to one biscribed triangle.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .tautring import scorza_cycle_product

__all__ = [
    "EDGES",
    "LABELS",
    "adjacency_matrix",
    "bound_ledger",
    "closed_walks",
    "even_theta_characteristics",
    "excluded_configurations",
    "heptagon_upper_bound",
]

LABELS = ("p1", "p2", "p3", "q1", "q2", "q3", "a1", "b1", "a2", "b2", "a3", "b3")

EDGES = (
    ("p1", "p2"), ("p2", "p3"), ("p1", "p3"),
    ("p1", "q1"), ("p2", "q2"), ("p3", "q3"),
    ("q1", "a1"), ("q1", "b1"),
    ("q2", "a2"), ("q2", "b2"),
    ("q3", "a3"), ("q3", "b3"),
)

GENUS = 3
HEPTAGON_SIDES = 7


def adjacency_matrix(labels=LABELS, edges=EDGES) -> np.ndarray:
    index = {v: n for n, v in enumerate(labels)}
    A = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for u, v in edges:
        A[index[u], index[v]] = A[index[v], index[u]] = 1
    return A


def closed_walks(k: int, A: np.ndarray | None = None) -> int:
    """Number of closed walks of length ``k``: trace of A^k."""
    if k < 0:
        raise ValueError("walk length must be nonnegative")
    A = adjacency_matrix() if A is None else A
    return int(np.trace(np.linalg.matrix_power(A.astype(object), k)))


def excluded_configurations(walks: int | None = None, triangles=None) -> int:
    """Configurations with a repeated point: (#triangles) * walks / |S_3|."""
    walks = closed_walks(HEPTAGON_SIDES) if walks is None else walks
    triangles = scorza_cycle_product(3, GENUS) if triangles is None else triangles
    total = Fraction(triangles) * walks / 6
    if total.denominator != 1:
        raise ArithmeticError(f"{triangles} * {walks} is not divisible by 6")
    return int(total)


def heptagon_upper_bound() -> int:
    return int(scorza_cycle_product(HEPTAGON_SIDES, GENUS)) - excluded_configurations()


def even_theta_characteristics(g: int = GENUS) -> int:
    return 2 ** (g - 1) * (2**g + 1)


def dihedral_order(n: int = HEPTAGON_SIDES) -> int:
    return 2 * n


def bound_ledger() -> dict:
    """Every number of the upper-bound argument, recomputed."""
    triangles = int(scorza_cycle_product(3, GENUS))
    walks = closed_walks(HEPTAGON_SIDES)
    excluded = excluded_configurations(walks, triangles)
    cycle = int(scorza_cycle_product(HEPTAGON_SIDES, GENUS))
    bound = cycle - excluded
    thetas = even_theta_characteristics(GENUS)
    d7 = dihedral_order()
    per_theta = Fraction(bound, d7)
    return {
        "biscribed_triangles": triangles,
        "closed_walks_7": walks,
        "excluded_configurations": excluded,
        "excluded_configurations_alt": thetas * d7 * triangles // 6,
        "scorza_cycle_product_7": cycle,
        "heptagon_upper_bound": bound,
        "dihedral_order": d7,
        "per_theta_modulo_dihedral": int(per_theta) if per_theta.denominator == 1 else str(per_theta),
        "even_theta_characteristics": thetas,
        "per_quartic_modulo_dihedral": int(per_theta * thetas),
    }
