import random
from fractions import Fraction

import pytest

from heptagons.tautring import (
    DimensionMismatchError,
    RingMismatchError,
    TautMonomial,
    TautRing,
    degree,
    reduce_monomial,
    scorza_class,
    scorza_cycle_product,
)
from oracles import coh_product_degree


def test_point_times_diagonal():
    r = TautRing(2, 3)
    assert r.x(1) * r.diagonal(1, 2) == r.x(1) * r.x(2)


def test_diagonal_square():
    r = TautRing(2, 3)
    assert r.diagonal(1, 2) * r.diagonal(1, 2) == r.x(1) * r.x(2) * -4


def test_point_square_vanishes():
    r = TautRing(2, 3)
    assert (r.x(1) * r.x(1)).is_zero()


def test_degree_of_all_points():
    r = TautRing(3, 3)
    assert degree(r.x(1) * r.x(2) * r.x(3)) == 1


def test_degree_of_diagonal_triangle():
    r = TautRing(3, 3)
    assert degree(r.diagonal(1, 2) * r.diagonal(2, 3) * r.diagonal(1, 3)) == -4


def test_degree_codimension_mismatch():
    r = TautRing(4, 3)
    with pytest.raises(DimensionMismatchError):
        degree(r.diagonal(1, 2) * r.diagonal(3, 4))


def test_scorza_class_terms():
    s = scorza_class(1, 2, 2, 3)
    assert s.terms == {
        TautMonomial.make(points=[1]): 2,
        TautMonomial.make(points=[2]): 2,
        TautMonomial.make(edges=[(1, 2)]): 1,
    }
    assert degree(s * s) == 12


def test_scorza_class_bad_indices():
    with pytest.raises(IndexError):
        scorza_class(1, 1, 2, 3)
    with pytest.raises(IndexError):
        scorza_class(2, 5, 4, 3)


@pytest.mark.parametrize("n", range(2, 11))
def test_scorza_cycle_product(n):
    assert scorza_cycle_product(n, 3) == 2 * 3**n - 6


def test_named_scorza_values():
    assert scorza_cycle_product(7, 3) == 4368
    assert scorza_cycle_product(3, 3) == 48
    assert scorza_cycle_product(2, 3) == 12


@pytest.mark.parametrize("g", [0, 1, 2, 3])
@pytest.mark.parametrize("n", range(3, 9))
def test_cycle_of_diagonals(n, g):
    r = TautRing(n, g)
    cls = r.one()
    for i in range(1, n):
        cls = cls * r.diagonal(i, i + 1)
    cls = cls * r.diagonal(n, 1)
    assert degree(cls) == -(2 * g - 2)


@pytest.mark.parametrize("a,b", [(3, 3), (3, 4), (4, 5)])
def test_disjoint_cycles_multiply(a, b):
    g = 3
    r = TautRing(a + b, g)
    cls = r.one()
    for lo, hi in ((1, a), (a + 1, a + b)):
        for i in range(lo, hi):
            cls = cls * r.diagonal(i, i + 1)
        cls = cls * r.diagonal(lo, hi)
    assert degree(cls) == (-(2 * g - 2)) ** 2


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        TautRing(2, 3).x(1) * TautRing(3, 3).x(1)
    with pytest.raises(RingMismatchError):
        TautRing(2, 3).x(1) + TautRing(2, 2).x(1)


def random_class(rng, ring, terms=4):
    out = ring.constant(0)
    for _ in range(rng.randint(1, terms)):
        kind = rng.choice("xDS1")
        i, j = sorted(rng.sample(range(1, ring.n + 1), 2))
        coeff = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        atom = {"x": ring.x(i), "D": ring.diagonal(i, j), "S": ring.scorza(i, j), "1": ring.one()}[kind]
        out = out + atom * coeff
    return out


def test_commutative_and_associative():
    rng = random.Random(21)
    for _ in range(150):
        ring = TautRing(rng.randint(2, 5), rng.randint(0, 3))
        a, b, c = (random_class(rng, ring) for _ in range(3))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


def test_reduction_is_confluent():
    rng = random.Random(22)
    for _ in range(1000):
        n = rng.randint(2, 6)
        pts = rng.sample(range(1, n + 1), rng.randint(0, 2))
        edges = [tuple(rng.sample(range(1, n + 1), 2)) for _ in range(rng.randint(0, 5))]
        g = rng.randint(0, 3)
        reference = reduce_monomial(pts, edges, g)
        for seed in range(3):
            assert reduce_monomial(pts, edges, g, rng=random.Random(seed)) == reference


def test_degree_matches_cohomology_oracle_on_scorza_products():
    # independent Kunneth evaluation with a symplectic basis
    assert coh_product_degree([("S", (1, 2)), ("S", (2, 3)), ("S", (1, 3))], 3, 3) == 48
    for n in (2, 3, 4, 5):
        atoms = [("S", (i, i + 1)) for i in range(1, n)] + [("S", (1, n))]
        assert coh_product_degree(atoms, n, 3) == scorza_cycle_product(n, 3)


def test_json_shape():
    s = scorza_class(1, 2, 2, 3)
    assert s.to_json() == [
        {"points": [], "edges": [[1, 2]], "coeff": "1"},
        {"points": [1], "edges": [], "coeff": "2"},
        {"points": [2], "edges": [], "coeff": "2"},
    ]
