import json
import random
from fractions import Fraction

import mpmath
import pytest

from conftest import VANDERMONDE, random_heptagon
from heptagons import linalg
from heptagons.exactfield import find_prime_spec
from heptagons.heptagon import (
    INNER_ORDER,
    INNER_PAIRS,
    OUTER_PAIRS,
    ConcurrentTripleError,
    DegenerateHeptagonError,
    DuplicateLinesError,
    Heptagon,
    adjoint_coefficients,
    adjoint_formula,
    adjoint_jacobian,
    adjoint_nullspace,
    heptagon_from_inner,
    heptagon_from_json,
    heptagon_to_json,
    inner_map,
    interpolation_matrix,
    jacobian_mod_p,
    jacobian_rank,
    residual,
    theta_witness,
    validate,
)
from heptagons.projgeom import MONOMIALS, IdenticalPoints, ProjPoint, QuarticForm, eval_quartic
from oracles import brute_nullspace


def test_validate_accepts_mixed_heptagon():
    h = validate([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 2, 4], [1, 3, 9], [1, 5, 25]])
    assert len(h.lines) == 7


def test_validate_rejects_concurrent_triple():
    with pytest.raises(ConcurrentTripleError) as exc:
        validate([[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, 2, 4], [1, 3, 9], [1, 5, 25], [1, 7, 49]])
    assert exc.value.triple == (1, 2, 3)


def test_validate_rejects_duplicate():
    with pytest.raises(DuplicateLinesError):
        validate([[1, 0, 0], [2, 0, 0], [0, 0, 1], [1, 1, 1], [1, 2, 4], [1, 3, 9], [1, 5, 25]])


def test_residual_arrangement(vandermonde):
    res = residual(vandermonde)
    assert len(res) == 14
    assert len(set(p.key() for p in res.points.values())) == 14
    assert (1, 2) not in res.points and (1, 7) not in res.points
    assert set(res.inner()) == {(1, 3), (2, 4), (3, 5), (4, 6), (5, 7), (1, 6), (2, 7)}
    assert set(INNER_PAIRS) | set(OUTER_PAIRS) == set(res.points)
    for (i, j), p in res.points.items():
        assert sum(a * b for a, b in zip(p.coords, vandermonde.line(i).coords)) == 0
        assert sum(a * b for a, b in zip(p.coords, vandermonde.line(j).coords)) == 0


def test_adjoint_vanishes_on_residual_points(vandermonde):
    Q = adjoint_formula(vandermonde)
    assert not Q.is_zero()
    assert all(eval_quartic(Q, p) == 0 for p in residual(vandermonde).points.values())


def test_adjoint_routes_agree_with_independent_elimination(vandermonde):
    Q, dim = adjoint_nullspace(vandermonde)
    assert dim == 1
    assert Q.proportional(adjoint_formula(vandermonde))
    rows = interpolation_matrix(list(residual(vandermonde).points.values()))
    ref = brute_nullspace(rows, 15)
    assert len(ref) == 1 and Q.proportional(QuarticForm(ref[0]))


def test_scaling_a_line_scales_the_adjoint(vandermonde):
    Q = adjoint_formula(vandermonde)
    scaled = adjoint_formula(vandermonde.scale_line(3, Fraction(-5, 2)))
    assert scaled.coeffs == tuple(Fraction(-5, 2) * c for c in Q.coeffs)


def test_rotation_keeps_adjoint(vandermonde):
    assert adjoint_formula(vandermonde.rotated(1)).proportional(adjoint_formula(vandermonde))


def test_degenerate_kernel_raises(vandermonde, monkeypatch):
    # collapse the residual arrangement to 10 distinct points: kernel of dim 5
    import heptagons.heptagon as hmod

    real = hmod.residual(vandermonde)
    pts = list(real.points.values())
    fake = {pair: pts[n % 10] for n, pair in enumerate(real.points)}
    monkeypatch.setattr(hmod, "residual", lambda h: hmod.ResidualArrangement(fake))
    with pytest.raises(DegenerateHeptagonError) as exc:
        adjoint_nullspace(vandermonde)
    assert exc.value.kernel_dim == 5
    Q, dim = adjoint_nullspace(vandermonde, strict=False)
    assert dim == 5 and all(eval_quartic(Q, p) == 0 for p in pts[:10])


def test_theta_witness(vandermonde):
    w = theta_witness(vandermonde)
    assert w.valid and w.noncollinear and w.distinct
    assert set(w.to_json()["points"]) == {"p35", "p36", "p46", "p27"}


def test_inner_map_order(vandermonde):
    pts = inner_map(vandermonde)
    res = residual(vandermonde)
    assert INNER_ORDER == ((1, 3), (4, 6), (2, 7), (3, 5), (1, 6), (2, 4), (5, 7))
    assert list(pts) == [res[pair] for pair in INNER_ORDER]


def test_round_trips(vandermonde):
    assert heptagon_from_inner(inner_map(vandermonde)) == vandermonde
    t = inner_map(vandermonde)
    assert inner_map(heptagon_from_inner(t)) == t


def test_from_inner_rejects_repeated_points(vandermonde):
    pts = list(inner_map(vandermonde))
    pts[3] = pts[0]
    with pytest.raises(IdenticalPoints):
        heptagon_from_inner(pts)


def test_jacobian_shape_and_rank():
    h = random_heptagon(random.Random(30))
    J = adjoint_jacobian(h)
    assert len(J) == 15 and all(len(row) == 21 for row in J)
    assert jacobian_rank(J) == 15
    spec = find_prime_spec(None, 10**9)
    assert jacobian_rank(J, "modular", spec) == 15
    assert linalg.rank_mod_p(jacobian_mod_p(h, spec), spec.p) == 15


def test_vandermonde_jacobian_drops_rank(vandermonde):
    # all seven lines touch one conic, a special fiber of the adjoint map
    assert jacobian_rank(adjoint_jacobian(vandermonde)) == 14


def test_jacobian_rank_invariant_under_line_scaling():
    h = random_heptagon(random.Random(30))
    for k in range(1, 8):
        assert jacobian_rank(adjoint_jacobian(h.scale_line(k, Fraction(-7, 3)))) == 15


def test_jacobian_column_is_partial_derivative(vandermonde):
    # linear in each line: A(L_k + t e_c) = A + t * column
    J = adjoint_jacobian(vandermonde)
    base = adjoint_coefficients([l.coords for l in vandermonde.lines])
    t = Fraction(3, 7)
    for k in range(7):
        for c in range(3):
            vs = [list(l.coords) for l in vandermonde.lines]
            vs[k][c] += t
            moved = adjoint_coefficients(vs)
            col = [row[3 * k + c] for row in J]
            assert [m - b for m, b in zip(moved, base)] == [t * x for x in col]


def _embed(x, prec):
    if hasattr(x, "embed_complex"):
        return x.embed_complex(prec)
    q = Fraction(x)
    return mpmath.mpc(mpmath.mpf(q.numerator) / q.denominator)


def finite_difference_errors(h, step=1e-8, prec=120):
    """Relative errors of forward differences of the embedded adjoint map."""
    J = adjoint_jacobian(h)
    errors = []
    with mpmath.workprec(prec):
        emb = [[_embed(c, prec) for c in l.coords] for l in h.lines]
        base = adjoint_coefficients(emb)
        exact = [[_embed(x, prec) for x in row] for row in J]
        scale = max(abs(x) for row in exact for x in row)
        t = mpmath.mpf(step)
        for k in range(7):
            for c in range(3):
                vs = [list(v) for v in emb]
                vs[k][c] += t
                fd = [(m - b) / t for m, b in zip(adjoint_coefficients(vs), base)]
                for i in range(15):
                    x = exact[i][3 * k + c]
                    denom = abs(x) if abs(x) > 1e-9 * scale else scale
                    errors.append(float(abs(fd[i] - x) / denom))
    return errors


def test_jacobian_matches_finite_differences_rational():
    rng = random.Random(31)
    h = random_heptagon(rng, bound=3)
    assert max(finite_difference_errors(h)) < 1e-6


def test_json_round_trip(vandermonde):
    data = heptagon_to_json(vandermonde)
    assert data["field"] == "rational" and len(data["lines"]) == 7
    assert heptagon_from_json(json.dumps(data)) == vandermonde
    with pytest.raises(ValueError):
        heptagon_from_json({"field": "p-adic", "lines": VANDERMONDE})


def test_monomial_count():
    assert len(MONOMIALS) == 15
    assert eval_quartic(QuarticForm([Fraction(1)] + [Fraction(0)] * 14), ProjPoint([2, 1, 1])) == 16
