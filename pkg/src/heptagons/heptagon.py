"""Heptagons, residual points and adjoint quartics.

A heptagon is a labeled 7-tuple of lines with no three concurrent.  Its 14
residual points are the meets of non-consecutive lines; the adjoint is the
unique quartic through them.  Two independent routes compute the adjoint:
a closed determinant formula, multilinear in the lines, and the kernel of
the 14x15 interpolation matrix.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .exactfield import FieldElement, NumberFieldTower, PrimeSpec, as_rational, reduce_mod_prime
from .projgeom import (
    MONOMIALS,
    IdenticalPoints,
    ProjLine,
    ProjPoint,
    ProjTransform,
    QuarticForm,
    act_line,
    collinear,
    det3,
    join,
    meet,
    product_of_linear_forms,
)

__all__ = [
    "ConcurrentTripleError",
    "DegenerateHeptagonError",
    "DuplicateLinesError",
    "Heptagon",
    "HeptagonError",
    "INNER_ORDER",
    "INNER_PAIRS",
    "OUTER_PAIRS",
    "RESIDUAL_PAIRS",
    "ResidualArrangement",
    "ThetaWitness",
    "adjoint_coefficients",
    "adjoint_formula",
    "adjoint_jacobian",
    "adjoint_nullspace",
    "heptagon_from_inner",
    "heptagon_from_json",
    "heptagon_to_json",
    "inner_map",
    "jacobian_rank",
    "residual",
    "theta_witness",
    "validate",
]

N = 7


def _cyclic_distance(i: int, j: int) -> int:
    d = abs(i - j) % N
    return min(d, N - d)


RESIDUAL_PAIRS = tuple(
    (i, j) for i in range(1, N + 1) for j in range(i + 1, N + 1) if _cyclic_distance(i, j) > 1
)
INNER_PAIRS = tuple(p for p in RESIDUAL_PAIRS if _cyclic_distance(*p) == 2)
OUTER_PAIRS = tuple(p for p in RESIDUAL_PAIRS if _cyclic_distance(*p) == 3)
# labeled inner points, in the order used by the reconstruction maps
INNER_ORDER = ((1, 3), (4, 6), (2, 7), (3, 5), (1, 6), (2, 4), (5, 7))
# line k of the reconstructed heptagon joins inner points JOIN_ORDER[k]
JOIN_ORDER = ((1, 5), (3, 6), (1, 4), (2, 6), (4, 7), (2, 5), (3, 7))


class HeptagonError(ValueError):
    pass


class DuplicateLinesError(HeptagonError):
    def __init__(self, i, j):
        super().__init__(f"lines {i} and {j} coincide")
        self.pair = (i, j)


class ConcurrentTripleError(HeptagonError):
    def __init__(self, i, j, k):
        super().__init__(f"lines {i}, {j}, {k} are concurrent")
        self.triple = (i, j, k)


class DegenerateHeptagonError(ArithmeticError):
    def __init__(self, kernel_dim):
        super().__init__(f"adjoint is not unique: kernel dimension {kernel_dim}")
        self.kernel_dim = kernel_dim


class Heptagon:
    """Seven labeled lines, validated on construction (see :func:`validate`)."""

    __slots__ = ("lines",)

    def __init__(self, lines, *, check: bool = True):
        lines = tuple(l if isinstance(l, ProjLine) else ProjLine(l) for l in lines)
        if len(lines) != N:
            raise HeptagonError(f"a heptagon has 7 lines, got {len(lines)}")
        if check:
            _check_general_position(lines)
        self.lines = lines

    def line(self, i: int) -> ProjLine:
        """Line with 1-based label ``i``."""
        return self.lines[i - 1]

    def relabel(self, perm) -> Heptagon:
        """New heptagon whose line ``k`` is old line ``perm[k-1]`` (1-based)."""
        return Heptagon([self.lines[p - 1] for p in perm], check=False)

    def rotated(self, steps: int = 1) -> Heptagon:
        return self.relabel([(k + steps) % N + 1 for k in range(N)])

    def reversed(self) -> Heptagon:
        return Heptagon(self.lines[::-1], check=False)

    def scale_line(self, i: int, factor) -> Heptagon:
        lines = list(self.lines)
        lines[i - 1] = lines[i - 1].scaled(factor)
        return Heptagon(lines, check=False)

    def transformed(self, T: ProjTransform) -> Heptagon:
        return Heptagon([act_line(T, l) for l in self.lines], check=False)

    def key(self) -> tuple:
        return tuple(l.key() for l in self.lines)

    def __eq__(self, other):
        if not isinstance(other, Heptagon):
            return NotImplemented
        return all(a == b for a, b in zip(self.lines, other.lines))

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Heptagon({[l.to_json() for l in self.lines]})"


def _check_general_position(lines):
    for a, b in itertools.combinations(range(N), 2):
        if lines[a].proportional(lines[b]):
            raise DuplicateLinesError(a + 1, b + 1)
    for a, b, c in itertools.combinations(range(N), 3):
        if det3(lines[a].coords, lines[b].coords, lines[c].coords) == 0:
            raise ConcurrentTripleError(a + 1, b + 1, c + 1)


def validate(lines) -> Heptagon:
    """Build a heptagon, raising on coincident lines or concurrent triples."""
    return Heptagon(lines)


# ---------------------------------------------------------------------------
# residual arrangement


@dataclass(frozen=True)
class ResidualArrangement:
    points: dict  # (i, j) -> ProjPoint, i < j, non-consecutive

    def inner(self) -> dict:
        return {p: self.points[p] for p in INNER_PAIRS}

    def outer(self) -> dict:
        return {p: self.points[p] for p in OUTER_PAIRS}

    @staticmethod
    def is_inner(pair) -> bool:
        return _cyclic_distance(*pair) == 2

    def __getitem__(self, pair):
        i, j = pair
        return self.points[(min(i, j), max(i, j))]

    def __len__(self):
        return len(self.points)


def residual(h: Heptagon) -> ResidualArrangement:
    return ResidualArrangement({(i, j): meet(h.line(i), h.line(j)) for i, j in RESIDUAL_PAIRS})


# ---------------------------------------------------------------------------
# adjoint, route 1: closed formula


def adjoint_coefficients(vectors) -> list:
    """15 adjoint coefficients from 7 raw coefficient triples.

    sum_{i=2..6} det(L1|Li|Li+1) * prod_{j != 1,i,i+1} Lj, expanded in the
    quartic monomial order.  Works over any commutative ring.
    """
    v = list(vectors)
    out = {}
    for i in range(2, 7):
        d = det3(v[0], v[i - 1], v[i])
        if d == 0:
            continue
        others = [v[j - 1] for j in range(1, 8) if j not in (1, i, i + 1)]
        poly = product_of_linear_forms(others)
        for e, c in poly.items():
            out[e] = out[e] + d * c if e in out else d * c
    zero = 0 * v[0][0]
    return [out.get(m, zero) for m in MONOMIALS]


def adjoint_formula(h: Heptagon) -> QuarticForm:
    return QuarticForm(adjoint_coefficients([l.coords for l in h.lines]))


# ---------------------------------------------------------------------------
# adjoint, route 2: interpolation kernel


def interpolation_matrix(points) -> list:
    rows = []
    for p in points:
        x, y, z = p.coords
        px = [1, x, x * x, x * x * x, x * x * x * x]
        py = [1, y, y * y, y * y * y, y * y * y * y]
        pz = [1, z, z * z, z * z * z, z * z * z * z]
        rows.append([px[i] * py[j] * pz[k] for i, j, k in MONOMIALS])
    return rows


def adjoint_nullspace(h: Heptagon, *, strict: bool = True):
    """Kernel of the 14x15 interpolation matrix.

    Returns ``(QuarticForm, kernel_dim)``; the form is the first canonical
    basis vector.  With ``strict`` a kernel of dimension != 1 raises
    :class:`DegenerateHeptagonError`.
    """
    pts = list(residual(h).points.values())
    basis = linalg.nullspace(interpolation_matrix(pts), 15)
    if strict and len(basis) != 1:
        raise DegenerateHeptagonError(len(basis))
    if not basis:
        return None, 0
    ref = h.lines[0].coords[0]
    vec = [_like(c, ref) for c in basis[0]]
    return QuarticForm(vec), len(basis)


def _like(value, ref):
    if isinstance(ref, FieldElement) and not isinstance(value, FieldElement):
        return ref.tower.coerce(value, ref.level)
    return value


# ---------------------------------------------------------------------------
# theta characteristic witness


@dataclass(frozen=True)
class ThetaWitness:
    """Certificate that the associated theta characteristic has no sections.

    ``p35, p36, p46`` must not be collinear and ``p27`` must differ from all
    three.
    """

    p35: ProjPoint
    p36: ProjPoint
    p46: ProjPoint
    p27: ProjPoint
    noncollinear: bool
    distinct: bool

    @property
    def valid(self) -> bool:
        return self.noncollinear and self.distinct

    def to_json(self):
        return {
            "points": {
                "p35": self.p35.to_json(),
                "p36": self.p36.to_json(),
                "p46": self.p46.to_json(),
                "p27": self.p27.to_json(),
            },
            "noncollinear": self.noncollinear,
            "distinct": self.distinct,
            "valid": self.valid,
        }


def theta_witness(h: Heptagon) -> ThetaWitness:
    r = residual(h)
    p35, p36, p46, p27 = r[3, 5], r[3, 6], r[4, 6], r[2, 7]
    return ThetaWitness(
        p35, p36, p46, p27,
        noncollinear=not collinear(p35, p36, p46),
        distinct=all(p27 != q for q in (p35, p36, p46)),
    )


# ---------------------------------------------------------------------------
# reconstruction from inner points


def inner_map(h: Heptagon) -> tuple:
    """Labeled inner residual points (p13, p46, p27, p35, p16, p24, p57)."""
    return tuple(meet(h.line(i), h.line(j)) for i, j in INNER_ORDER)


def heptagon_from_inner(points) -> Heptagon:
    """Inverse of :func:`inner_map`: the lines l15, l36, l14, l26, l47, l25, l37."""
    pts = [p if isinstance(p, ProjPoint) else ProjPoint(p) for p in points]
    if len(pts) != N:
        raise HeptagonError("need seven points")
    for a, b in itertools.combinations(range(N), 2):
        if pts[a] == pts[b]:
            raise IdenticalPoints(f"points {a + 1} and {b + 1} coincide")
    return validate([join(pts[i - 1], pts[j - 1]) for i, j in JOIN_ORDER])


# ---------------------------------------------------------------------------
# Jacobian of the adjoint map


def _unit(c, ref):
    one = 1 + 0 * ref
    zero = 0 * ref
    return tuple(one if k == c else zero for k in range(3))


def adjoint_jacobian(h: Heptagon) -> list:
    """15x21 matrix of partial derivatives of the adjoint coefficients.

    Column ``3*(k-1) + c`` is the derivative along coordinate ``c`` of line
    ``k``.  The formula is linear in each line, so that column is the
    formula with line ``k`` replaced by the ``c``-th unit vector.
    """
    vectors = [l.coords for l in h.lines]
    return _jacobian_of(vectors)


def _jacobian_of(vectors) -> list:
    ref = vectors[0][0]
    cols = []
    for k in range(N):
        for c in range(3):
            vs = list(vectors)
            vs[k] = _unit(c, ref)
            cols.append(adjoint_coefficients(vs))
    return [[cols[j][i] for j in range(3 * N)] for i in range(15)]


def jacobian_mod_p(h: Heptagon, spec: PrimeSpec) -> list:
    """Jacobian of the modular image of ``h`` (entries in F_p)."""
    p = spec.p
    vectors = [tuple(reduce_mod_prime(c, spec) for c in l.coords) for l in h.lines]
    return [[x % p for x in row] for row in _jacobian_of(vectors)]


def jacobian_rank(m, mode: str = "exact", spec: PrimeSpec | None = None) -> int:
    """Rank by exact elimination or by reduction modulo a prime.

    A modular rank is a lower bound for the exact rank, so a full-rank image
    certifies full rank.
    """
    if mode == "exact":
        return linalg.rank(m)
    if mode == "modular":
        if spec is None:
            raise ValueError("modular rank needs a PrimeSpec")
        reduced = [[reduce_mod_prime(x, spec) for x in row] for row in m]
        return linalg.rank_mod_p(reduced, spec.p)
    raise ValueError(f"unknown rank mode {mode!r}")


# ---------------------------------------------------------------------------
# JSON


def heptagon_to_json(h: Heptagon, tower: NumberFieldTower | None = None) -> dict:
    data = {
        "field": "rational" if tower is None else "klein-tower",
        "lines": [l.to_json() for l in h.lines],
    }
    if tower is not None:
        data["tower"] = tower_to_json(tower)
    return data


def tower_to_json(tower: NumberFieldTower) -> list:
    return [
        [c.to_json() if isinstance(c, FieldElement) else str(as_rational(c)) for c in m.coeffs]
        for m in tower.moduli
    ]


def heptagon_from_json(data, tower: NumberFieldTower | None = None) -> Heptagon:
    """Parse the heptagon JSON format (a dict or a JSON string)."""
    if isinstance(data, str):
        data = json.loads(data)
    field = data.get("field", "rational")
    lines = data["lines"]
    if field == "rational":
        return validate([[as_rational(c) for c in l] for l in lines])
    if field == "klein-tower":
        if tower is None:
            from .klein import tower_from_json

            if "tower" in data:
                tower = tower_from_json(data["tower"], data.get("alpha_root", 0))
        if tower is None:
            raise ValueError("klein-tower heptagon needs a tower")
        return validate([[FieldElement.from_json(tower, c) for c in l] for l in lines])
    raise ValueError(f"unknown field {field!r}")
