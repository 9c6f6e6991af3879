"""Projective plane primitives over an exact field.

Coordinates may be ``Fraction`` or :class:`~heptagons.exactfield.FieldElement`
values (anything with exact ``+ - * /`` and comparison with 0).  Points and
lines are compared after scaling the first nonzero coordinate to 1.

Ternary quartics use a fixed monomial order: exponent triples ``(i, j, k)``
with ``i + j + k = 4`` in descending lexicographic order, see ``MONOMIALS``.
"""
from __future__ import annotations

from fractions import Fraction

from .exactfield import FieldElement, as_rational

__all__ = [
    "IdenticalLinesError",
    "IdenticalPoints",
    "MONOMIALS",
    "ProjLine",
    "ProjPoint",
    "ProjTransform",
    "QuarticForm",
    "act_line",
    "act_point",
    "act_quartic",
    "collinear",
    "concurrent",
    "cross",
    "det3",
    "eval_quartic",
    "incident",
    "join",
    "meet",
]

MONOMIALS = tuple(
    (i, j, 4 - i - j) for i in range(4, -1, -1) for j in range(4 - i, -1, -1)
)
_MONO_INDEX = {m: n for n, m in enumerate(MONOMIALS)}


class IdenticalLinesError(ValueError):
    pass


class IdenticalPoints(ValueError):
    pass


def _coerce(x):
    if isinstance(x, FieldElement) or isinstance(x, Fraction):
        return x
    return as_rational(x)


def _inv(x):
    return 1 / x if isinstance(x, FieldElement) else Fraction(1) / x


def cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def det3(a, b, c):
    return dot(a, cross(b, c))


def _is_null(v) -> bool:
    return all(x == 0 for x in v)


class _Homogeneous:
    __slots__ = ("coords", "_normal")

    def __init__(self, *coords):
        if len(coords) == 1:
            coords = tuple(coords[0])
        if len(coords) != 3:
            raise ValueError("homogeneous coordinates need exactly three entries")
        coords = tuple(_coerce(c) for c in coords)
        if _is_null(coords):
            raise ValueError("all homogeneous coordinates are zero")
        self.coords = coords
        self._normal = None

    def normalized(self) -> tuple:
        """Coordinates scaled so the first nonzero entry is 1 (cached)."""
        if self._normal is None:
            lead = next(c for c in self.coords if c != 0)
            if lead == 1:
                self._normal = self.coords
            else:
                inv = _inv(lead)
                self._normal = tuple(c * inv for c in self.coords)
        return self._normal

    def key(self) -> tuple:
        return tuple(_value_key(c) for c in self.normalized())

    def scaled(self, factor):
        return type(self)(tuple(c * factor for c in self.coords))

    def proportional(self, other) -> bool:
        return _is_null(cross(self.coords, other.coords))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.proportional(other)

    def __hash__(self):
        return hash(self.key())

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return 3

    def to_json(self):
        return [_value_json(c) for c in self.coords]

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"


class ProjPoint(_Homogeneous):
    __slots__ = ()


class ProjLine(_Homogeneous):
    __slots__ = ()


def _value_key(c):
    if isinstance(c, FieldElement):
        return c.key()
    q = as_rational(c)
    return (q.numerator, q.denominator)


def _value_json(c):
    if isinstance(c, FieldElement):
        return c.to_json()
    q = as_rational(c)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def meet(l1: ProjLine, l2: ProjLine) -> ProjPoint:
    v = cross(l1.coords, l2.coords)
    if _is_null(v):
        raise IdenticalLinesError("lines are identical")
    return ProjPoint(v)


def join(p1: ProjPoint, p2: ProjPoint) -> ProjLine:
    v = cross(p1.coords, p2.coords)
    if _is_null(v):
        raise IdenticalPoints("points are identical")
    return ProjLine(v)


def incident(p: ProjPoint, l: ProjLine) -> bool:
    return dot(p.coords, l.coords) == 0


def concurrent(l1: ProjLine, l2: ProjLine, l3: ProjLine) -> bool:
    return det3(l1.coords, l2.coords, l3.coords) == 0


def collinear(p1: ProjPoint, p2: ProjPoint, p3: ProjPoint) -> bool:
    return det3(p1.coords, p2.coords, p3.coords) == 0


# ---------------------------------------------------------------------------
# transformations


class ProjTransform:
    """Invertible 3x3 matrix acting on column vectors of point coordinates."""

    __slots__ = ("matrix", "_inverse", "_det", "_normal")

    def __init__(self, matrix, *, check: bool = True):
        m = tuple(tuple(_coerce(x) for x in row) for row in matrix)
        if len(m) != 3 or any(len(row) != 3 for row in m):
            raise ValueError("expected a 3x3 matrix")
        self.matrix = m
        self._inverse = None
        self._normal = None
        self._det = det3(m[0], m[1], m[2])
        if check and self._det == 0:
            raise ValueError("singular transform")

    @classmethod
    def identity(cls):
        return cls([[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    @classmethod
    def diagonal(cls, a, b, c):
        return cls([[a, 0, 0], [0, b, 0], [0, 0, c]])

    @property
    def det(self):
        return self._det

    def column(self, j):
        return tuple(row[j] for row in self.matrix)

    def __matmul__(self, other: ProjTransform) -> ProjTransform:
        cols = [other.column(j) for j in range(3)]
        return ProjTransform(
            [[dot(row, col) for col in cols] for row in self.matrix], check=False
        )

    def apply(self, v):
        return tuple(dot(row, v) for row in self.matrix)

    def transpose(self) -> ProjTransform:
        return ProjTransform([self.column(j) for j in range(3)], check=False)

    def adjugate(self):
        m = self.matrix
        cof = [cross(m[1], m[2]), cross(m[2], m[0]), cross(m[0], m[1])]
        # columns of the adjugate are the cross products of row pairs
        return tuple(tuple(cof[j][i] for j in range(3)) for i in range(3))

    def inverse(self) -> ProjTransform:
        if self._inverse is None:
            inv_det = _inv(self._det)
            adj = self.adjugate()
            self._inverse = ProjTransform(
                [[x * inv_det for x in row] for row in adj], check=False
            )
        return self._inverse

    def inverse_transpose(self) -> ProjTransform:
        return self.inverse().transpose()

    def normalized(self) -> tuple:
        if self._normal is None:
            flat = [x for row in self.matrix for x in row]
            lead = next(x for x in flat if x != 0)
            inv = _inv(lead) if lead != 1 else None
            self._normal = tuple(x if inv is None else x * inv for x in flat)
        return self._normal

    def key(self) -> tuple:
        return tuple(_value_key(x) for x in self.normalized())

    def is_scalar(self) -> bool:
        m = self.matrix
        off = all(m[i][j] == 0 for i in range(3) for j in range(3) if i != j)
        return off and m[0][0] == m[1][1] == m[2][2]

    def projective_order(self, limit: int = 1000) -> int:
        power = self
        for k in range(1, limit + 1):
            if power.is_scalar():
                return k
            power = power @ self
        raise ValueError("order exceeds limit")

    def __eq__(self, other):
        if not isinstance(other, ProjTransform):
            return NotImplemented
        return self.normalized() == other.normalized()

    def __hash__(self):
        return hash(self.key())

    def to_json(self):
        return [[_value_json(x) for x in row] for row in self.matrix]

    def __repr__(self):
        return f"ProjTransform({self.to_json()})"


# ---------------------------------------------------------------------------
# ternary forms (dict: exponent triple -> coefficient)


def _poly_mul(a: dict, b: dict) -> dict:
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2])
            v = ca * cb
            out[e] = out[e] + v if e in out else v
    return out


def linear_form(v) -> dict:
    return {(1, 0, 0): v[0], (0, 1, 0): v[1], (0, 0, 1): v[2]}


def product_of_linear_forms(vectors) -> dict:
    vectors = list(vectors)
    poly = linear_form(vectors[0])
    for v in vectors[1:]:
        poly = _poly_mul(poly, linear_form(v))
    return poly


class QuarticForm:
    """Ternary quartic; ``coeffs[n]`` multiplies ``MONOMIALS[n]``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(_coerce(c) for c in coeffs)
        if len(coeffs) != 15:
            raise ValueError("a quartic form has 15 coefficients")
        self.coeffs = coeffs

    @classmethod
    def from_dict(cls, terms: dict, zero=Fraction(0)):
        bad = [e for e in terms if e not in _MONO_INDEX]
        if bad:
            raise ValueError(f"not quartic monomials: {bad}")
        return cls([terms.get(m, zero) for m in MONOMIALS])

    def to_dict(self) -> dict:
        return {m: c for m, c in zip(MONOMIALS, self.coeffs) if c != 0}

    def coefficient(self, i: int, j: int, k: int):
        return self.coeffs[_MONO_INDEX[(i, j, k)]]

    def is_zero(self) -> bool:
        return _is_null(self.coeffs)

    def __call__(self, p):
        return eval_quartic(self, p)

    def scaled(self, factor) -> QuarticForm:
        return QuarticForm(c * factor for c in self.coeffs)

    def proportional(self, other: QuarticForm) -> bool:
        """True iff both are nonzero and one is a scalar multiple of the other."""
        a, b = self.coeffs, other.coeffs
        k = next((n for n in range(15) if a[n] != 0), None)
        if k is None or b[k] == 0:
            return False
        # a[n] * b[k] == b[n] * a[k] for all n
        return all(a[n] * b[k] == b[n] * a[k] for n in range(15))

    def normalized(self) -> tuple:
        lead = next(c for c in self.coeffs if c != 0)
        inv = _inv(lead)
        return tuple(c * inv for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, QuarticForm):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(_value_key(c) for c in self.coeffs))

    def to_json(self):
        return [_value_json(c) for c in self.coeffs]

    def __repr__(self):
        return f"QuarticForm({self.to_json()})"


def eval_quartic(Q: QuarticForm, p) -> object:
    x, y, z = p.coords if isinstance(p, _Homogeneous) else p
    px = [1, x, x * x]
    px += [px[2] * x, px[2] * px[2]]
    py = [1, y, y * y]
    py += [py[2] * y, py[2] * py[2]]
    pz = [1, z, z * z]
    pz += [pz[2] * z, pz[2] * pz[2]]
    acc = 0
    for (i, j, k), c in zip(MONOMIALS, Q.coeffs):
        if c != 0:
            acc = acc + c * px[i] * py[j] * pz[k]
    return acc


def act_point(T: ProjTransform, p: ProjPoint) -> ProjPoint:
    return ProjPoint(T.apply(p.coords))


def act_line(T: ProjTransform, l: ProjLine) -> ProjLine:
    """Image line: coefficients transformed by the inverse transpose."""
    return ProjLine(T.inverse_transpose().apply(l.coords))


def act_quartic(T: ProjTransform, Q: QuarticForm) -> QuarticForm:
    """Form whose zero set is the image under T: ``Q(T^-1 v)``."""
    rows = T.inverse().matrix
    forms = [linear_form(r) for r in rows]
    powers = []
    for f in forms:
        ps = [{(0, 0, 0): 1}, f]
        for _ in range(3):
            ps.append(_poly_mul(ps[-1], f))
        powers.append(ps)
    out = {}
    for (i, j, k), c in zip(MONOMIALS, Q.coeffs):
        if c == 0:
            continue
        term = _poly_mul(_poly_mul(powers[0][i], powers[1][j]), powers[2][k])
        for e, v in term.items():
            out[e] = out[e] + c * v if e in out else c * v
    zero = 0 * Q.coeffs[0]
    return QuarticForm([out.get(m, zero) for m in MONOMIALS])
