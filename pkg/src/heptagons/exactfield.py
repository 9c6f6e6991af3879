"""Exact arithmetic: rationals, dense polynomials and number-field towers.

A tower is a chain Q = K0 < K1 < ... < Km where K(k) = K(k-1)[t]/(m_k) for a
monic modulus m_k with coefficients in K(k-1).  The default tower is the
cyclotomic field Q(zeta_7); :meth:`NumberFieldTower.extend` adds levels.

Elements of K1 are stored as reduced ``flint.fmpq_poly`` values; elements of
higher levels are tuples of lower-level representations.  The public
:class:`FieldElement` hides this and behaves like a Python number.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC

import mpmath
from flint import fmpq, fmpq_poly, fmpz, nmod_poly

__all__ = [
    "BadPrimeError",
    "DensePolynomial",
    "FieldElement",
    "FieldError",
    "NumberFieldTower",
    "PrecisionError",
    "PrimeSpec",
    "TowerMismatchError",
    "ZeroDivisorError",
    "as_rational",
    "find_prime_spec",
    "rational_to_str",
    "xgcd",
]


class FieldError(ArithmeticError):
    pass


class ZeroDivisorError(FieldError):
    """Inversion hit a nontrivial common factor with a level modulus."""

    def __init__(self, level, factor):
        super().__init__(f"modulus at level {level} is reducible: common factor {factor}")
        self.level = level
        self.factor = factor


class TowerMismatchError(FieldError):
    pass


class BadPrimeError(FieldError):
    pass


class PrecisionError(FieldError):
    pass


# ---------------------------------------------------------------------------
# rationals


def as_rational(value) -> Fraction:
    """Coerce ints, strings ``"p/q"``, Fractions and flint rationals."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, fmpq):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, fmpz):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def rational_to_str(q) -> str:
    q = as_rational(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmpq(q) -> fmpq:
    if isinstance(q, fmpq):
        return q
    q = as_rational(q)
    return fmpq(q.numerator, q.denominator)


# ---------------------------------------------------------------------------
# dense polynomials over an exact field


class DensePolynomial:
    """Univariate polynomial, coefficients lowest degree first.

    Coefficients may be any exact field values (``Fraction`` or
    :class:`FieldElement`); trailing zeros are stripped so ``degree`` is
    canonical.  The zero polynomial has degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.lead == 1

    def __eq__(self, other):
        if not isinstance(other, DensePolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"DensePolynomial({list(self.coeffs)!r})"

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        out = []
        for i in range(n):
            if i < len(a) and i < len(b):
                out.append(a[i] + b[i])
            else:
                out.append(a[i] if i < len(a) else b[i])
        return DensePolynomial(out)

    def __neg__(self):
        return DensePolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, DensePolynomial):
            return DensePolynomial(c * other for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return DensePolynomial([])
        out = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] = x * y if out[i + j] is None else out[i + j] + x * y
        return DensePolynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        inv_lead = 1 / other.lead if not other.lead == 1 else None
        quot = [0] * max(len(rem) - d, 0)
        for k in range(len(rem) - 1, d - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            if inv_lead is not None:
                c = c * inv_lead
            quot[k - d] = c
            for i, m in enumerate(other.coeffs):
                rem[k - d + i] = rem[k - d + i] - c * m
        return DensePolynomial(quot), DensePolynomial(rem[:d] if d > 0 else [])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> DensePolynomial:
        if self.is_monic():
            return self
        inv = 1 / self.lead
        return DensePolynomial(c * inv for c in self.coeffs)


def xgcd(a: DensePolynomial, b: DensePolynomial):
    """Extended Euclid: return ``(g, s, t)`` with ``s*a + t*b = g``, g monic."""
    r0, r1 = a, b
    s0, s1 = DensePolynomial([1]), DensePolynomial([])
    t0, t1 = DensePolynomial([]), DensePolynomial([1])
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = 1 / r0.lead
    return r0 * inv, s0 * inv, t0 * inv


# ---------------------------------------------------------------------------
# towers

_PHI7 = (1, 1, 1, 1, 1, 1, 1)
_tower_ids = itertools.count(1)


class NumberFieldTower:
    """Chain of simple extensions of Q, each given by a monic modulus.

    ``root_guesses[k]`` is a complex starting point for Newton refinement of
    the level-(k+1) generator; it fixes the complex embedding.
    """

    def __init__(self, moduli=None, root_guesses=None, _ids=None):
        if moduli is None:
            moduli = [DensePolynomial([Fraction(c) for c in _PHI7])]
            root_guesses = [complex(mpmath.expjpi(mpmath.mpf(2) / 7))]
        moduli = tuple(moduli)
        for k, m in enumerate(moduli, start=1):
            if not isinstance(m, DensePolynomial):
                raise TypeError("moduli must be DensePolynomial")
            if m.degree < 2 or not m.is_monic():
                raise ValueError(f"level {k} modulus must be monic of degree >= 2")
        self.moduli = moduli
        self.root_guesses = tuple(root_guesses or [None] * len(moduli))
        self._ids = tuple(_ids) if _ids else tuple(next(_tower_ids) for _ in moduli)
        self._m1 = fmpq_poly([_fmpq(c) for c in moduli[0].coeffs]) if moduli else None
        # level >= 2 moduli as reps of the previous level: nonzero (index, rep)
        self._tails = {}
        for k in range(2, len(moduli) + 1):
            tail = []
            for i, c in enumerate(moduli[k - 1].coeffs[:-1]):
                rep = self._rep_of(c, k - 1)
                if not self._is_zero(k - 1, rep):
                    tail.append((i, rep))
            self._tails[k] = tuple(tail)
        self._root_cache = {}

    @property
    def height(self) -> int:
        return len(self.moduli)

    def degree(self, level: int) -> int:
        return self.moduli[level - 1].degree

    def extend(self, modulus, root_guess=None) -> NumberFieldTower:
        """New tower with one more level; elements of ``self`` remain valid."""
        if not isinstance(modulus, DensePolynomial):
            modulus = DensePolynomial(modulus)
        top = self.height
        coeffs = [self.coerce(c, top) for c in modulus.coeffs]
        return NumberFieldTower(
            self.moduli + (DensePolynomial(coeffs),),
            self.root_guesses + (root_guess,),
            self._ids + (next(_tower_ids),),
        )

    def compatible(self, other: NumberFieldTower, level: int) -> bool:
        return self is other or self._ids[:level] == other._ids[:level]

    # -- element construction ------------------------------------------------
    def gen(self, level: int | None = None) -> FieldElement:
        level = self.height if level is None else level
        coeffs = [0] * self.degree(level)
        coeffs[1] = 1
        return self.element(level, coeffs)

    def zero(self, level: int | None = None) -> FieldElement:
        level = self.height if level is None else level
        return FieldElement(self, level, self._zero(level))

    def one(self, level: int | None = None) -> FieldElement:
        return self.coerce(1, self.height if level is None else level)

    def element(self, level: int, coeffs) -> FieldElement:
        """Element from a coefficient vector (lower-level values), reduced."""
        coeffs = list(coeffs)
        d = self.degree(level)
        if level == 1:
            rep = fmpq_poly([_fmpq(c) for c in coeffs]) % self._m1
        else:
            reps = [self._rep_of(c, level - 1) for c in coeffs]
            rep = self._reduce_long(level, reps) if len(reps) > d else tuple(
                reps + [self._zero(level - 1)] * (d - len(reps))
            )
        return FieldElement(self, level, rep)

    def coerce(self, value, level: int) -> FieldElement:
        return FieldElement(self, level, self._rep_of(value, level))

    # -- representation helpers ------------------------------------------------
    def _rep_of(self, value, level):
        """Representation of ``value`` at ``level`` (lifting lower levels)."""
        if level == 0:
            return _fmpq(value)
        if isinstance(value, FieldElement):
            if value.level > level:
                raise TowerMismatchError(f"cannot lower a level-{value.level} element to {level}")
            if not self.compatible(value.tower, value.level):
                raise TowerMismatchError("elements belong to different towers")
            return self._lift(value._rep, value.level, level)
        return self._lift(fmpq_poly([_fmpq(value)]), 1, level)

    def _lift(self, rep, from_level, to_level):
        while from_level < to_level:
            from_level += 1
            rep = (rep,) + tuple(self._zero(from_level - 1) for _ in range(self.degree(from_level) - 1))
        return rep

    def _zero(self, level):
        if level == 1:
            return fmpq_poly()
        return tuple(self._zero(level - 1) for _ in range(self.degree(level)))

    def _is_zero(self, level, rep):
        if level == 1:
            return rep.is_zero()
        return all(self._is_zero(level - 1, r) for r in rep)

    def _add(self, level, a, b):
        if level == 1:
            return a + b
        return tuple(self._add(level - 1, x, y) for x, y in zip(a, b))

    def _sub(self, level, a, b):
        if level == 1:
            return a - b
        return tuple(self._sub(level - 1, x, y) for x, y in zip(a, b))

    def _neg(self, level, a):
        if level == 1:
            return -a
        return tuple(self._neg(level - 1, x) for x in a)

    def _scale(self, level, a, s, s_level):
        """Multiply level-``level`` rep ``a`` by a rep ``s`` of a lower level."""
        if s_level == level:
            return self._mul(level, a, s)
        return tuple(self._scale(level - 1, x, s, s_level) for x in a)

    def _mul(self, level, a, b):
        if level == 1:
            return (a * b) % self._m1
        d = len(a)
        lower = level - 1
        if level == 2:
            # accumulate unreduced products in Q[zeta], reduce once per slot
            prod = [fmpq_poly() for _ in range(2 * d - 1)]
            for i, x in enumerate(a):
                if x.is_zero():
                    continue
                for j, y in enumerate(b):
                    if not y.is_zero():
                        prod[i + j] += x * y
            m1 = self._m1
            prod = [p % m1 for p in prod]
        else:
            prod = [self._zero(lower) for _ in range(2 * d - 1)]
            for i, x in enumerate(a):
                if self._is_zero(lower, x):
                    continue
                for j, y in enumerate(b):
                    if not self._is_zero(lower, y):
                        prod[i + j] = self._add(lower, prod[i + j], self._mul(lower, x, y))
        return self._reduce_long(level, prod)

    def _reduce_long(self, level, prod):
        d = self.degree(level)
        lower = level - 1
        prod = list(prod)
        tail = self._tails[level]
        for k in range(len(prod) - 1, d - 1, -1):
            c = prod[k]
            if self._is_zero(lower, c):
                continue
            for i, m in tail:
                prod[k - d + i] = self._sub(lower, prod[k - d + i], self._mul(lower, c, m))
        return tuple(prod[:d]) + tuple(self._zero(lower) for _ in range(d - len(prod)))

    def _key(self, level, rep):
        if level == 1:
            cs = rep.coeffs()
            cs = cs + [fmpq(0)] * (self.degree(1) - len(cs))
            return tuple((int(c.p), int(c.q)) for c in cs)
        return tuple(self._key(level - 1, r) for r in rep)

    def _inverse(self, level, rep):
        if self._is_zero(level, rep):
            raise ZeroDivisionError("inverse of zero")
        if level == 1:
            lower_vals = [Fraction(int(c.p), int(c.q)) for c in rep.coeffs()]
        else:
            lower_vals = [FieldElement(self, level - 1, r) for r in rep]
        a = DensePolynomial(lower_vals)
        g, s, _ = xgcd(a, self.moduli[level - 1])
        if g.degree > 0:
            raise ZeroDivisorError(level, g)
        return self.element(level, s.coeffs)._rep

    # -- complex embedding ----------------------------------------------------
    def generator_embedding(self, level: int, prec: int):
        """Complex value of the level generator at ``prec`` bits."""
        key = (level, prec)
        if key in self._root_cache:
            return self._root_cache[key]
        guess = self.root_guesses[level - 1]
        with mpmath.workprec(prec + 32):
            coeffs = [_embed_value(c, prec) for c in self.moduli[level - 1].coeffs]
            if guess is None:
                guess = mpmath.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=prec)[0]
            root = _newton(coeffs, mpmath.mpc(guess), prec)
        self._root_cache[key] = root
        return root

    def __repr__(self):
        return f"NumberFieldTower(degrees={[m.degree for m in self.moduli]})"


def _embed_value(c, prec):
    if isinstance(c, FieldElement):
        return c.embed_complex(prec)
    return mpmath.mpf(as_rational(c).numerator) / as_rational(c).denominator


def _newton(coeffs, z, prec):
    dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]

    def horner(cs, x):
        acc = mpmath.mpc(0)
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    tol = mpmath.mpf(2) ** (-(prec + 16))
    for _ in range(400):
        step = horner(coeffs, z) / horner(dcoeffs, z)
        z = z - step
        if abs(step) <= tol * max(1, abs(z)):
            return z
    raise PrecisionError("Newton refinement did not converge")


# ---------------------------------------------------------------------------
# elements


class FieldElement:
    """Immutable element of one level of a :class:`NumberFieldTower`.

    Mixed arithmetic lifts the lower operand (ints, Fractions, lower-level
    elements of the same tower).  Equality is exact on canonical vectors.
    """

    __slots__ = ("tower", "level", "_rep", "_hash")

    def __init__(self, tower: NumberFieldTower, level: int, rep):
        self.tower = tower
        self.level = level
        self._rep = rep
        self._hash = None

    # -- views ---------------------------------------------------------------
    @property
    def coeffs(self) -> tuple:
        """Coefficient vector at the level below (Fractions at level 1)."""
        tw = self.tower
        if self.level == 1:
            cs = [Fraction(int(c.p), int(c.q)) for c in self._rep.coeffs()]
            return tuple(cs + [Fraction(0)] * (tw.degree(1) - len(cs)))
        return tuple(FieldElement(tw, self.level - 1, r) for r in self._rep)

    def key(self) -> tuple:
        """Nested tuple of (numerator, denominator) pairs; hashable, orderable."""
        return self.tower._key(self.level, self._rep)

    def is_zero(self) -> bool:
        return self.tower._is_zero(self.level, self._rep)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:]) and (
            self.level == 1 or self.coeffs[0].is_rational()
        )

    # -- coercion -------------------------------------------------------------
    def _binary(self, other):
        """Return ``(tower, level, rep_self, rep_other, other_level)``."""
        if isinstance(other, FieldElement):
            if other.level <= self.level:
                if not self.tower.compatible(other.tower, other.level):
                    raise TowerMismatchError("elements belong to different towers")
                return self.tower, self.level, self._rep, other._rep, other.level
            if not other.tower.compatible(self.tower, self.level):
                raise TowerMismatchError("elements belong to different towers")
            return other.tower, other.level, other.tower._lift(self._rep, self.level, other.level), other._rep, other.level
        if isinstance(other, (int, Fraction, fmpq, fmpz)) and not isinstance(other, bool):
            return self.tower, self.level, self._rep, fmpq_poly([_fmpq(other)]), 1
        return None

    def __add__(self, other):
        b = self._binary(other)
        if b is None:
            return NotImplemented
        tw, lvl, x, y, ylvl = b
        y = tw._lift(y, ylvl, lvl)
        return FieldElement(tw, lvl, tw._add(lvl, x, y))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._binary(other)
        if b is None:
            return NotImplemented
        tw, lvl, x, y, ylvl = b
        y = tw._lift(y, ylvl, lvl)
        return FieldElement(tw, lvl, tw._sub(lvl, x, y))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldElement(self.tower, self.level, self.tower._neg(self.level, self._rep))

    def __pos__(self):
        return self

    def __mul__(self, other):
        b = self._binary(other)
        if b is None:
            return NotImplemented
        tw, lvl, x, y, ylvl = b
        if isinstance(other, FieldElement) and other.level > self.level:
            # self was lifted; scale the higher operand by self's rep instead
            return FieldElement(tw, lvl, tw._scale(lvl, other._rep, self._rep, self.level))
        return FieldElement(tw, lvl, tw._scale(lvl, x, y, ylvl))

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        return FieldElement(self.tower, self.level, self.tower._inverse(self.level, self._rep))

    def __truediv__(self, other):
        if isinstance(other, FieldElement):
            return self * other.inverse()
        q = as_rational(other)
        if q == 0:
            raise ZeroDivisionError("division by zero")
        return self * (1 / q)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = self.tower.coerce(1, self.level)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        b = self._binary(other) if isinstance(other, (FieldElement, int, Fraction, fmpq, fmpz)) else None
        if b is None:
            return NotImplemented
        tw, lvl, x, y, ylvl = b
        y = tw._lift(y, ylvl, lvl)
        return tw._key(lvl, x) == tw._key(lvl, y)

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self._rational_value())
            else:
                self._hash = hash(self.key())
        return self._hash

    def _rational_value(self) -> Fraction:
        v = self
        while v.level > 1:
            v = v.coeffs[0]
        return v.coeffs[0]

    def __repr__(self):
        return f"FieldElement(level={self.level}, {self.to_json()!r})"

    # -- embeddings and specialization ----------------------------------------
    def embed_complex(self, prec: int = 53):
        """Complex approximation under the tower's chosen embedding."""
        tw = self.tower
        with mpmath.workprec(prec + 32):
            root = tw.generator_embedding(self.level, prec)
            acc = mpmath.mpc(0)
            for c in reversed(self.coeffs):
                acc = acc * root + _embed_value(c, prec)
        return acc

    def reduce_mod(self, spec: PrimeSpec) -> int:
        """Image in F_p under the homomorphism fixed by ``spec``."""
        return _reduce_rep(self.level, self._rep, spec)

    # -- serialization ----------------------------------------------------------
    def to_json(self):
        if self.level == 1:
            return [rational_to_str(c) for c in self.coeffs]
        return [c.to_json() for c in self.coeffs]

    @classmethod
    def from_json(cls, tower: NumberFieldTower, data) -> FieldElement:
        level = _nesting_depth(data)
        if level > tower.height:
            raise ValueError("serialized element is deeper than the tower")
        return _from_json(tower, level, data)


def _nesting_depth(data) -> int:
    depth = 0
    while isinstance(data, list):
        depth += 1
        if not data:
            break
        data = data[0]
    return depth


def _from_json(tower, level, data):
    if level == 1:
        return tower.element(1, [as_rational(c) for c in data])
    return tower.element(level, [_from_json(tower, level - 1, c) for c in data])


# ---------------------------------------------------------------------------
# modular specialization


@dataclass(frozen=True)
class PrimeSpec:
    """A prime and one root of each level modulus modulo that prime."""

    p: int
    roots: tuple


def _reduce_rep(level, rep, spec):
    p = spec.p
    if level == 1:
        den = int(rep.denom())
        if den % p == 0:
            raise BadPrimeError(f"denominator {den} not invertible mod {p}")
        num = [int(c) % p for c in rep.numer().coeffs()]
        r = spec.roots[0]
        acc = 0
        for c in reversed(num):
            acc = (acc * r + c) % p
        return acc * pow(den, -1, p) % p
    r = spec.roots[level - 1]
    acc = 0
    for c in reversed(rep):
        acc = (acc * r + _reduce_rep(level - 1, c, spec)) % p
    return acc


def reduce_mod_prime(a, spec: PrimeSpec) -> int:
    """Image of a rational or tower element in F_p."""
    if isinstance(a, FieldElement):
        return a.reduce_mod(spec)
    q = as_rational(a)
    if q.denominator % spec.p == 0:
        raise BadPrimeError(f"denominator {q.denominator} not invertible mod {spec.p}")
    return q.numerator * pow(q.denominator, -1, spec.p) % spec.p


def _next_prime(n: int) -> int:
    n = max(n, 2)
    while not fmpz(n).is_prime():
        n += 1
    return n


def find_prime_spec(tower: NumberFieldTower | None, start: int = 2**31) -> PrimeSpec:
    """Smallest prime >= ``start`` at which every level modulus has a root.

    Roots are chosen deterministically (the smallest residue), so the spec is
    reproducible for a given start.
    """
    p = _next_prime(start)
    while True:
        try:
            return prime_spec_at(tower, p)
        except BadPrimeError:
            p = _next_prime(p + 1)


def prime_spec_at(tower: NumberFieldTower | None, p: int) -> PrimeSpec:
    if not fmpz(p).is_prime():
        raise BadPrimeError(f"{p} is not prime")
    roots = []
    for k in range(1, (tower.height if tower else 0) + 1):
        partial = PrimeSpec(p, tuple(roots))
        coeffs = [reduce_mod_prime(c, partial) for c in tower.moduli[k - 1].coeffs]
        found = sorted(int(r) for r, _ in nmod_poly(coeffs, p).roots())
        if not found:
            raise BadPrimeError(f"level {k} modulus has no root mod {p}")
        roots.append(found[0])
    return PrimeSpec(p, tuple(roots))
