"""Tautological classes on C^n for a curve C of genus g.

A class is a rational combination of square-free monomials
``x_{i1} ... x_{ir} * D(h1,k1) ... D(hs,ks)`` where no point index is an
endpoint of a diagonal.  Products are reduced eagerly with

    x_i^2 = 0,   x_i * D(i,j) = x_i * x_j,   D(i,j)^2 = -(2g-2) x_i x_j,

and the degree of a top-codimension monomial is read off from the connected
components of the graph formed by its diagonals.
"""
from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction
from typing import Iterable, NamedTuple

__all__ = [
    "DimensionMismatchError",
    "RingMismatchError",
    "TautClass",
    "TautMonomial",
    "TautRing",
    "degree",
    "monomial_degree",
    "multiply",
    "reduce_monomial",
    "scorza_class",
    "scorza_cycle_product",
]


class DimensionMismatchError(ValueError):
    pass


class RingMismatchError(ValueError):
    pass


def _edge(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise ValueError(f"diagonal D({i},{j}) needs two distinct indices")
    return (i, j) if i < j else (j, i)


class TautMonomial(NamedTuple):
    """Reduced monomial: disjoint point indices and distinct diagonals."""

    points: frozenset
    edges: frozenset

    @classmethod
    def make(cls, points=(), edges=()):
        return cls(frozenset(points), frozenset(_edge(*e) for e in edges))

    @property
    def codimension(self) -> int:
        return len(self.points) + len(self.edges)

    def sort_key(self):
        return (self.codimension, sorted(self.points), sorted(self.edges))

    def __str__(self):
        parts = [f"x{i}" for i in sorted(self.points)]
        parts += [f"D({i},{j})" for i, j in sorted(self.edges)]
        return "*".join(parts) if parts else "1"

    def to_json(self):
        return {"points": sorted(self.points), "edges": [list(e) for e in sorted(self.edges)]}


def reduce_monomial(points: Iterable[int], edges: Iterable, genus: int, rng: random.Random | None = None):
    """Rewrite a raw product of point classes and diagonals to reduced form.

    Returns ``(factor, TautMonomial)`` or ``None`` when the product vanishes.
    With ``rng`` the applicable rewrite is picked at random at every step;
    the result does not depend on the order.
    """
    pts = Counter(points)
    if any(m > 1 for m in pts.values()):
        return None
    edge_count = Counter(_edge(*e) for e in edges)
    factor = 1
    self_int = -(2 * genus - 2)
    while True:
        moves = []
        for e, m in edge_count.items():
            if m == 0:
                continue
            if e[0] in pts or e[1] in pts:
                moves.append(("absorb", e))
            if m >= 2:
                moves.append(("square", e))
        if not moves:
            break
        kind, e = rng.choice(moves) if rng is not None else moves[0]
        i, j = e
        edge_count[e] -= 1
        if kind == "absorb":
            # x_i * D(i,j) = x_i * x_j
            new = j if i in pts else i
            if new in pts:
                return None
            pts[new] = 1
        else:
            edge_count[e] -= 1
            factor *= self_int
            if i in pts or j in pts:
                return None
            pts[i] = pts[j] = 1
        if factor == 0:
            return None
    edges = frozenset(e for e, m in edge_count.items() if m)
    return factor, TautMonomial(frozenset(pts), edges)


class TautRing:
    """Ring of tautological classes on C^n, genus ``g``."""

    def __init__(self, n: int, g: int):
        if n < 1 or g < 0:
            raise ValueError("need n >= 1 and g >= 0")
        self.n = n
        self.g = g

    def __eq__(self, other):
        return isinstance(other, TautRing) and (self.n, self.g) == (other.n, other.g)

    def __hash__(self):
        return hash((self.n, self.g))

    def __repr__(self):
        return f"TautRing(n={self.n}, g={self.g})"

    def _check(self, *indices):
        for i in indices:
            if not 1 <= i <= self.n:
                raise IndexError(f"index {i} outside 1..{self.n}")

    def one(self) -> TautClass:
        return TautClass(self, {TautMonomial.make(): Fraction(1)})

    def constant(self, q) -> TautClass:
        return TautClass(self, {TautMonomial.make(): Fraction(q)})

    def x(self, i: int) -> TautClass:
        self._check(i)
        return TautClass(self, {TautMonomial.make(points=[i]): Fraction(1)})

    def diagonal(self, i: int, j: int) -> TautClass:
        self._check(i, j)
        return TautClass(self, {TautMonomial.make(edges=[(i, j)]): Fraction(1)})

    def scorza(self, i: int, j: int) -> TautClass:
        return scorza_class(i, j, self.n, self.g)


class TautClass:
    """Formal rational combination of reduced monomials in a :class:`TautRing`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: TautRing, terms: dict | None = None):
        self.ring = ring
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c != 0}

    @property
    def ambient_n(self) -> int:
        return self.ring.n

    @property
    def genus(self) -> int:
        return self.ring.g

    def _same_ring(self, other: TautClass):
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def _lift(self, other):
        if isinstance(other, TautClass):
            self._same_ring(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return TautClass(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return TautClass(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TautClass(self.ring, {m: c * other for m, c in self.terms.items()})
        if isinstance(other, TautClass):
            return multiply(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = self.ring.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, TautClass):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Fraction:
        return degree(self)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: mc[0].sort_key())

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            if m.codimension == 0:
                out.append(str(c))
            elif c == 1:
                out.append(str(m))
            elif c == -1:
                out.append(f"-{m}")
            else:
                out.append(f"{c}*{m}")
        return " + ".join(out).replace("+ -", "- ")

    def __repr__(self):
        return f"TautClass({self.ring!r}, {self})"

    def to_json(self):
        return [
            dict(m.to_json(), coeff=_q_str(c)) for m, c in self.sorted_terms()
        ]


def _q_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def multiply(a: TautClass, b: TautClass) -> TautClass:
    a._same_ring(b)
    g = a.genus
    out: dict = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            red = reduce_monomial(
                list(ma.points) + list(mb.points), list(ma.edges) + list(mb.edges), g
            )
            if red is None:
                continue
            factor, m = red
            out[m] = out.get(m, 0) + ca * cb * factor
    return TautClass(a.ring, out)


def _components(edges):
    """Connected components of the graph on the diagonal endpoints."""
    parent = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i, j in edges:
        parent.setdefault(i, i)
        parent.setdefault(j, j)
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    comps: dict = {}
    for v in parent:
        comps.setdefault(find(v), [set(), 0])[0].add(v)
    for i, _ in edges:
        comps[find(i)][1] += 1
    return [(len(vs), e) for vs, e in comps.values()]


def monomial_degree(m: TautMonomial, n: int, g: int) -> int:
    """Degree of a reduced monomial of codimension ``n`` on C^n."""
    if m.codimension != n:
        raise DimensionMismatchError(f"monomial {m} has codimension {m.codimension}, expected {n}")
    comps = _components(m.edges)
    # a component with more diagonals than vertices lives on a product of
    # too few factors and vanishes; so does anything not covering all indices
    if any(e > v for v, e in comps):
        return 0
    covered = len(m.points) + sum(v for v, _ in comps)
    if covered != n:
        return 0
    result = 1
    for v, e in comps:
        # e == v: closed component, small diagonal meets one more diagonal
        result *= -(2 * g - 2)
    return result


def degree(a: TautClass) -> Fraction:
    """Degree of a class of top codimension; raises on any other codimension."""
    total = Fraction(0)
    for m, c in a.terms.items():
        total += c * monomial_degree(m, a.ambient_n, a.genus)
    return total


def scorza_class(i: int, j: int, n: int, g: int) -> TautClass:
    """Pullback of the Scorza correspondence class 2x_1 + 2x_2 + D to C^n."""
    if not (1 <= i < j <= n):
        raise IndexError(f"need 1 <= i < j <= n, got ({i}, {j}) with n={n}")
    ring = TautRing(n, g)
    return ring.x(i) * 2 + ring.x(j) * 2 + ring.diagonal(i, j)


def scorza_cycle_product(n: int, g: int = 3) -> Fraction:
    """Degree of S_12 * S_23 * ... * S_(n-1)n * S_1n, by expansion."""
    if n < 2:
        raise ValueError("the cycle product needs n >= 2")
    ring = TautRing(n, g)
    product = ring.one()
    for i in range(1, n):
        product = product * scorza_class(i, i + 1, n, g)
    product = product * scorza_class(1, n, n, g)
    return degree(product)
