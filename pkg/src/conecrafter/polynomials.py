"""Exact univariate polynomials over Q: characteristic polynomials,
Sturm-sequence root counting, and factorization for the small degrees
(<= 8) this toolkit needs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

from ._kernels import berkowitz_charpoly, poly_sign_at, sign_variations
from .errors import DeskScaleError
from .matrices import Matrix

FACTOR_DEGREE_CAP = 8
_KRONECKER_TUPLE_CAP = 300_000


def _norm_coeffs(coeffs) -> tuple:
    out = [Fraction(c) if not isinstance(c, (int, Fraction)) else c for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(int(c) if isinstance(c, Fraction) and c.denominator == 1 else c for c in out)


class Polynomial:
    """Coefficients lowest degree first; the zero polynomial is empty."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Sequence):
        self._coeffs = _norm_coeffs(coeffs)

    @classmethod
    def x_power(cls, k: int, coeff=1) -> "Polynomial":
        return cls([0] * k + [coeff])

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def leading(self):
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self._coeffs[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({list(self._coeffs)})"

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self._coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self._coeffs])

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return Polynomial([c * other for c in self._coeffs])
        a, b = self._coeffs, other._coeffs
        if not a or not b:
            return Polynomial([])
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return Polynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(c) for c in self._coeffs]
        d = other.degree
        lead = Fraction(other.leading)
        quo = [Fraction(0)] * max(len(rem) - d, 0)
        for i in range(len(rem) - 1, d - 1, -1):
            if rem[i] == 0:
                continue
            f = rem[i] / lead
            quo[i - d] = f
            for j, c in enumerate(other._coeffs):
                rem[i - d + j] -= f * c
        return Polynomial(quo), Polynomial(rem)

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[1]

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self._coeffs)][1:])

    def monic(self) -> "Polynomial":
        if self.is_zero:
            raise ValueError("zero polynomial cannot be made monic")
        lead = self.leading
        return Polynomial([Fraction(c, 1) / lead for c in self._coeffs])

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        if a.is_zero:
            return a
        return a.monic()

    def primitive_integer(self) -> list[int]:
        """Positive scaling to a primitive integer coefficient list; signs kept."""
        if self.is_zero:
            return []
        d = 1
        for c in self._coeffs:
            if isinstance(c, Fraction):
                d = d * c.denominator // gcd(d, c.denominator)
        ints = [int(c * d) for c in self._coeffs]
        g = 0
        for c in ints:
            g = gcd(g, abs(c))
        return [c // g for c in ints]

    def squarefree_part(self) -> "Polynomial":
        if self.is_zero:
            raise ValueError("zero polynomial")
        if self.degree == 0:
            return self.monic()
        g = self.gcd(self.derivative())
        if g.degree == 0:
            return self.monic()
        return (self // g).monic()

    def squarefree_decomposition(self) -> list[tuple["Polynomial", int]]:
        """Yun's algorithm: returns [(factor, multiplicity)], factors monic,
        squarefree, pairwise coprime; product of factor**mult is monic self."""
        if self.is_zero:
            raise ValueError("zero polynomial")
        p = self.monic()
        if p.degree == 0:
            return []
        out = []
        g = p.gcd(p.derivative())
        if g.degree == 0:
            return [(p, 1)]
        w = p // g
        y = p.derivative() // g
        k = 1
        while w.degree > 0:
            z = y - w.derivative()
            f = w.gcd(z) if not z.is_zero else w.monic()
            if f.degree > 0:
                out.append((f.monic(), k))
            w2 = w // f
            y = z // f
            w = w2
            k += 1
        return out

    def evaluate_matrix(self, m: Matrix) -> Matrix:
        n = m.nrows
        acc = Matrix.zeros(n, n)
        for c in reversed(self._coeffs):
            acc = acc @ m + Matrix.identity(n) * c
        return acc


def char_poly(m: Matrix) -> Polynomial:
    """Exact characteristic polynomial det(x*I - m) of a rational matrix."""
    if not m.is_square:
        raise ValueError("characteristic polynomial needs a square matrix")
    n = m.nrows
    scaled, d = m.to_integer()
    ints = berkowitz_charpoly(scaled.flat(), n)
    if d == 1:
        return Polynomial(ints)
    dn = d ** n
    return Polynomial([Fraction(c * d ** i, dn) for i, c in enumerate(ints)])


def sturm_chain(p: Polynomial) -> list[list[int]]:
    """Canonical Sturm chain of the squarefree part, each member scaled to a
    primitive integer list (positive scale, so all sign data is preserved)."""
    if p.is_zero:
        raise ValueError("zero polynomial has no Sturm chain")
    q = p.squarefree_part()
    chain = [q, q.derivative()]
    while not chain[-1].is_zero:
        chain.append(-(chain[-2] % chain[-1]))
    chain.pop()
    return [c.primitive_integer() for c in chain if not c.is_zero]


def _variations_at(chain: list[list[int]], point) -> int:
    """Sign variations of the chain just right of a rational point."""
    f = Fraction(point)
    p, q = f.numerator, f.denominator
    signs = [poly_sign_at(c, p, q) for c in chain]
    if signs and signs[0] == 0:
        # just right of a simple root the polynomial has its derivative's sign
        signs = signs[1:]
    return sign_variations(signs)


def _variations_at_infinity(chain: list[list[int]], positive: bool) -> int:
    signs = []
    for c in chain:
        lead = 1 if c[-1] > 0 else -1
        if not positive and (len(c) - 1) % 2 == 1:
            lead = -lead
        signs.append(lead)
    return sign_variations(signs)


def count_roots_in_interval(p: Polynomial, a, b) -> int:
    """Exact number of distinct real roots of p in (a, b].

    a and b are rationals; None means -infinity / +infinity respectively.
    """
    if p.is_zero:
        raise ValueError("root counting needs a nonzero polynomial")
    if p.degree == 0:
        return 0
    if a is not None and b is not None and Fraction(a) >= Fraction(b):
        raise ValueError("interval needs a < b")
    chain = sturm_chain(p)
    va = _variations_at_infinity(chain, positive=False) if a is None else _variations_at(chain, a)
    vb = _variations_at_infinity(chain, positive=True) if b is None else _variations_at(chain, b)
    return va - vb


def count_real_roots(p: Polynomial) -> int:
    return count_roots_in_interval(p, None, None)


def all_roots_positive(p: Polynomial) -> bool:
    """True when every complex root of p is a real number > 0."""
    q = p.squarefree_part()
    if q.degree == 0:
        return True
    return count_roots_in_interval(q, 0, None) == q.degree


def all_roots_nonnegative(p: Polynomial) -> bool:
    """True when every complex root of p is a real number >= 0."""
    q = p.squarefree_part()
    if q.degree == 0:
        return True
    if q.coeffs[0] == 0:
        q = Polynomial(q.coeffs[1:])  # squarefree: at most one root at zero
        if q.degree == 0:
            return True
    return count_roots_in_interval(q, 0, None) == q.degree


# --- factorization over Q, degree <= 8 -------------------------------------

def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _int_poly_eval(coeffs: list[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _rational_roots(coeffs: list[int]) -> list[Fraction]:
    """Rational roots of a primitive integer polynomial (each listed once)."""
    if coeffs[0] == 0:
        roots = [Fraction(0)]
        trimmed = list(coeffs)
        while trimmed[0] == 0:
            trimmed.pop(0)
        return sorted(roots + [r for r in _rational_roots(trimmed) if r != 0])
    a0, an = coeffs[0], coeffs[-1]
    found = []
    for p in _divisors(a0):
        for q in _divisors(an):
            if gcd(p, q) != 1:
                continue
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if poly_sign_at(coeffs, cand.numerator, cand.denominator) == 0:
                    if cand not in found:
                        found.append(cand)
    return sorted(found)


def _interpolate(points: list[tuple[int, Fraction]]) -> Polynomial:
    out = Polynomial([])
    for i, (xi, yi) in enumerate(points):
        term = Polynomial([yi])
        for j, (xj, _) in enumerate(points):
            if i != j:
                term = term * Polynomial([Fraction(-xj, xi - xj), Fraction(1, xi - xj)])
        out = out + term
    return out


def _kronecker_split(coeffs: list[int]) -> tuple[list[int], list[int]] | None:
    """One nontrivial factorization of a primitive squarefree integer
    polynomial with no rational roots, or None when irreducible.

    Searches factor degrees 2..deg//2; since deg <= 8 that bound is at
    most 4, and any nontrivial factorization contains a factor in range.
    """
    deg = len(coeffs) - 1
    poly = Polynomial(coeffs)
    xs = [0, 1, -1, 2, -2, 3, -3, 4, -4]
    for d in range(2, deg // 2 + 1):
        pts = xs[: d + 1]
        value_divs = []
        budget = 1
        for x in pts:
            v = _int_poly_eval(coeffs, x)
            divs = _divisors(v)
            cands = [w for dd in divs for w in (dd, -dd)]
            value_divs.append(cands)
            budget *= len(cands)
        if budget > _KRONECKER_TUPLE_CAP:
            raise DeskScaleError("factor search budget exceeded")
        stack = [(0, [])]
        while stack:
            idx, chosen = stack.pop()
            if idx == len(pts):
                cand = _interpolate(list(zip(pts, [Fraction(v) for v in chosen])))
                if cand.degree != d:
                    continue
                quo, rem = divmod(poly, cand)
                if rem.is_zero:
                    ci = cand.primitive_integer()
                    qi = quo.primitive_integer()
                    if len(ci) - 1 == d and len(qi) - 1 == deg - d:
                        return ci, qi
                continue
            # fix the sign ambiguity g vs -g by pinning the first value positive
            opts = value_divs[idx] if idx > 0 else [v for v in value_divs[0] if v > 0]
            for v in reversed(opts):
                stack.append((idx + 1, chosen + [v]))
    return None


def _factor_squarefree_monic(q: Polynomial) -> list[Polynomial]:
    """Monic irreducible factors of a monic squarefree polynomial."""
    if q.degree == 0:
        return []
    work = q.primitive_integer()
    factors = []
    for root in _rational_roots(work):
        factors.append(Polynomial([-root, 1]))
    rem = q
    for f in factors:
        rem = rem // f
    queue = [rem.primitive_integer()] if rem.degree > 0 else []
    while queue:
        coeffs = queue.pop()
        if len(coeffs) - 1 <= 3:
            # no rational roots and degree <= 3: irreducible over Q
            factors.append(Polynomial(coeffs).monic())
            continue
        split = _kronecker_split(coeffs)
        if split is None:
            factors.append(Polynomial(coeffs).monic())
        else:
            queue.extend(split)
    return sorted(factors, key=lambda f: (f.degree, f.coeffs))


def factor_squarefree_small(p: Polynomial) -> list[tuple[Polynomial, int]]:
    """Factor p over Q into monic irreducibles with multiplicities.

    Only degrees up to 8 are supported; larger inputs raise DeskScaleError.
    The (leading coefficient of p) times the product of factor**mult
    reproduces p exactly.
    """
    if p.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    if p.degree > FACTOR_DEGREE_CAP:
        raise DeskScaleError(
            f"factorization supported up to degree {FACTOR_DEGREE_CAP}, got {p.degree}"
        )
    out = []
    for sq, mult in p.squarefree_decomposition():
        for f in _factor_squarefree_monic(sq):
            out.append((f, mult))
    return sorted(out, key=lambda fm: (fm[0].degree, fm[0].coeffs, fm[1]))


def poly_xgcd(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial, Polynomial]:
    """Extended gcd: returns (g, u, v) with u*a + v*b = g, g monic."""
    r0, r1 = a, b
    s0, s1 = Polynomial([1]), Polynomial([])
    t0, t1 = Polynomial([]), Polynomial([1])
    while not r1.is_zero:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero:
        return r0, s0, t0
    lead = r0.leading
    inv = Fraction(1, 1) / lead
    return r0 * inv, s0 * inv, t0 * inv
