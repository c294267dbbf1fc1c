"""Decomposition of an involutive endomorphism algebra into simple factors
and classification of each factor by its split type over the reals.

A semisimple algebra with a positive involution splits along primitive
central idempotents. Each simple factor is classified by two exact counts,
normalized per real or complex place of its center:

    d = dim of the factor / places     f = dim of the involution-fixed part / places

    RealMatrix(l)       d = l^2      f = l(l+1)/2
    ComplexMatrix(m)    d = 2m^2     f = m^2
    QuaternionMatrix(t) d = 4t^2     f = 2t^2 - t

The three families are disjoint (f/d is > 1/2, = 1/2, < 1/2 respectively);
the table below is still collision-checked at import as a guard.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .endo import EndoAlgebra, center_basis
from .errors import InternalInvariantError, ValidationError
from .matrices import Matrix
from .polynomials import (
    Polynomial,
    count_real_roots,
    factor_squarefree_small,
    poly_xgcd,
)

MAX_TABLE_DIM = 64


def _build_kind_table(max_dim: int) -> dict:
    table = {}
    entries = []
    size = 1
    while size * size <= max_dim:
        entries.append(((size * size, size * (size + 1) // 2), ("RealMatrix", size)))
        size += 1
    size = 1
    while 2 * size * size <= max_dim:
        entries.append(((2 * size * size, size * size), ("ComplexMatrix", size)))
        size += 1
    size = 1
    while 4 * size * size <= max_dim:
        entries.append(((4 * size * size, 2 * size * size - size), ("QuaternionMatrix", size)))
        size += 1
    for key, val in entries:
        if key in table:
            raise InternalInvariantError(f"kind table collision at {key}")
        table[key] = val
    return table


KIND_TABLE = _build_kind_table(MAX_TABLE_DIM)


def lookup_kind(d: int, f: int) -> tuple[str, int]:
    """Kind and size for normalized (dimension, fixed dimension) per place."""
    try:
        return KIND_TABLE[(d, f)]
    except KeyError:
        raise ValidationError(
            "classification", f"no involutive matrix kind has (d, f) = ({d}, {f})"
        ) from None


def minimal_polynomial(m: Matrix) -> Polynomial:
    """Monic minimal polynomial of a square matrix, by first linear
    dependence among its powers."""
    n = m.nrows
    power = Matrix.identity(n)
    flats = [power.flat()]
    for k in range(1, n + 2):
        power = power @ m
        rhs = Matrix([[x] for x in power.flat()])
        stacked = Matrix([[flats[j][i] for j in range(k)] for i in range(n * n)])
        sol = stacked.solve(rhs)
        if sol is not None:
            coeffs = [-Fraction(sol[i, 0]) for i in range(k)] + [Fraction(1)]
            return Polynomial(coeffs)
        flats.append(power.flat())
    raise InternalInvariantError("matrix powers never became dependent")


def _flat_rank(mats: list[Matrix]) -> int:
    if not mats:
        return 0
    return Matrix([m.flat() for m in mats]).rank()


def primitive_center_element(
    algebra: EndoAlgebra, center: list[Matrix], seed: int = 42
) -> tuple[Matrix, Polynomial]:
    """An element generating the center as a Q-algebra, with its minimal
    polynomial (degree equals the center dimension).

    Random low-height combinations almost always work; a deterministic
    growing-height sweep backs them up so the search cannot fail on a
    genuine product of number fields.
    """
    k = len(center)
    if k == 1:
        z = center[0]
        return z, minimal_polynomial(z)
    rng = random.Random(seed)
    tried = 0
    while tried < 32:
        coeffs = [rng.randint(-3, 3) for _ in range(k)]
        tried += 1
        z = Matrix.zeros(algebra.rank, algebra.rank)
        for c, b in zip(coeffs, center):
            if c:
                z = z + b * c
        mu = minimal_polynomial(z)
        if mu.degree == k:
            return z, mu
    for height in range(1, 16):
        stack = [[]]
        while stack:
            prefix = stack.pop()
            if len(prefix) == k:
                if all(c == 0 for c in prefix):
                    continue
                z = Matrix.zeros(algebra.rank, algebra.rank)
                for c, b in zip(prefix, center):
                    if c:
                        z = z + b * c
                mu = minimal_polynomial(z)
                if mu.degree == k:
                    return z, mu
                continue
            for c in range(-height, height + 1):
                stack.append(prefix + [c])
    raise InternalInvariantError("center admits no primitive element")


def central_idempotents(
    algebra: EndoAlgebra, seed: int = 42
) -> list[tuple[Matrix, Polynomial]]:
    """Primitive central idempotents of the algebra, paired with the
    irreducible polynomial cutting out the matching center field.

    Ordering follows the sorted factor list of the primitive element's
    minimal polynomial, so output is deterministic for a fixed seed."""
    center = center_basis(algebra)
    z, mu = primitive_center_element(algebra, center, seed)
    if mu.squarefree_part().monic() != mu.monic():
        raise InternalInvariantError("center minimal polynomial must be squarefree")
    factors = factor_squarefree_small(mu)
    irreducibles = [p for p, mult in factors for _ in range(mult)]
    if sum(p.degree for p in irreducibles) != mu.degree:
        raise InternalInvariantError("center factorization lost degree")
    out = []
    for m_i in irreducibles:
        q_i = mu // m_i
        g, u, _ = poly_xgcd(q_i, m_i)
        if g.degree != 0:
            raise InternalInvariantError("center factors must be pairwise coprime")
        lagrange = (u * q_i) % mu
        e_i = lagrange.evaluate_matrix(z)
        out.append((e_i, m_i))
    total = Matrix.zeros(algebra.rank, algebra.rank)
    for e_i, _ in out:
        if (e_i @ e_i) != e_i:
            raise InternalInvariantError("central idempotent is not idempotent")
        if algebra.rosati(e_i) != e_i:
            raise InternalInvariantError(
                "a positive involution must fix each central idempotent"
            )
        total = total + e_i
    for a, (ea, _) in enumerate(out):
        for eb, _ in out[a + 1 :]:
            if (ea @ eb) != Matrix.zeros(algebra.rank, algebra.rank):
                raise InternalInvariantError("central idempotents must be orthogonal")
    if total != Matrix.identity(algebra.rank):
        raise InternalInvariantError("central idempotents must sum to the identity")
    return out


@dataclass(frozen=True)
class SimpleFactor:
    """One simple summand of the algebra, as seen through its idempotent.

    kind and size name the factor's shape over the reals per place of its
    center: size l real, m complex or t quaternion matrices."""

    kind: str
    size: int
    idempotent: Matrix
    center_poly: tuple
    center_degree: int
    places: int
    dim: int
    fixed_dim: int

    @property
    def label(self) -> str:
        return f"{self.kind}({self.size})"


@dataclass(frozen=True)
class WedderburnDecomposition:
    algebra: EndoAlgebra
    factors: tuple[SimpleFactor, ...]

    @property
    def center_dim(self) -> int:
        return sum(f.center_degree for f in self.factors)

    def labels(self) -> list[str]:
        return [f.label for f in self.factors]


def _classify_factor(
    algebra: EndoAlgebra, center: list[Matrix], e: Matrix, m_poly: Polynomial
) -> SimpleFactor:
    cut = [e @ b @ e for b in algebra.basis]
    dim = _flat_rank(cut)
    fixed = [c + algebra.rosati(c) for c in cut]
    fixed_dim = _flat_rank(fixed)
    center_cut = [e @ zb for zb in center]
    k = _flat_rank(center_cut)
    center_fixed = [c + algebra.rosati(c) for c in center_cut]
    f_z = _flat_rank(center_fixed)
    real_roots = count_real_roots(m_poly)
    if f_z == k:
        if real_roots != k:
            raise ValidationError(
                "classification",
                "an involution-fixed center must be a totally real field",
            )
        places = k
    elif 2 * f_z == k:
        if real_roots != 0:
            raise ValidationError(
                "classification",
                "a center with halved fixed part must be totally imaginary",
            )
        places = f_z
    else:
        raise ValidationError(
            "classification", f"center of degree {k} fixes dimension {f_z}"
        )
    if dim % places or fixed_dim % places:
        raise ValidationError(
            "classification", "factor dimensions must be multiples of the place count"
        )
    kind, size = lookup_kind(dim // places, fixed_dim // places)
    return SimpleFactor(
        kind=kind,
        size=size,
        idempotent=e,
        center_poly=tuple(m_poly.monic().coeffs),
        center_degree=k,
        places=places,
        dim=dim,
        fixed_dim=fixed_dim,
    )


def decompose(algebra: EndoAlgebra, seed: int = 42) -> WedderburnDecomposition:
    """Split the algebra along its primitive central idempotents and
    classify every simple factor."""
    center = center_basis(algebra)
    factors = []
    for e, m_poly in central_idempotents(algebra, seed):
        factors.append(_classify_factor(algebra, center, e, m_poly))
    if sum(f.dim for f in factors) != algebra.dim:
        raise InternalInvariantError("factor dimensions must add up to the algebra")
    return WedderburnDecomposition(algebra, tuple(factors))
