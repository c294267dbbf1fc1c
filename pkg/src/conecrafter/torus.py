"""Polarized complex tori with rational complex structure, and finite groups
of affine automorphisms acting on them.

A torus is the lattice Z^(2n) together with a rational matrix J (J @ J = -I)
and an integral alternating polarization E compatible with J whose symmetric
companion E @ J is definite. Affine automorphisms are pairs (linear part,
translation mod 1); the linear part must be unimodular and commute with J.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ClosureError, ValidationError
from .matrices import (
    Matrix,
    definiteness_sign,
    in_lattice_plus_integers,
)

DEFAULT_MAX_ORDER = 64


def _sym(m: Matrix) -> Matrix:
    return (m + m.T) * Fraction(1, 2)


@dataclass(frozen=True)
class PolarizedTorus:
    j: Matrix
    e: Matrix

    def __post_init__(self):
        if not self.j.is_square or not self.e.is_square:
            raise ValidationError("shape", "J and E must be square")
        if self.j.shape != self.e.shape:
            raise ValidationError("shape", "J and E must have equal shape")
        if self.j.nrows % 2 != 0:
            raise ValidationError("shape", "lattice rank must be even")

    @property
    def rank(self) -> int:
        return self.j.nrows

    @property
    def n(self) -> int:
        return self.j.nrows // 2


@dataclass(frozen=True)
class TorusCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class TorusReport:
    checks: tuple[TorusCheck, ...]
    sign: int  # +1 / -1 definite direction of E @ J, 0 when not definite

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_names(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]


def validate_torus(t: PolarizedTorus) -> TorusReport:
    """Check each torus invariant exactly and report per-invariant verdicts.

    The definiteness check reports sign -1 when E @ J is negative definite;
    callers normalize by flipping E and re-validating.
    """
    checks = []
    n2 = t.rank
    ident = Matrix.identity(n2)
    checks.append(
        TorusCheck(
            "complex_structure_square",
            (t.j @ t.j) == -ident,
            "J @ J must equal -I",
        )
    )
    checks.append(
        TorusCheck(
            "polarization_integral",
            t.e.is_integral,
            "E must have integer entries",
        )
    )
    checks.append(
        TorusCheck(
            "polarization_alternating",
            t.e.is_alternating,
            "E must be alternating",
        )
    )
    checks.append(
        TorusCheck(
            "polarization_compatible",
            (t.j.T @ t.e @ t.j) == t.e,
            "J must preserve E",
        )
    )
    sign = definiteness_sign(_sym(t.e @ t.j))
    checks.append(
        TorusCheck(
            "polarization_definite",
            sign != 0,
            "x -> x.E.J.x must be definite of one sign",
        )
    )
    return TorusReport(tuple(checks), sign)


def normalize_polarization(t: PolarizedTorus) -> tuple[PolarizedTorus, bool]:
    """Flip E -> -E when the definite form comes out negative.

    Returns (torus, flipped). Raises ValidationError when the torus fails
    any other invariant, or is not definite either way.
    """
    report = validate_torus(t)
    bad = [n for n in report.failed_names() if n != "polarization_definite"]
    if bad:
        raise ValidationError(bad[0])
    if report.sign == 0:
        raise ValidationError("polarization_definite")
    if report.sign < 0:
        return PolarizedTorus(t.j, -t.e), True
    return t, False


def _canonical_translation(tr: Sequence) -> tuple[Fraction, ...]:
    out = []
    for x in tr:
        f = Fraction(x)
        out.append(f - (f.numerator // f.denominator))  # into [0, 1)
    return tuple(out)


@dataclass(frozen=True)
class AffineAuto:
    """Affine automorphism x -> linear @ x + translation of the torus.

    The translation is stored mod 1 with entries in [0, 1)."""

    linear: Matrix
    translation: tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        if not self.linear.is_square:
            raise ValidationError("shape", "linear part must be square")
        tr = self.translation or tuple([Fraction(0)] * self.linear.nrows)
        if len(tr) != self.linear.nrows:
            raise ValidationError("shape", "translation length must match rank")
        object.__setattr__(self, "translation", _canonical_translation(tr))

    def compose(self, other: "AffineAuto") -> "AffineAuto":
        """self after other: x -> A(Bx + s) + t."""
        lin = self.linear @ other.linear
        tr = [
            sum(self.linear[i, j] * other.translation[j] for j in range(lin.nrows))
            + self.translation[i]
            for i in range(lin.nrows)
        ]
        return AffineAuto(lin, tuple(Fraction(x) for x in tr))

    def inverse(self) -> "AffineAuto":
        inv = self.linear.inverse()
        tr = [
            -sum(inv[i, j] * self.translation[j] for j in range(inv.nrows))
            for i in range(inv.nrows)
        ]
        return AffineAuto(inv, tuple(Fraction(x) for x in tr))

    @property
    def is_identity(self) -> bool:
        return (
            self.linear == Matrix.identity(self.linear.nrows)
            and all(x == 0 for x in self.translation)
        )

    @property
    def is_translation(self) -> bool:
        return self.linear == Matrix.identity(self.linear.nrows) and any(
            x != 0 for x in self.translation
        )


@dataclass(frozen=True)
class GroupAction:
    """A finite group of affine automorphisms; identity listed first."""

    elements: tuple[AffineAuto, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def linear_parts(self) -> list[Matrix]:
        return [g.linear for g in self.elements]

    def non_identity(self) -> list[AffineAuto]:
        return [g for g in self.elements if not g.is_identity]


def validate_automorphism(t: PolarizedTorus, g: AffineAuto) -> list[TorusCheck]:
    """Per-generator checks: integral unimodular linear part commuting with J."""
    checks = []
    checks.append(
        TorusCheck("linear_integral", g.linear.is_integral, "linear part must be integral")
    )
    det = g.linear.det() if g.linear.is_square else 0
    checks.append(
        TorusCheck("unimodular", det in (1, -1), f"determinant must be +-1, got {det}")
    )
    checks.append(
        TorusCheck(
            "holomorphic",
            (g.linear @ t.j) == (t.j @ g.linear),
            "linear part must commute with J",
        )
    )
    return checks


def close_group(
    generators: Iterable[AffineAuto], max_order: int = DEFAULT_MAX_ORDER
) -> GroupAction:
    """Close a generator list under composition (identity added). Raises
    ClosureError when the closure passes max_order elements."""
    gens = list(generators)
    n = gens[0].linear.nrows if gens else 0
    if not gens:
        raise ValueError("need at least one generator or an explicit rank")
    ident = AffineAuto(Matrix.identity(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = g.compose(h)
                if gh not in seen:
                    if len(seen) >= max_order:
                        raise ClosureError(
                            f"group does not close within {max_order} elements"
                        )
                    seen.add(gh)
                    nxt.append(gh)
        frontier = nxt
    ordered = [ident] + sorted(
        (g for g in seen if g != ident),
        key=lambda g: (g.linear.rows, g.translation),
    )
    return GroupAction(tuple(ordered))


def trivial_group(rank: int) -> GroupAction:
    return GroupAction((AffineAuto(Matrix.identity(rank)),))


def is_free(t: PolarizedTorus, g: AffineAuto) -> bool:
    """Whether g acts without fixed points on the torus.

    A fixed point exists iff the translation lies in the column space of
    (linear - I) over Q plus the integer lattice; that membership is decided
    exactly via Hermite form.
    """
    if g.is_identity:
        raise ValueError("freeness is asked of non-identity elements")
    b = g.linear - Matrix.identity(t.rank)
    minus_t = [-x for x in g.translation]
    return not in_lattice_plus_integers(b, minus_t)


def has_translations(group: GroupAction) -> bool:
    return any(g.is_translation for g in group.elements)


def action_is_free(t: PolarizedTorus, group: GroupAction) -> bool:
    return all(is_free(t, g) for g in group.non_identity())


def is_polarization_invariant(t: PolarizedTorus, group: GroupAction) -> bool:
    return all(
        (g.linear.T @ t.e @ g.linear) == t.e for g in group.elements
    )


def invariant_polarization(t: PolarizedTorus, group: GroupAction) -> Matrix:
    """Sum of pullbacks of E over the group; integral, alternating,
    J-compatible and G-invariant by construction."""
    acc = Matrix.zeros(t.rank, t.rank)
    for g in group.elements:
        acc = acc + (g.linear.T @ t.e @ g.linear)
    for g in group.elements:
        if (g.linear.T @ acc @ g.linear) != acc:
            raise ValidationError("polarization_invariant", "averaging failed to produce an invariant form")
    return acc
