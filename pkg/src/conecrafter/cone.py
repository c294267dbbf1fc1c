"""Integral alternating forms compatible with the complex structure, their
ample and nef cones, and the product shape of the invariant cone.

Forms correspond to endomorphisms through F -> E^-1 F, which lands in the
involution-fixed part of the endomorphism algebra. Positivity of a form is
an exact root count: F is ample iff every root of det(x I - E^-1 F) is
positive, nef iff nonnegative. The invariant cone then splits along the
simple factors of the invariant algebra, each piece a cone of positive
definite Hermitian elements whose shape is reported as a flag:

    ray          fixed part of the factor has dimension 1
    hyperbolic   dimension 2, one branch of a signature (1,1) quadric
    higher_rank  dimension 3 or more
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .endo import EndoAlgebra, InvariantSubalgebra, invariant_subalgebra
from .errors import InternalInvariantError, ValidationError
from .matrices import Matrix, matrix_kernel_basis, vstack
from .polynomials import all_roots_nonnegative, all_roots_positive, char_poly
from .torus import GroupAction, PolarizedTorus, is_polarization_invariant
from .wedderburn import SimpleFactor, WedderburnDecomposition, decompose


def ns_to_endo(t: PolarizedTorus, f: Matrix) -> Matrix:
    return t.e.inverse() @ f


def endo_to_ns(t: PolarizedTorus, phi: Matrix) -> Matrix:
    return t.e @ phi


def is_ample(t: PolarizedTorus, f: Matrix) -> bool:
    """Exact ampleness relative to the polarization: all roots of the
    relative characteristic polynomial are strictly positive."""
    return all_roots_positive(char_poly(ns_to_endo(t, f)))


def is_nef(t: PolarizedTorus, f: Matrix) -> bool:
    return all_roots_nonnegative(char_poly(ns_to_endo(t, f)))


def trace_dual_pairing(t: PolarizedTorus, f1: Matrix, f2: Matrix):
    """Tr(E^-1 f1 E^-1 f2); positive whenever both forms are ample."""
    return (ns_to_endo(t, f1) @ ns_to_endo(t, f2)).trace()


@dataclass(frozen=True)
class NSLattice:
    """Lattice of integral alternating J-compatible forms with a fixed
    canonical basis; coordinates are taken in that basis."""

    torus: PolarizedTorus
    basis: tuple[Matrix, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def _flat_basis(self) -> Matrix:
        flats = [b.flat() for b in self.basis]
        return Matrix([[flats[j][i] for j in range(len(flats))] for i in range(len(flats[0]))])

    def coordinates(self, f: Matrix) -> tuple[Fraction, ...]:
        rhs = Matrix([[x] for x in f.flat()])
        sol = self._flat_basis.solve(rhs)
        if sol is None:
            raise ValidationError("ns_membership", "form is outside the lattice span")
        coords = tuple(Fraction(sol[i, 0]) for i in range(self.rank))
        if self.from_coordinates(coords) != f:
            raise ValidationError("ns_membership", "form is outside the lattice span")
        return coords

    def from_coordinates(self, coords: Sequence) -> Matrix:
        if len(coords) != self.rank:
            raise ValueError("coordinate length mismatch")
        n = self.torus.rank
        acc = Matrix.zeros(n, n)
        for c, b in zip(coords, self.basis):
            if c != 0:
                acc = acc + b * Fraction(c)
        return acc

    def pullback_matrix(self, g: Matrix) -> Matrix:
        """Matrix of F -> g.T @ F @ g on coordinates (columns are images of
        basis vectors). Raises when g does not preserve the span."""
        cols = [self.coordinates(g.T @ b @ g) for b in self.basis]
        return Matrix([[cols[j][i] for j in range(self.rank)] for i in range(self.rank)])

    @cached_property
    def pairing_matrix(self) -> Matrix:
        """Gram matrix of the trace pairing on the basis."""
        t = self.torus
        halves = [ns_to_endo(t, b) for b in self.basis]
        return Matrix(
            [[(hi @ hj).trace() for hj in halves] for hi in halves]
        )

    def is_ample_coords(self, coords: Sequence) -> bool:
        return is_ample(self.torus, self.from_coordinates(coords))

    def is_nef_coords(self, coords: Sequence) -> bool:
        return is_nef(self.torus, self.from_coordinates(coords))


def compute_ns(t: PolarizedTorus) -> NSLattice:
    """Canonical basis of {F integral : F alternating, J.T F J = F}."""

    def op(f: Matrix) -> Matrix:
        return vstack(f + f.T, t.j.T @ f @ t.j - f)

    basis = matrix_kernel_basis(op, (t.rank, t.rank))
    if not basis:
        raise InternalInvariantError("polarization lost from the form lattice")
    return NSLattice(t, tuple(basis))


def invariant_ns(t: PolarizedTorus, group: GroupAction) -> NSLattice:
    """Canonical basis of the forms fixed by every pullback of the action."""
    gens = []
    seen = set()
    for g in group.elements:
        if g.linear not in seen and g.linear != Matrix.identity(t.rank):
            seen.add(g.linear)
            gens.append(g.linear)

    def op(f: Matrix) -> Matrix:
        parts = [f + f.T, t.j.T @ f @ t.j - f]
        parts.extend(g.T @ f @ g - f for g in gens)
        return vstack(*parts)

    basis = matrix_kernel_basis(op, (t.rank, t.rank))
    if not basis:
        raise InternalInvariantError("invariant polarization lost from the lattice")
    return NSLattice(t, tuple(basis))


@dataclass(frozen=True)
class FactorCone:
    """Positive cone of one simple factor, as seen inside the invariant
    form lattice; ns_dim is the factor's share of the lattice rank."""

    factor: SimpleFactor
    flag: str
    ns_dim: int


@dataclass(frozen=True)
class ConeStructure:
    torus: PolarizedTorus
    group: GroupAction
    subalgebra: InvariantSubalgebra
    decomposition: WedderburnDecomposition
    ns: NSLattice
    invariant: NSLattice
    factors: tuple[FactorCone, ...]

    def flags(self) -> list[str]:
        return [f.flag for f in self.factors]

    def labels(self) -> list[str]:
        return [f.factor.label for f in self.factors]


def _cone_flag(ns_dim: int) -> str:
    if ns_dim == 1:
        return "ray"
    if ns_dim == 2:
        return "hyperbolic"
    return "higher_rank"


def cone_structure(
    t: PolarizedTorus, group: GroupAction, seed: int = 42
) -> ConeStructure:
    """Full invariant cone analysis for a polarization-preserving action.

    The polarization must already be invariant (average it first if not);
    otherwise the form-to-endomorphism bridge leaves the invariant algebra.
    """
    if not is_polarization_invariant(t, group):
        raise ValidationError(
            "polarization_invariant", "cone analysis needs an invariant polarization"
        )
    sub = invariant_subalgebra(t, group)
    dec = decompose(sub.algebra, seed)
    full = compute_ns(t)
    inv = invariant_ns(t, group)
    factors = []
    total = 0
    for sf in dec.factors:
        pieces = [sf.idempotent @ ns_to_endo(t, b) @ sf.idempotent for b in inv.basis]
        flats = [p.flat() for p in pieces]
        dim = Matrix(flats).rank() if flats else 0
        if dim != sf.fixed_dim:
            raise InternalInvariantError(
                "factor cone dimension disagrees with its fixed part"
            )
        factors.append(FactorCone(sf, _cone_flag(dim), dim))
        total += dim
    if total != inv.rank:
        raise InternalInvariantError("factor cones do not fill the invariant lattice")
    return ConeStructure(t, group, sub, dec, full, inv, tuple(factors))
