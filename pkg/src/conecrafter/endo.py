"""Endomorphism algebras of polarized tori and the Rosati involution.

The rational endomorphism algebra is the space of rational matrices
commuting with the complex structure J; group-invariant subalgebras add
commutation with every linear part of the action. Bases are integral and
canonical (Hermite-reduced vectorizations), so all downstream reports are
byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import InternalInvariantError, ValidationError
from .matrices import Matrix, is_positive_definite, matrix_kernel_basis, vstack
from .torus import GroupAction, PolarizedTorus


def _dedup(mats: Sequence[Matrix]) -> list[Matrix]:
    seen = set()
    out = []
    for m in mats:
        if m not in seen:
            seen.add(m)
            out.append(m)
    return out


@dataclass(frozen=True)
class EndoAlgebra:
    """A unital matrix algebra over Q given by an exact basis.

    basis entries are integral matrices of size rank x rank; the identity
    always lies in their span. commutants records the matrices whose
    centralizer cut this algebra out (J first, then any group constraints).
    """

    torus: PolarizedTorus
    basis: tuple[Matrix, ...]
    commutants: tuple[Matrix, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def rank(self) -> int:
        return self.torus.rank

    @cached_property
    def _flat_basis(self) -> Matrix:
        # columns are vectorized basis elements
        flats = [b.flat() for b in self.basis]
        return Matrix([[flats[j][i] for j in range(len(flats))] for i in range(len(flats[0]))])

    def coordinates(self, m: Matrix) -> tuple[Fraction, ...]:
        """Exact coordinates of m in the basis; raises when m is outside."""
        rhs = Matrix([[x] for x in m.flat()])
        sol = self._flat_basis.solve(rhs)
        if sol is None:
            raise ValidationError("algebra_membership", "matrix is not in the algebra")
        coords = tuple(Fraction(sol[i, 0]) for i in range(self.dim))
        if self.from_coordinates(coords) != m:
            raise ValidationError("algebra_membership", "matrix is not in the algebra")
        return coords

    def from_coordinates(self, coords: Sequence) -> Matrix:
        if len(coords) != self.dim:
            raise ValueError("coordinate length mismatch")
        acc = Matrix.zeros(self.rank, self.rank)
        for c, b in zip(coords, self.basis):
            if c != 0:
                acc = acc + b * Fraction(c)
        return acc

    def contains(self, m: Matrix) -> bool:
        try:
            self.coordinates(m)
            return True
        except ValidationError:
            return False

    @cached_property
    def unit(self) -> tuple[Fraction, ...]:
        return self.coordinates(Matrix.identity(self.rank))

    @cached_property
    def structure_constants(self) -> tuple:
        """c[i][j] = coordinates of basis[i] @ basis[j]."""
        return tuple(
            tuple(self.coordinates(bi @ bj) for bj in self.basis) for bi in self.basis
        )

    def multiply_coords(self, x: Sequence, y: Sequence) -> tuple[Fraction, ...]:
        sc = self.structure_constants
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                row = sc[i][j]
                f = Fraction(xi) * Fraction(yj)
                for k in range(self.dim):
                    if row[k] != 0:
                        out[k] += f * row[k]
        return tuple(out)

    @cached_property
    def trace_form(self) -> Matrix:
        """Gram matrix of (x, y) -> Tr(x @ y) on the basis."""
        return Matrix(
            [[(bi @ bj).trace() for bj in self.basis] for bi in self.basis]
        )

    def rosati(self, phi: Matrix) -> Matrix:
        return rosati(self.torus, phi)

    @cached_property
    def involution_matrix(self) -> Matrix:
        """Column j holds the coordinates of rosati(basis[j])."""
        cols = [self.coordinates(self.rosati(b)) for b in self.basis]
        return Matrix([[cols[j][i] for j in range(self.dim)] for i in range(self.dim)])

    @cached_property
    def rosati_gram(self) -> Matrix:
        """Gram matrix of the pairing (x, y) -> Tr(x @ rosati(y))."""
        return Matrix(
            [[(bi @ self.rosati(bj)).trace() for bj in self.basis] for bi in self.basis]
        )

    def centralizer_constraints(self) -> list[Matrix]:
        return list(self.commutants)


def rosati(t: PolarizedTorus, phi: Matrix) -> Matrix:
    """Rosati adjoint of phi: the unique psi with psi.T @ E = E @ phi."""
    return t.e.inverse() @ phi.T @ t.e


def compute_end(t: PolarizedTorus) -> EndoAlgebra:
    """Basis of the rational endomorphism algebra {M : M J = J M}."""
    basis = matrix_kernel_basis(lambda m: m @ t.j - t.j @ m, (t.rank, t.rank))
    if not basis:
        raise InternalInvariantError("endomorphism algebra lost its identity")
    return EndoAlgebra(t, tuple(basis), (t.j,))


def invariant_subalgebra(t: PolarizedTorus, group: GroupAction) -> "InvariantSubalgebra":
    """Subalgebra of endomorphisms commuting with J and the whole action.

    Translations act trivially by conjugation, so only linear parts enter.
    """
    gens = _dedup(g.linear for g in group.elements)
    constraints = [t.j] + [g for g in gens if g != Matrix.identity(t.rank)]

    def op(m: Matrix) -> Matrix:
        return vstack(*[m @ c - c @ m for c in constraints])

    basis = matrix_kernel_basis(op, (t.rank, t.rank))
    if not basis:
        raise InternalInvariantError("invariant algebra lost its identity")
    sub = EndoAlgebra(t, tuple(basis), tuple(constraints))
    parent = compute_end(t)
    embedding_cols = [parent.coordinates(b) for b in basis]
    embedding = Matrix(
        [[embedding_cols[j][i] for j in range(len(basis))] for i in range(parent.dim)]
    )
    return InvariantSubalgebra(sub, parent, embedding)


@dataclass(frozen=True)
class InvariantSubalgebra:
    """An invariant endomorphism algebra together with its inclusion into
    the full one. embedding columns are parent coordinates of sub basis."""

    algebra: EndoAlgebra
    parent: EndoAlgebra
    embedding: Matrix

    @property
    def dim(self) -> int:
        return self.algebra.dim


def center_basis(algebra: EndoAlgebra) -> list[Matrix]:
    """Integral basis of the center, canonical in the same sense as the
    algebra basis."""
    constraints = list(algebra.commutants) + list(algebra.basis)

    def op(m: Matrix) -> Matrix:
        return vstack(*[m @ c - c @ m for c in constraints])

    basis = matrix_kernel_basis(op, (algebra.rank, algebra.rank))
    if not basis:
        raise InternalInvariantError("center lost its identity")
    return basis


def rosati_is_adjoint(t: PolarizedTorus, phi: Matrix) -> bool:
    """Defining property: rosati(phi).T @ E == E @ phi."""
    return (rosati(t, phi).T @ t.e) == (t.e @ phi)


def rosati_fixes_algebra(algebra: EndoAlgebra) -> bool:
    return all(algebra.contains(algebra.rosati(b)) for b in algebra.basis)


def trace_positivity_check(algebra: EndoAlgebra) -> bool:
    """Whether (x, y) -> Tr(x @ rosati(y)) is positive definite on the
    algebra. For a polarization this holds; it is the exactness anchor for
    every ampleness computation downstream."""
    gram = algebra.rosati_gram
    if gram != gram.T:
        raise InternalInvariantError("rosati trace pairing must be symmetric")
    return is_positive_definite(gram)
