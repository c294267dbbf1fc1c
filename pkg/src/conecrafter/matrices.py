"""Exact matrices over the rationals, with the integer lattice algorithms
(Hermite and Smith normal forms, integer kernels, integer linear solves)
that the rest of the package is built on.

Entries are Python ints or fractions.Fraction; nothing here ever rounds.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Sequence

from ._kernels import imat_mul

Scalar = int | Fraction


def _norm(x) -> Scalar:
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else x
    raise TypeError(f"matrix entries must be int or Fraction, got {type(x).__name__}")


class Matrix:
    """Immutable exact matrix. Use @ for matrix product, * for scalars."""

    __slots__ = ("_rows", "_nrows", "_ncols")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(_norm(x) for x in row) for row in rows)
        if not rows:
            raise ValueError("matrix needs at least one row")
        width = len(rows[0])
        if width == 0 or any(len(r) != width for r in rows):
            raise ValueError("matrix rows must be non-empty and equal length")
        self._rows = rows
        self._nrows = len(rows)
        self._ncols = width

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> "Matrix":
        return cls([[0] * c for _ in range(r)])

    @classmethod
    def from_flat(cls, flat: Sequence, r: int, c: int) -> "Matrix":
        if len(flat) != r * c:
            raise ValueError("flat length does not match shape")
        return cls([flat[i * c:(i + 1) * c] for i in range(r)])

    @classmethod
    def column(cls, entries: Sequence) -> "Matrix":
        return cls([[x] for x in entries])

    @property
    def nrows(self) -> int:
        return self._nrows

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def rows(self) -> tuple:
        return self._rows

    @property
    def shape(self) -> tuple[int, int]:
        return self._nrows, self._ncols

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def flat(self) -> list:
        return [x for row in self._rows for x in row]

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        return f"Matrix({[list(r) for r in self._rows]})"

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self._rows, other._rows)
            ]
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(
            [
                [a - b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self._rows, other._rows)
            ]
        )

    def __neg__(self) -> "Matrix":
        return Matrix([[-x for x in r] for r in self._rows])

    def __mul__(self, scalar) -> "Matrix":
        s = _norm(scalar if isinstance(scalar, (int, Fraction)) else Fraction(scalar))
        return Matrix([[x * s for x in r] for r in self._rows])

    __rmul__ = __mul__

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self._ncols != other._nrows:
            raise ValueError("shape mismatch in product")
        n, k, m = self._nrows, self._ncols, other._ncols
        if self.is_integral and other.is_integral:
            flat = imat_mul(self.flat(), other.flat(), n, k, m)
            return Matrix.from_flat(flat, n, m)
        bcols = [other.col(j) for j in range(m)]
        return Matrix(
            [[_dot(row, bc) for bc in bcols] for row in self._rows]
        )

    def transpose(self) -> "Matrix":
        return Matrix(list(zip(*self._rows)))

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    @property
    def is_square(self) -> bool:
        return self._nrows == self._ncols

    @property
    def is_integral(self) -> bool:
        return all(isinstance(x, int) for row in self._rows for x in row)

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for row in self._rows for x in row)

    @property
    def is_symmetric(self) -> bool:
        return self.is_square and self == self.T

    @property
    def is_alternating(self) -> bool:
        return (
            self.is_square
            and all(self._rows[i][i] == 0 for i in range(self._nrows))
            and self == -self.T
        )

    def denominator_lcm(self) -> int:
        d = 1
        for row in self._rows:
            for x in row:
                if isinstance(x, Fraction):
                    d = d * x.denominator // gcd(d, x.denominator)
        return d

    def to_integer(self) -> tuple["Matrix", int]:
        """Return (d*self, d) for the least d > 0 clearing denominators."""
        d = self.denominator_lcm()
        return (self * d if d != 1 else self), d

    def det(self) -> Fraction:
        if not self.is_square:
            raise ValueError("determinant needs a square matrix")
        n = self._nrows
        m = [[Fraction(x) for x in row] for row in self._rows]
        sign = 1
        for col in range(n):
            piv = next((i for i in range(col, n) if m[i][col] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                sign = -sign
            pv = m[col][col]
            for i in range(col + 1, n):
                if m[i][col] != 0:
                    f = m[i][col] / pv
                    m[i] = [a - f * b for a, b in zip(m[i], m[col])]
        out = Fraction(sign)
        for i in range(n):
            out *= m[i][i]
        return out

    def inverse(self) -> "Matrix":
        if not self.is_square:
            raise ValueError("inverse needs a square matrix")
        n = self._nrows
        m = [
            [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(self._rows)
        ]
        for col in range(n):
            piv = next((i for i in range(col, n) if m[i][col] != 0), None)
            if piv is None:
                raise ValueError("matrix is singular")
            m[col], m[piv] = m[piv], m[col]
            pv = m[col][col]
            m[col] = [x / pv for x in m[col]]
            for i in range(n):
                if i != col and m[i][col] != 0:
                    f = m[i][col]
                    m[i] = [a - f * b for a, b in zip(m[i], m[col])]
        return Matrix([row[n:] for row in m])

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form over Q, with pivot column indices."""
        m = [[Fraction(x) for x in row] for row in self._rows]
        pivots = []
        r = 0
        for col in range(self._ncols):
            if r == self._nrows:
                break
            piv = next((i for i in range(r, self._nrows) if m[i][col] != 0), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            pv = m[r][col]
            m[r] = [x / pv for x in m[r]]
            for i in range(self._nrows):
                if i != r and m[i][col] != 0:
                    f = m[i][col]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(col)
            r += 1
        return Matrix(m), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def solve(self, rhs: "Matrix") -> "Matrix | None":
        """Exact solution X of self @ X = rhs, or None if inconsistent.
        Free variables are set to zero."""
        if rhs.nrows != self._nrows:
            raise ValueError("shape mismatch")
        aug = Matrix([list(r1) + list(r2) for r1, r2 in zip(self._rows, rhs._rows)])
        red, pivots = aug.rref()
        n = self._ncols
        if any(p >= n for p in pivots):
            return None
        out = [[Fraction(0)] * rhs.ncols for _ in range(n)]
        for r, p in enumerate(pivots):
            for j in range(rhs.ncols):
                out[p][j] = red[r, n + j]
        return Matrix(out) if out else None

    def kernel_rational(self) -> list[tuple]:
        """Basis of {x : self @ x = 0} over Q (free-variable parametrization)."""
        red, pivots = self.rref()
        pivset = set(pivots)
        free = [j for j in range(self._ncols) if j not in pivset]
        basis = []
        for f in free:
            v = [Fraction(0)] * self._ncols
            v[f] = Fraction(1)
            for r, p in enumerate(pivots):
                v[p] = -red[r, f]
            basis.append(tuple(_norm(x) for x in v))
        return basis

    def leading_principal_minors(self) -> list[Fraction]:
        if not self.is_square:
            raise ValueError("principal minors need a square matrix")
        return [
            Matrix([row[: k + 1] for row in self._rows[: k + 1]]).det()
            for k in range(self._nrows)
        ]

    def trace(self) -> Scalar:
        if not self.is_square:
            raise ValueError("trace needs a square matrix")
        return _norm(sum(self._rows[i][i] for i in range(self._nrows)))


def _dot(u: Sequence, v: Sequence):
    return _norm(sum(a * b for a, b in zip(u, v)))


def is_positive_definite(m: Matrix) -> bool:
    """Exact Sylvester test on a symmetric matrix."""
    if not m.is_symmetric:
        raise ValueError("definiteness test needs a symmetric matrix")
    return all(d > 0 for d in m.leading_principal_minors())


def definiteness_sign(m: Matrix) -> int:
    """+1 / -1 when the symmetric matrix is positive / negative definite,
    0 otherwise."""
    if not m.is_symmetric:
        raise ValueError("definiteness test needs a symmetric matrix")
    minors = m.leading_principal_minors()
    if all(d > 0 for d in minors):
        return 1
    if all((d > 0 if k % 2 else d < 0) for k, d in enumerate(minors)):
        return -1
    return 0


def block_diag(*mats: Matrix) -> Matrix:
    rows = sum(m.nrows for m in mats)
    cols = sum(m.ncols for m in mats)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in mats:
        for i in range(m.nrows):
            for j in range(m.ncols):
                out[r0 + i][c0 + j] = m[i, j]
        r0 += m.nrows
        c0 += m.ncols
    return Matrix(out)


def vstack(*mats: Matrix) -> Matrix:
    width = mats[0].ncols
    if any(m.ncols != width for m in mats):
        raise ValueError("width mismatch")
    return Matrix([row for m in mats for row in m.rows])


# --- integer lattice algorithms -------------------------------------------

def _require_integral(m: Matrix, what: str) -> None:
    if not m.is_integral:
        raise ValueError(f"{what} needs an integer matrix")


def hermite_normal_form(m: Matrix) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form.

    Returns (h, u) with h = u @ m, u unimodular, pivots positive, entries
    above each pivot reduced into [0, pivot). Pivot selection is the
    smallest absolute value (lowest row index on ties), which fixes the
    output bit-for-bit.
    """
    _require_integral(m, "hermite_normal_form")
    r, c = m.shape
    h = [list(row) for row in m.rows]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    prow = 0
    for col in range(c):
        while True:
            nz = [i for i in range(prow, r) if h[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: (abs(h[i][col]), i))
            if i0 != prow:
                h[prow], h[i0] = h[i0], h[prow]
                u[prow], u[i0] = u[i0], u[prow]
            if len(nz) == 1:
                break
            pv = h[prow][col]
            for i in range(prow + 1, r):
                if h[i][col] != 0:
                    q = h[i][col] // pv
                    if q:
                        h[i] = [a - q * b for a, b in zip(h[i], h[prow])]
                        u[i] = [a - q * b for a, b in zip(u[i], u[prow])]
        if prow < r and h[prow][col] != 0:
            if h[prow][col] < 0:
                h[prow] = [-x for x in h[prow]]
                u[prow] = [-x for x in u[prow]]
            pv = h[prow][col]
            for i in range(prow):
                q = h[i][col] // pv
                if q:
                    h[i] = [a - q * b for a, b in zip(h[i], h[prow])]
                    u[i] = [a - q * b for a, b in zip(u[i], u[prow])]
            prow += 1
            if prow == r:
                break
    return Matrix(h), Matrix(u)


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form: (d, u, v) with d = u @ m @ v diagonal,
    d1 | d2 | ... , u and v unimodular, diagonal entries non-negative."""
    _require_integral(m, "smith_normal_form")
    r, c = m.shape
    a = [list(row) for row in m.rows]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    v = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(r, c):
        entries = [
            (abs(a[i][j]), i, j)
            for i in range(t, r)
            for j in range(t, c)
            if a[i][j] != 0
        ]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, r):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, c):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
        # divisibility: fold any non-multiple into the pivot position
        piv = a[t][t]
        bad = None
        for i in range(t + 1, r):
            for j in range(t + 1, c):
                if a[i][j] % piv != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            row_op(t, bad, -1)  # add the offending row, restart the pivot
            continue
        if piv < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return Matrix(a), Matrix(u), Matrix(v)


def integer_kernel_matrix(c: Matrix) -> Matrix | None:
    """Z-basis (as rows, HNF-canonical) of {x in Z^n : c @ x = 0};
    None when the kernel is zero. The lattice returned is saturated."""
    _require_integral(c, "integer_kernel_matrix")
    h, u = hermite_normal_form(c.T)
    zero_rows = [i for i in range(h.nrows) if all(x == 0 for x in h.row(i))]
    if not zero_rows:
        return None
    basis = Matrix([u.row(i) for i in zero_rows])
    canon, _ = hermite_normal_form(basis)
    return Matrix([canon.row(i) for i in range(len(zero_rows))])


def matrix_kernel_basis(
    op: Callable[[Matrix], Matrix], shape: tuple[int, int]
) -> list[Matrix]:
    """Z-basis of {M integer p*q matrix : op(M) = 0} for a linear op.

    op may return rational matrices; each constraint row is scaled integral.
    Basis is HNF-canonical, so output is deterministic.
    """
    p, q = shape
    cols = []
    for k in range(p):
        for l in range(q):
            e = Matrix([[1 if (i, j) == (k, l) else 0 for j in range(q)] for i in range(p)])
            cols.append(op(e).flat())
    nrows = len(cols[0])
    if any(len(c) != nrows for c in cols):
        raise ValueError("op must return a fixed shape")
    rows = []
    for i in range(nrows):
        row = [c[i] for c in cols]
        d = 1
        for x in row:
            if isinstance(x, Fraction):
                d = d * x.denominator // gcd(d, x.denominator)
        rows.append([int(x * d) for x in row])
    kernel = integer_kernel_matrix(Matrix(rows))
    if kernel is None:
        return []
    return [Matrix.from_flat(kernel.row(i), p, q) for i in range(kernel.nrows)]


def solve_integer(a: Matrix, b: Sequence) -> list[int] | None:
    """Integer solution x of a @ x = b, or None. b may be rational."""
    _require_integral(a, "solve_integer")
    r, c = a.shape
    if len(b) != r:
        raise ValueError("shape mismatch")
    h, u = hermite_normal_form(a.T)  # a @ u.T = h.T, columns of h.T echelon
    pivots = []
    for i in range(h.nrows):
        row = h.row(i)
        j = next((k for k in range(len(row)) if row[k] != 0), None)
        if j is None:
            break
        pivots.append((i, j))
    resid = [Fraction(x) for x in b]
    z = [0] * c
    for i, j in pivots:
        pv = h[i, j]
        val = resid[j] / pv
        if val.denominator != 1:
            return None
        zi = int(val)
        z[i] = zi
        if zi:
            col = h.row(i)  # column i of h.T is row i of h
            resid = [x - zi * y for x, y in zip(resid, col)]
    if any(x != 0 for x in resid):
        return None
    ut = u.T
    return [int(sum(ut[i, k] * z[k] for k in range(c))) for i in range(c)]


def lattice_coordinates(basis_rows: Matrix, v: Sequence) -> list[int] | None:
    """Integer coordinates of v in the row lattice, or None."""
    return solve_integer(basis_rows.T, v)


def in_lattice_plus_integers(cols: Matrix, t: Sequence) -> bool:
    """Whether rational t lies in (column span of cols over Q) + Z^n."""
    _require_integral(cols, "in_lattice_plus_integers")
    left = integer_kernel_matrix(cols.T)  # rows w with w @ cols = 0
    if left is None:
        return True  # span is everything
    w = left
    y = [_dot(w.row(i), t) for i in range(w.nrows)]
    return solve_integer(w, y) is not None


def primitive_vector(v: Sequence[int]) -> tuple[int, ...]:
    """Scale an integer vector by the positive gcd; first nonzero entry keeps
    its sign."""
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)
