"""Rational polyhedral fundamental domains for arithmetic actions on
positive cones, with exact certificates.

Everything here is integer or rational arithmetic: cones carry explicit
facet normals, reductions return words in named generators whose product
is rechecked against the claimed output, and tiling verification is a
semi-decision procedure that reports every sample it could not reduce
instead of guessing.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Sequence

from .errors import (
    DeskScaleError,
    InternalInvariantError,
    SearchExhausted,
    ValidationError,
)
from .matrices import Matrix

MAX_CONE_DIM = 4


def primitive_tuple(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to primitive integer form, keeping direction."""
    fracs = [Fraction(x) for x in v]
    den = 1
    for f in fracs:
        den = den * f.denominator // gcd(den, f.denominator)
    ints = [int(f * den) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(x // g for x in ints)


def _dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def _apply(m: Matrix, v: Sequence) -> tuple:
    return tuple(
        sum(m[i, j] * v[j] for j in range(m.ncols)) for i in range(m.nrows)
    )


@dataclass(frozen=True)
class PolyhedralCone:
    """Full-dimensional pointed rational cone, by rays and inward facet
    normals. Membership is a sign check against the facets."""

    rays: tuple[tuple[int, ...], ...]
    facets: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.rays[0])

    @classmethod
    def from_rays(cls, rays: Sequence[Sequence]) -> "PolyhedralCone":
        """Facet enumeration by brute force over ray subsets; intended for
        the low dimensions fundamental domains live in."""
        if not rays:
            raise ValidationError("cone_rays", "a cone needs at least one ray")
        dim = len(rays[0])
        if dim > MAX_CONE_DIM:
            raise DeskScaleError(f"facet enumeration is capped at dimension {MAX_CONE_DIM}")
        prim = []
        for r in rays:
            p = primitive_tuple(r)
            if p not in prim:
                prim.append(p)
        prim.sort()
        ray_mat = Matrix([list(r) for r in prim])
        if ray_mat.rank() != dim:
            raise ValidationError("cone_rank", "rays must span the ambient space")
        if dim == 1:
            sign = 1 if prim[0][0] > 0 else -1
            return cls(tuple(prim), ((sign,),))
        normals = []
        idx = list(range(len(prim)))
        for subset in _subsets(idx, dim - 1):
            sub = Matrix([list(prim[i]) for i in subset])
            if sub.rank() != dim - 1:
                continue
            for n in _integer_orthogonal(sub):
                side = [_dot(n, r) for r in prim]
                if all(s >= 0 for s in side):
                    cand = primitive_tuple(n)
                elif all(s <= 0 for s in side):
                    cand = primitive_tuple([-x for x in n])
                else:
                    continue
                if cand not in normals:
                    normals.append(cand)
        normals.sort()
        if not normals or Matrix([list(n) for n in normals]).rank() != dim:
            raise ValidationError("cone_pointed", "rays do not span a pointed full cone")
        return cls(tuple(prim), tuple(normals))

    def contains(self, v: Sequence, strict: bool = False) -> bool:
        if strict:
            return all(_dot(f, v) > 0 for f in self.facets)
        return all(_dot(f, v) >= 0 for f in self.facets)

    def interior_samples(self, count: int, seed: int) -> list[tuple[int, ...]]:
        """Deterministic strictly interior lattice points: positive random
        combinations of the rays."""
        rng = random.Random(seed)
        out = []
        for _ in range(count):
            coeffs = [rng.randint(1, 9) for _ in self.rays]
            pt = tuple(
                sum(c * r[i] for c, r in zip(coeffs, self.rays))
                for i in range(self.dim)
            )
            out.append(pt)
        return out


def _subsets(items: list, k: int):
    if k == 0:
        yield []
        return
    for i in range(len(items) - k + 1):
        for rest in _subsets(items[i + 1 :], k - 1):
            yield [items[i]] + rest


def _integer_orthogonal(sub: Matrix) -> list[tuple]:
    """Primitive integer spanning vectors of the orthogonal complement of
    the row space (rank assumed dim - 1, so a single line)."""
    from .matrices import integer_kernel_matrix

    ker = integer_kernel_matrix(Matrix([[int(x) for x in row] for row in sub.rows]))
    if ker is None:
        return []
    return [tuple(ker.row(i)) for i in range(ker.nrows)]


def product_cone(cones: Sequence[PolyhedralCone]) -> PolyhedralCone:
    """Direct product, rays embedded block by block."""
    total = sum(c.dim for c in cones)
    rays = []
    offset = 0
    for c in cones:
        for r in c.rays:
            rays.append((0,) * offset + r + (0,) * (total - offset - c.dim))
        offset += c.dim
    return PolyhedralCone.from_rays(rays)


@dataclass(frozen=True)
class GroupWord:
    """Word in named generators with the composed group element.

    letters are (name, power) pairs in application order; matrix is the
    corresponding product under the convention of whoever built the word."""

    letters: tuple[tuple[str, int], ...]
    matrix: Matrix

    @classmethod
    def identity(cls, dim: int) -> "GroupWord":
        return cls((), Matrix.identity(dim))

    @property
    def is_identity(self) -> bool:
        return self.matrix == Matrix.identity(self.matrix.nrows)

    @property
    def length(self) -> int:
        return sum(abs(p) for _, p in self.letters)


# --- binary quadratic forms -------------------------------------------------

GAUSS_S = Matrix([[0, -1], [1, 0]])
GAUSS_T = Matrix([[1, 1], [0, 1]])
GAUSS_N = Matrix([[1, 0], [0, -1]])
GAUSS_GENERATORS = {"S": GAUSS_S, "T": GAUSS_T, "N": GAUSS_N}


def transform_form(form: Sequence[int], g: Matrix) -> tuple[int, int, int]:
    """Coefficients of the form pulled back along g (matrix g.T M g)."""
    a, b, c = form
    p, q = g[0, 0], g[0, 1]
    r, s = g[1, 0], g[1, 1]
    return (
        a * p * p + b * p * r + c * r * r,
        2 * (a * p * q + c * r * s) + b * (p * s + q * r),
        a * q * q + b * q * s + c * s * s,
    )


def is_gauss_reduced(form: Sequence[int]) -> bool:
    a, b, c = form
    return 0 <= b <= a <= c


def gauss_reduce(form: Sequence[int]) -> tuple[tuple[int, int, int], GroupWord]:
    """Reduce a positive definite integer form to 0 <= b <= a <= c.

    Returns the reduced form and a word w in S, T, N whose matrix g
    satisfies transform_form(form, g) == reduced; the identity is rechecked
    before returning.
    """
    a, b, c = (int(x) for x in form)
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValidationError("form_definite", "form must be positive definite")
    letters: list[tuple[str, int]] = []
    gamma = Matrix.identity(2)
    for _ in range(10_000):
        if 0 <= b <= a <= c:
            break
        k = (a - b) // (2 * a)  # shift b into (-a, a]
        if k != 0:
            tk = Matrix([[1, k], [0, 1]])
            a, b, c = transform_form((a, b, c), tk)
            gamma = gamma @ tk
            letters.append(("T", k))
        if a > c:
            a, b, c = transform_form((a, b, c), GAUSS_S)
            gamma = gamma @ GAUSS_S
            letters.append(("S", 1))
            continue
        if b < 0:
            a, b, c = transform_form((a, b, c), GAUSS_N)
            gamma = gamma @ GAUSS_N
            letters.append(("N", 1))
    else:
        raise InternalInvariantError("form reduction failed to terminate")
    word = GroupWord(tuple(letters), gamma)
    if transform_form(form, gamma) != (a, b, c):
        raise InternalInvariantError("reduction certificate does not recompose")
    return (a, b, c), word


P2_ACTION_S = Matrix([[0, 0, 1], [0, -1, 0], [1, 0, 0]])
P2_ACTION_T = Matrix([[1, 0, 0], [2, 1, 0], [1, 1, 1]])
P2_ACTION_N = Matrix([[1, 0, 0], [0, -1, 0], [0, 0, 1]])


def minkowski_domain_p2() -> PolyhedralCone:
    """Reduced positive binary forms 0 <= b <= a <= c in (a, b, c) space."""
    return PolyhedralCone.from_rays([(0, 0, 1), (1, 0, 1), (1, 1, 1)])


# --- real quadratic units ---------------------------------------------------

@dataclass(frozen=True)
class PellSolution:
    x: int
    y: int
    norm: int


def pell_fundamental_unit(d: int) -> PellSolution:
    """Smallest (x, y) with x^2 - d y^2 = +-1, by the continued fraction
    of sqrt(d); the period closes at the first partial quotient equal to
    twice the integer square root."""
    if d <= 1:
        raise ValidationError("pell_input", "d must be at least 2")
    a0 = isqrt(d)
    if a0 * a0 == d:
        raise ValidationError("pell_input", "d must not be a perfect square")
    m, den, a = 0, 1, a0
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    for _ in range(10 * d + 100):
        m = den * a - m
        den = (d - m * m) // den
        a = (a0 + m) // den
        if a == 2 * a0:
            return PellSolution(h, k, h * h - d * k * k)
        h, h_prev = a * h + h_prev, h
        k, k_prev = a * k + k_prev, k
    raise InternalInvariantError("continued fraction period did not close")


def pell_positive_unit(d: int) -> tuple[int, int]:
    """Smallest (x, y) with x^2 - d y^2 = +1."""
    s = pell_fundamental_unit(d)
    if s.norm == 1:
        return (s.x, s.y)
    return (s.x * s.x + d * s.y * s.y, 2 * s.x * s.y)


# --- hyperbolic rank two domains --------------------------------------------

def hyperbolic_domain(action: Matrix, base: Sequence[int]) -> PolyhedralCone:
    """Fundamental cone for the infinite cyclic group generated by a
    hyperbolic lattice map: the sector between base and action @ base.

    Requires determinant one, trace above two, and a nonsquare discriminant
    (so the eigenrays are irrational and the map has infinite order); base
    must not be an eigenvector. Positivity of base in whatever cone the
    action preserves is the caller's obligation.
    """
    if action.shape != (2, 2) or not action.is_integral:
        raise ValidationError("hyperbolic_action", "action must be 2x2 integral")
    det = action.det()
    tau = action.trace()
    if det != 1:
        raise ValidationError("hyperbolic_action", f"determinant must be 1, got {det}")
    if tau <= 2:
        raise ValidationError("hyperbolic_action", f"trace must exceed 2, got {tau}")
    disc = tau * tau - 4
    if isqrt(disc) ** 2 == disc:
        raise ValidationError(
            "hyperbolic_action", "discriminant must not be a perfect square"
        )
    image = _apply(action, base)
    if base[0] * image[1] - base[1] * image[0] == 0:
        raise ValidationError("hyperbolic_base", "base ray must not be an eigenvector")
    return PolyhedralCone.from_rays([tuple(base), image])


# --- reduction problems -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReductionProblem:
    """Arithmetic group acting by integer matrices on lattice coordinates,
    preserving an open cone with an exact membership test.

    pairing must be positive on (interior, closure - 0) pairs; it is how
    dual-interior covectors are produced.
    """

    dim: int
    generators: tuple[tuple[str, Matrix], ...]
    pairing: Matrix
    base_point: tuple[int, ...]
    is_interior: Callable[[Sequence], bool]
    is_closure: Callable[[Sequence], bool]

    def __post_init__(self):
        for name, m in self.generators:
            if m.shape != (self.dim, self.dim) or not m.is_integral:
                raise ValidationError("generator_shape", f"generator {name} is not a {self.dim}x{self.dim} integer matrix")
            if m.det() not in (1, -1):
                raise ValidationError("generator_unimodular", f"generator {name} must be unimodular")
        if not self.is_interior(self.base_point):
            raise ValidationError("base_point", "base point must be interior")

    @property
    def symmetric_generators(self) -> tuple[tuple[str, Matrix], ...]:
        """Generators and their inverses, deduplicated by matrix."""
        out = []
        seen = set()
        for name, m in self.generators:
            for nm, mat in ((name, m), (name + "~", m.inverse())):
                mat = Matrix([[int(x) for x in row] for row in mat.rows])
                if mat not in seen:
                    seen.add(mat)
                    out.append((nm, mat))
        return tuple(out)

    def word_ball(self, max_length: int) -> list[tuple[tuple[tuple[str, int], ...], Matrix]]:
        """All nontrivial group elements reachable by words up to the given
        length, one shortest word each, identity excluded."""
        ident = Matrix.identity(self.dim)
        frontier = [((), ident)]
        seen = {ident}
        out = []
        for _ in range(max_length):
            nxt = []
            for letters, mat in frontier:
                for name, gen in self.symmetric_generators:
                    m2 = gen @ mat
                    if m2 in seen:
                        continue
                    seen.add(m2)
                    entry = (letters + ((name, 1),), m2)
                    nxt.append(entry)
                    out.append(entry)
            frontier = nxt
        return out


def binary_quadratic_problem() -> ReductionProblem:
    """Unimodular changes of variable acting on positive definite binary
    forms in (a, b, c) coordinates."""

    def interior(v: Sequence) -> bool:
        a, b, c = v
        return a > 0 and 4 * a * c - b * b > 0

    def closure(v: Sequence) -> bool:
        a, b, c = v
        return a >= 0 and c >= 0 and 4 * a * c - b * b >= 0

    return ReductionProblem(
        dim=3,
        generators=(("S", P2_ACTION_S), ("T", P2_ACTION_T), ("N", P2_ACTION_N)),
        pairing=Matrix([[2, 0, 0], [0, 1, 0], [0, 0, 2]]),
        base_point=(1, 0, 1),
        is_interior=interior,
        is_closure=closure,
    )


def find_eta(
    problem: ReductionProblem,
    seed: int = 42,
    max_candidates: int = 1000,
    stabilizer_word_length: int = 4,
) -> tuple[int, ...]:
    """A covector positive on the closed cone minus zero and not fixed by
    any short nontrivial word.

    Candidates are pairings against interior lattice points, which makes
    cone positivity exact; genericity is enforced against the word ball.
    """
    ball = [m for _, m in problem.word_ball(stabilizer_word_length)]
    rng = random.Random(seed)
    base = problem.base_point
    tried = 0
    scale = 1
    while tried < max_candidates:
        tried += 1
        pt = tuple(
            scale * x + rng.randint(-scale, scale) for x in base
        )
        if tried % 50 == 0:
            scale += 1
        if not problem.is_interior(pt):
            continue
        eta = primitive_tuple(_apply(problem.pairing, pt))
        if any(_apply(m.T, eta) == eta for m in ball):
            continue
        return eta
    raise SearchExhausted(
        f"no generic dual-interior covector within {max_candidates} candidates"
    )


@dataclass(frozen=True)
class TilingFailure:
    point: tuple[int, ...]
    reason: str


@dataclass(frozen=True)
class TilingReport:
    samples: int
    verified: int
    eta: tuple[int, ...]
    failures: tuple[TilingFailure, ...] = field(default=())

    @property
    def complete(self) -> bool:
        return self.verified == self.samples and not self.failures


def _best_first_reduce(
    problem: ReductionProblem,
    domain: PolyhedralCone,
    start: tuple[int, ...],
    eta: tuple[int, ...],
    max_nodes: int,
) -> GroupWord | None:
    """Search the orbit of start for a point of the domain, expanding the
    frontier in order of the eta value. Greedy descent plus the bounded
    uphill that boundary flips need, in one queue."""
    gens = problem.symmetric_generators
    seen = {start}
    parent: dict[tuple, tuple] = {}
    heap = [(_dot(eta, start), 0, start)]
    counter = 1
    popped = 0
    while heap and popped < max_nodes:
        _, _, cur = heapq.heappop(heap)
        popped += 1
        if domain.contains(cur):
            letters: list[tuple[str, int]] = []
            mat = Matrix.identity(problem.dim)
            node = cur
            chain = []
            while node in parent:
                prev, name, gmat = parent[node]
                chain.append((name, gmat))
                node = prev
            for name, gmat in reversed(chain):
                letters.append((name, 1))
                mat = gmat @ mat
            word = GroupWord(tuple(letters), mat)
            if _apply(word.matrix, start) != cur:
                raise InternalInvariantError("reduction path does not recompose")
            return word
        for name, gmat in gens:
            nxt = _apply(gmat, cur)
            if nxt in seen:
                continue
            seen.add(nxt)
            parent[nxt] = (cur, name, gmat)
            heapq.heappush(heap, (_dot(eta, nxt), counter, nxt))
            counter += 1
    return None


def _tiling_samples(
    problem: ReductionProblem,
    domain: PolyhedralCone,
    count: int,
    seed: int,
) -> list[tuple[int, ...]]:
    """Half scattered interior points, half adversarial images of domain
    points under random words."""
    rng = random.Random(seed)
    samples = []
    attempts = 0
    scale = 2
    while len(samples) < count // 2 and attempts < 200 * count:
        attempts += 1
        pt = tuple(
            scale * x + rng.randint(-3 * scale, 3 * scale)
            for x in problem.base_point
        )
        if attempts % 100 == 0:
            scale += 1
        if problem.is_interior(pt):
            samples.append(pt)
    gens = problem.symmetric_generators
    inner = domain.interior_samples(count - len(samples), seed + 1)
    for pt in inner:
        cur = pt
        if gens:
            for _ in range(rng.randint(1, 8)):
                name, gmat = gens[rng.randrange(len(gens))]
                cur = _apply(gmat, cur)
        if problem.is_interior(cur):
            samples.append(cur)
        else:
            samples.append(pt)
    return samples


def verify_tiling(
    problem: ReductionProblem,
    domain: PolyhedralCone,
    samples: int = 1000,
    seed: int = 42,
    max_steps: int = 20_000,
    eta: tuple[int, ...] | None = None,
) -> TilingReport:
    """Semi-decision that the domain tiles the cone under the group: every
    sampled interior point must reduce into the domain with an exactly
    rechecked word. Failures are reported, never silently dropped."""
    if eta is None:
        eta = find_eta(problem, seed=seed)
    for r in domain.rays:
        if not problem.is_closure(r):
            raise ValidationError("domain_rays", "domain must sit inside the closed cone")
    pts = _tiling_samples(problem, domain, samples, seed)
    verified = 0
    failures = []
    for pt in pts:
        word = _best_first_reduce(problem, domain, pt, eta, max_steps)
        if word is None:
            failures.append(TilingFailure(pt, "search budget exhausted"))
            continue
        image = _apply(word.matrix, pt)
        if not domain.contains(image):
            failures.append(TilingFailure(pt, "certificate recheck failed"))
            continue
        verified += 1
    return TilingReport(
        samples=len(pts), verified=verified, eta=eta, failures=tuple(failures)
    )


@dataclass(frozen=True)
class OverlapWitness:
    word: GroupWord
    point: tuple[int, ...]
    image: tuple[int, ...]


def find_interior_overlap(
    problem: ReductionProblem,
    domain: PolyhedralCone,
    seed: int = 42,
    word_length: int = 4,
    samples: int = 200,
) -> OverlapWitness | None:
    """Search for a nontrivial group element carrying an interior domain
    point to another interior domain point. None means no witness was
    found at this search size, not a proof of disjointness."""
    pts = [p for p in domain.interior_samples(samples, seed) if domain.contains(p, strict=True)]
    for letters, mat in problem.word_ball(word_length):
        for pt in pts:
            image = _apply(mat, pt)
            if domain.contains(image, strict=True):
                return OverlapWitness(GroupWord(letters, mat), pt, image)
    return None


# --- quotient transfer ------------------------------------------------------

@dataclass(frozen=True)
class PushdownReport:
    """Transfer of a fundamental domain to the quotient picture.

    pullback includes invariant coordinates into the full form lattice;
    pushforward is solved from pullback @ pushforward = sum of the group
    pullbacks, and their composite must be the group order exactly."""

    pullback: Matrix
    pushforward: Matrix
    group_order: int
    verified: bool
    domain: PolyhedralCone


def pushdown_domain(structure, domain: PolyhedralCone) -> PushdownReport:
    """Certify that invariant coordinates compute the quotient form space:
    the transfer identities make the domain a domain downstairs."""
    full = structure.ns
    inv = structure.invariant
    cols = [full.coordinates(b) for b in inv.basis]
    pullback = Matrix([[cols[j][i] for j in range(len(cols))] for i in range(full.rank)])
    transfer = None
    for g in structure.group.elements:
        p = full.pullback_matrix(g.linear)
        transfer = p if transfer is None else transfer + p
    pushforward = pullback.solve(transfer)
    if pushforward is None:
        raise InternalInvariantError("group transfer left the invariant span")
    order = structure.group.order
    expected = Matrix.identity(inv.rank) * order
    verified = (pushforward @ pullback) == expected
    return PushdownReport(
        pullback=pullback,
        pushforward=pushforward,
        group_order=order,
        verified=verified,
        domain=domain,
    )
