"""Stages turning a parsed document into a deterministic report dict.

Reports hold only JSON-ready values (ints, "p/q" strings, lists, bools),
in a fixed key order, so serializing the same document twice is
byte-identical. Anything that varies, like wall clock timing, stays out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .cone import ConeStructure, cone_structure, ns_to_endo
from .documents import ProblemDocument, TorusDocument
from .endo import rosati_fixes_algebra, trace_positivity_check
from .errors import InternalInvariantError, ValidationError
from .matrices import Matrix, integer_kernel_matrix, vstack
from .reduction import (
    PolyhedralCone,
    ReductionProblem,
    find_interior_overlap,
    gauss_reduce,
    hyperbolic_domain,
    is_gauss_reduced,
    product_cone,
    pushdown_domain,
    transform_form,
    verify_tiling,
)
from .torus import (
    GroupAction,
    PolarizedTorus,
    action_is_free,
    close_group,
    has_translations,
    invariant_polarization,
    is_polarization_invariant,
    normalize_polarization,
    trivial_group,
    validate_automorphism,
    validate_torus,
)


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, Matrix):
        return [[_jsonable(v) for v in row] for row in x.rows]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    raise TypeError(f"cannot serialize {type(x).__name__}")


@dataclass(frozen=True)
class TorusContext:
    document: TorusDocument
    torus: PolarizedTorus
    flipped: bool
    group: GroupAction
    averaged: bool
    invariant_torus: PolarizedTorus

    @property
    def is_ghv(self) -> bool:
        return (
            self.group.order > 1
            and not has_translations(self.group)
            and action_is_free(self.torus, self.group)
        )


def prepare_torus(doc: TorusDocument) -> TorusContext:
    """Validate invariants, normalize the polarization sign, close the
    group, and average the polarization when the action moves it."""
    torus, flipped = normalize_polarization(doc.torus)
    for i, g in enumerate(doc.generators):
        for check in validate_automorphism(torus, g):
            if not check.passed:
                raise ValidationError(check.name, f"generator {i}: {check.detail}")
    if doc.generators:
        group = close_group(doc.generators)
    else:
        group = trivial_group(torus.rank)
    if doc.expect_ghv is not None:
        is_ghv = (
            group.order > 1
            and not has_translations(group)
            and action_is_free(torus, group)
        )
        if is_ghv != doc.expect_ghv:
            raise ValidationError(
                "expectation",
                f"document claims expect_ghv={doc.expect_ghv} but the action "
                f"{'is' if is_ghv else 'is not'} a free translation-free action",
            )
    averaged = False
    inv_torus = torus
    if not is_polarization_invariant(torus, group):
        e_avg = invariant_polarization(torus, group)
        inv_torus = PolarizedTorus(torus.j, e_avg)
        report = validate_torus(inv_torus)
        if not report.ok or report.sign <= 0:
            raise InternalInvariantError("averaged polarization must stay definite")
        averaged = True
    return TorusContext(doc, torus, flipped, group, averaged, inv_torus)


def run_check(doc, seed: int = 42) -> dict:
    if doc.kind == "reduction_problem":
        return _check_problem(doc)
    report = validate_torus(doc.torus)
    ctx = prepare_torus(doc)
    checks = [
        {"name": c.name, "passed": bool(c.passed) or (c.name == "polarization_definite" and ctx.flipped)}
        for c in report.checks
    ]
    free = action_is_free(ctx.torus, ctx.group)
    translations = has_translations(ctx.group)
    return {
        "schema": "conecrafter/1",
        "command": "check",
        "document": doc.name,
        "kind": doc.kind,
        "checks": checks,
        "polarization_flipped": ctx.flipped,
        "group": {
            "order": ctx.group.order,
            "is_free": free,
            "has_translations": translations,
            "preserves_polarization": is_polarization_invariant(ctx.torus, ctx.group),
        },
        "is_ghv": ctx.is_ghv,
        "expect_ghv": doc.expect_ghv,
        "verdict": "pass",
    }


def _check_problem(doc: ProblemDocument) -> dict:
    problem = build_problem(doc)
    domain = PolyhedralCone.from_rays(doc.domain_rays)
    for r in domain.rays:
        if not problem.is_closure(r):
            raise ValidationError("domain_rays", "rays must lie in the closed cone")
    return {
        "schema": "conecrafter/1",
        "command": "check",
        "document": doc.name,
        "kind": doc.kind,
        "cone": doc.cone,
        "generators": [name for name, _ in problem.generators],
        "domain": {"rays": _jsonable(domain.rays), "facets": _jsonable(domain.facets)},
        "verdict": "pass",
    }


def _require_torus(doc):
    if doc.kind != "torus":
        raise ValidationError("document_kind", "this command needs a torus document")


def _require_problem(doc):
    if doc.kind != "reduction_problem":
        raise ValidationError("document_kind", "this command needs a reduction problem")


def run_endo(doc, seed: int = 42) -> dict:
    _require_torus(doc)
    ctx = prepare_torus(doc)
    structure = cone_structure(ctx.invariant_torus, ctx.group, seed)
    sub = structure.subalgebra
    dec = structure.decomposition
    return {
        "schema": "conecrafter/1",
        "command": "endo",
        "document": doc.name,
        "end_dim": sub.parent.dim,
        "invariant_dim": sub.dim,
        "polarization_averaged": ctx.averaged,
        "trace_positive": trace_positivity_check(sub.algebra),
        "rosati_closed": rosati_fixes_algebra(sub.algebra),
        "factors": [
            {
                "label": f.label,
                "kind": f.kind,
                "size": f.size,
                "center_degree": f.center_degree,
                "places": f.places,
                "dim": f.dim,
                "fixed_dim": f.fixed_dim,
                "center_poly": _jsonable(f.center_poly),
            }
            for f in dec.factors
        ],
    }


def run_cone(doc, seed: int = 42) -> dict:
    _require_torus(doc)
    ctx = prepare_torus(doc)
    structure = cone_structure(ctx.invariant_torus, ctx.group, seed)
    classes = []
    for coords in doc.test_classes:
        if len(coords) != structure.invariant.rank:
            raise ValidationError(
                "test_class_shape",
                f"class {list(coords)} has length {len(coords)}, "
                f"invariant lattice has rank {structure.invariant.rank}",
            )
        classes.append(
            {
                "coords": list(coords),
                "ample": structure.invariant.is_ample_coords(coords),
                "nef": structure.invariant.is_nef_coords(coords),
            }
        )
    return {
        "schema": "conecrafter/1",
        "command": "cone",
        "document": doc.name,
        "ns_rank": structure.ns.rank,
        "invariant_rank": structure.invariant.rank,
        "polarization_averaged": ctx.averaged,
        "factors": [
            {"label": fc.factor.label, "flag": fc.flag, "ns_dim": fc.ns_dim}
            for fc in structure.factors
        ],
        "test_classes": classes,
    }


def _factor_pieces(structure: ConeStructure) -> list[list[tuple[int, ...]]]:
    """Saturated integer basis, in invariant coordinates, of each factor's
    share of the invariant form lattice."""
    inv = structure.invariant
    t = structure.torus
    projections = []
    for sf in structure.decomposition.factors:
        cols = []
        for b in inv.basis:
            piece = t.e @ (sf.idempotent @ ns_to_endo(t, b) @ sf.idempotent)
            cols.append(inv.coordinates(piece))
        projections.append(
            Matrix([[cols[j][i] for j in range(inv.rank)] for i in range(inv.rank)])
        )
    total = None
    for p in projections:
        total = p if total is None else total + p
    if total != Matrix.identity(inv.rank):
        raise InternalInvariantError("factor projections must sum to the identity")
    pieces = []
    for i, sf in enumerate(structure.decomposition.factors):
        others = [p for j, p in enumerate(projections) if j != i]
        if not others:
            basis = [
                tuple(1 if k == l else 0 for l in range(inv.rank))
                for k in range(inv.rank)
            ]
            pieces.append(basis)
            continue
        stacked = vstack(*others)
        scaled, _ = stacked.to_integer()
        kernel = integer_kernel_matrix(scaled)
        if kernel is None or kernel.nrows != sf.fixed_dim:
            raise InternalInvariantError("factor piece has the wrong rank")
        pieces.append([tuple(kernel.row(r)) for r in range(kernel.nrows)])
    return pieces


def _piece_coordinates(piece: list[tuple[int, ...]], vec: Sequence) -> tuple:
    """Coordinates of vec in the piece basis; error if outside."""
    mat = Matrix([[Fraction(piece[j][i]) for j in range(len(piece))] for i in range(len(vec))])
    rhs = Matrix([[Fraction(x)] for x in vec])
    sol = mat.solve(rhs)
    if sol is None:
        raise InternalInvariantError("vector left its factor piece")
    back = [
        sum(sol[j, 0] * piece[j][i] for j in range(len(piece)))
        for i in range(len(vec))
    ]
    if [Fraction(x) for x in vec] != back:
        raise InternalInvariantError("vector left its factor piece")
    return tuple(sol[j, 0] for j in range(len(piece)))


def _primitive_int_vector(vec: Sequence) -> tuple[int, ...]:
    fracs = [Fraction(x) for x in vec]
    den = 1
    for f in fracs:
        den = den * f.denominator // gcd(den, f.denominator)
    ints = [int(f * den) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


@dataclass(frozen=True)
class DomainConstruction:
    structure: ConeStructure
    domain: PolyhedralCone | None
    factor_summaries: tuple[dict, ...]
    normalizer_action: Matrix | None
    downgrades: tuple[str, ...] = ()


def build_domain(ctx: TorusContext, seed: int = 42) -> DomainConstruction:
    """Fundamental domain of the induced automorphism action on the
    invariant ample cone, assembled factor by factor.

    Ray factors contribute their nef generator. A hyperbolic factor needs
    the document's normalizer element; its induced action on the factor
    pins down the sector between a base class and its image. Factors of
    higher rank have no construction here: they downgrade to verifier-only
    status, leaving ``domain`` unset, and stay checkable through a
    reduction problem document with user-supplied generators.
    """
    structure = cone_structure(ctx.invariant_torus, ctx.group, seed)
    t = ctx.invariant_torus
    norm_action = None
    normalizer = ctx.document.normalizer
    if normalizer is not None:
        _validate_normalizer(ctx, normalizer)
        norm_action = structure.invariant.pullback_matrix(normalizer)
        if not norm_action.is_integral:
            raise ValidationError(
                "normalizer_lattice", "normalizer must preserve the invariant lattice"
            )
    pieces = _factor_pieces(structure)
    e_coords = structure.invariant.coordinates(t.e)
    local_cones = []
    summaries = []
    downgrades = []
    for fc, piece in zip(structure.factors, pieces):
        if fc.flag == "ray":
            ray = piece[0]
            if not structure.invariant.is_nef_coords(ray):
                ray = tuple(-x for x in ray)
            if not structure.invariant.is_nef_coords(ray):
                raise InternalInvariantError("ray factor has no nef generator")
            piece[0] = ray
            local_cones.append((piece, PolyhedralCone((tuple([1]),), (tuple([1]),))))
            summaries.append({"label": fc.factor.label, "flag": fc.flag, "rays": [_jsonable(ray)]})
        elif fc.flag == "hyperbolic":
            if norm_action is None:
                raise ValidationError(
                    "funddom_normalizer",
                    "a hyperbolic factor needs a normalizer element to cut a "
                    "rational polyhedral domain",
                )
            local_action = _restrict_to_piece(norm_action, piece)
            base_local = _piece_coordinates(piece, _project(structure, fc, e_coords))
            base_prim = _primitive_int_vector(base_local)
            local = hyperbolic_domain(local_action, base_prim)
            local_cones.append((piece, local))
            summaries.append(
                {
                    "label": fc.factor.label,
                    "flag": fc.flag,
                    "action": _jsonable(local_action),
                    "rays": [_jsonable(_unproject(piece, r)) for r in local.rays],
                }
            )
        else:
            downgrades.append(fc.factor.label)
            summaries.append(
                {
                    "label": fc.factor.label,
                    "flag": fc.flag,
                    "downgrade": "verifier-only: no domain construction for this factor",
                }
            )
    if downgrades:
        return DomainConstruction(structure, None, tuple(summaries), norm_action, tuple(downgrades))
    global_rays = []
    for piece, local in local_cones:
        for r in local.rays:
            global_rays.append(_unproject(piece, r))
    domain = PolyhedralCone.from_rays(global_rays)
    return DomainConstruction(structure, domain, tuple(summaries), norm_action)


def _project(structure: ConeStructure, fc, coords: Sequence) -> tuple:
    t = structure.torus
    form = structure.invariant.from_coordinates(coords)
    piece_form = t.e @ (fc.factor.idempotent @ ns_to_endo(t, form) @ fc.factor.idempotent)
    return structure.invariant.coordinates(piece_form)


def _unproject(piece: list[tuple[int, ...]], local: Sequence) -> tuple[int, ...]:
    dim = len(piece[0])
    return tuple(
        int(sum(Fraction(c) * piece[k][i] for k, c in enumerate(local)))
        for i in range(dim)
    )


def _restrict_to_piece(action: Matrix, piece: list[tuple[int, ...]]) -> Matrix:
    cols = []
    for b in piece:
        image = tuple(
            sum(action[i, j] * b[j] for j in range(action.ncols))
            for i in range(action.nrows)
        )
        cols.append(_piece_coordinates(piece, image))
    local = Matrix([[cols[j][i] for j in range(len(piece))] for i in range(len(piece))])
    if not local.is_integral:
        raise ValidationError(
            "normalizer_factors", "normalizer must preserve each factor piece lattice"
        )
    return local


def _validate_normalizer(ctx: TorusContext, gamma: Matrix) -> None:
    t = ctx.invariant_torus
    if not gamma.is_integral:
        raise ValidationError("normalizer_integral", "normalizer must be integral")
    if gamma.det() not in (1, -1):
        raise ValidationError("normalizer_unimodular", "normalizer must be unimodular")
    if (gamma @ t.j) != (t.j @ gamma):
        raise ValidationError("normalizer_holomorphic", "normalizer must commute with J")
    inv = gamma.inverse()
    linears = set(ctx.group.linear_parts())
    for g in ctx.group.elements:
        conj = inv @ g.linear @ gamma
        if conj not in linears:
            raise ValidationError(
                "normalizer_group", "normalizer must normalize the group action"
            )


def run_funddom(doc, seed: int = 42) -> dict:
    if doc.kind == "reduction_problem":
        domain = PolyhedralCone.from_rays(doc.domain_rays)
        return {
            "schema": "conecrafter/1",
            "command": "funddom",
            "document": doc.name,
            "supported": True,
            "dim": domain.dim,
            "rays": _jsonable(domain.rays),
            "facets": _jsonable(domain.facets),
            "factors": [{"label": doc.cone, "flag": "higher_rank"}],
        }
    ctx = prepare_torus(doc)
    built = build_domain(ctx, seed)
    if built.domain is None:
        return {
            "schema": "conecrafter/1",
            "command": "funddom",
            "document": doc.name,
            "supported": False,
            "downgrade": _downgrade_message(built),
            "factors": list(built.factor_summaries),
        }
    return {
        "schema": "conecrafter/1",
        "command": "funddom",
        "document": doc.name,
        "supported": True,
        "dim": built.domain.dim,
        "rays": _jsonable(built.domain.rays),
        "facets": _jsonable(built.domain.facets),
        "factors": list(built.factor_summaries),
    }


def _downgrade_message(built: DomainConstruction) -> str:
    labels = ", ".join(built.downgrades)
    return (
        f"verifier-only: no fundamental domain construction for factor(s) {labels}; "
        "supply a reduction problem document with explicit generators to verify"
    )


def build_problem(doc: ProblemDocument) -> ReductionProblem:
    from .reduction import binary_quadratic_problem

    base = binary_quadratic_problem()
    if not doc.generators:
        return base
    return ReductionProblem(
        dim=3,
        generators=doc.generators,
        pairing=base.pairing,
        base_point=base.base_point,
        is_interior=base.is_interior,
        is_closure=base.is_closure,
    )


def build_torus_problem(ctx: TorusContext, built: DomainConstruction) -> ReductionProblem:
    inv = built.structure.invariant
    gens = []
    if built.normalizer_action is not None:
        gens.append(("A", built.normalizer_action))
    pairing, _ = inv.pairing_matrix.to_integer()
    base = inv.coordinates(ctx.invariant_torus.e)
    if any(Fraction(x).denominator != 1 for x in base):
        raise InternalInvariantError("polarization fell outside the invariant lattice")
    base_int = tuple(int(x) for x in base)
    return ReductionProblem(
        dim=inv.rank,
        generators=tuple(gens),
        pairing=pairing,
        base_point=base_int,
        is_interior=inv.is_ample_coords,
        is_closure=inv.is_nef_coords,
    )


def run_reduce(doc, seed: int = 42) -> dict:
    _require_problem(doc)
    results = []
    for form in doc.test_forms:
        reduced, word = gauss_reduce(form)
        results.append(
            {
                "form": list(form),
                "reduced": list(reduced),
                "word": [[name, power] for name, power in word.letters],
                "gamma": _jsonable(word.matrix),
                "verified": transform_form(form, word.matrix) == reduced
                and is_gauss_reduced(reduced),
            }
        )
    return {
        "schema": "conecrafter/1",
        "command": "reduce",
        "document": doc.name,
        "results": results,
    }


def run_verify(doc, seed: int = 42, samples: int = 1000, max_steps: int = 20_000) -> dict:
    if doc.kind == "reduction_problem":
        problem = build_problem(doc)
        domain = PolyhedralCone.from_rays(doc.domain_rays)
        pushdown = None
    else:
        ctx = prepare_torus(doc)
        built = build_domain(ctx, seed)
        if built.domain is None:
            return {
                "schema": "conecrafter/1",
                "command": "verify",
                "document": doc.name,
                "downgrade": _downgrade_message(built),
                "eta": None,
                "samples": 0,
                "verified": 0,
                "failures": [],
                "overlap": None,
                "complete": True,
            }
        problem = build_torus_problem(ctx, built)
        domain = built.domain
        pushdown = pushdown_domain(built.structure, domain)
    tiling = verify_tiling(problem, domain, samples=samples, seed=seed, max_steps=max_steps)
    overlap = find_interior_overlap(problem, domain, seed=seed)
    report = {
        "schema": "conecrafter/1",
        "command": "verify",
        "document": doc.name,
        "eta": _jsonable(tiling.eta),
        "samples": tiling.samples,
        "verified": tiling.verified,
        "failures": [
            {"point": _jsonable(f.point), "reason": f.reason} for f in tiling.failures
        ],
        "overlap": None
        if overlap is None
        else {
            "word": [[name, power] for name, power in overlap.word.letters],
            "point": _jsonable(overlap.point),
            "image": _jsonable(overlap.image),
        },
        "complete": tiling.complete and overlap is None,
    }
    if pushdown is not None:
        report["pushdown"] = {
            "group_order": pushdown.group_order,
            "pullback": _jsonable(pushdown.pullback),
            "pushforward": _jsonable(pushdown.pushforward),
            "verified": pushdown.verified,
        }
        report["complete"] = report["complete"] and pushdown.verified
    return report


COMMANDS = {
    "check": run_check,
    "endo": run_endo,
    "cone": run_cone,
    "funddom": run_funddom,
    "reduce": run_reduce,
}
