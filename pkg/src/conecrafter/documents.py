"""JSON documents describing tori with group actions, and standalone
reduction problems.

Schema "conecrafter/1". Every number is an integer or a "p/q" string;
floats are rejected so nothing inexact can enter. Parsing stops at shape
and type errors; mathematical invariants are the validation stage's job.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError
from .matrices import Matrix
from .torus import AffineAuto, PolarizedTorus

SCHEMA = "conecrafter/1"
DOCUMENT_KINDS = ("torus", "reduction_problem")
CONE_TYPES = ("binary_quadratic_forms",)


def _rational(x, where: str) -> Fraction:
    if isinstance(x, bool):
        raise ParseError(f"{where}: boolean is not a number")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: bad rational {x!r}") from exc
    raise ParseError(f"{where}: expected integer or 'p/q' string, got {type(x).__name__}")


def _integer(x, where: str) -> int:
    f = _rational(x, where)
    if f.denominator != 1:
        raise ParseError(f"{where}: expected an integer, got {x!r}")
    return int(f)


def _matrix(obj, where: str, square: bool = False) -> Matrix:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ParseError(f"{where}: expected a list of rows")
    width = len(obj[0])
    if width == 0:
        raise ParseError(f"{where}: rows must not be empty")
    rows = []
    for i, r in enumerate(obj):
        if len(r) != width:
            raise ParseError(f"{where}: row {i} has length {len(r)}, expected {width}")
        rows.append([_rational(x, f"{where}[{i}]") for x in r])
    if square and len(rows) != width:
        raise ParseError(f"{where}: expected a square matrix")
    return Matrix(rows)


def _vector(obj, where: str, length: int | None = None) -> tuple:
    if not isinstance(obj, list):
        raise ParseError(f"{where}: expected a list")
    if length is not None and len(obj) != length:
        raise ParseError(f"{where}: expected length {length}, got {len(obj)}")
    return tuple(_rational(x, where) for x in obj)


@dataclass(frozen=True)
class TorusDocument:
    name: str
    torus: PolarizedTorus
    generators: tuple[AffineAuto, ...]
    normalizer: Matrix | None = None
    expect_ghv: bool | None = None
    test_classes: tuple[tuple[int, ...], ...] = field(default=())

    kind = "torus"


@dataclass(frozen=True)
class ProblemDocument:
    name: str
    cone: str
    domain_rays: tuple[tuple[int, ...], ...]
    generators: tuple[tuple[str, Matrix], ...] = field(default=())
    test_forms: tuple[tuple[int, ...], ...] = field(default=())

    kind = "reduction_problem"


def _parse_torus(data: dict, name: str) -> TorusDocument:
    if "complex_structure" not in data:
        raise ParseError("torus document needs a complex_structure matrix")
    if "polarization" not in data:
        raise ParseError("torus document needs a polarization matrix")
    j = _matrix(data["complex_structure"], "complex_structure", square=True)
    e = _matrix(data["polarization"], "polarization", square=True)
    if j.shape != e.shape:
        raise ParseError("complex_structure and polarization sizes differ")
    rank = j.nrows
    if "rank" in data and _integer(data["rank"], "rank") != rank:
        raise ParseError("rank field disagrees with the matrices")
    gens = []
    group = data.get("group", {})
    if not isinstance(group, dict):
        raise ParseError("group: expected an object with generators")
    for i, g in enumerate(group.get("generators", [])):
        if not isinstance(g, dict) or "linear" not in g:
            raise ParseError(f"group.generators[{i}]: expected an object with linear")
        lin = _matrix(g["linear"], f"group.generators[{i}].linear", square=True)
        if lin.nrows != rank:
            raise ParseError(f"group.generators[{i}]: size disagrees with the torus")
        tr = g.get("translation")
        translation = (
            _vector(tr, f"group.generators[{i}].translation", rank)
            if tr is not None
            else tuple([Fraction(0)] * rank)
        )
        gens.append(AffineAuto(lin, translation))
    normalizer = None
    if "normalizer" in data:
        normalizer = _matrix(data["normalizer"], "normalizer", square=True)
        if normalizer.nrows != rank:
            raise ParseError("normalizer size disagrees with the torus")
    expect = data.get("expect_ghv")
    if expect is not None and not isinstance(expect, bool):
        raise ParseError("expect_ghv must be a boolean")
    classes = []
    for i, c in enumerate(data.get("test_classes", [])):
        if not isinstance(c, list):
            raise ParseError(f"test_classes[{i}]: expected a list")
        classes.append(tuple(_integer(x, f"test_classes[{i}]") for x in c))
    return TorusDocument(
        name=name,
        torus=PolarizedTorus(j, e),
        generators=tuple(gens),
        normalizer=normalizer,
        expect_ghv=expect,
        test_classes=tuple(classes),
    )


def _parse_problem(data: dict, name: str) -> ProblemDocument:
    cone = data.get("cone")
    if cone not in CONE_TYPES:
        raise ParseError(f"unsupported cone type {cone!r}")
    if "domain_rays" not in data:
        raise ParseError("reduction problem needs domain_rays")
    rays = tuple(
        tuple(_integer(x, f"domain_rays[{i}]") for x in _vector(r, f"domain_rays[{i}]", 3))
        for i, r in enumerate(data["domain_rays"])
    )
    gens = []
    for gname, m in data.get("generators", {}).items():
        mat = _matrix(m, f"generators.{gname}", square=True)
        if mat.nrows != 3:
            raise ParseError(f"generators.{gname}: expected 3x3")
        if not mat.is_integral:
            raise ParseError(f"generators.{gname}: expected integer entries")
        gens.append((str(gname), mat))
    forms = tuple(
        tuple(_integer(x, f"test_forms[{i}]") for x in _vector(f, f"test_forms[{i}]", 3))
        for i, f in enumerate(data.get("test_forms", []))
    )
    return ProblemDocument(
        name=name,
        cone=cone,
        domain_rays=rays,
        generators=tuple(gens),
        test_forms=forms,
    )


def parse_document(data) -> TorusDocument | ProblemDocument:
    if not isinstance(data, dict):
        raise ParseError("document must be a JSON object")
    if data.get("schema") != SCHEMA:
        raise ParseError(f"unknown schema {data.get('schema')!r}, expected {SCHEMA!r}")
    kind = data.get("kind")
    if kind not in DOCUMENT_KINDS:
        raise ParseError(f"unknown document kind {kind!r}")
    name = data.get("name", "unnamed")
    if not isinstance(name, str):
        raise ParseError("name must be a string")
    if kind == "torus":
        return _parse_torus(data, name)
    return _parse_problem(data, name)


def load_document(path: str) -> TorusDocument | ProblemDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    return parse_document(data)
