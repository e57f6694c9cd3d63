"""JSON spec files for user-defined algebras and modules.

An algebra file::

    {
      "kind": "algebra",
      "basis": ["e", "g"],
      "unit": "e",
      "involution": {"g": "g"},
      "dimensions": {"e": 1, "g": 1},
      "generators": ["g"],
      "rules": ["e * e -> e", "e * g -> g", "g * e -> g", "g * g -> e"]
    }

Rules are ``"<left> * <right> -> <result>"`` strings, ``[left, right,
{label: multiplicity}]`` triples, or ``{"left", "right", "result"}``
objects.  Absent products are zero and absent involution entries are
self-conjugate.  A file may instead delegate to the catalog with
``{"kind": "algebra", "catalog": "verlinde:k=2"}``.  Module files use
``"algebra"`` (catalog id or nested algebra spec), ``"seed"`` and action rules
written the same way.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import catalog
from .algebra import FusionAlgebra, make_fusion_algebra
from .elements import is_exact, label_key
from .errors import DuplicateRule, MultiplicityNotPositiveInteger, SpecError, SpecSyntaxError, UnknownKey
from .module import FusionModule, make_fusion_module

ALGEBRA_KEYS = {"kind", "name", "catalog", "basis", "unit", "involution", "dimensions", "generators", "rules"}
MODULE_KEYS = {"kind", "name", "catalog", "algebra", "basis", "seed", "dimensions", "rules"}

_RULE = re.compile(r"^\s*(\S+?)\s*[*.]\s*(\S+?)\s*->\s*(.*?)\s*$")
_MULT = re.compile(r"^\s*(?:(\S+?)\s*\*?\s+|(\d+)\s*\*\s*)?([A-Za-z_][\w\-]*)\s*$")


@dataclass
class SpecFile:
    kind: str
    name: str | None = None
    catalog: str | None = None
    algebra: "SpecFile | None" = None
    basis: list[str] = field(default_factory=list)
    unit: str | None = None
    seed: str | None = None
    involution: dict[str, str] = field(default_factory=dict)
    dimensions: dict[str, object] = field(default_factory=dict)
    generators: list[str] | None = None
    rules: dict[tuple[str, str], dict[str, int]] = field(default_factory=dict)


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _Locator:
    """Approximate source positions for values found after JSON decoding."""

    def __init__(self, text: str):
        self.text = text
        self.cursor = {}

    def find(self, needle: str) -> tuple[int | None, int | None]:
        start = self.cursor.get(needle, 0)
        at = self.text.find(needle, start)
        if at < 0:
            return None, None
        self.cursor[needle] = at + 1
        return _position(self.text, at)


def _reject_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise SpecSyntaxError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _parse_count(token: str | None, where: str, loc: _Locator):
    if token is None:
        return 1
    try:
        n = Fraction(token)
    except (ValueError, ZeroDivisionError):
        n = None
    if n is None or n.denominator != 1 or n <= 0:
        raise MultiplicityNotPositiveInteger(f"multiplicity {token!r} in {where} is not a positive integer", *loc.find(token))
    return int(n)


def _parse_result(result, where: str, loc: _Locator) -> dict[str, int]:
    out: dict[str, int] = {}
    if isinstance(result, str):
        terms = [] if result.strip() in ("", "0") else result.split("+")
        for term in terms:
            m = _MULT.match(term)
            if not m:
                raise SpecSyntaxError(f"cannot parse term {term.strip()!r} in {where}", *loc.find(term.strip()))
            n = _parse_count(m.group(1) or m.group(2), where, loc)
            out[m.group(3)] = out.get(m.group(3), 0) + n
        return out
    if isinstance(result, dict):
        items = result.items()
    elif isinstance(result, list):
        items = []
        for entry in result:
            if not isinstance(entry, str) or ":" not in entry:
                raise SpecSyntaxError(f"expected 'label: multiplicity' in {where}, got {entry!r}")
            lab, n = entry.split(":", 1)
            items.append((lab.strip(), n.strip()))
    else:
        raise SpecSyntaxError(f"bad result in {where}: {result!r}")
    for lab, n in items:
        if isinstance(n, bool) or not isinstance(n, (int, str)):
            raise MultiplicityNotPositiveInteger(f"multiplicity of {lab} in {where} is {n!r}", *loc.find(where))
        count = _parse_count(str(n), where, loc)
        out[lab] = out.get(lab, 0) + count
    return out


def _parse_rules(raw, loc: _Locator) -> dict[tuple[str, str], dict[str, int]]:
    if not isinstance(raw, list):
        raise SpecSyntaxError("'rules' must be a list")
    rules: dict[tuple[str, str], dict[str, int]] = {}
    for entry in raw:
        if isinstance(entry, str):
            m = _RULE.match(entry)
            if not m:
                raise SpecSyntaxError(f"cannot parse rule {entry!r}", *loc.find(json.dumps(entry)))
            left, right, result = m.group(1), m.group(2), m.group(3)
            where = json.dumps(entry)
        elif isinstance(entry, list) and len(entry) == 3:
            left, right, result = entry
            where = f"rule {left} * {right}"
        elif isinstance(entry, dict) and set(entry) == {"left", "right", "result"}:
            left, right, result = entry["left"], entry["right"], entry["result"]
            where = f"rule {left} * {right}"
        else:
            raise SpecSyntaxError(f"cannot parse rule {entry!r}")
        key = (str(left), str(right))
        if key in rules:
            line, col = loc.find(json.dumps(entry)) if isinstance(entry, str) else (None, None)
            raise DuplicateRule(f"duplicate rule for {left} * {right}", line, col)
        rules[key] = _parse_result(result, where, loc)
    return rules


def _dimension(value, lab: str):
    if isinstance(value, bool):
        raise SpecSyntaxError(f"dimension of {lab} is not a number")
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        try:
            f = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise SpecSyntaxError(f"dimension of {lab} is not a number: {value!r}") from None
        return f.numerator if f.denominator == 1 else f
    raise SpecSyntaxError(f"dimension of {lab} is not a number: {value!r}")


def _from_obj(obj, loc: _Locator, nested: bool = False) -> SpecFile:
    if not isinstance(obj, dict):
        raise SpecSyntaxError("spec must be a JSON object")
    kind = obj.get("kind")
    if kind not in ("algebra", "module"):
        raise SpecSyntaxError(f"'kind' must be 'algebra' or 'module', got {kind!r}", *loc.find('"kind"'))
    allowed = ALGEBRA_KEYS if kind == "algebra" else MODULE_KEYS
    for key in obj:
        if key not in allowed:
            raise UnknownKey(f"unknown key {key!r} for kind {kind}", *loc.find(json.dumps(key)))
    spec = SpecFile(kind=kind, name=obj.get("name"), catalog=obj.get("catalog"))
    if spec.catalog is not None:
        if set(obj) - {"kind", "name", "catalog"}:
            raise SpecSyntaxError("a catalog reference cannot be combined with explicit data")
        return spec
    basis = obj.get("basis")
    if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
        raise SpecSyntaxError("'basis' must be a list of labels")
    spec.basis = list(basis)
    spec.dimensions = {lab: _dimension(v, lab) for lab, v in (obj.get("dimensions") or {}).items()}
    spec.rules = _parse_rules(obj.get("rules", []), loc)
    if kind == "algebra":
        spec.unit = obj.get("unit")
        spec.involution = dict(obj.get("involution") or {})
        gens = obj.get("generators")
        spec.generators = None if gens is None else list(gens)
    else:
        alg = obj.get("algebra")
        if isinstance(alg, str):
            spec.algebra = SpecFile(kind="algebra", catalog=alg)
        elif isinstance(alg, dict):
            spec.algebra = _from_obj(alg, loc, nested=True)
            if spec.algebra.kind != "algebra":
                raise SpecSyntaxError("nested 'algebra' must have kind 'algebra'")
        else:
            raise SpecSyntaxError("module spec needs an 'algebra' (catalog id or object)")
        spec.seed = obj.get("seed")
    return spec


def parse_spec_text(text: str) -> SpecFile:
    try:
        obj = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise SpecSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    return _from_obj(obj, _Locator(text))


def parse_spec(path) -> SpecFile:
    """Parse a spec file; errors carry line/column where they can be located."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_spec_text(text)


def build(spec: SpecFile) -> FusionAlgebra | FusionModule:
    """Turn a parsed spec into exactly one constructor call."""
    if spec.catalog is not None:
        obj = catalog.resolve(spec.catalog)
        expected = FusionAlgebra if spec.kind == "algebra" else FusionModule
        if not isinstance(obj, expected):
            raise SpecError(f"catalog id {spec.catalog!r} is not a {spec.kind}")
        return obj
    missing = [lab for lab in spec.basis if lab not in spec.dimensions]
    if missing:
        raise SpecError(f"no dimension given for {missing}")
    if spec.kind == "algebra":
        return make_fusion_algebra(
            spec.basis, spec.unit, spec.involution, spec.rules, spec.dimensions, spec.generators,
            name=spec.name or "algebra",
        )
    A = build(spec.algebra)
    return make_fusion_module(A, spec.basis, spec.rules, spec.dimensions, spec.seed, name=spec.name or "module")


def _format_result(result: dict[str, int]) -> str:
    if not result:
        return "0"
    labs = sorted(result, key=label_key)
    return " + ".join(lab if result[lab] == 1 else f"{result[lab]} {lab}" for lab in labs)


def _canonical_number(v):
    if is_exact(v):
        f = Fraction(v)
        return f.numerator if f.denominator == 1 else str(f)
    return float(v)


def _to_obj(spec: SpecFile) -> dict:
    obj: dict = {"kind": spec.kind}
    if spec.name is not None:
        obj["name"] = spec.name
    if spec.catalog is not None:
        obj["catalog"] = spec.catalog
        return obj
    obj["basis"] = list(spec.basis)
    obj["dimensions"] = {lab: _canonical_number(spec.dimensions[lab]) for lab in spec.basis if lab in spec.dimensions}
    op = "*"
    keys = sorted(spec.rules, key=lambda k: (label_key(k[0]), label_key(k[1])))
    obj["rules"] = [f"{l} {op} {r} -> {_format_result(spec.rules[(l, r)])}" for l, r in keys]
    if spec.kind == "algebra":
        obj["unit"] = spec.unit
        obj["involution"] = {k: v for k, v in sorted(spec.involution.items(), key=lambda kv: label_key(kv[0])) if k != v}
        if spec.generators is not None:
            obj["generators"] = list(spec.generators)
    else:
        obj["algebra"] = spec.algebra.catalog if spec.algebra.catalog is not None and spec.algebra.name is None else _to_obj(spec.algebra)
        obj["seed"] = spec.seed
    return obj


def emit_canonical(spec: SpecFile) -> str:
    """Byte-stable canonical JSON text for a spec."""
    return json.dumps(_to_obj(spec), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def spec_from_algebra(A: FusionAlgebra, name: str | None = None) -> SpecFile:
    """Spec of a finite algebra, e.g. to export a catalog entry for editing."""
    basis = list(A.basis)
    return SpecFile(
        kind="algebra",
        name=name or A.name,
        basis=basis,
        unit=A.unit,
        involution={lab: A.bar(lab) for lab in basis if A.bar(lab) != lab},
        dimensions={lab: A.dim(lab) for lab in basis},
        generators=list(A.generators),
        rules={(x, y): dict(A.product(x, y)) for x in basis for y in basis if A.product(x, y)},
    )


__all__ = ["SpecFile", "build", "emit_canonical", "parse_spec", "parse_spec_text", "spec_from_algebra"]
