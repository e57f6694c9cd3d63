"""Fusion algebras: exact structure constants, involution, dimension function.

A :class:`FusionAlgebra` is immutable once built.  Its basis is either a
finite tuple of labels or a membership predicate for a countably infinite
family; in the latter case every global check is restricted to a ball of
explicit radius around the unit.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .elements import RingElement, as_number, is_exact, label_key, sorted_labels
from .errors import (
    BallOverflow,
    InvolutionNotInvolutive,
    NonPositiveMultiplicity,
    NotFinite,
    Reducible,
    UnitLawViolation,
    UnknownLabel,
)

DEFAULT_EPS_DIM = 1e-9

Product = Mapping[str, int]
RuleProvider = Callable[[str, str], Product]


def default_ball_cap() -> int:
    return int(os.environ.get("FUSELAB_MAX_BALL", 10**6))


def close(a, b, eps: float) -> bool:
    """Relative comparison; exact equality when both sides are rational."""
    if is_exact(a) and is_exact(b):
        return a == b
    scale = max(abs(float(a)), abs(float(b)), 1.0)
    return abs(float(a) - float(b)) <= eps * scale


def check_multiplicities(product: Mapping, where: str) -> dict[str, int]:
    out = {}
    for lab, n in product.items():
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n <= 0:
            raise NonPositiveMultiplicity(f"{where}: multiplicity of {lab} is {n!r}")
        out[lab] = int(n)
    return out


@dataclass(frozen=True)
class Violation:
    kind: str
    labels: tuple
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind} at ({', '.join(self.labels)}): {self.detail}"


@dataclass
class ValidationReport:
    subject: str
    radius: int
    eps_dim: float
    ball: list = field(default_factory=list)
    module_ball: list = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    checks: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, labels: Iterable[str], detail: str = "") -> None:
        self.violations.append(Violation(kind, tuple(labels), detail))

    def count(self, kind: str, n: int = 1) -> None:
        self.checks[kind] = self.checks.get(kind, 0) + n

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


class FusionAlgebra:
    """Fusion algebra with nonnegative integer structure constants.

    Prefer :func:`make_fusion_algebra` over calling this directly.
    """

    def __init__(
        self,
        *,
        name: str,
        basis: tuple[str, ...] | None,
        contains: Callable[[str], bool],
        unit: str,
        involution: Callable[[str], str],
        rules: RuleProvider,
        dim: Callable[[str], object],
        generators: Sequence[str],
        overrides: Mapping[tuple[str, str], Product] | None = None,
    ):
        self.name = name
        self._basis = basis
        self._contains = contains
        self.unit = unit
        self._bar = involution
        self._rules = rules
        self._dim = dim
        self.generators = tuple(generators)
        self._overrides = {k: dict(v) for k, v in (overrides or {}).items()}
        self._cache: dict[tuple[str, str], dict[str, int]] = {}
        self._dim_cache: dict[str, object] = {}

    def __repr__(self) -> str:
        size = len(self._basis) if self._basis is not None else "inf"
        return f"FusionAlgebra({self.name!r}, basis={size})"

    # -- basis ------------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return self._basis is not None

    @property
    def basis(self) -> tuple[str, ...]:
        if self._basis is None:
            raise NotFinite(f"{self.name} has an infinite basis")
        return self._basis

    def __contains__(self, label) -> bool:
        return isinstance(label, str) and self._contains(label)

    def check(self, label: str) -> str:
        if label not in self:
            raise UnknownLabel(label, f"basis of {self.name}")
        return label

    # -- structure ---------------------------------------------------------
    def bar(self, label: str) -> str:
        return self._bar(self.check(label))

    def dim(self, label: str):
        try:
            return self._dim_cache[label]
        except KeyError:
            value = as_number(self._dim(self.check(label)))
            self._dim_cache[label] = value
            return value

    def product(self, left: str, right: str) -> dict[str, int]:
        """Structure constants of ``left * right`` as ``{label: N}``."""
        key = (left, right)
        try:
            return self._cache[key]
        except KeyError:
            pass
        self.check(left)
        self.check(right)
        raw = self._overrides[key] if key in self._overrides else self._rules(left, right)
        prod = check_multiplicities(raw, f"{left}*{right}")
        for lab in prod:
            if lab not in self:
                raise UnknownLabel(lab, f"basis of {self.name} (rule {left}*{right})")
        self._cache[key] = prod
        return prod

    def multiply(self, a, b) -> RingElement:
        a, b = self.element(a), self.element(b)
        out: dict[str, int] = {}
        for x, cx in a.items():
            for y, cy in b.items():
                for z, n in self.product(x, y).items():
                    out[z] = out.get(z, 0) + cx * cy * n
        return RingElement(out)

    def conjugate(self, a) -> RingElement:
        a = self.element(a)
        out: dict[str, int] = {}
        for x, c in a.items():
            xb = self.bar(x)
            out[xb] = out.get(xb, 0) + c
        return RingElement(out)

    def dim_of(self, a):
        a = self.element(a)
        total = 0
        for x, c in a.items():
            total = total + c * self.dim(x)
        return total

    def element(self, a) -> RingElement:
        if isinstance(a, str):
            a = RingElement.basis(a) if a in self else RingElement.parse(a)
        elif not isinstance(a, RingElement):
            a = RingElement(a)
        for lab in a.coeffs:
            self.check(lab)
        return a

    def symmetrize(self, a) -> RingElement:
        a = self.element(a)
        return a + self.conjugate(a)

    def dims_exact(self, labels: Iterable[str]) -> bool:
        return all(is_exact(self.dim(lab)) for lab in labels)

    def with_rules(self, overrides: Mapping[tuple[str, str], Product], name: str | None = None) -> "FusionAlgebra":
        """Copy of this algebra with some products replaced (used for mutation testing)."""
        merged = dict(self._overrides)
        merged.update({k: dict(v) for k, v in overrides.items()})
        return FusionAlgebra(
            name=name or f"{self.name}*",
            basis=self._basis,
            contains=self._contains,
            unit=self.unit,
            involution=self._bar,
            rules=self._rules,
            dim=self._dim,
            generators=self.generators,
            overrides=merged,
        )

    def generating_set(self) -> list[str]:
        labs = set(self.generators)
        labs.update(self.bar(g) for g in self.generators)
        return sorted_labels(labs)

    def ball(self, radius: int, support: Iterable[str] | None = None, max_size: int | None = None) -> list[str]:
        """Breadth-first ball around the unit under multiplication by ``support`` and conjugates."""
        cap = default_ball_cap() if max_size is None else max_size
        gens = set(self.generating_set() if support is None else support)
        gens.update(self.bar(g) for g in list(gens))
        gens = sorted_labels(gens)
        order = [self.unit]
        seen = {self.unit}
        frontier = [self.unit]
        for step in range(radius):
            # words of length one are the generators themselves, whatever the rules say
            new = {g for g in gens if g not in seen} if step == 0 else set()
            for x in frontier:
                for g in gens:
                    for z in self.product(g, x):
                        if z not in seen:
                            new.add(z)
            if not new:
                break
            layer = sorted_labels(new)
            seen.update(layer)
            order.extend(layer)
            if len(order) > cap:
                raise BallOverflow(f"ball of {self.name} exceeds {cap} labels")
            frontier = layer
        return order


def _as_callable(obj, what: str):
    if callable(obj):
        return obj
    if isinstance(obj, Mapping):
        table = dict(obj)

        def lookup(label):
            try:
                return table[label]
            except KeyError:
                raise UnknownLabel(label, f"{what} table") from None

        return lookup
    raise TypeError(f"{what} must be a mapping or a callable")


def make_fusion_algebra(
    basis: Sequence[str] | Callable[[str], bool],
    unit: str,
    involution: Mapping[str, str] | Callable[[str], str] | None,
    rules: Mapping[tuple[str, str], Product] | RuleProvider,
    dim: Mapping[str, object] | Callable[[str], object],
    generators: Sequence[str] | None = None,
    *,
    name: str = "algebra",
) -> FusionAlgebra:
    """Build a :class:`FusionAlgebra` and run shallow checks on the generators.

    ``basis`` is a finite label sequence, or a membership predicate for an
    infinite basis (then ``rules`` should be a provider callable and
    ``generators`` is mandatory).  Deep checks live in :func:`validate_axioms`.
    """
    if callable(basis):
        finite = None
        contains = basis
        if generators is None:
            raise ValueError("an infinite basis needs an explicit generating set")
    else:
        finite = tuple(basis)
        if len(set(finite)) != len(finite):
            raise ValueError("basis labels must be distinct")
        members = frozenset(finite)
        contains = members.__contains__
    if not contains(unit):
        raise UnknownLabel(unit, "basis (unit)")
    generators = list(finite if generators is None else generators)
    for g in generators:
        if not contains(g):
            raise UnknownLabel(g, "basis (generator)")

    if involution is None:
        bar = lambda label: label  # noqa: E731
    elif isinstance(involution, Mapping):
        conj = dict(involution)
        for k, v in conj.items():
            if not contains(k) or not contains(v):
                raise UnknownLabel(k if not contains(k) else v, "basis (involution)")
        bar = lambda label: conj.get(label, label)  # noqa: E731
    else:
        bar = involution

    if isinstance(rules, Mapping):
        table = {}
        for (x, y), prod in rules.items():
            for lab in (x, y, *prod):
                if not contains(lab):
                    raise UnknownLabel(lab, f"basis (rule {x}*{y})")
            table[(x, y)] = check_multiplicities(prod, f"{x}*{y}")
        provider = lambda x, y: table.get((x, y), {})  # noqa: E731
    else:
        provider = rules

    alg = FusionAlgebra(
        name=name,
        basis=finite,
        contains=contains,
        unit=unit,
        involution=bar,
        rules=provider,
        dim=_as_callable(dim, "dimension"),
        generators=generators,
    )

    if alg.bar(unit) != unit:
        raise InvolutionNotInvolutive(f"conjugate of the unit is {alg.bar(unit)}")
    for g in generators:
        gb = alg.bar(g)
        if alg.bar(gb) != g:
            raise InvolutionNotInvolutive(f"{g} -> {gb} -> {alg.bar(gb)}")
        for left, right in ((unit, g), (g, unit)):
            if alg.product(left, right) != {g: 1}:
                raise UnitLawViolation(f"{left}*{right} = {RingElement(alg.product(left, right))}, expected {g}")
    return alg


def validate_axioms(
    A: FusionAlgebra,
    radius: int,
    eps_dim: float = DEFAULT_EPS_DIM,
    max_ball: int | None = None,
) -> ValidationReport:
    """Check the fusion-algebra axioms on the ball of ``radius`` around the unit.

    Every violation is recorded with its witnessing labels; nothing raises
    except :class:`BallOverflow`.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    ball = A.ball(radius, max_size=max_ball)
    rep = ValidationReport(subject=A.name, radius=radius, eps_dim=eps_dim, ball=ball)

    for z in ball:
        zb = A.bar(z)
        rep.count("involution")
        if A.bar(zb) != z:
            rep.add("involution", (z,), f"bar(bar({z})) = {A.bar(zb)}")
        d = A.dim(z)
        rep.count("dimension_range")
        if float(d) < 1 - eps_dim:
            rep.add("dimension_range", (z,), f"d = {d} < 1")
        rep.count("dimension_conjugate")
        if not close(d, A.dim(zb), eps_dim):
            rep.add("dimension_conjugate", (z, zb), f"{d} != {A.dim(zb)}")
        rep.count("unit_law", 2)
        for left, right in ((A.unit, z), (z, A.unit)):
            if A.product(left, right) != {z: 1}:
                rep.add("unit_law", (left, right), f"product is {RingElement(A.product(left, right))}")

    for z, e in itertools.product(ball, ball):
        prod = A.product(z, e)
        lhs = A.dim(z) * A.dim(e)
        rhs = sum(n * A.dim(a) for a, n in prod.items())
        rep.count("dimension_multiplicative")
        if not close(lhs, rhs, eps_dim):
            rep.add("dimension_multiplicative", (z, e), f"d*d = {lhs}, sum N d = {rhs}")
        rep.count("anti_multiplicative")
        left = A.conjugate(RingElement(prod))
        right = A.multiply(A.bar(e), A.bar(z))
        if left != right:
            rep.add("anti_multiplicative", (z, e), f"conj({z}*{e}) = {left}, bar*bar = {right}")

    for z, e, a in itertools.product(ball, ball, ball):
        n1 = A.product(z, e).get(a, 0)
        n2 = A.product(A.bar(z), a).get(e, 0)
        n3 = A.product(a, A.bar(e)).get(z, 0)
        rep.count("frobenius")
        if not (n1 == n2 == n3):
            rep.add("frobenius", (z, e, a), f"N^{a}_{z},{e}={n1}, N^{e}_bar{z},{a}={n2}, N^{z}_{a},bar{e}={n3}")

    for z, e, t in itertools.product(ball, ball, ball):
        rep.count("associativity")
        left = A.multiply(RingElement(A.product(z, e)), t)
        right = A.multiply(z, RingElement(A.product(e, t)))
        if left != right:
            rep.add("associativity", (z, e, t), f"({z}{e}){t} = {left}, {z}({e}{t}) = {right}")
    return rep


def left_multiplication_matrix(A: FusionAlgebra, u: str) -> np.ndarray:
    """Dense matrix ``L[a, b] = N^a_{u, b}`` over the finite basis."""
    basis = A.basis
    index = {lab: i for i, lab in enumerate(basis)}
    mat = np.zeros((len(basis), len(basis)))
    for j, b in enumerate(basis):
        for a, n in A.product(u, b).items():
            mat[index[a], j] += n
    return mat


def pf_dimension(A: FusionAlgebra) -> dict[str, float]:
    """Perron-Frobenius dimension function of a finite fusion algebra.

    The PF eigenvector of the summed left-multiplication matrix of the
    symmetrized generating set, normalized to 1 at the unit.
    """
    if not A.is_finite:
        raise NotFinite(f"{A.name} has an infinite basis")
    gens = A.generating_set()
    total = sum(left_multiplication_matrix(A, g) for g in gens)
    n_comp, _ = connected_components(total > 0, directed=True, connection="strong")
    if n_comp != 1:
        raise Reducible(f"generators of {A.name} do not act irreducibly ({n_comp} components)")
    sym = 0.5 * (total + total.T)
    vals, vecs = np.linalg.eigh(sym)
    vec = np.abs(vecs[:, -1])
    vec = vec / vec[A.basis.index(A.unit)]
    return {lab: float(v) for lab, v in zip(A.basis, vec)}


def pf_eigenvalue(A: FusionAlgebra, u: str) -> float:
    """Spectral radius of left multiplication by ``u`` on a finite algebra."""
    return float(max(abs(np.linalg.eigvals(left_multiplication_matrix(A, u)))))


__all__ = [
    "DEFAULT_EPS_DIM",
    "FusionAlgebra",
    "ValidationReport",
    "Violation",
    "make_fusion_algebra",
    "validate_axioms",
    "pf_dimension",
    "pf_eigenvalue",
    "left_multiplication_matrix",
    "label_key",
]
