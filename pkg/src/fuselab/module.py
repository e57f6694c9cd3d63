"""Left fusion modules over a fusion algebra."""

from __future__ import annotations

import itertools
import warnings
from typing import Callable, Iterable, Mapping, Sequence

from .algebra import (
    DEFAULT_EPS_DIM,
    FusionAlgebra,
    Product,
    ValidationReport,
    _as_callable,
    check_multiplicities,
    close,
    default_ball_cap,
)
from .elements import ModuleElement, RingElement, as_number, is_exact, sorted_labels
from .errors import BallOverflow, UnitActionViolation, UnknownLabel

ActionProvider = Callable[[str, str], Product]


class FusionModule:
    """Module basis, action constants ``c^beta_{u,alpha}`` and a dimension function."""

    def __init__(
        self,
        *,
        name: str,
        algebra: FusionAlgebra,
        basis: tuple[str, ...] | None,
        contains: Callable[[str], bool],
        rules: ActionProvider,
        dim: Callable[[str], object],
        seed: str,
        overrides: Mapping[tuple[str, str], Product] | None = None,
    ):
        self.name = name
        self.algebra = algebra
        self._basis = basis
        self._contains = contains
        self._rules = rules
        self._dim = dim
        self.seed = seed
        self._overrides = {k: dict(v) for k, v in (overrides or {}).items()}
        self._cache: dict[tuple[str, str], dict[str, int]] = {}
        self._dim_cache: dict[str, object] = {}

    def __repr__(self) -> str:
        size = len(self._basis) if self._basis is not None else "inf"
        return f"FusionModule({self.name!r}, over={self.algebra.name!r}, basis={size})"

    @property
    def is_finite(self) -> bool:
        return self._basis is not None

    @property
    def basis(self) -> tuple[str, ...]:
        if self._basis is None:
            raise ValueError(f"{self.name} has an infinite basis")
        return self._basis

    def __contains__(self, label) -> bool:
        return isinstance(label, str) and self._contains(label)

    def check(self, label: str) -> str:
        if label not in self:
            raise UnknownLabel(label, f"module basis of {self.name}")
        return label

    def dim(self, label: str):
        try:
            return self._dim_cache[label]
        except KeyError:
            value = as_number(self._dim(self.check(label)))
            self._dim_cache[label] = value
            return value

    def dim_of(self, m):
        m = self.element(m)
        return sum((c * self.dim(a) for a, c in m.items()), 0)

    def action(self, u: str, alpha: str) -> dict[str, int]:
        """Action constants of ``u . alpha`` as ``{beta: c}``."""
        key = (u, alpha)
        try:
            return self._cache[key]
        except KeyError:
            pass
        self.algebra.check(u)
        self.check(alpha)
        raw = self._overrides[key] if key in self._overrides else self._rules(u, alpha)
        out = check_multiplicities(raw, f"{u}.{alpha}")
        for lab in out:
            if lab not in self:
                raise UnknownLabel(lab, f"module basis of {self.name} (rule {u}.{alpha})")
        self._cache[key] = out
        return out

    def element(self, m) -> ModuleElement:
        if isinstance(m, str):
            m = ModuleElement.basis(m) if m in self else ModuleElement.parse(m)
        elif not isinstance(m, ModuleElement):
            m = ModuleElement(m)
        for lab in m.coeffs:
            self.check(lab)
        return m

    def act(self, u, m) -> ModuleElement:
        u = self.algebra.element(u)
        m = self.element(m)
        out: dict[str, object] = {}
        for x, cx in u.items():
            for a, ca in m.items():
                for b, n in self.action(x, a).items():
                    out[b] = out.get(b, 0) + cx * ca * n
        return ModuleElement(out)

    def with_rules(self, overrides: Mapping[tuple[str, str], Product], name: str | None = None) -> "FusionModule":
        merged = dict(self._overrides)
        merged.update({k: dict(v) for k, v in overrides.items()})
        return self._replace(name=name or f"{self.name}*", overrides=merged)

    def with_dimension(self, dim, name: str | None = None) -> "FusionModule":
        return self._replace(name=name or f"{self.name}*", dim=_as_callable(dim, "module dimension"))

    def _replace(self, **kw) -> "FusionModule":
        args = dict(
            name=self.name,
            algebra=self.algebra,
            basis=self._basis,
            contains=self._contains,
            rules=self._rules,
            dim=self._dim,
            seed=self.seed,
            overrides=self._overrides,
        )
        args.update(kw)
        return FusionModule(**args)

    def ball_layers(self, radius: int, support: Iterable[str] | None = None, max_size: int | None = None) -> list[list[str]]:
        """Breadth-first layers around the seed, each sorted in label order; layer ``r`` is at distance ``r``."""
        A = self.algebra
        cap = default_ball_cap() if max_size is None else max_size
        gens = set(A.generating_set() if support is None else support)
        gens.update(A.bar(g) for g in list(gens))
        gens = sorted_labels(gens)
        layers = [[self.seed]]
        seen = {self.seed}
        size = 1
        for _ in range(radius):
            new = set()
            for a in layers[-1]:
                for g in gens:
                    for b in self.action(g, a):
                        if b not in seen:
                            new.add(b)
            if not new:
                break
            layer = sorted_labels(new)
            seen.update(layer)
            layers.append(layer)
            size += len(layer)
            if size > cap:
                raise BallOverflow(f"ball of {self.name} exceeds {cap} labels")
        if self.is_finite and radius >= len(self.basis) and size < len(self.basis):
            missing = len(self.basis) - size
            warnings.warn(f"{missing} labels of {self.name} are unreachable from the seed; ignored", stacklevel=3)
        return layers

    def ball(self, radius: int, support: Iterable[str] | None = None, max_size: int | None = None) -> list[str]:
        """Breadth-first ball around the seed; layers sorted in label order."""
        return [a for layer in self.ball_layers(radius, support, max_size) for a in layer]


def make_fusion_module(
    algebra: FusionAlgebra,
    basis: Sequence[str] | Callable[[str], bool],
    rules: Mapping[tuple[str, str], Product] | ActionProvider,
    dim: Mapping[str, object] | Callable[[str], object],
    seed: str,
    *,
    name: str = "module",
) -> FusionModule:
    """Build a :class:`FusionModule`; only the unit action on the seed is checked here."""
    if callable(basis):
        finite, contains = None, basis
    else:
        finite = tuple(basis)
        if len(set(finite)) != len(finite):
            raise ValueError("module basis labels must be distinct")
        contains = frozenset(finite).__contains__
    if not contains(seed):
        raise UnknownLabel(seed, "module basis (seed)")

    if isinstance(rules, Mapping):
        table = {}
        for (u, a), prod in rules.items():
            algebra.check(u)
            for lab in (a, *prod):
                if not contains(lab):
                    raise UnknownLabel(lab, f"module basis (rule {u}.{a})")
            table[(u, a)] = check_multiplicities(prod, f"{u}.{a}")
        provider = lambda u, a: table.get((u, a), {})  # noqa: E731
    else:
        provider = rules

    mod = FusionModule(
        name=name,
        algebra=algebra,
        basis=finite,
        contains=contains,
        rules=provider,
        dim=_as_callable(dim, "module dimension"),
        seed=seed,
    )
    got = mod.action(algebra.unit, seed)
    if got != {seed: 1}:
        raise UnitActionViolation(f"{algebra.unit}.{seed} = {ModuleElement(got)}, expected {seed}")
    return mod


def regular_module(A: FusionAlgebra) -> FusionModule:
    """The algebra acting on itself by left multiplication."""
    return FusionModule(
        name=f"regular@{A.name}",
        algebra=A,
        basis=A._basis,
        contains=A._contains,
        rules=A.product,
        dim=A.dim,
        seed=A.unit,
    )


def validate_module(
    M: FusionModule,
    radius: int,
    eps_dim: float = DEFAULT_EPS_DIM,
    max_ball: int | None = None,
) -> ValidationReport:
    """Check the module axioms on balls of ``radius`` in the algebra and the module."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    A = M.algebra
    alg_ball = A.ball(radius, max_size=max_ball)
    mod_ball = M.ball(radius, max_size=max_ball)
    rep = ValidationReport(subject=M.name, radius=radius, eps_dim=eps_dim, ball=alg_ball, module_ball=mod_ball)

    for a in mod_ball:
        rep.count("unit_action")
        got = M.action(A.unit, a)
        if got != {a: 1}:
            rep.add("unit_action", (A.unit, a), f"result {ModuleElement(got)}")
        rep.count("dimension_positive")
        if float(M.dim(a)) <= 0:
            rep.add("dimension_positive", (a,), f"d = {M.dim(a)}")

    mod_set = set(mod_ball)
    for u, a in itertools.product(alg_ball, mod_ball):
        ub = A.bar(u)
        out = M.action(u, a)
        du, da = A.dim(u), M.dim(a)
        lhs = sum((n * M.dim(b) for b, n in out.items()), 0)
        rep.count("dimension_compatible")
        if not close(lhs, du * da, eps_dim):
            rep.add("dimension_compatible", (u, a), f"sum c d(beta) = {lhs}, d(u) d(alpha) = {du * da}")
        # adjoint form of the weighted sum: sum_beta c^alpha_{ubar,beta} d(beta) / (d(u) d(alpha))
        weighted = sum((M.action(ub, b).get(a, 0) * M.dim(b) for b in out), 0)
        ratio = weighted / (du * da)
        rep.count("weighted_sum")
        if not close(ratio, 1, eps_dim):
            rep.add("weighted_sum", (u, a), f"weighted sum = {float(ratio):.12g}")
        for b in sorted_labels(mod_set.union(out)):
            rep.count("adjointness")
            c1 = out.get(b, 0)
            c2 = M.action(ub, b).get(a, 0)
            if c1 != c2:
                rep.add("adjointness", (u, a, b), f"c^{b}_{u},{a}={c1}, c^{a}_{ub},{b}={c2}")

    for u, v, a in itertools.product(alg_ball, alg_ball, mod_ball):
        rep.count("mixed_associativity")
        left = M.act(RingElement(A.product(u, v)), a)
        right = M.act(u, M.act(v, a))
        if left != right:
            rep.add("mixed_associativity", (u, v, a), f"(uv).a = {left}, u.(v.a) = {right}")
    return rep


def dims_exact(M: FusionModule, labels: Iterable[str]) -> bool:
    return all(is_exact(M.dim(a)) for a in labels)


__all__ = [
    "FusionModule",
    "make_fusion_module",
    "regular_module",
    "validate_module",
]
