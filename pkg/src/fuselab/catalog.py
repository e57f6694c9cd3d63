"""Built-in fusion algebras and modules, addressable by string ids.

Ids::

    su2:N=<num>            SU(2)-type rules, d(u1) = N
    verlinde:k=<int>       level-k truncation
    group:Z<n> | group:S3  group rings
    torus:N=<num>          weight module over su2:N
    regular@<algebra id>   the algebra acting on itself
    graph:<Dynkin>@<algebra id>   graph module, e.g. graph:A5@verlinde:k=4
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .algebra import FusionAlgebra, make_fusion_algebra
from .elements import as_number, is_exact
from .errors import (
    Disconnected,
    NegativeMultiplicity,
    NotAGroup,
    NotAModule,
    ParameterOutOfRange,
    UnknownCatalogEntry,
    UnknownLabel,
)
from .module import FusionModule, make_fusion_module, regular_module
from .spectral import AffineWeights, TableWeights, WeightFamily

_U = re.compile(r"^u(0|[1-9]\d*)$")
_E = re.compile(r"^e(0|-?[1-9]\d*)$")


def _u_index(label: str) -> int:
    m = _U.match(label)
    if not m:
        raise UnknownLabel(label, "u-series basis")
    return int(m.group(1))


def _e_index(label: str) -> int:
    m = _E.match(label)
    if not m:
        raise UnknownLabel(label, "weight basis")
    return int(m.group(1))


def _fmt(x) -> str:
    return str(x) if is_exact(x) else repr(float(x))


def _parameter(value, name: str):
    try:
        return as_number(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ParameterOutOfRange(f"{name}={value!r} is not a number") from None


def _snap(x: float):
    r = round(x)
    return int(r) if abs(x - r) < 1e-12 else x


def _exact_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num * num == x.numerator and den * den == x.denominator:
        return Fraction(num, den)
    return None


# ---------------------------------------------------------------------------
# algebras


def su2_ring(N=2) -> FusionAlgebra:
    """SU(2)-type fusion rules ``u_m u_n = sum_j u_{|m-n|+2j}`` with ``d(u_1) = N``.

    ``d(u_n)`` follows ``S_{n+1} = N S_n - S_{n-1}``; exact whenever ``N`` is rational.
    """
    N = _parameter(N, "N")
    if N < 2:
        raise ParameterOutOfRange(f"su2_ring needs N >= 2, got {N}")
    dims = [1, N]

    def dim(label: str):
        n = _u_index(label)
        while len(dims) <= n:
            dims.append(N * dims[-1] - dims[-2])
        return dims[n]

    def rules(x: str, y: str) -> dict[str, int]:
        m, n = _u_index(x), _u_index(y)
        return {f"u{abs(m - n) + 2 * j}": 1 for j in range(min(m, n) + 1)}

    return make_fusion_algebra(
        basis=lambda lab: bool(_U.match(lab)),
        unit="u0",
        involution=None,
        rules=rules,
        dim=dim,
        generators=["u1"],
        name=f"su2:N={_fmt(N)}",
    )


def verlinde_dimension(k: int, n: int) -> float:
    return math.sin((n + 1) * math.pi / (k + 2)) / math.sin(math.pi / (k + 2))


def verlinde_ring(k: int) -> FusionAlgebra:
    """Level-``k`` truncation: basis ``u0..uk``, quantum dimensions as doubles."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ParameterOutOfRange(f"verlinde_ring needs an integer k >= 1, got {k!r}")
    basis = [f"u{n}" for n in range(k + 1)]
    rules = {}
    for m, n in itertools.product(range(k + 1), repeat=2):
        top = min(m + n, 2 * k - m - n)
        rules[(f"u{m}", f"u{n}")] = {f"u{j}": 1 for j in range(abs(m - n), top + 1, 2)}
    dims = {f"u{n}": _snap(verlinde_dimension(k, n)) for n in range(k + 1)}
    return make_fusion_algebra(basis, "u0", None, rules, dims, ["u1"], name=f"verlinde:k={k}")


def group_ring(
    mult_table: Mapping[tuple[str, str], str],
    inverse_map: Mapping[str, str] | None = None,
    labels: Sequence[str] | None = None,
    name: str = "group",
) -> FusionAlgebra:
    """Group ring with ``N^c_{a,b} = [ab = c]``, involution ``g -> g^-1`` and ``d = 1``."""
    if labels is None:
        seen = {}
        for a, b in mult_table:
            seen.setdefault(a, None)
            seen.setdefault(b, None)
        labels = list(seen)
    labels = list(labels)
    elems = set(labels)
    for a, b in itertools.product(labels, repeat=2):
        c = mult_table.get((a, b))
        if c not in elems:
            raise NotAGroup(f"{a}*{b} = {c!r} is not an element")
    units = [e for e in labels if all(mult_table[(e, g)] == g == mult_table[(g, e)] for g in labels)]
    if not units:
        raise NotAGroup("no identity element")
    unit = units[0]
    for a, b, c in itertools.product(labels, repeat=3):
        if mult_table[(mult_table[(a, b)], c)] != mult_table[(a, mult_table[(b, c)])]:
            raise NotAGroup(f"associativity fails at ({a}, {b}, {c})")
    inverse = {}
    for a in labels:
        inv = [b for b in labels if mult_table[(a, b)] == unit and mult_table[(b, a)] == unit]
        if not inv:
            raise NotAGroup(f"{a} has no inverse")
        inverse[a] = inv[0]
    if inverse_map is not None and dict(inverse_map) != inverse:
        raise NotAGroup("inverse_map disagrees with the table")
    rules = {(a, b): {mult_table[(a, b)]: 1} for a, b in itertools.product(labels, repeat=2)}
    return make_fusion_algebra(labels, unit, inverse, rules, {g: 1 for g in labels}, labels, name=name)


def cyclic_group_table(n: int) -> tuple[list[str], dict[tuple[str, str], str]]:
    labels = ["e"] + ["g" if i == 1 else f"g{i}" for i in range(1, n)]
    table = {(labels[i], labels[j]): labels[(i + j) % n] for i in range(n) for j in range(n)}
    return labels, table


def s3_table() -> tuple[list[str], dict[tuple[str, str], str]]:
    r = (1, 2, 0)
    s = (0, 2, 1)

    def compose(p, q):
        return tuple(p[q[i]] for i in range(3))

    ident = (0, 1, 2)
    r2 = compose(r, r)
    perms = {"e": ident, "r": r, "r2": r2, "s": s, "sr": compose(s, r), "sr2": compose(s, r2)}
    lookup = {p: name for name, p in perms.items()}
    table = {(a, b): lookup[compose(pa, pb)] for a, pa in perms.items() for b, pb in perms.items()}
    return list(perms), table


def cyclic_group_ring(n: int) -> FusionAlgebra:
    if n < 1:
        raise ParameterOutOfRange("cyclic group order must be >= 1")
    labels, table = cyclic_group_table(n)
    return group_ring(table, labels=labels, name=f"group:Z{n}")


def s3_group_ring() -> FusionAlgebra:
    labels, table = s3_table()
    return group_ring(table, labels=labels, name="group:S3")


# ---------------------------------------------------------------------------
# modules


def torus_weight_ratio(N):
    """Root ``q >= 1`` of ``q + 1/q = N``; exact when it is rational."""
    N = _parameter(N, "N")
    if is_exact(N):
        root = _exact_sqrt(Fraction(N) ** 2 - 4)
        if root is not None:
            q = (Fraction(N) + root) / 2
            return q.numerator if q.denominator == 1 else q
    return (float(N) + math.sqrt(float(N) ** 2 - 4)) / 2


def torus_module(N=2) -> FusionModule:
    """Weight module ``u_n . e_k = sum_j e_{k+n-2j}`` over ``su2_ring(N)``.

    ``d(e_k) = q^k`` with ``q + 1/q = N``; this is identically 1 at ``N = 2``.
    """
    A = su2_ring(N)
    q = torus_weight_ratio(N)

    def rules(u: str, a: str) -> dict[str, int]:
        n, k = _u_index(u), _e_index(a)
        return {f"e{k + n - 2 * j}": 1 for j in range(n + 1)}

    def dim(a: str):
        k = _e_index(a)
        if is_exact(q):
            return Fraction(q) ** k
        return q**k

    M = make_fusion_module(A, lambda lab: bool(_E.match(lab)), rules, dim, "e0", name=f"torus:N={A.name.split('=')[1]}")
    return M


def dynkin_adjacency(kind: str) -> np.ndarray:
    """Adjacency matrix of a simply-laced Dynkin diagram ``A_n``, ``D_n``, ``E_6..8``.

    Vertex 0 is the end of the longest arm.
    """
    m = re.fullmatch(r"([ADE])(\d+)", kind)
    if not m:
        raise UnknownCatalogEntry(f"unknown Dynkin diagram {kind!r}")
    t, n = m.group(1), int(m.group(2))
    edges: list[tuple[int, int]]
    if t == "A" and n >= 1:
        edges = [(i, i + 1) for i in range(n - 1)]
    elif t == "D" and n >= 4:
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    elif t == "E" and n in (6, 7, 8):
        # chain 0..n-2 with the extra vertex attached at n-4
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 4, n - 1)]
    else:
        raise UnknownCatalogEntry(f"no Dynkin diagram {kind}")
    adj = np.zeros((n, n), dtype=int)
    for i, j in edges:
        adj[i, j] = adj[j, i] = 1
    return adj


def graph_module(
    A: FusionAlgebra,
    adjacency,
    labels: Sequence[str] | None = None,
    seed: str | None = None,
    check_levels: int = 64,
    name: str = "graph",
) -> FusionModule:
    """Module whose ``u_1`` acts by ``adjacency``; ``c(u_{n+1}) = adj c(u_n) - c(u_{n-1})``.

    ``A`` must be of SU(2) type (``su2_ring`` or ``verlinde_ring``).  Raises
    :class:`NegativeMultiplicity` at the first level with a negative entry.
    """
    adj = np.asarray(adjacency, dtype=object)
    n = adj.shape[0]
    if adj.shape != (n, n) or np.any(adj != adj.T):
        raise ValueError("adjacency must be a symmetric square matrix")
    if np.any(adj < 0):
        raise NegativeMultiplicity(1)
    labels = [f"v{i}" for i in range(n)] if labels is None else list(labels)
    if len(labels) != n or len(set(labels)) != n:
        raise ValueError("need one distinct label per vertex")
    seed = labels[0] if seed is None else seed
    reach = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if adj[i, j] and j not in reach:
                reach.add(j)
                stack.append(j)
    if len(reach) != n:
        raise Disconnected(f"adjacency graph has {n - len(reach)} vertices unreachable from vertex 0")

    levels = [np.identity(n, dtype=int).astype(object), adj]
    top = len(A.basis) - 1 if A.is_finite else None

    def level(m: int) -> np.ndarray:
        while len(levels) <= m:
            nxt = adj.dot(levels[-1]) - levels[-2]
            if np.any(nxt < 0):
                raise NegativeMultiplicity(len(levels))
            levels.append(nxt)
        return levels[m]

    if top is not None:
        level(top)
        # truncation: u1 u_top = u_{top-1}
        if top >= 1 and np.any(adj.dot(levels[top]) - levels[top - 1] != 0):
            raise NotAModule(f"adjacency is not compatible with the truncation of {A.name}")
    else:
        level(check_levels)

    vals, vecs = np.linalg.eigh(np.array(adj, dtype=float))
    pf = vals[-1]
    if abs(pf - float(A.dim("u1"))) > 1e-9 * max(1.0, pf):
        raise NotAModule(f"graph norm {pf} differs from d(u1) = {A.dim('u1')}")
    vec = np.abs(vecs[:, -1])
    vec = vec / vec[labels.index(seed)]
    dims = {lab: _snap(float(v)) for lab, v in zip(labels, vec)}
    index = {lab: i for i, lab in enumerate(labels)}

    def rules(u: str, a: str) -> dict[str, int]:
        mat = level(_u_index(u))
        col = index[a]
        return {labels[i]: int(mat[i, col]) for i in range(n) if mat[i, col]}

    return make_fusion_module(A, labels, rules, dims, seed, name=name)


# ---------------------------------------------------------------------------
# certificate weight families


def su2_regular_weights(kind: str = "affine") -> AffineWeights:
    """Weights on ``{u_n}`` for regular modules of SU(2)-type rings.

    ``affine``: ``w(u_n) = n + 1`` (the classical dimensions); ``constant``: ``w = 1``.
    Clebsch-Gordan rows ``u_m . u_n`` are translates of each other once ``n >= m``.
    """
    slope = {"affine": 1, "constant": 0}[kind]
    return AffineWeights(_u_index, lambda k: f"u{k}", slope, 1, lower=0, name=kind, translation_invariant=True)


def torus_weights(kind: str = "constant") -> AffineWeights:
    if kind != "constant":
        raise UnknownCatalogEntry(f"torus modules only carry constant weights, not {kind!r}")
    return AffineWeights(_e_index, lambda k: f"e{k}", 0, 1, lower=None, name=kind, translation_invariant=True)


def weight_family(M: FusionModule, kind: str) -> WeightFamily:
    """Named certificate weights for a catalog module."""
    if M.is_finite:
        if kind == "dimension":
            return TableWeights({a: M.dim(a) for a in M.basis}, name="dimension")
        if kind == "constant":
            return TableWeights({a: 1 for a in M.basis}, name="constant")
        raise UnknownCatalogEntry(f"finite modules support 'dimension' or 'constant' weights, not {kind!r}")
    if M.name.startswith("regular@su2:"):
        return su2_regular_weights(kind)
    if M.name.startswith("torus:"):
        return torus_weights(kind)
    raise UnknownCatalogEntry(f"no weight family {kind!r} for {M.name}")


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    kind: str
    parameters: str
    description: str
    examples: tuple[str, ...] = field(default_factory=tuple)
    expectations: str = ""


ENTRIES = (
    CatalogEntry("su2", "algebra", "N=<number >= 2>", "SU(2)-type rules, infinite basis u0,u1,...; d(u1)=N",
                 ("su2:N=2", "su2:N=3"), "amenable regular module iff N = 2"),
    CatalogEntry("verlinde", "algebra", "k=<int >= 1>", "level-k truncation u0..uk, quantum dimensions",
                 ("verlinde:k=2",), "pf-dim d(u1) = 2cos(pi/(k+2))"),
    CatalogEntry("group", "algebra", "Z<n> | S3", "group ring, d = 1", ("group:Z3", "group:S3"), "pf-dim = 1"),
    CatalogEntry("torus", "module", "N=<number >= 2>", "weight module e_k (k in Z) over su2:N",
                 ("torus:N=2",), "amenable at N = 2: ||Gamma_{2u1}|| on radius r is 4cos(pi/(2r+2))"),
    CatalogEntry("regular", "module", "@<algebra id>", "algebra acting on itself",
                 ("regular@su2:N=3", "regular@verlinde:k=2"), "certificate 'affine' for su2 rings"),
    CatalogEntry("graph", "module", "<Dynkin>@<algebra id>", "graph module from an adjacency matrix",
                 ("graph:A5@verlinde:k=4", "graph:D4@verlinde:k=4"), "A_{k+1}@verlinde:k is the regular module"),
)


def _params(text: str) -> dict[str, str]:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise UnknownCatalogEntry(f"malformed parameter {part!r}")
        key, value = part.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def algebra(ident: str) -> FusionAlgebra:
    """Resolve an algebra id such as ``su2:N=3`` or ``group:S3``."""
    family, _, rest = ident.strip().partition(":")
    if family == "su2":
        params = _params(rest)
        return su2_ring(params.get("N", "2"))
    if family == "verlinde":
        params = _params(rest)
        try:
            k = int(params["k"])
        except (KeyError, ValueError):
            raise ParameterOutOfRange(f"verlinde needs k=<int>, got {rest!r}") from None
        return verlinde_ring(k)
    if family == "group":
        m = re.fullmatch(r"Z(\d+)", rest)
        if m:
            return cyclic_group_ring(int(m.group(1)))
        if rest == "S3":
            return s3_group_ring()
    raise UnknownCatalogEntry(f"unknown algebra id {ident!r}")


def module(ident: str) -> FusionModule:
    """Resolve a module id such as ``torus:N=2``, ``regular@su2:N=3``, ``graph:D4@verlinde:k=4``."""
    ident = ident.strip()
    if ident.startswith("regular@"):
        return regular_module(algebra(ident[len("regular@"):]))
    if ident.startswith("torus:"):
        params = _params(ident[len("torus:"):])
        return torus_module(params.get("N", "2"))
    if ident.startswith("graph:"):
        diagram, at, alg = ident[len("graph:"):].partition("@")
        if not at:
            raise UnknownCatalogEntry(f"graph module id needs '@<algebra>': {ident!r}")
        A = algebra(alg)
        adj = dynkin_adjacency(diagram)
        n = adj.shape[0]
        prefix = diagram[0].lower()
        return graph_module(A, adj, labels=[f"{prefix}{i}" for i in range(n)], name=ident)
    raise UnknownCatalogEntry(f"unknown module id {ident!r}")


def resolve(ident: str) -> FusionAlgebra | FusionModule:
    """Module when the id names one, else the algebra."""
    head = ident.strip().split(":")[0].split("@")[0]
    if head in ("regular", "torus", "graph"):
        return module(ident)
    return algebra(ident)


def standard_algebras() -> dict[str, FusionAlgebra]:
    ids = ["su2:N=2", "su2:N=3", *(f"verlinde:k={k}" for k in range(1, 5)), "group:Z2", "group:Z3", "group:S3"]
    return {i: algebra(i) for i in ids}


def standard_modules() -> dict[str, FusionModule]:
    mods = {f"regular@{i}": regular_module(A) for i, A in standard_algebras().items()}
    mods["torus:N=2"] = torus_module(2)
    mods["graph:D4@verlinde:k=4"] = module("graph:D4@verlinde:k=4")
    return mods


__all__ = [
    "CatalogEntry",
    "ENTRIES",
    "algebra",
    "cyclic_group_ring",
    "dynkin_adjacency",
    "graph_module",
    "group_ring",
    "module",
    "resolve",
    "s3_group_ring",
    "standard_algebras",
    "standard_modules",
    "su2_regular_weights",
    "su2_ring",
    "torus_module",
    "torus_weights",
    "verlinde_ring",
    "weight_family",
]
