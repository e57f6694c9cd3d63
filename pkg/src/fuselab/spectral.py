"""Truncated left-action operators and amenability verdicts.

Windows are breadth-first balls in the module basis.  Compressing a
nonnegative operator to a window can only lower its norm, so every norm
computed here is a lower bound for the operator on the full l^2 space.
Upper bounds come from subinvariant weight vectors verified in exact
rational arithmetic.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .algebra import DEFAULT_EPS_DIM
from .elements import RingElement, as_number, is_exact, label_key, sorted_labels
from .errors import (
    DegenerateWindow,
    DimensionNotRational,
    InequalityFails,
    InvalidMeasure,
    NegativeCoefficient,
    NotSymmetricElement,
    WeightNotPositive,
    ZeroElement,
)
from .module import FusionModule

POWER_MAX_ITER = 100_000
POWER_TOL = 1e-12
START_VECTOR = "uniform positive, unit l2 norm"


# ---------------------------------------------------------------------------
# windows and operators


@dataclass(frozen=True)
class ActionWindow:
    labels: tuple[str, ...]
    radius: int
    support: tuple[str, ...]
    interior: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def __contains__(self, label) -> bool:
        return label in self.index


def _support_labels(test_support) -> list[str]:
    if isinstance(test_support, str):
        return [test_support]
    if isinstance(test_support, (RingElement, ProbabilityMeasure)):
        return list(test_support.support)
    return list(test_support)


def _interior_mask(M: FusionModule, labels: Sequence[str], support: Iterable[str]) -> tuple[bool, ...]:
    inside = set(labels)
    support = list(support)
    return tuple(all(b in inside for t in support for b in M.action(t, a)) for a in labels)


def enumerate_ball(M: FusionModule, test_support, radius: int, max_ball: int | None = None) -> ActionWindow:
    """Ball of ``radius`` around the seed under the test support and its conjugates."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    A = M.algebra
    support = {A.check(t) for t in _support_labels(test_support)}
    if not support:
        raise DegenerateWindow("empty test support")
    support.update(A.bar(t) for t in list(support))
    support = sorted_labels(support)
    labels = M.ball(radius, support, max_size=max_ball)
    return ActionWindow(tuple(labels), radius, tuple(support), _interior_mask(M, labels, support))


def nested_windows(M: FusionModule, test_support, radii: Iterable[int], max_ball: int | None = None) -> list[ActionWindow]:
    """Windows for several radii from a single breadth-first search; each is a prefix of the next."""
    radii = list(radii)
    if not radii or min(radii) < 0:
        raise ValueError("radii must be nonnegative")
    A = M.algebra
    support = {A.check(t) for t in _support_labels(test_support)}
    if not support:
        raise DegenerateWindow("empty test support")
    support.update(A.bar(t) for t in list(support))
    support = sorted_labels(support)
    layers = M.ball_layers(max(radii), support, max_size=max_ball)
    dist = {a: r for r, layer in enumerate(layers) for a in layer}
    labels = [a for layer in layers for a in layer]
    # a label stays interior in every window that contains all of its images
    far = math.inf
    reach = [max((dist.get(b, far) for t in support for b in M.action(t, a)), default=0) for a in labels]
    out = []
    for r in radii:
        n = sum(len(layer) for layer in layers[: r + 1])
        out.append(ActionWindow(tuple(labels[:n]), r, tuple(support), tuple(x <= r for x in reach[:n])))
    return out


@dataclass(frozen=True)
class TruncatedOperator:
    """Sparse matrix of an action compressed to a window; ``entries[(row, col)]``."""

    window: ActionWindow
    entries: Mapping[tuple[int, int], object]
    element: object
    exact: bool
    interior: tuple[bool, ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return self.window.labels

    @property
    def shape(self) -> tuple[int, int]:
        n = len(self.window)
        return (n, n)

    def entry(self, beta: str, alpha: str):
        idx = self.window.index
        return self.entries.get((idx[beta], idx[alpha]), 0)

    def sparse(self) -> sp.csr_matrix:
        n = len(self.window)
        if not self.entries:
            return sp.csr_matrix((n, n))
        rows, cols = zip(*self.entries)
        vals = [float(v) for v in self.entries.values()]
        return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

    def dense(self) -> np.ndarray:
        return self.sparse().toarray()

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.entries.values())

    def is_symmetric(self) -> bool:
        return all(self.entries.get((j, i), 0) == v for (i, j), v in self.entries.items())

    def restrict(self, window: ActionWindow) -> "TruncatedOperator":
        """Compress to a smaller window whose labels are a prefix of this one's."""
        n = len(window)
        if window.labels != self.window.labels[:n]:
            raise ValueError("restrict needs a prefix window")
        entries = {}
        escapes = [False] * n
        for (i, j), v in self.entries.items():
            if j < n:
                if i < n:
                    entries[(i, j)] = v
                else:
                    escapes[j] = True
        interior = tuple(self.interior[j] and not escapes[j] for j in range(n))
        return TruncatedOperator(window, entries, self.element, self.exact, interior)


def build_gamma(M: FusionModule, u, window: ActionWindow) -> TruncatedOperator:
    """Exact matrix of ``alpha -> u . alpha`` restricted to the window."""
    u = M.algebra.element(u)
    idx = window.index
    entries: dict[tuple[int, int], object] = {}
    for j, a in enumerate(window.labels):
        for v, c in u.items():
            for b, n in M.action(v, a).items():
                i = idx.get(b)
                if i is not None:
                    entries[(i, j)] = entries.get((i, j), 0) + c * n
    entries = {k: v for k, v in entries.items() if v != 0}
    return TruncatedOperator(window, entries, u, True, _interior_mask(M, window.labels, u.support))


# ---------------------------------------------------------------------------
# probability measures


class ProbabilityMeasure:
    """Finitely supported probability measure on the algebra basis.

    ``mass`` records the total mass before normalization when the measure
    was obtained by normalizing a positive element.
    """

    def __init__(self, weights: Mapping[str, object], mass=1):
        clean = {}
        for lab, w in weights.items():
            w = as_number(w)
            if w < 0:
                raise InvalidMeasure(f"negative weight {w} at {lab}")
            if w != 0:
                clean[lab] = w
        if not clean:
            raise InvalidMeasure("empty measure")
        total = sum(clean.values())
        if all(is_exact(w) for w in clean.values()):
            if total != 1:
                raise InvalidMeasure(f"weights sum to {total}, not 1")
        elif abs(float(total) - 1.0) > 1e-12:
            raise InvalidMeasure(f"weights sum to {float(total)!r}, not 1")
        self.weights = clean
        self.mass = mass

    @property
    def support(self) -> list[str]:
        return sorted_labels(self.weights)

    @property
    def exact(self) -> bool:
        return all(is_exact(w) for w in self.weights.values())

    def __getitem__(self, label):
        return self.weights.get(label, 0)

    def __eq__(self, other) -> bool:
        return isinstance(other, ProbabilityMeasure) and self.weights == other.weights

    def __repr__(self) -> str:
        body = ", ".join(f"{w}:{lab}" for lab, w in ((lab, self.weights[lab]) for lab in self.support))
        return f"ProbabilityMeasure({body})"

    @classmethod
    def delta(cls, label: str) -> "ProbabilityMeasure":
        return cls({label: 1})

    @classmethod
    def parse(cls, text: str) -> "ProbabilityMeasure":
        """Parse ``"1/2:u0, 0.5:u1"``; decimal literals are read as exact rationals."""
        weights: dict[str, Fraction] = {}
        for part in text.split(","):
            if not part.strip():
                continue
            try:
                w, lab = part.split(":")
            except ValueError:
                raise InvalidMeasure(f"expected 'weight:label', got {part.strip()!r}") from None
            lab = lab.strip()
            weights[lab] = weights.get(lab, 0) + Fraction(w.strip())
        return cls(weights)

    def conjugate(self, A) -> "ProbabilityMeasure":
        out: dict[str, object] = {}
        for lab, w in self.weights.items():
            b = A.bar(lab)
            out[b] = out.get(b, 0) + w
        return ProbabilityMeasure(out)

    def symmetrize(self, A) -> "ProbabilityMeasure":
        """``(mu + mu_bar) / 2``; its operator is the real part of the operator of ``mu``."""
        out: dict[str, object] = {}
        half = Fraction(1, 2) if self.exact else 0.5
        for lab, w in self.weights.items():
            for b in (lab, A.bar(lab)):
                out[b] = out.get(b, 0) + w * half
        return ProbabilityMeasure(out)


def build_gamma_mu(M: FusionModule, mu: ProbabilityMeasure, window: ActionWindow, exact: bool | None = None) -> TruncatedOperator:
    """Matrix of ``sum_u mu(u)/d(u) Gamma_u`` on the window.

    Exact (``Fraction``) when every weight and dimension involved is rational;
    ``exact=True`` makes irrational dimensions an error, ``exact=False``
    forces floats.
    """
    A = M.algebra
    for lab in mu.support:
        A.check(lab)
    rational = mu.exact and A.dims_exact(mu.support)
    if exact and not rational:
        raise DimensionNotRational(f"dimensions of {mu.support} in {A.name} are not all rational")
    use_exact = rational if exact is None else (exact and rational)
    coeff = {}
    for lab in mu.support:
        w, d = mu[lab], A.dim(lab)
        coeff[lab] = Fraction(w) / Fraction(d) if use_exact else float(w) / float(d)
    idx = window.index
    entries: dict[tuple[int, int], object] = {}
    for j, a in enumerate(window.labels):
        for v, c in coeff.items():
            for b, n in M.action(v, a).items():
                i = idx.get(b)
                if i is not None:
                    entries[(i, j)] = entries.get((i, j), 0) + c * n
    entries = {k: v for k, v in entries.items() if v != 0}
    return TruncatedOperator(window, entries, mu, use_exact, _interior_mask(M, window.labels, mu.support))


def mu_from_positive_element(A, u, exact: bool | None = None) -> ProbabilityMeasure:
    """``mu_u(v) = c_v d(v) / d(u)``, so that ``Gamma_{mu_u} = Gamma_u / d(u)``."""
    u = A.element(u)
    if not u:
        raise ZeroElement("mu_u needs a nonzero element")
    if any(c < 0 for _, c in u.items()):
        raise NegativeCoefficient(f"{u} has negative coefficients")
    rational = A.dims_exact(u.support)
    if exact and not rational:
        raise DimensionNotRational(f"dimensions of {u.support} are not all rational")
    mass = A.dim_of(u)
    if rational:
        weights = {v: Fraction(c * A.dim(v)) / Fraction(mass) for v, c in u.items()}
    else:
        weights = {v: c * float(A.dim(v)) / float(mass) for v, c in u.items()}
        # absorb rounding so the weights sum to one
        last = u.support[-1]
        weights[last] = 1.0 - math.fsum(w for v, w in weights.items() if v != last)
    return ProbabilityMeasure(weights, mass=mass)


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class NormBound:
    value: float
    iterations: int
    converged: bool
    method: str

    def __float__(self) -> float:
        return self.value


def norm_lower_bound(op, max_iter: int = POWER_MAX_ITER, tol: float = POWER_TOL) -> NormBound:
    """Lower bound for the operator norm by power iteration from a uniform start vector.

    ``op`` is a :class:`TruncatedOperator` or a nonnegative square matrix
    (dense or scipy sparse).  Symmetric matrices are iterated directly, others
    through ``A^T A``.  Every iterate gives ``||A x|| / ||x|| <= ||A||``, so
    the returned value is the best ratio seen; ``converged`` is False when
    ``max_iter`` ran out before the relative change dropped below ``tol``.
    """
    if isinstance(op, TruncatedOperator):
        if not op.is_nonnegative():
            raise ValueError("norm_lower_bound expects a nonnegative matrix")
        mat = op.sparse()
        symmetric = op.is_symmetric()
    else:
        mat = sp.csr_matrix(op)
        if mat.shape[0] != mat.shape[1]:
            raise ValueError("norm_lower_bound expects a square matrix")
        if mat.nnz and mat.data.min() < 0:
            raise ValueError("norm_lower_bound expects a nonnegative matrix")
        symmetric = (mat != mat.T).nnz == 0
    n = mat.shape[0]
    if n == 0:
        return NormBound(0.0, 0, True, "empty")
    method = "direct" if symmetric else "normal"
    matT = None if symmetric else mat.T.tocsr()
    x = np.full(n, 1.0 / math.sqrt(n))
    best = prev = 0.0
    for it in range(1, max_iter + 1):
        y = mat @ x
        est = float(np.sqrt(y @ y))
        best = max(best, est)
        if est == 0.0 or abs(est - prev) <= tol * est:
            return NormBound(best, it, True, method)
        prev = est
        if symmetric:
            x = y / est
        else:
            z = matT @ y
            x = z / np.sqrt(z @ z)
    warnings.warn(f"power iteration stopped after {max_iter} iterations without convergence", stacklevel=2)
    return NormBound(best, max_iter, False, method)


def largest_eigenvalue(op: TruncatedOperator) -> float:
    """Largest algebraic eigenvalue of a symmetric truncated operator (LAPACK / ARPACK)."""
    n = op.shape[0]
    if n <= 600:
        return float(np.linalg.eigvalsh(op.dense())[-1])
    val = eigsh(op.sparse(), k=1, which="LA", tol=1e-13, return_eigenvectors=False)
    return float(val[0])


# ---------------------------------------------------------------------------
# certified upper bounds


class WeightFamily:
    """Positive rational weights on the module basis, given in closed form."""

    name = "weights"
    total = False

    def weight(self, label: str) -> Fraction:
        raise NotImplementedError


class TableWeights(WeightFamily):
    """Explicit weights on a finite basis."""

    def __init__(self, table: Mapping[str, object], name: str = "table"):
        self.table = {lab: Fraction(str(v)) if isinstance(v, float) else Fraction(v) for lab, v in table.items()}
        self.name = name
        self.total = True

    def weight(self, label: str) -> Fraction:
        try:
            return self.table[label]
        except KeyError:
            raise WeightNotPositive(f"no weight given for {label}") from None


class AffineWeights(WeightFamily):
    """``w(label) = slope * k + intercept`` where ``k`` indexes the basis by integers.

    ``lower`` is the least index (``None`` for a basis indexed by all of Z).
    ``translation_invariant`` declares that, past the detected start of the
    recurring row pattern, action rows are translates of each other along
    the index; only families built with knowledge of the rules may claim it.
    """

    def __init__(
        self,
        index: Callable[[str], int],
        label_at: Callable[[int], str],
        slope,
        intercept,
        lower: int | None = 0,
        name: str = "affine",
        translation_invariant: bool = False,
        total: bool = True,
    ):
        self.index = index
        self.label_at = label_at
        self.slope = Fraction(slope)
        self.intercept = Fraction(intercept)
        self.lower = lower
        self.name = name
        self.translation_invariant = translation_invariant
        self.total = total

    def at(self, k: int) -> Fraction:
        return self.slope * k + self.intercept

    def weight(self, label: str) -> Fraction:
        return self.at(self.index(label))


@dataclass
class CertificateResult:
    certified: bool
    bound: Fraction
    family: str
    rows_checked: int
    tail_from: tuple[int | None, int | None] = (None, None)
    log: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "bound": str(self.bound),
            "bound_float": float(self.bound),
            "family": self.family,
            "rows_checked": self.rows_checked,
            "tail_from": list(self.tail_from),
            "log": list(self.log),
        }


def _check_symmetric(M: FusionModule, u_sym) -> RingElement:
    u = M.algebra.element(u_sym)
    if not u or any(c < 0 for _, c in u.items()):
        raise NotSymmetricElement(f"{u} must be nonzero with nonnegative coefficients")
    if M.algebra.conjugate(u) != u:
        raise NotSymmetricElement(f"{u} is not self-conjugate; pass u + conjugate(u)")
    return u


def _row(M: FusionModule, u: RingElement, alpha: str) -> dict[str, int]:
    return dict(M.act(u, alpha).items())


def _stable_run(stencils: list[tuple], from_end: bool) -> int:
    """Length of the run of identical stencils at one end of the list."""
    seq = stencils[::-1] if from_end else stencils
    run = 1
    while run < len(seq) and seq[run] == seq[0]:
        run += 1
    return run


def _tail_ok(stencil: tuple, C: Fraction, fam: AffineWeights, k_edge: int, direction: int) -> tuple[bool, str]:
    """Symbolic check of ``sum_o m_o w(k+o) <= C w(k)`` for all ``k`` beyond ``k_edge``."""
    a, b = fam.slope, fam.intercept
    total = sum(m for _, m in stencil)
    slope = a * (total - C)
    const = sum(m * (a * o + b) for o, m in stencil) - C * b
    at_edge = slope * k_edge + const
    grows = slope * direction > 0
    msg = f"tail k{'>=' if direction > 0 else '<='}{k_edge}: s(k) = {slope}*k + {const}, s(edge) = {at_edge}"
    return (at_edge <= 0 and not grows), msg


def _verification_rows(M: FusionModule, fam: WeightFamily, depth: int) -> list[str]:
    if M.is_finite:
        return list(M.basis)
    if not isinstance(fam, AffineWeights):
        raise WeightNotPositive(f"weights {fam.name} cannot cover the infinite basis of {M.name}")
    lo = fam.lower if fam.lower is not None else -depth
    return [fam.label_at(k) for k in range(lo, depth + 1)]


def certify_upper_bound(
    M: FusionModule,
    u_sym,
    C,
    weights: WeightFamily,
    depth: int = 64,
    min_stable_rows: int = 8,
) -> CertificateResult:
    """Prove ``||Gamma_{u_sym}|| <= C`` from ``Gamma^T w <= C w`` with positive ``w``.

    Rows are verified exactly on a window of ``depth`` indices; for an infinite
    basis the recurring row pattern at the window edge is then verified for the
    whole tail in closed form.  Raises :class:`InequalityFails` with the first
    failing row as witness.
    """
    u = _check_symmetric(M, u_sym)
    C = Fraction(C) if not isinstance(C, float) else Fraction(str(C))
    if not weights.total:
        raise WeightNotPositive(f"weight family {weights.name} is not declared total on the module basis")
    rows = _verification_rows(M, weights, depth)
    log = [f"element {u}, C = {C}, family {weights.name}, {len(rows)} rows"]
    stencils = []
    for alpha in rows:
        w_a = weights.weight(alpha)
        if w_a <= 0:
            raise WeightNotPositive(f"w({alpha}) = {w_a}")
        out = _row(M, u, alpha)
        lhs = Fraction(0)
        for beta, n in out.items():
            w_b = weights.weight(beta)
            if w_b <= 0:
                raise WeightNotPositive(f"w({beta}) = {w_b}")
            lhs += n * w_b
        rhs = C * w_a
        if lhs > rhs:
            raise InequalityFails(alpha, lhs, rhs, f"row {alpha}: sum c w = {lhs} > C w = {rhs}")
        if isinstance(weights, AffineWeights):
            if weights.label_at(weights.index(alpha)) != alpha:
                raise WeightNotPositive(f"index of {alpha} does not round-trip")
            k = weights.index(alpha)
            stencils.append(tuple(sorted((weights.index(beta) - k, n) for beta, n in out.items())))
    log.append(f"{len(rows)} rows verified exactly")

    tails: list[int | None] = [None, None]
    if not M.is_finite:
        fam = weights
        if not fam.translation_invariant:
            raise WeightNotPositive(f"family {fam.name} does not declare a translation-invariant tail")
        ends = [(+1, True)] if fam.lower is not None else [(+1, True), (-1, False)]
        for direction, from_end in ends:
            run = _stable_run(stencils, from_end)
            if run < min_stable_rows:
                raise InequalityFails(rows[-1] if from_end else rows[0], None, None, "no recurring row pattern at the window edge")
            edge_pos = len(rows) - run if from_end else run - 1
            k_edge = fam.index(rows[edge_pos])
            stencil = stencils[edge_pos]
            if direction > 0 and fam.slope < 0:
                raise WeightNotPositive("decreasing affine weights turn negative on the tail")
            if direction < 0 and fam.slope != 0:
                raise WeightNotPositive("two-sided tails need constant weights")
            ok, msg = _tail_ok(stencil, C, fam, k_edge, direction)
            log.append(msg)
            if not ok:
                raise InequalityFails(rows[edge_pos], None, None, f"tail inequality fails: {msg}")
            tails[0 if direction > 0 else 1] = k_edge
    log.append(f"certified ||Gamma_{{{u}}}|| <= {C}")
    return CertificateResult(True, C, weights.name, len(rows), tuple(tails), log)


def minimal_certificate_bound(M: FusionModule, u_sym, weights: WeightFamily, depth: int = 64) -> Fraction:
    """Smallest ``C`` for which ``weights`` can certify ``u_sym`` (rows plus tail limit)."""
    u = _check_symmetric(M, u_sym)
    rows = _verification_rows(M, weights, depth)
    best = Fraction(0)
    for alpha in rows:
        out = _row(M, u, alpha)
        lhs = sum((n * weights.weight(beta) for beta, n in out.items()), Fraction(0))
        best = max(best, lhs / weights.weight(alpha))
    if not M.is_finite and isinstance(weights, AffineWeights) and weights.slope > 0:
        # row ratios tend to the row sum along an affine tail
        last = _row(M, u, rows[-1])
        best = max(best, Fraction(sum(last.values())))
    return best


# ---------------------------------------------------------------------------
# verdicts


class Verdict(str, enum.Enum):
    AMENABLE_NUMERIC = "AMENABLE_NUMERIC"
    NOT_AMENABLE_CERTIFIED = "NOT_AMENABLE_CERTIFIED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class TraceEntry:
    radius: int
    window_size: int
    bound: float
    iterations: int
    converged: bool


@dataclass
class AmenabilityReport:
    verdict: Verdict
    module: str
    test: str
    symmetrized: str
    target: float
    tol: float
    lower_bounds: list[tuple[int, float]]
    trace: list[TraceEntry]
    upper_certificate: CertificateResult | None = None
    caveats: list[str] = field(default_factory=list)
    consistent: bool = True

    @property
    def final_bound(self) -> float:
        return self.lower_bounds[-1][1] if self.lower_bounds else 0.0

    @property
    def gap(self) -> float | None:
        if self.upper_certificate is None:
            return None
        return self.target - float(self.upper_certificate.bound)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "module": self.module,
            "test": self.test,
            "symmetrized": self.symmetrized,
            "target": self.target,
            "tol": self.tol,
            "lower_bounds": [[r, b] for r, b in self.lower_bounds],
            "trace": [vars(t) for t in self.trace],
            "upper_certificate": None if self.upper_certificate is None else self.upper_certificate.to_dict(),
            "gap": self.gap,
            "caveats": list(self.caveats),
            "consistent": self.consistent,
            "power_iteration": {"start": START_VECTOR},
        }


def _generates(A, support: Sequence[str], radius: int = 8) -> bool:
    try:
        ball = set(A.ball(radius, support))
    except Exception:
        return False
    return all(g in ball for g in A.generators)


def amenability_test(
    M: FusionModule,
    test,
    schedule: Sequence[int],
    tol: float = 1e-3,
    certificate: WeightFamily | tuple[WeightFamily, object] | None = None,
    max_iter: int = POWER_MAX_ITER,
    power_tol: float = POWER_TOL,
    eps_dim: float = DEFAULT_EPS_DIM,
    max_ball: int | None = None,
) -> AmenabilityReport:
    """Per-element amenability verdict for a positive element or a probability measure.

    The test is symmetrized first (``u + u_bar``, or ``(mu + mu_bar)/2``) and
    compared against its dimension (or 1 for measures) using lower bounds on a
    schedule of growing windows, plus an optional certified upper bound.
    """
    A = M.algebra
    if not schedule:
        raise ValueError("empty radius schedule")
    schedule = sorted(set(int(r) for r in schedule))
    caveats = []
    if isinstance(test, ProbabilityMeasure):
        sym = test.symmetrize(A)
        target = 1.0
        support = sym.support
        build = lambda w: build_gamma_mu(M, sym, w)  # noqa: E731
        test_text, sym_text = repr(test), repr(sym)
        elem = None
    else:
        u = A.element(test)
        if not u:
            raise ZeroElement("test element is zero")
        if any(c < 0 for _, c in u.items()):
            raise NegativeCoefficient(f"{u} has negative coefficients")
        elem = A.symmetrize(u)
        target = float(A.dim_of(elem))
        support = elem.support
        build = lambda w: build_gamma(M, elem, w)  # noqa: E731
        test_text, sym_text = str(u), str(elem)
    if not _generates(A, support):
        msg = f"test support {support} does not generate {A.name} within radius 8"
        warnings.warn(msg, stacklevel=2)
        caveats.append(msg)
    caveats.append("AMENABLE_NUMERIC is numerical evidence for the tested element only, not a proof for all of R+")

    trace, lower = [], []
    running = 0.0
    consistent = True
    for window in nested_windows(M, support, schedule, max_ball=max_ball):
        r = window.radius
        nb = norm_lower_bound(build(window), max_iter=max_iter, tol=power_tol)
        trace.append(TraceEntry(r, len(window), nb.value, nb.iterations, nb.converged))
        running = max(running, nb.value)
        lower.append((r, running))
        if nb.value > target * (1 + eps_dim) + eps_dim:
            consistent = False
            caveats.append(f"lower bound {nb.value} exceeds ceiling {target} at radius {r}")

    cert = None
    if certificate is not None:
        if elem is None:
            raise ValueError("certificates apply to ring elements, not measures")
        fam, C = certificate if isinstance(certificate, tuple) else (certificate, None)
        if C is None:
            C = minimal_certificate_bound(M, elem, fam)
        try:
            cert = certify_upper_bound(M, elem, C, fam)
        except InequalityFails as exc:
            cert = CertificateResult(False, Fraction(C), fam.name, 0, (None, None), [str(exc)])
        if cert.certified and any(b > float(cert.bound) * (1 + 1e-12) for _, b in lower):
            consistent = False
            caveats.append("certified bound is below a computed lower bound")

    if cert is not None and cert.certified and float(cert.bound) < target - tol:
        verdict = Verdict.NOT_AMENABLE_CERTIFIED
    elif running >= target - tol:
        verdict = Verdict.AMENABLE_NUMERIC
    else:
        verdict = Verdict.INCONCLUSIVE
    return AmenabilityReport(
        verdict=verdict,
        module=M.name,
        test=test_text,
        symmetrized=sym_text,
        target=target,
        tol=tol,
        lower_bounds=lower,
        trace=trace,
        upper_certificate=cert,
        caveats=caveats,
        consistent=consistent,
    )


def module_verdict(reports: Iterable[AmenabilityReport]) -> Verdict:
    """Combine per-element verdicts over a declared generating test set."""
    verdicts = [r.verdict for r in reports]
    if any(v is Verdict.NOT_AMENABLE_CERTIFIED for v in verdicts):
        return Verdict.NOT_AMENABLE_CERTIFIED
    if verdicts and all(v is Verdict.AMENABLE_NUMERIC for v in verdicts):
        return Verdict.AMENABLE_NUMERIC
    return Verdict.INCONCLUSIVE


def kesten_eigenvalue(M: FusionModule, u: str, window: ActionWindow) -> float:
    """Largest eigenvalue of the real part ``(Gamma_u + Gamma_u^*)/2`` on the window."""
    A = M.algebra
    op = build_gamma(M, A.symmetrize(u), window)
    return 0.5 * largest_eigenvalue(op)


def kesten_norm_check(M: FusionModule, u: str, window: ActionWindow, tol: float) -> bool:
    """Does the spectrum of the real part of ``Gamma_u`` reach ``d(u)`` up to ``tol``?"""
    return kesten_eigenvalue(M, u, window) >= float(M.algebra.dim(u)) - tol


__all__ = [
    "ActionWindow",
    "AffineWeights",
    "AmenabilityReport",
    "CertificateResult",
    "NormBound",
    "ProbabilityMeasure",
    "TableWeights",
    "TruncatedOperator",
    "Verdict",
    "WeightFamily",
    "amenability_test",
    "build_gamma",
    "build_gamma_mu",
    "certify_upper_bound",
    "enumerate_ball",
    "kesten_eigenvalue",
    "kesten_norm_check",
    "largest_eigenvalue",
    "minimal_certificate_bound",
    "module_verdict",
    "mu_from_positive_element",
    "nested_windows",
    "norm_lower_bound",
]
