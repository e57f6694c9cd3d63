"""Labels and finitely supported linear combinations of labels.

Basis labels are plain strings.  Their total order is the "natural" one:
a trailing signed integer is compared numerically, so ``u2 < u10`` and
``e-1 < e0 < e1``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

_TRAILING_INT = re.compile(r"^(.*?)(-?\d+)$")
_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?|\d*\.\d+)\s*\*?\s*)?([A-Za-z_]\w*?(?:-\d+)?)(?![\w])\s*"
)


def label_key(label: str) -> tuple:
    m = _TRAILING_INT.match(label)
    if m and m.group(1):
        return (m.group(1), int(m.group(2)), label)
    return (label, 0, label)


def sorted_labels(labels: Iterable[str]) -> list[str]:
    return sorted(labels, key=label_key)


def as_number(value):
    """Coerce ``value`` to ``int``/``Fraction`` when it is exactly rational, else ``float``."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return value
    if isinstance(value, Rational):
        f = Fraction(value)
        return f.numerator if f.denominator == 1 else f
    if isinstance(value, str):
        f = Fraction(value.strip())
        return f.numerator if f.denominator == 1 else f
    return float(value)


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction))


class _Combination:
    """Immutable sparse map ``label -> coefficient`` with zero entries dropped."""

    __slots__ = ("_coeffs", "_hash")
    _coerce = staticmethod(lambda c: c)

    def __init__(self, coeffs: Mapping[str, object] | Iterable[str] | str | None = None):
        if coeffs is None:
            items = {}
        elif isinstance(coeffs, str):
            items = {coeffs: 1}
        elif isinstance(coeffs, Mapping):
            items = coeffs
        else:
            items = {}
            for lab in coeffs:
                items[lab] = items.get(lab, 0) + 1
        clean = {}
        for lab, c in items.items():
            c = self._coerce(c)
            if c != 0:
                clean[lab] = c
        self._coeffs = clean
        self._hash = None

    @classmethod
    def basis(cls, label: str):
        return cls({label: 1})

    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    @property
    def support(self) -> list[str]:
        return sorted_labels(self._coeffs)

    def items(self):
        return ((lab, self._coeffs[lab]) for lab in self.support)

    def coeff(self, label: str):
        return self._coeffs.get(label, 0)

    def __getitem__(self, label: str):
        return self._coeffs.get(label, 0)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __iter__(self):
        return iter(self.support)

    def is_nonnegative(self) -> bool:
        return all(c > 0 for c in self._coeffs.values())

    def __eq__(self, other) -> bool:
        if isinstance(other, _Combination):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def __add__(self, other):
        if not isinstance(other, _Combination):
            return NotImplemented
        out = dict(self._coeffs)
        for lab, c in other._coeffs.items():
            out[lab] = out.get(lab, 0) + c
        return type(self)(out)

    def __neg__(self):
        return type(self)({lab: -c for lab, c in self._coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, _Combination):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, _Combination):
            return NotImplemented
        return type(self)({lab: c * scalar for lab, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for lab, c in self.items():
            if c == 1:
                term = lab
            elif c == -1:
                term = f"-{lab}"
            else:
                term = f"{c}*{lab}"
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ")

    @classmethod
    def parse(cls, text: str):
        """Parse ``"2*u1 + u3 - u0"`` style input (labels may end in ``-<int>``)."""
        pos, coeffs = 0, {}
        src = text.strip()
        if not src:
            raise ValueError("empty element")
        while pos < len(src):
            m = _TERM.match(src, pos)
            if not m or (pos > 0 and not m.group(1)):
                raise ValueError(f"cannot parse {text!r} at position {pos}")
            c = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            if m.group(1) == "-":
                c = -c
            coeffs[m.group(3)] = coeffs.get(m.group(3), 0) + c
            pos = m.end()
        return cls(coeffs)


class RingElement(_Combination):
    """Integer combination of fusion-algebra basis labels."""

    __slots__ = ()

    @staticmethod
    def _coerce(c):
        if isinstance(c, bool):
            raise TypeError("boolean coefficient")
        if isinstance(c, int):
            return c
        f = Fraction(c)
        if f.denominator != 1:
            raise ValueError(f"ring elements have integer coefficients, got {c}")
        return f.numerator


class ModuleElement(_Combination):
    """Rational combination of fusion-module basis labels."""

    __slots__ = ()

    @staticmethod
    def _coerce(c):
        if isinstance(c, bool):
            raise TypeError("boolean coefficient")
        if isinstance(c, int):
            return c
        f = Fraction(c)
        return f.numerator if f.denominator == 1 else f
