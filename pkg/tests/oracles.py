"""Independent oracles: characters as Laurent polynomials and closed-form spectra.

Nothing here imports fuselab.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np


def su2_character(n: int) -> Counter:
    """Weights of the (n+1)-dimensional irreducible representation: x^n, x^(n-2), ..., x^-n."""
    return Counter({n - 2 * j: 1 for j in range(n + 1)})


def multiply_characters(a: Counter, b: Counter) -> Counter:
    out = Counter()
    for p, cp in a.items():
        for q, cq in b.items():
            out[p + q] += cp * cq
    return +out


def decompose_character(ch: Counter) -> dict[int, int]:
    """Peel off highest weights to write a character as a sum of irreducibles."""
    ch = Counter(ch)
    out: dict[int, int] = {}
    while +ch:
        top = max(w for w, c in ch.items() if c)
        mult = ch[top]
        out[top] = out.get(top, 0) + mult
        for w, c in su2_character(top).items():
            ch[w] -= mult * c
        ch = +ch
    return out


def su2_product(m: int, n: int) -> dict[str, int]:
    return {f"u{k}": c for k, c in decompose_character(multiply_characters(su2_character(m), su2_character(n))).items()}


def torus_action(n: int, k: int) -> dict[str, int]:
    """Restriction of u_n to the torus, shifted by weight k."""
    ch = multiply_characters(su2_character(n), Counter({k: 1}))
    return {f"e{w}": c for w, c in ch.items()}


def chebyshev_dims(N, count: int) -> list:
    dims = [1, N]
    while len(dims) < count:
        dims.append(N * dims[-1] - dims[-2])
    return dims[:count]


def path_norm(n: int) -> float:
    """Largest eigenvalue of the n-vertex path graph."""
    return 2 * math.cos(math.pi / (n + 1))


def path_adjacency(n: int) -> np.ndarray:
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = 1
    return a


def spectral_norm(mat: np.ndarray) -> float:
    """Largest singular value by dense SVD."""
    if mat.size == 0:
        return 0.0
    return float(np.linalg.norm(mat, 2))
