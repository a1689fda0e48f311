"""Braid group operators T_i = T''_{i,1} on integrable modules."""

from __future__ import annotations

from typing import List, Sequence, Tuple

from ..linalg import SparseMatrix, Vec, axpy
from ..qfield import ONE, qpow
from .module import WeightModuleRealization, divided_power_chain


def _sign(b: int):
    return -ONE if b % 2 else ONE


def _column(real: WeightModuleRealization, i: int, k: int, inverse: bool) -> Vec:
    d = real.q_i(i)
    m = real.h_value(i, k)
    # forward:  sum over -a + b - c = m of (-1)^b q_i^(b - ac) E^(a) F^(b) E^(c)
    # inverse:  sum over  a - b + c = m of (-1)^b q_i^(ac - b) F^(a) E^(b) F^(c)
    # so that T E_i T^-1 = -F_i K_i and T F_i T^-1 = -K_i^-1 E_i
    X, Y = (real.F[i], real.E[i]) if inverse else (real.E[i], real.F[i])
    out: Vec = {}
    for c, xc in enumerate(divided_power_chain(X, d, {k: ONE})):
        for b, yb in enumerate(divided_power_chain(Y, d, xc)):
            a = (m + b - c) if inverse else (b - c - m)
            if a < 0:
                continue
            chain = divided_power_chain(X, d, yb, limit=a)
            if len(chain) <= a:
                continue
            e = (a * c - b) if inverse else (b - a * c)
            axpy(out, _sign(b) * qpow(d * e), chain[a])
    return out


def braid_matrix(real: WeightModuleRealization, i: int, inverse: bool = False) -> SparseMatrix:
    key = ("braid", i, inverse)
    if key not in real.cache:
        cols = [_column(real, i, k, inverse) for k in range(real.dim)]
        real.cache[key] = SparseMatrix(real.dim, real.dim, cols)
    return real.cache[key]


def braid(real: WeightModuleRealization, i: int, v: Vec, inverse: bool = False) -> Vec:
    return braid_matrix(real, i, inverse).apply(v)


def word_matrix(real: WeightModuleRealization, word: Sequence[int], inverse: bool = False) -> SparseMatrix:
    """T_w = T_{i1} ... T_{ir} for w = (i1, ..., ir), or its inverse."""
    word = tuple(word)
    key = ("braid-word", word, inverse)
    if key in real.cache:
        return real.cache[key]
    out = SparseMatrix.identity(real.dim)
    if inverse:
        for i in word:
            out = out @ braid_matrix(real, i, True)
    else:
        for i in reversed(word):
            out = out @ braid_matrix(real, i, False)
    real.cache[key] = out
    return out


def braid_word(real: WeightModuleRealization, word: Sequence[int], v: Vec, inverse: bool = False) -> Vec:
    if inverse:
        for i in tuple(word):
            v = braid(real, i, v, True)
    else:
        for i in reversed(tuple(word)):
            v = braid(real, i, v, False)
    return v


def conjugated_raising_matrix(real: WeightModuleRealization, word: Sequence[int], j: int) -> SparseMatrix:
    """Matrix of T_w(E_j) = T_w E_j T_w^-1."""
    word = tuple(word)
    key = ("TwE", word, j)
    if key not in real.cache:
        if not word:
            real.cache[key] = real.E[j]
        else:
            real.cache[key] = word_matrix(real, word) @ real.E[j] @ word_matrix(real, word, True)
    return real.cache[key]


def conjugated_raising(real: WeightModuleRealization, word: Sequence[int], j: int, v: Vec) -> Vec:
    return braid_word(real, word, real.E[j].apply(braid_word(real, word, v, inverse=True)))


def braid_generators(real: WeightModuleRealization) -> List[Tuple[SparseMatrix, SparseMatrix]]:
    return [(braid_matrix(real, i), braid_matrix(real, i, True)) for i in range(real.n)]
