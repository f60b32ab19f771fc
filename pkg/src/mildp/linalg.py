"""Dense linear algebra over F_p.

Matrices are numpy arrays of canonical residues.  Results are stored as
``uint8`` (so p < 256); elimination runs in ``int32`` working storage, which is
what the memory budget is charged against.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, ResourceLimitError

MAX_P = 251
DEFAULT_MEMORY_BUDGET = int(os.environ.get("MILD_MEMORY_MB", "512")) * 2**20


def check_budget(rows: int, cols: int, budget: int | None = None) -> None:
    budget = DEFAULT_MEMORY_BUDGET if budget is None else budget
    need = rows * cols * 4
    if need > budget:
        raise ResourceLimitError(
            f"{rows}x{cols} elimination needs {need / 2**20:.0f} MiB, budget is {budget / 2**20:.0f} MiB"
        )


def _as_work(mat, p: int) -> np.ndarray:
    if p > MAX_P:
        raise InvalidInputError(f"p = {p} exceeds the 8-bit storage limit {MAX_P}")
    a = np.array(mat, dtype=np.int64)
    if a.ndim != 2:
        a = a.reshape(len(a), -1) if a.size else np.zeros((len(a), 0), dtype=np.int64)
    return np.mod(a, p).astype(np.int32)


def rref(mat, p: int, budget: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p with zero rows dropped, plus pivot columns."""
    a = _as_work(mat, p)
    rows, cols = a.shape
    check_budget(rows, cols, budget)
    inv = [0] + [pow(x, -1, p) for x in range(1, p)]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k], c:] = a[[k, r], c:]
        pv = int(a[r, c])
        if pv != 1:
            a[r, c:] = a[r, c:] * inv[pv] % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[np.ix_(hit, np.arange(c, cols))] = (
                a[np.ix_(hit, np.arange(c, cols))] - np.outer(col[hit], a[r, c:])
            ) % p
        pivots.append(c)
        r += 1
    return a[:r].astype(np.uint8), pivots


def rank(mat, p: int, budget: int | None = None) -> int:
    a = np.asarray(mat)
    if a.size == 0:
        return 0
    return len(rref(a, p, budget)[1])


def det(mat: Sequence[Sequence[int]], p: int) -> int:
    """Determinant over F_p of a small square matrix, by elimination on Python ints."""
    a = [[int(x) % p for x in row] for row in mat]
    n = len(a)
    if any(len(row) != n for row in a):
        raise InvalidInputError("determinant needs a square matrix")
    d = 1
    for c in range(n):
        k = next((i for i in range(c, n) if a[i][c]), None)
        if k is None:
            return 0
        if k != c:
            a[c], a[k] = a[k], a[c]
            d = -d
        d = d * a[c][c] % p
        inv = pow(a[c][c], -1, p)
        for i in range(c + 1, n):
            f = a[i][c] * inv % p
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[c])]
    return d % p
