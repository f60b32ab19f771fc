"""Small finite fields GF(p^k) with log/antilog tables, for randomized rank tests."""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .arith import smallest_primitive_root
from .errors import InvalidInputError


class GF:
    """GF(p^k), elements encoded as integers 0..q-1 (base-p digits, low degree first)."""

    def __init__(self, p: int, k: int):
        if k < 1:
            raise InvalidInputError("extension degree must be positive")
        self.p, self.k, self.q = p, k, p**k
        if self.q > 1 << 20:
            raise InvalidInputError(f"GF({p}^{k}) is larger than the table-driven implementation supports")
        self.digits = np.array(
            [[(a // p**i) % p for i in range(k)] for a in range(self.q)], dtype=np.int64
        )
        self._weights = p ** np.arange(k, dtype=np.int64)
        self.modulus = _primitive_polynomial(p, k)
        self.exp, self.log = self._tables()

    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        p, k, q = self.p, self.k, self.q
        exp = np.zeros(2 * q, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        cur = [1] + [0] * (k - 1)
        for e in range(q - 1):
            code = sum(c * p**i for i, c in enumerate(cur))
            exp[e] = code
            log[code] = e
            # multiply by x, reduce by the monic modulus
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(c - top * self.modulus[i]) % p for i, c in enumerate(cur)]
        exp[q - 1 : 2 * (q - 1)] = exp[: q - 1]
        return exp, log

    def encode(self, digits: np.ndarray) -> np.ndarray:
        return (np.mod(digits, self.p) * self._weights).sum(axis=-1)

    def add(self, a, b):
        return self.encode(self.digits[a] + self.digits[b])

    def sub(self, a, b):
        return self.encode(self.digits[a] - self.digits[b])

    def mul(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        out = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.exp[(-self.log[a]) % (self.q - 1)])

    def from_prime(self, c: int) -> int:
        return c % self.p

    def rank(self, mat: np.ndarray) -> int:
        a = np.array(mat, dtype=np.int64)
        rows, cols = a.shape
        r = 0
        for c in range(cols):
            nz = np.flatnonzero(a[r:, c])
            if nz.size == 0:
                continue
            k = r + int(nz[0])
            a[[r, k]] = a[[k, r]]
            a[r] = self.mul(a[r], self.inv(int(a[r, c])))
            below = np.arange(r + 1, rows)
            hit = below[a[below, c] != 0]
            for i in hit:
                a[i] = self.sub(a[i], self.mul(a[r], a[i, c]))
            r += 1
            if r == rows:
                break
        return r


@lru_cache(maxsize=None)
def _primitive_polynomial(p: int, k: int) -> tuple[int, ...]:
    """Low coefficients c_0..c_{k-1} of a monic primitive polynomial of degree k over F_p."""
    q = p**k
    if k == 1:
        # x - g for a primitive root g: then x acts as g
        return ((-smallest_primitive_root(p)) % p,)
    for low in product(range(p), repeat=k):
        if low[0] == 0:
            continue
        cur = [1] + [0] * (k - 1)
        order = 0
        while True:
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(c - top * low[i]) % p for i, c in enumerate(cur)]
            order += 1
            if cur == [1] + [0] * (k - 1):
                break
            if order > q:
                break
        if order == q - 1:
            return tuple(low)
    raise AssertionError(f"no primitive polynomial of degree {k} over F_{p}")


def field_for(p: int, at_least: int) -> GF:
    """Smallest GF(p^k) with more than ``at_least`` elements."""
    k = 1
    while p**k <= at_least:
        k += 1
    return GF(p, k)
