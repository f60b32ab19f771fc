"""Prime moduli arithmetic: primality, primitive roots, discrete logs of order p,
and the matrix of linking numbers of a set of primes q_i = 1 mod p.

All scalars of F_p are stored as canonical representatives in ``range(p)``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import InvalidInputError

# Deterministic for every n < 3.3 * 10**24, which covers 64-bit inputs.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin test for n < 2**64 (and well beyond)."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, seed: int) -> int:
    rng = random.Random(seed)
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g


@lru_cache(maxsize=4096)
def prime_factors(n: int) -> tuple[int, ...]:
    """Distinct prime factors of n >= 1, ascending."""
    if n < 1:
        raise InvalidInputError(f"cannot factor {n}")
    found: set[int] = set()
    for small in range(2, 1000):
        if n % small == 0:
            found.add(small)
            while n % small == 0:
                n //= small
    stack = [n] if n > 1 else []
    while stack:
        k = stack.pop()
        if is_prime(k):
            found.add(k)
            continue
        seed = 0
        d = k
        while d in (1, k):
            d = _pollard_brent(k, seed)
            seed += 1
        stack.extend((d, k // d))
    return tuple(sorted(found))


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def mobius(n: int) -> int:
    if n < 1:
        raise InvalidInputError(f"mobius({n}) undefined")
    result = 1
    k = n
    for r in prime_factors(n):
        k //= r
        if k % r == 0:
            return 0
        result = -result
    return result


def _require_prime(q: int) -> None:
    if not is_prime(q):
        raise InvalidInputError(f"{q} not prime")


def multiplicative_order(g: int, q: int) -> int:
    """Order of g in (Z/qZ)^*, q prime."""
    _require_prime(q)
    if g % q == 0:
        raise InvalidInputError(f"{g} is not a unit mod {q}")
    order = q - 1
    for r in prime_factors(q - 1):
        while order % r == 0 and pow(g, order // r, q) == 1:
            order //= r
    return order


def is_primitive_root(g: int, q: int) -> bool:
    """True iff g generates (Z/qZ)^*."""
    _require_prime(q)
    if not 1 <= g < q:
        raise InvalidInputError(f"residue {g} outside [1, {q})")
    if q == 2:
        return g == 1
    return all(pow(g, (q - 1) // r, q) != 1 for r in prime_factors(q - 1))


@lru_cache(maxsize=4096)
def smallest_primitive_root(q: int) -> int:
    _require_prime(q)
    if q == 2:
        raise InvalidInputError("q must be an odd prime")
    g = 2
    while not is_primitive_root(g, q):
        g += 1
    return g


def random_primitive_root(q: int, rng: random.Random) -> int:
    """Uniformly random primitive root mod q (rejection sampling)."""
    _require_prime(q)
    while True:
        g = rng.randrange(2, q)
        if is_primitive_root(g, q):
            return g


def dlog_small_order(base: int, target: int, modulus: int, order: int) -> int:
    """The t in range(order) with base**t = target mod modulus, by exhaustive scan.

    ``base`` must have multiplicative order exactly ``order``.  Raises if target
    is not in the subgroup generated by base.
    """
    acc = 1
    target %= modulus
    for t in range(order):
        if acc == target:
            return t
        acc = acc * base % modulus
    raise InvalidInputError(f"{target} is not a power of {base} mod {modulus}")


@dataclass(frozen=True)
class TamePrime:
    """A prime q with q = 1 mod p for an odd prime p."""

    q: int
    p: int

    def __post_init__(self) -> None:
        _require_prime(self.q)
        if self.p < 3 or not is_prime(self.p):
            raise InvalidInputError(f"p = {self.p} must be an odd prime")
        if self.q == self.p:
            raise InvalidInputError(f"q must differ from p = {self.p}")
        if (self.q - 1) % self.p:
            raise InvalidInputError(f"{self.q} ≢ 1 mod {self.p}")


def linking_number(qi: TamePrime, qj: TamePrime, gj: int) -> int:
    """The l in F_p with q_i = g_j^(-l) mod q_j, seen in the order-p quotient."""
    if qi.p != qj.p:
        raise InvalidInputError("primes belong to different p")
    p, q = qi.p, qj.q
    if qi.q % q == 0:
        raise InvalidInputError(f"{qi.q} is divisible by {q}")
    if not is_primitive_root(gj % q, q):
        raise InvalidInputError(f"{gj} is not a primitive root mod {q}")
    k = (q - 1) // p
    a = pow(qi.q, k, q)
    b = pow(gj, k, q)
    return -dlog_small_order(b, a, q, p) % p


@dataclass(frozen=True)
class LinkingMatrix:
    """Off-diagonal linking numbers l_ij over F_p; the diagonal is ``None``.

    ``entries[i][j]`` is 0-based; :meth:`ell` takes the 1-based labels used in
    the formulas.  ``primes`` and ``roots`` record where the numbers came from
    and may be empty for matrices entered directly.
    """

    p: int
    entries: tuple[tuple[Optional[int], ...], ...]
    primes: tuple[int, ...] = ()
    roots: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        m = len(self.entries)
        rows = []
        for i, row in enumerate(self.entries):
            if len(row) != m:
                raise InvalidInputError("linking matrix must be square")
            clean = []
            for j, v in enumerate(row):
                if i == j:
                    if v not in (None, 0):
                        raise InvalidInputError("linking matrix diagonal must be empty")
                    clean.append(None)
                else:
                    clean.append(int(v) % self.p)
            rows.append(tuple(clean))
        object.__setattr__(self, "entries", tuple(rows))
        if self.primes and len(self.primes) != m:
            raise InvalidInputError("provenance length does not match matrix size")

    @classmethod
    def from_rows(cls, p: int, rows: Sequence[Sequence[Optional[int]]]) -> "LinkingMatrix":
        return cls(p, tuple(tuple(r) for r in rows))

    @property
    def size(self) -> int:
        return len(self.entries)

    def ell(self, i: int, j: int) -> int:
        """l_ij with 1-based labels, indices taken cyclically mod size."""
        m = self.size
        return self.entries[(i - 1) % m][(j - 1) % m]

    def permuted(self, order: Sequence[int]) -> "LinkingMatrix":
        """Relabel so that new index k is old index ``order[k]`` (0-based)."""
        if sorted(order) != list(range(self.size)):
            raise InvalidInputError(f"{order!r} is not a permutation")
        rows = tuple(tuple(self.entries[a][b] for b in order) for a in order)
        primes = tuple(self.primes[a] for a in order) if self.primes else ()
        roots = tuple(self.roots[a] for a in order) if self.roots else ()
        return LinkingMatrix(self.p, rows, primes, roots)

    def column_scaled(self, scalars: Sequence[int]) -> "LinkingMatrix":
        rows = tuple(
            tuple(None if v is None else v * scalars[j] % self.p for j, v in enumerate(row))
            for row in self.entries
        )
        return LinkingMatrix(self.p, rows, self.primes, self.roots)

    def to_rows(self) -> list[list[Optional[int]]]:
        return [list(r) for r in self.entries]


def linking_matrix(
    p: int, primes: Iterable[int | TamePrime], roots: Optional[Sequence[int]] = None
) -> LinkingMatrix:
    """All l_ij for an ordered list of primes; canonical roots when ``roots`` is None."""
    tame = [q if isinstance(q, TamePrime) else TamePrime(int(q), p) for q in primes]
    if any(t.p != p for t in tame):
        raise InvalidInputError("primes belong to different p")
    qs = [t.q for t in tame]
    if len(set(qs)) != len(qs):
        raise InvalidInputError("primes must be distinct")
    if roots is None:
        gs = [smallest_primitive_root(q) for q in qs]
    else:
        if len(roots) != len(qs):
            raise InvalidInputError("one primitive root per prime is required")
        gs = [int(g) % q for g, q in zip(roots, qs)]
    rows = [
        [None if i == j else linking_number(tame[i], tame[j], gs[j]) for j in range(len(qs))]
        for i in range(len(qs))
    ]
    return LinkingMatrix(p, tuple(tuple(r) for r in rows), tuple(qs), tuple(gs))


def column_scale_equivalent(l1: LinkingMatrix, l2: LinkingMatrix) -> bool:
    """True iff some nonzero c_j in F_p give l2_ij = c_j * l1_ij for all i != j."""
    if l1.p != l2.p or l1.size != l2.size:
        raise InvalidInputError("linking matrices differ in p or size")
    p, m = l1.p, l1.size
    for j in range(m):
        col1 = [l1.entries[i][j] for i in range(m) if i != j]
        col2 = [l2.entries[i][j] for i in range(m) if i != j]
        if not any(all(b == c * a % p for a, b in zip(col1, col2)) for c in range(1, p)):
            return False
    return True


def tame_primes(p: int, qmax: int) -> list[int]:
    """Primes q <= qmax with q = 1 mod p, ascending."""
    return [q for q in range(p + 1, qmax + 1, p) if is_prime(q)]
