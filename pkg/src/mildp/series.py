"""Exact integer power series.

The enveloping algebra of L/(rho_1, ..., rho_d), for a strongly free sequence
of homogeneous relators of degrees e_k on m generators, has Hilbert series
1 / (1 - m t + sum_k t^e_k).  Writing that series as prod_n (1 - t^n)^(-g_n)
recovers the graded dimensions g_n of the Lie algebra itself (PBW).

Single-relator closed form
--------------------------
Taking logarithms of prod_n (1 - t^n)^(g_n) = 1 - m t + t^e and inverting
with Mobius gives::

    n g_n = sum_{d | n} mu(n/d) sum_{0 <= i <= d/e} (-1)^i d/(d - i(e-1))
                                  * C(d - i(e-1), i) * m^(d - e i)

The frequently quoted variant with ``1/(d + i - e i)`` in place of
``d/(d - i(e-1))`` drops the factor d and already fails at (m, e, n) =
(2, 2, 2).  :func:`gn_closed_form` implements the expression above and the
test-suite pins it to :func:`extract_exponents` term by term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .arith import divisors, mobius
from .errors import FormulaInconsistencyError, InvalidInputError, NoValidFactorizationError


@dataclass(frozen=True)
class SeriesZ:
    """Power series truncated after t^N, with exact integer coefficients."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise InvalidInputError("a truncated series needs at least a_0")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __mul__(self, other: "SeriesZ") -> "SeriesZ":
        return SeriesZ(_mul(self.coeffs, other.coeffs, min(self.order, other.order)))

    def truncate(self, N: int) -> "SeriesZ":
        return SeriesZ(self.coeffs[: N + 1])


def _mul(a: Sequence[int], b: Sequence[int], N: int) -> list[int]:
    out = [0] * (N + 1)
    for i, x in enumerate(a[: N + 1]):
        if x:
            for j, y in enumerate(b[: N + 1 - i]):
                out[i + j] += x * y
    return out


def polynomial(coeffs: Iterable[int], N: int) -> SeriesZ:
    c = list(coeffs)[: N + 1]
    return SeriesZ(c + [0] * (N + 1 - len(c)))


def divide(num: Sequence[int], den: Sequence[int], N: int) -> SeriesZ:
    """num / den to order N; den must have constant term +-1 so the result stays integral."""
    if not den or den[0] not in (1, -1):
        raise InvalidInputError("denominator needs constant term 1 or -1")
    out = []
    for n in range(N + 1):
        acc = num[n] if n < len(num) else 0
        for k in range(1, min(n, len(den) - 1) + 1):
            acc -= den[k] * out[n - k]
        out.append(acc * den[0])
    return SeriesZ(out)


def relation_polynomial(m: int, degrees: Sequence[int]) -> list[int]:
    """Coefficients of 1 - m t + sum_k t^e_k."""
    top = max([1, *degrees])
    poly = [0] * (top + 1)
    poly[0], poly[1] = 1, -m
    for e in degrees:
        poly[e] += 1
    return poly


def expand_rational(m: int, degrees: Sequence[int], N: int) -> SeriesZ:
    """1 / (1 - m t + sum_k t^e_k) to order N, via a_n = m a_{n-1} - sum_k a_{n-e_k}."""
    if m < 1 or N < 0 or any(e < 2 for e in degrees):
        raise InvalidInputError("expand_rational needs m >= 1, N >= 0 and every e_k >= 2")
    a = [1]
    for n in range(1, N + 1):
        a.append(m * a[n - 1] - sum(a[n - e] for e in degrees if e <= n))
    return SeriesZ(a)


def _times_inverse_power(a: list[int], n: int, g: int, N: int) -> list[int]:
    """a * (1 - t^n)^(-g) truncated at t^N, for g >= 0."""
    factor = [0] * (N + 1)
    for j in range(N // n + 1):
        factor[n * j] = comb(g + j - 1, j) if j else 1
    return _mul(a, factor, N)


def extract_exponents(a: SeriesZ | Sequence[int], N: int | None = None) -> list[int]:
    """[g_1..g_N] with prod_{n <= N} (1 - t^n)^(-g_n) = a mod t^(N+1).

    Raises :class:`NoValidFactorizationError` at the first negative g_n: such a
    series is not the enveloping-algebra series of a graded Lie algebra.
    """
    coeffs = list(a)
    N = len(coeffs) - 1 if N is None else N
    if N > len(coeffs) - 1:
        raise InvalidInputError(f"series known to order {len(coeffs) - 1}, asked for {N}")
    if coeffs[0] != 1:
        raise InvalidInputError("series must start with a_0 = 1")
    prod = [1] + [0] * N
    out = []
    for n in range(1, N + 1):
        g = coeffs[n] - prod[n]
        if g < 0:
            raise NoValidFactorizationError(n, g)
        out.append(g)
        if g:
            prod = _times_inverse_power(prod, n, g, N)
    return out


def gn_closed_form(m: int, e: int, n: int) -> int:
    """g_n for one relator of degree e on m generators, by the Mobius formula."""
    if m < 1 or e < 2 or n < 1:
        raise InvalidInputError("gn_closed_form needs m >= 1, e >= 2, n >= 1")
    total = Fraction(0)
    for d in divisors(n):
        inner = Fraction(0)
        for i in range(d // e + 1):
            k = d - i * (e - 1)
            inner += (-1) ** i * Fraction(d, k) * comb(k, i) * m ** (d - e * i)
        total += mobius(n // d) * inner
    g = total / n
    if g.denominator != 1:
        raise FormulaInconsistencyError(f"non-integral g_{n} = {g} for m={m}, e={e}")
    return int(g)


def elimination_series(m: int, s: int, N: int) -> SeriesZ:
    """(1 - s t) / (1 - m t): enveloping series of the ideal generated by m - s of m generators.

    That ideal is free on (m - s) s^(n-1) generators of degree n, so its
    enveloping algebra has series 1 / (1 - sum_n (m - s) s^(n-1) t^n).
    """
    if not 0 <= s < m:
        raise InvalidInputError("need 0 <= s < m")
    return divide([1, -s], [1, -m], N)
