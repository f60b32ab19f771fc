"""Free Lie algebra over F_p on degree-one generators xi_1..xi_m.

Basis: Lyndon words, each bracketed along its standard factorization
``b(w) = [b(u), b(v)]`` where ``v`` is the longest proper Lyndon suffix of ``w``.
Words are tuples over ``1..m`` and compare lexicographically (a proper prefix
is smaller), which is exactly Python's tuple order.

Ideals are computed degree by degree as row-reduced subspaces of L_n: the ideal
generated by homogeneous relators is closed under ad(xi_k) for the generators,
and that suffices because ad([a, b]) = [ad a, ad b].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy import sparse

from . import linalg
from .arith import divisors, mobius
from .errors import InvalidInputError, NotInIdealError

log = logging.getLogger(__name__)

Word = tuple[int, ...]


def graded_dim_free(m: int, n: int) -> int:
    """Witt formula: dimension of the degree-n part of the free Lie algebra on m generators."""
    if m < 1 or n < 1:
        raise InvalidInputError("graded_dim_free needs m >= 1 and n >= 1")
    return sum(mobius(d) * m ** (n // d) for d in divisors(n)) // n


def is_lyndon(w: Sequence[int]) -> bool:
    w = tuple(w)
    return len(w) > 0 and all(w < w[k:] + w[:k] for k in range(1, len(w)))


def lyndon_words(m: int, n: int) -> list[Word]:
    """All Lyndon words of length n over 1..m in lexicographic order (Duval's generator)."""
    if m < 1 or n < 1:
        raise InvalidInputError("lyndon_words needs m >= 1 and n >= 1")
    return list(_lyndon_words(m, n))


@lru_cache(maxsize=None)
def _lyndon_words(m: int, n: int) -> tuple[Word, ...]:
    out = []
    w = [1]
    while w:
        if len(w) == n:
            out.append(tuple(w))
        k = len(w)
        w = [w[i % k] for i in range(n)]
        while w and w[-1] == m:
            w.pop()
        if w:
            w[-1] += 1
    return tuple(out)


def standard_factorization(w: Word) -> tuple[Word, Word]:
    """(u, v) with w = uv and v the longest proper Lyndon suffix of w."""
    if len(w) < 2 or not is_lyndon(w):
        raise InvalidInputError(f"{w} has no standard factorization")
    for k in range(1, len(w)):
        if is_lyndon(w[k:]):
            return w[:k], w[k:]
    raise AssertionError("a suffix of length one is always Lyndon")


@lru_cache(maxsize=None)
def _basis_index(m: int, n: int) -> dict[Word, int]:
    return {w: i for i, w in enumerate(_lyndon_words(m, n))}


@lru_cache(maxsize=200_000)
def _bracket_words(u: Word, v: Word) -> tuple[tuple[Word, int], ...]:
    """[b(u), b(v)] in the Lyndon basis, with integer coefficients."""
    if u == v:
        return ()
    if u > v:
        return tuple((w, -c) for w, c in _bracket_words(v, u))
    if len(u) == 1 or standard_factorization(u)[1] >= v:
        return ((u + v, 1),)
    u1, u2 = standard_factorization(u)
    # [[u1, u2], v] = [u1, [u2, v]] - [u2, [u1, v]]
    acc: dict[Word, int] = {}
    for outer, inner, sign in ((u1, u2, 1), (u2, u1, -1)):
        for w, c in _bracket_words(inner, v):
            for x, d in _bracket_words(outer, w):
                acc[x] = acc.get(x, 0) + sign * c * d
    return tuple(sorted((w, c) for w, c in acc.items() if c))


@dataclass(frozen=True, eq=False)
class LieElement:
    """Homogeneous element of the free Lie algebra over F_p, in Lyndon coordinates."""

    p: int
    m: int
    degree: int
    coords: Mapping[Word, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise InvalidInputError("degree must be positive")
        clean = {}
        for w, c in self.coords.items():
            w = tuple(w)
            if len(w) != self.degree or not is_lyndon(w) or min(w) < 1 or max(w) > self.m:
                raise InvalidInputError(f"{w} is not a Lyndon word of degree {self.degree} over 1..{self.m}")
            c %= self.p
            if c:
                clean[w] = c
        object.__setattr__(self, "coords", clean)

    @classmethod
    def generator(cls, p: int, m: int, i: int) -> "LieElement":
        return cls(p, m, 1, {(i,): 1})

    @classmethod
    def basis(cls, p: int, m: int, word: Sequence[int]) -> "LieElement":
        return cls(p, m, len(word), {tuple(word): 1})

    @classmethod
    def zero(cls, p: int, m: int, degree: int) -> "LieElement":
        return cls(p, m, degree, {})

    @classmethod
    def from_vector(cls, p: int, m: int, degree: int, vec: Iterable[int]) -> "LieElement":
        words = _lyndon_words(m, degree)
        return cls(p, m, degree, {w: int(c) for w, c in zip(words, vec) if int(c) % p})

    def to_vector(self) -> np.ndarray:
        idx = _basis_index(self.m, self.degree)
        vec = np.zeros(len(idx), dtype=np.int64)
        for w, c in self.coords.items():
            vec[idx[w]] = c
        return vec

    def is_zero(self) -> bool:
        return not self.coords

    def _check(self, other: "LieElement") -> None:
        if (self.p, self.m) != (other.p, other.m):
            raise InvalidInputError("Lie elements over different (p, m)")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        if self.degree != other.degree:
            raise InvalidInputError("sum of elements of different degrees is not homogeneous")
        acc = dict(self.coords)
        for w, c in other.coords.items():
            acc[w] = acc.get(w, 0) + c
        return LieElement(self.p, self.m, self.degree, acc)

    def __neg__(self) -> "LieElement":
        return LieElement(self.p, self.m, self.degree, {w: -c for w, c in self.coords.items()})

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def __rmul__(self, k: int) -> "LieElement":
        return LieElement(self.p, self.m, self.degree, {w: k * c for w, c in self.coords.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LieElement):
            return NotImplemented
        return (self.p, self.m, self.degree, self.coords) == (other.p, other.m, other.degree, other.coords)

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.degree, frozenset(self.coords.items())))

    def __repr__(self) -> str:
        if not self.coords:
            return f"LieElement(0, degree={self.degree})"
        terms = " + ".join(f"{c}*b{''.join(map(str, w)) if self.m < 10 else w}" for w, c in sorted(self.coords.items()))
        return f"LieElement({terms})"


def bracket(a: LieElement, b: LieElement) -> LieElement:
    a._check(b)
    p = a.p
    acc: dict[Word, int] = {}
    for u, c in a.coords.items():
        for v, d in b.coords.items():
            for w, e in _bracket_words(u, v):
                acc[w] = (acc.get(w, 0) + c * d * e) % p
    return LieElement(p, a.m, a.degree + b.degree, acc)


def commutator(p: int, m: int, i: int, j: int) -> LieElement:
    """[xi_i, xi_j] as a Lie element."""
    return bracket(LieElement.generator(p, m, i), LieElement.generator(p, m, j))


# -- associative realization, used as an independent check on ``bracket`` ------


@lru_cache(maxsize=None)
def _expand_word(w: Word) -> tuple[tuple[Word, int], ...]:
    if len(w) == 1:
        return ((w, 1),)
    u, v = standard_factorization(w)
    acc: dict[Word, int] = {}
    for x, c in _expand_word(u):
        for y, d in _expand_word(v):
            acc[x + y] = acc.get(x + y, 0) + c * d
            acc[y + x] = acc.get(y + x, 0) - c * d
    return tuple(sorted((k, c) for k, c in acc.items() if c))


def to_associative(a: LieElement) -> dict[Word, int]:
    """Image of a Lie element in the free associative algebra (noncommutative polynomial)."""
    acc: dict[Word, int] = {}
    for w, c in a.coords.items():
        for x, d in _expand_word(w):
            acc[x] = (acc.get(x, 0) + c * d) % a.p
    return {k: v for k, v in acc.items() if v}


def from_associative(poly: Mapping[Word, int], p: int, m: int, degree: int) -> LieElement:
    """Inverse of :func:`to_associative` on Lie polynomials.

    The smallest word occurring in the expansion of b(w) is w itself, with
    coefficient 1, so peeling off the smallest word repeatedly recovers the
    coordinates.  Raises if ``poly`` is not a Lie polynomial.
    """
    rest = {tuple(k): v % p for k, v in poly.items() if v % p}
    coords: dict[Word, int] = {}
    while rest:
        w = min(rest)
        if not is_lyndon(w):
            raise InvalidInputError("polynomial is not a Lie element")
        c = rest[w]
        coords[w] = c
        for x, d in _expand_word(w):
            val = (rest.get(x, 0) - c * d) % p
            if val:
                rest[x] = val
            else:
                rest.pop(x, None)
    return LieElement(p, m, degree, coords)


# -- graded subspaces and ideals -----------------------------------------------


@dataclass(frozen=True)
class GradedSubspaceBasis:
    """Row-echelon basis of a subspace of L_n; ``rows`` are Lyndon coordinates."""

    degree: int
    rows: np.ndarray
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.pivots)


@lru_cache(maxsize=256)
def _ad_matrix(m: int, n: int, k: int, p: int) -> sparse.csr_matrix:
    """Matrix of ad(xi_k): L_n -> L_{n+1}; row i is [xi_k, b(word_i)]."""
    target = _basis_index(m, n + 1)
    rows, cols, vals = [], [], []
    for i, w in enumerate(_lyndon_words(m, n)):
        for x, c in _bracket_words((k,), w):
            if c % p:
                rows.append(i)
                cols.append(target[x])
                vals.append(c % p)
    shape = (len(_lyndon_words(m, n)), len(target))
    return sparse.csr_matrix((vals, (rows, cols)), shape=shape, dtype=np.int64)


def _common_pm(elements: Sequence[LieElement], m: Optional[int], p: Optional[int]) -> tuple[int, int]:
    pms = {(e.p, e.m) for e in elements}
    if len(pms) > 1:
        raise InvalidInputError("relators over different (p, m)")
    if pms:
        ep, em = pms.pop()
        if (p is not None and p != ep) or (m is not None and m != em):
            raise InvalidInputError("relators disagree with the given (p, m)")
        return ep, em
    if m is None or p is None:
        raise InvalidInputError("p and m are required when there are no relators")
    return p, m


def ideal_bases(
    relators: Sequence[LieElement],
    maxdeg: int,
    *,
    m: Optional[int] = None,
    p: Optional[int] = None,
    budget: Optional[int] = None,
) -> list[GradedSubspaceBasis]:
    """Row-echelon bases of the graded pieces r_1..r_maxdeg of the ideal generated by ``relators``."""
    p, m = _common_pm(relators, m, p)
    for r in relators:
        if r.is_zero():
            raise InvalidInputError("zero relator")
    out: list[GradedSubspaceBasis] = []
    prev: Optional[np.ndarray] = None
    for n in range(1, maxdeg + 1):
        width = len(_lyndon_words(m, n))
        blocks = [r.to_vector()[None, :] for r in relators if r.degree == n]
        if prev is not None and len(prev):
            for k in range(1, m + 1):
                ad = _ad_matrix(m, n - 1, k, p)
                blocks.append(np.asarray((ad.T @ prev.T.astype(np.int64)).T) % p)
        if blocks:
            stacked = np.vstack(blocks)
            rows, piv = linalg.rref(stacked, p, budget)
        else:
            rows, piv = np.zeros((0, width), dtype=np.uint8), []
        log.debug("ideal degree %d: %d of %d", n, len(piv), width)
        out.append(GradedSubspaceBasis(n, rows, tuple(piv)))
        prev = rows
    return out


def ideal_dims(
    relators: Sequence[LieElement],
    maxdeg: int,
    *,
    m: Optional[int] = None,
    p: Optional[int] = None,
    budget: Optional[int] = None,
) -> list[int]:
    """[dim r_1, ..., dim r_maxdeg] for the ideal r generated by ``relators``."""
    return [b.dim for b in ideal_bases(relators, maxdeg, m=m, p=p, budget=budget)]


def quotient_dims(
    m: int,
    relators: Sequence[LieElement],
    maxdeg: int,
    *,
    p: Optional[int] = None,
    budget: Optional[int] = None,
) -> list[int]:
    """[g_1, ..., g_maxdeg] with g_n = dim L_n - dim r_n for the quotient Lie algebra."""
    if p is None and not relators:
        p = 3  # the free algebra's dimensions do not depend on p
    dims = ideal_dims(relators, maxdeg, m=m, p=p, budget=budget)
    return [graded_dim_free(m, n) - d for n, d in enumerate(dims, start=1)]


# -- elimination ---------------------------------------------------------------


@dataclass(frozen=True)
class EliminationElement:
    """ad(xi_{s_1}) ... ad(xi_{s_k})(xi_x), recorded with its monomial and target."""

    monomial: tuple[int, ...]
    target: int
    element: LieElement

    @property
    def degree(self) -> int:
        return len(self.monomial) + 1


def _check_elimination_set(m: int, S: Iterable[int]) -> tuple[int, ...]:
    s = tuple(sorted(set(S)))
    if not s or len(s) >= m or s[0] < 1 or s[-1] > m:
        raise InvalidInputError(f"elimination set {s} must be a proper nonempty subset of 1..{m}")
    return s


def elimination_basis(m: int, S: Iterable[int], maxdeg: int, p: int = 3) -> list[EliminationElement]:
    """Free generators of the ideal generated by the generators outside S, up to degree maxdeg.

    Ordered by degree, then target x, then monomial in lex order.
    """
    s = _check_elimination_set(m, S)
    rest = [x for x in range(1, m + 1) if x not in s]
    out = []
    for n in range(1, maxdeg + 1):
        for x in rest:
            for mono in product(s, repeat=n - 1):
                e = LieElement.generator(p, m, x)
                for letter in reversed(mono):
                    e = bracket(LieElement.generator(p, m, letter), e)
                out.append(EliminationElement(mono, x, e))
    return out


def images_mod_derived(elements: Sequence[LieElement], S: Iterable[int]) -> np.ndarray:
    """Coordinates of degree-two elements of the ideal s in s/[s, s].

    Columns are the degree-two elimination generators [xi_s, xi_x] (s in S,
    x not in S) in :func:`elimination_basis` order.  Components [xi_i, xi_j]
    with both i, j outside S lie in [s, s] and are dropped.
    """
    if not elements:
        return np.zeros((0, 0), dtype=np.int64)
    p, m = _common_pm(elements, None, None)
    s = _check_elimination_set(m, S)
    rest = [x for x in range(1, m + 1) if x not in s]
    cols = {}
    for x in rest:
        for a in s:
            cols[(a, x)] = len(cols)
    mat = np.zeros((len(elements), len(cols)), dtype=np.int64)
    for r, e in enumerate(elements):
        if e.degree != 2:
            raise InvalidInputError("images_mod_derived takes degree-two elements")
        for (i, j), c in e.coords.items():
            if i in s and j in s:
                raise NotInIdealError(f"component [xi_{i}, xi_{j}] has both indices in S")
            if i in s:
                mat[r, cols[(i, j)]] = c
            elif j in s:
                # [xi_i, xi_j] = -[xi_j, xi_i]
                mat[r, cols[(j, i)]] = -c % p
    return mat
