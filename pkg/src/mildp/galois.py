"""Koch presentations of G_S from arithmetic data, and the search for prime
orderings that satisfy the even circuit criterion.

For S = {q_1..q_m}, q_i = 1 mod p, generator x_i has relator

    r_i = x_i^(q_i - 1) prod_{j != i} [x_i, x_j]^(l_ij)   mod F_3

whose initial form is rho_i = c_i pi xi_i + sum_{j != i} l_ij [xi_i, xi_j] with
c_i = (q_i - 1)/p mod p.  Terms in F_3 never reach a degree-two criterion and
are not represented.

With p adjoined to S there is one more generator x_{m+1} and, for i <= m,
l_{i,m+1} is read off q_i = (1 + p)^(-l) in (Z/p^2 Z)^*, where 1 + p has order p.
Reading that congruence mod p instead would make it hold for every l.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .arith import LinkingMatrix, TamePrime, dlog_small_order, linking_matrix
from .errors import InvalidInputError, ResourceLimitError
from .mildness import Relator2, Verdict, check_theorem1

log = logging.getLogger(__name__)

LABELING_CAP = 10


@dataclass(frozen=True)
class Presentation:
    p: int
    generators: int
    relators: tuple[Relator2, ...]
    primes: tuple[int, ...]
    roots: tuple[int, ...]
    wild: bool = False
    linking: tuple[tuple[Optional[int], ...], ...] = ()

    def __post_init__(self) -> None:
        m = len(self.primes)
        if len(self.relators) != m:
            raise InvalidInputError("one relator per prime")
        if self.generators != m + (1 if self.wild else 0):
            raise InvalidInputError("generator count does not match the prime set")


def wild_linking_number(q: TamePrime) -> int:
    """l in F_p with q = (1 + p)^(-l) mod p^2."""
    p = q.p
    t = dlog_small_order(1 + p, q.q, p * p, p)
    return -t % p


def _relator(p: int, gens: int, i: int, row: Sequence[Optional[int]], c: int) -> Relator2:
    pi = [0] * gens
    pi[i] = c
    terms = [(i + 1, j + 1, v) for j, v in enumerate(row) if j != i and v]
    return Relator2.from_terms(p, gens, terms, pi)


def koch_presentation(
    p: int, primes: Sequence[int], roots: Optional[Sequence[int]] = None
) -> Presentation:
    L = linking_matrix(p, primes, roots)
    m = L.size
    rels = tuple(
        _relator(p, m, i, L.entries[i], ((q - 1) // p) % p) for i, q in enumerate(L.primes)
    )
    return Presentation(p, m, rels, L.primes, L.roots, False, L.entries)


def koch_presentation_wild(
    p: int, primes: Sequence[int], roots: Optional[Sequence[int]] = None
) -> Presentation:
    """Presentation for S together with p: m relators on m + 1 generators."""
    L = linking_matrix(p, primes, roots)
    m = L.size
    rows = []
    for i, q in enumerate(L.primes):
        rows.append(tuple(L.entries[i]) + (wild_linking_number(TamePrime(q, p)),))
    rels = tuple(
        _relator(p, m + 1, i, rows[i], ((q - 1) // p) % p) for i, q in enumerate(L.primes)
    )
    return Presentation(p, m + 1, rels, L.primes, L.roots, True, tuple(rows))


def reduce_mod_pi(P: Presentation) -> list[Relator2]:
    """Drop the pi-parts.  Relators stay in place even when their quadratic part vanishes."""
    out = [r.mod_pi() for r in P.relators]
    if all(r.is_zero() for r in out):
        log.warning("every relator vanishes mod pi for S = %s; presentation is degenerate", P.primes)
    return out


def is_degenerate(relators: Sequence[Relator2]) -> bool:
    return all(r.is_zero() for r in relators)


@dataclass(frozen=True)
class LinkingDiagram:
    vertices: tuple[Union[int, str], ...]
    edges: dict[tuple[int, int], int] = field(default_factory=dict)
    directed: bool = True


def linking_diagram(
    L: Union[LinkingMatrix, Presentation, Sequence[Sequence[int]]], p: Optional[int] = None
) -> LinkingDiagram:
    """Vertices and nonzero-weight edges (0-based endpoints).

    A :class:`LinkingMatrix` or :class:`Presentation` gives a directed diagram;
    a plain symmetric weight matrix gives an undirected one with edges i < j.
    """
    if isinstance(L, LinkingMatrix):
        labels = L.primes or tuple(range(1, L.size + 1))
        edges = {
            (i, j): v for i, row in enumerate(L.entries) for j, v in enumerate(row) if i != j and v
        }
        return LinkingDiagram(tuple(labels), edges, True)
    if isinstance(L, Presentation):
        labels = L.primes + ((f"p={L.p}",) if L.wild else ())
        edges = {
            (i, j): v for i, row in enumerate(L.linking) for j, v in enumerate(row) if i != j and v
        }
        return LinkingDiagram(labels, edges, True)
    if p is None:
        raise InvalidInputError("a modulus p is required for a plain weight matrix")
    rows = [[int(x) for x in r] for r in L]
    n = len(rows)
    if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
        raise InvalidInputError("plain weight matrices must be symmetric")
    edges = {(i, j): rows[i][j] % p for i in range(n) for j in range(i + 1, n) if rows[i][j] % p}
    return LinkingDiagram(tuple(range(1, n + 1)), edges, False)


@dataclass(frozen=True)
class Labeling:
    """An ordering of S (``order[k]`` is the prime at position k + 1) passing the circuit criterion."""

    order: tuple[int, ...]
    indices: tuple[int, ...]
    matrix: LinkingMatrix
    verdict: Verdict


def _search(M: Sequence[Sequence[Optional[int]]], p: int) -> Optional[tuple[int, ...]]:
    """Lex-first index sequence satisfying the criterion; depth-first with two prunings.

    Odd positions (1-based) must be pairwise unlinked in both directions, and
    once both cyclic products have picked up a zero factor the difference is 0.
    """
    m = len(M)
    order: list[int] = []
    used = [False] * m

    def rec(fwd: int, rev: int) -> Optional[tuple[int, ...]]:
        k = len(order)
        if k == m:
            first, last = order[0], order[-1]
            f = fwd * M[last][first] % p
            r = rev * M[first][last] % p
            return tuple(order) if (f - r) % p else None
        for x in range(m):
            if used[x]:
                continue
            if k % 2 == 0 and any(M[x][y] or M[y][x] for y in order[0::2]):
                continue
            f, r = fwd, rev
            if k:
                prev = order[-1]
                f = f * M[prev][x] % p
                r = r * M[x][prev] % p
                if not f and not r:
                    continue
            used[x] = True
            order.append(x)
            found = rec(f, r)
            order.pop()
            used[x] = False
            if found:
                return found
        return None

    return rec(1, 1)


def find_labeling(
    p: int,
    primes: Sequence[int],
    roots: Optional[Sequence[int]] = None,
    cap: int = LABELING_CAP,
) -> Optional[Labeling]:
    """First ordering of S (lex over index sequences) whose linking matrix passes the circuit criterion."""
    m = len(primes)
    if m < 4 or m % 2:
        raise InvalidInputError(f"labeling search needs an even number >= 4 of primes, got {m}")
    if m > cap:
        raise ResourceLimitError(f"labeling search over {m} primes exceeds the cap {cap}")
    L = linking_matrix(p, primes, roots)
    found = _search(L.entries, p)
    if found is None:
        return None
    reordered = L.permuted(found)
    verdict = check_theorem1(reordered)
    if not verdict.is_mild:
        raise AssertionError("labeling search and circuit criterion disagree")
    return Labeling(reordered.primes, found, reordered, verdict)
