"""Strong-freeness and mildness criteria for quadratic relators, plus the brute-force oracle.

Relators are degree-two initial forms

    rho_k = sum_j c_kj pi xi_j + sum_{i<j} a_ijk [xi_i, xi_j]

over F_p.  The pi-part never enters a criterion: strong freeness of the rho_k
is equivalent to strong freeness of their reductions mod pi, so every test here
reads only the ``quad`` table.

Criteria:

* :func:`check_theorem1`: even circuit criterion on a linking matrix.
* :func:`check_corollary7`: partition criterion (no [xi_i, xi_j] with i, j in
  A, and the A x B coefficient matrix has full row rank).
* :func:`koch_rank`: rank over F_p(xi) of the commutative Fox-derivative matrix.
* :func:`anick_connected_mod_p`: connectivity of the weighted linking graph.
* :func:`strong_freeness_oracle`: compares the quotient Lie algebra's graded
  dimensions with the ones a strongly free sequence must have.  Agreement up to
  a degree is evidence only; a disagreement is a refutation.

Anick's condition is phrased in terms of edges: an edge {i, j} survives when
a_ij is nonzero mod p.
"""

from __future__ import annotations

import enum
import logging
import os
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from . import lie, linalg, series
from .arith import LinkingMatrix
from .errors import (
    FormulaInconsistencyError,
    InvalidInputError,
    NoValidFactorizationError,
    ResourceLimitError,
)
from .gfq import field_for

log = logging.getLogger(__name__)

DEFAULT_ORACLE_CAP = 8
DEFAULT_PARTITION_CAP = 24
MINOR_LIMIT = 10**4


def oracle_cap() -> int:
    return int(os.environ.get("MILD_MAXDEG", DEFAULT_ORACLE_CAP))


# -- data model ------------------------------------------------------------------


@dataclass(frozen=True)
class Relator2:
    """Degree-two initial form: pi-part vector and [xi_i, xi_j] coefficients for i < j.

    Generator labels are 1-based.  ``quad`` never stores zeros.
    """

    p: int
    m: int
    pi_part: tuple[int, ...]
    quad: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.pi_part) != self.m:
            raise InvalidInputError(f"pi part has length {len(self.pi_part)}, expected {self.m}")
        object.__setattr__(self, "pi_part", tuple(int(c) % self.p for c in self.pi_part))
        clean: dict[tuple[int, int], int] = {}
        for (i, j), a in self.quad.items():
            if not (1 <= i < j <= self.m):
                raise InvalidInputError(f"pair ({i}, {j}) must satisfy 1 <= i < j <= {self.m}")
            a %= self.p
            if a:
                clean[(i, j)] = a
        object.__setattr__(self, "quad", dict(sorted(clean.items())))

    @classmethod
    def from_terms(
        cls, p: int, m: int, terms: Iterable[tuple[int, int, int]], pi: Optional[Sequence[int]] = None
    ) -> "Relator2":
        """Build from (i, j, a) meaning a [xi_i, xi_j], any order of i and j."""
        acc: dict[tuple[int, int], int] = {}
        for i, j, a in terms:
            if i == j:
                continue
            if i > j:
                i, j, a = j, i, -a
            acc[(i, j)] = acc.get((i, j), 0) + a
        return cls(p, m, tuple(pi) if pi is not None else (0,) * m, acc)

    @classmethod
    def commutator(cls, p: int, m: int, i: int, j: int) -> "Relator2":
        return cls.from_terms(p, m, [(i, j, 1)])

    def coefficient(self, i: int, j: int) -> int:
        """Coefficient of [xi_i, xi_j]; antisymmetric in (i, j)."""
        if i == j:
            return 0
        if i < j:
            return self.quad.get((i, j), 0)
        return -self.quad.get((j, i), 0) % self.p

    def is_zero(self) -> bool:
        return not self.quad

    def mod_pi(self) -> "Relator2":
        return Relator2(self.p, self.m, (0,) * self.m, self.quad)

    def to_lie(self) -> lie.LieElement:
        return lie.LieElement(self.p, self.m, 2, dict(self.quad))

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.pi_part, tuple(self.quad.items())))


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty A, B covering 1..m."""

    A: frozenset[int]
    B: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", frozenset(self.A))
        object.__setattr__(self, "B", frozenset(self.B))
        if not self.A or not self.B or self.A & self.B:
            raise InvalidInputError("partition blocks must be nonempty and disjoint")
        union = self.A | self.B
        if union != set(range(1, len(union) + 1)):
            raise InvalidInputError("partition must cover 1..m")

    @classmethod
    def of(cls, m: int, A: Iterable[int]) -> "Partition":
        a = frozenset(A)
        return cls(a, frozenset(range(1, m + 1)) - a)

    @property
    def m(self) -> int:
        return len(self.A) + len(self.B)

    def to_json(self) -> dict[str, list[int]]:
        return {"A": sorted(self.A), "B": sorted(self.B)}


class Status(str, enum.Enum):
    MILD = "Mild"
    NOT_STRONGLY_FREE = "NotStronglyFree"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Certificate:
    partition: Optional[Partition] = None
    determinant: Optional[int] = None
    rank: Optional[int] = None
    refuted_at: Optional[int] = None
    consistent_up_to: Optional[int] = None
    details: Mapping[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "partition": self.partition.to_json() if self.partition else None,
            "determinant": self.determinant,
            "rank": self.rank,
            "refuted_at": self.refuted_at,
            "consistent_up_to": self.consistent_up_to,
            "details": dict(self.details),
        }


@dataclass(frozen=True)
class Verdict:
    status: Status
    criterion: str
    certificate: Certificate = field(default_factory=Certificate)

    def __post_init__(self) -> None:
        c = self.certificate
        populated = c.partition, c.determinant, c.rank, c.consistent_up_to
        if self.status is Status.MILD and all(x is None for x in populated) and not c.details:
            raise InvalidInputError("a Mild verdict needs a populated certificate")
        if self.status is Status.NOT_STRONGLY_FREE and c.refuted_at is None:
            raise InvalidInputError("a NotStronglyFree verdict needs a refutation degree")

    @property
    def is_mild(self) -> bool:
        return self.status is Status.MILD

    @property
    def consistent(self) -> bool:
        """Oracle agreed with the strongly free prediction in every degree it checked."""
        return self.certificate.consistent_up_to is not None

    def to_json(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "criterion": self.criterion,
            "certificate": self.certificate.to_json(),
        }


def _common(relators: Sequence[Relator2]) -> tuple[int, int]:
    if not relators:
        raise InvalidInputError("at least one relator is required")
    pm = {(r.p, r.m) for r in relators}
    if len(pm) != 1:
        raise InvalidInputError("relators over different (p, m)")
    return pm.pop()


# -- even circuit criterion -----------------------------------------------------


def _check_even(L: LinkingMatrix) -> int:
    m = L.size
    if m < 4 or m % 2:
        raise InvalidInputError(f"the circuit criterion needs an even m >= 4, got {m}")
    return m


def circuit_products(L: LinkingMatrix) -> tuple[int, int]:
    """(l_12 l_23 ... l_m1, l_21 l_32 ... l_1m) in F_p."""
    m = _check_even(L)
    fwd = rev = 1
    for k in range(1, m + 1):
        fwd = fwd * L.ell(k, k + 1) % L.p
        rev = rev * L.ell(k + 1, k) % L.p
    return fwd, rev


def circuit_value(L: LinkingMatrix) -> int:
    fwd, rev = circuit_products(L)
    return (fwd - rev) % L.p


def check_theorem1(L: LinkingMatrix) -> Verdict:
    """Even circuit criterion: l_ij = 0 for odd i != j, and nonzero circuit value."""
    m = _check_even(L)
    odd = range(1, m + 1, 2)
    violations = [(i, j) for i in odd for j in odd if i != j and L.ell(i, j)]
    fwd, rev = circuit_products(L)
    value = (fwd - rev) % L.p
    details = {
        "condition_a": not violations,
        "condition_b": value != 0,
        "odd_pair_violations": [list(v) for v in violations],
        "forward_product": fwd,
        "reverse_product": rev,
        "circuit_value": value,
    }
    # M_L in circuit column order has determinant -value (see circuit_columns)
    det = -value % L.p
    if violations or not value:
        return Verdict(Status.UNKNOWN, "theorem1", Certificate(determinant=det, details=details))
    A = frozenset(odd)
    return Verdict(
        Status.MILD,
        "theorem1",
        Certificate(partition=Partition.of(m, A), determinant=det, rank=m, details=details),
    )


# -- partition criterion -------------------------------------------------------


def default_columns(partition: Partition) -> list[tuple[int, int]]:
    return [(i, j) for i in sorted(partition.A) for j in sorted(partition.B)]


def circuit_columns(m: int) -> list[tuple[int, int]]:
    """(1,2), (2,3), ..., (m-1,m), (1,m).

    In this order det M_L = -(circuit value) for even m: the (m, 1) entry is
    -l_m1 and the wrap-around term is an odd cycle.
    """
    return [(k, k + 1) for k in range(1, m)] + [(1, m)]


def build_ML(
    relators: Sequence[Relator2],
    partition: Partition,
    columns: Optional[Sequence[tuple[int, int]]] = None,
) -> np.ndarray:
    """Row k, column (i, j): the coefficient of [xi_i, xi_j] in rho_k.

    Columns default to the pairs i in A, j in B in lex order.  An explicit
    ``columns`` list must consist of pairs with one index in each block.
    """
    p, m = _common(relators)
    if partition.m != m:
        raise InvalidInputError("partition does not match the generator count")
    cols = default_columns(partition) if columns is None else [tuple(c) for c in columns]
    for i, j in cols:
        if not ({i, j} & partition.A and {i, j} & partition.B):
            raise InvalidInputError(f"column ({i}, {j}) does not cross the partition")
    mat = np.zeros((len(relators), len(cols)), dtype=np.int64)
    for k, r in enumerate(relators):
        for c, (i, j) in enumerate(cols):
            mat[k, c] = r.coefficient(i, j)
    return mat


def check_corollary7(relators: Sequence[Relator2], partition: Partition) -> Verdict:
    """Strongly free if no relator touches [xi_i, xi_j] with i, j in A and M_L has rank d."""
    p, m = _common(relators)
    A = partition.A
    violations = [
        (k + 1, i, j) for k, r in enumerate(relators) for (i, j) in r.quad if i in A and j in A
    ]
    ml = build_ML(relators, partition)
    r = linalg.rank(ml, p)
    d = len(relators)
    det = linalg.det(ml.tolist(), p) if ml.shape[0] == ml.shape[1] else None
    details = {
        "condition_a": not violations,
        "condition_b": r == d,
        "A_pair_violations": [list(v) for v in violations],
        "relators": d,
        "columns": [list(c) for c in default_columns(partition)],
    }
    cert = Certificate(partition=partition, determinant=det, rank=r, details=details)
    status = Status.MILD if not violations and r == d else Status.UNKNOWN
    return Verdict(status, "corollary7", cert)


def _passes_condition_a(relators: Sequence[Relator2], A: frozenset[int]) -> bool:
    return all(not (i in A and j in A) for r in relators for (i, j) in r.quad)


def partitions_in_order(m: int) -> Iterable[Partition]:
    """Subsets containing 1 by size then lex; each yields (A, B) and then (B, A)."""
    everything = frozenset(range(1, m + 1))
    for size in range(1, m):
        for rest in combinations(range(2, m + 1), size - 1):
            A = frozenset((1, *rest))
            yield Partition(A, everything - A)
            yield Partition(everything - A, A)


def find_partition(
    relators: Sequence[Relator2], cap: int = DEFAULT_PARTITION_CAP
) -> Optional[Partition]:
    """First partition in :func:`partitions_in_order` that passes :func:`check_corollary7`."""
    p, m = _common(relators)
    if m > cap:
        raise ResourceLimitError(f"partition search over m = {m} generators exceeds the cap {cap}")
    if m < 2:
        return None
    d = len(relators)
    for part in partitions_in_order(m):
        if len(part.A) * len(part.B) < d or not _passes_condition_a(relators, part.A):
            continue
        if linalg.rank(build_ML(relators, part), p) == d:
            return part
    return None


def check_partition_search(relators: Sequence[Relator2], cap: int = DEFAULT_PARTITION_CAP) -> Verdict:
    part = find_partition(relators, cap)
    if part is None:
        p, m = _common(relators)
        return Verdict(
            Status.UNKNOWN,
            "corollary7-search",
            Certificate(details={"partitions_tried": 2**m - 2 if m > 1 else 0}),
        )
    v = check_corollary7(relators, part)
    return Verdict(v.status, "corollary7-search", v.certificate)


# -- Koch's criterion ------------------------------------------------------------


def koch_matrix(relators: Sequence[Relator2], m: Optional[int] = None) -> np.ndarray:
    """Array K of shape (d, m, m): K[k, j] is the linear form (coefficients of xi_1..xi_m)
    of the commutative image of the Fox derivative d rho_k / d xi_j.

    a [xi_i, xi_j] = a (xi_i xi_j - xi_j xi_i) contributes +a xi_i at column j
    and -a xi_j at column i.
    """
    if not relators:
        return np.zeros((0, m or 0, m or 0), dtype=np.int64)
    p, m = _common(relators)
    K = np.zeros((len(relators), m, m), dtype=np.int64)
    for k, r in enumerate(relators):
        for (i, j), a in r.quad.items():
            K[k, j - 1, i - 1] = (K[k, j - 1, i - 1] + a) % p
            K[k, i - 1, j - 1] = (K[k, i - 1, j - 1] - a) % p
    return K


def format_linear_form(coeffs: Sequence[int], p: int) -> str:
    terms = []
    for i, c in enumerate(coeffs, start=1):
        c = int(c) % p
        if not c:
            continue
        signed = c - p if c > p // 2 else c
        coef = "" if abs(signed) == 1 else str(abs(signed))
        terms.append(("-" if signed < 0 else "+") + f"{coef}x{i}")
    if not terms:
        return "0"
    s = "".join(terms)
    return s[1:] if s[0] == "+" else s


Poly = dict[tuple[int, ...], int]


def _minor_det(K: np.ndarray, rows: Sequence[int], cols: Sequence[int], p: int) -> Poly:
    """Determinant of the square submatrix of linear forms, as a polynomial in xi."""
    m = K.shape[2]
    r = len(rows)

    @lru_cache(maxsize=None)
    def expand(mask: int) -> tuple[tuple[tuple[int, ...], int], ...]:
        # rows[len(used)] expanded against the columns still in ``mask``
        remaining = [c for c in range(r) if mask >> c & 1]
        depth = r - len(remaining)
        if not remaining:
            return (((0,) * m, 1),)
        acc: Poly = {}
        for pos, c in enumerate(remaining):
            form = K[rows[depth], cols[c]]
            if not form.any():
                continue
            sub = expand(mask & ~(1 << c))
            sign = -1 if pos % 2 else 1
            for var in np.flatnonzero(form):
                a = int(form[var]) * sign
                for mono, b in sub:
                    new = list(mono)
                    new[var] += 1
                    key = tuple(new)
                    acc[key] = (acc.get(key, 0) + a * b) % p
        return tuple((k, v) for k, v in acc.items() if v)

    return dict(expand((1 << r) - 1))


@dataclass(frozen=True)
class KochRank:
    rank: int
    method: str
    trials: int = 0
    field_order: Optional[int] = None
    seed: Optional[int] = None
    failure_bound: float = 0.0

    def __int__(self) -> int:
        return self.rank

    def to_json(self) -> dict[str, Any]:
        return {
            "rank": self.rank,
            "method": self.method,
            "trials": self.trials,
            "field_order": self.field_order,
            "seed": self.seed,
            "failure_bound": self.failure_bound,
        }


def _rank_by_minors(K: np.ndarray, p: int) -> int:
    d, m = K.shape[0], K.shape[1]
    for r in range(min(d, m), 0, -1):
        for rows in combinations(range(d), r):
            for cols in combinations(range(m), r):
                if _minor_det(K, rows, cols, p):
                    return r
    return 0


def _rank_by_evaluation(
    K: np.ndarray, p: int, trials: int, rng: random.Random
) -> tuple[int, int, int]:
    d, m = K.shape[0], K.shape[1]
    F = field_for(p, 2 * d * m)
    best = used = 0
    for used in range(1, trials + 1):
        point = np.array([rng.randrange(F.q) for _ in range(m)], dtype=np.int64)
        mat = np.zeros((d, m), dtype=np.int64)
        for k in range(d):
            for j in range(m):
                acc = 0
                for var in np.flatnonzero(K[k, j]):
                    acc = int(F.add(acc, F.mul(F.from_prime(int(K[k, j, var])), point[var])))
                mat[k, j] = acc
        best = max(best, F.rank(mat))
        if best == min(d, m):
            break
    return best, F.q, used


def koch_rank(
    relators: Sequence[Relator2],
    method: str = "auto",
    seed: int = 0,
    trials: int = 20,
) -> KochRank:
    """Rank over F_p(xi_1..xi_m) of the Koch matrix.

    ``auto`` uses exact minor expansion when C(m, d) <= 10**4 and otherwise
    Schwartz-Zippel evaluation at random points of GF(p^k), p^k > 2 d m.  A
    nonzero r x r minor has degree r <= d, so one trial misses it with
    probability at most d / p^k < 1/2; ``failure_bound`` reports (d/p^k)^trials.
    """
    if not relators:
        return KochRank(0, "minors")
    p, m = _common(relators)
    d = len(relators)
    K = koch_matrix(relators)
    if method == "auto":
        method = "minors" if comb(m, d) <= MINOR_LIMIT else "random"
    if method == "minors":
        return KochRank(_rank_by_minors(K, p), "minors")
    if method == "random":
        rank, q, used = _rank_by_evaluation(K, p, trials, random.Random(seed))
        # evaluation never overestimates rank, so only a deficient answer can be wrong
        bound = 0.0 if rank == min(d, m) else (d / q) ** used
        return KochRank(rank, "random", used, q, seed, bound)
    raise InvalidInputError(f"unknown rank method {method!r}")


def check_koch(relators: Sequence[Relator2], method: str = "auto", seed: int = 0) -> Verdict:
    kr = koch_rank(relators, method=method, seed=seed)
    d = len(relators)
    cert = Certificate(rank=kr.rank, details={"koch": kr.to_json(), "relators": d})
    status = Status.MILD if kr.rank == d else Status.UNKNOWN
    if status is Status.MILD:
        m = relators[0].m
        if d >= m:
            raise FormulaInconsistencyError(f"Koch rank {d} with d >= m = {m}")
    return Verdict(status, "koch", cert)


# -- Anick -----------------------------------------------------------------------


def _check_weights(weights: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    a = [[int(x) for x in row] for row in weights]
    m = len(a)
    for i in range(m):
        if len(a[i]) != m:
            raise InvalidInputError("weight matrix must be square")
        if a[i][i] % p:
            raise InvalidInputError("weight matrix must have zero diagonal")
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise InvalidInputError("weight matrix must be symmetric")
    return a


def anick_spanning_tree(weights: Sequence[Sequence[int]], p: int) -> Optional[list[tuple[int, int]]]:
    """Edges (1-based) of a spanning tree using only weights nonzero mod p, or None."""
    a = _check_weights(weights, p)
    m = len(a)
    if m == 0:
        return []
    seen = {0}
    stack = [0]
    tree = []
    while stack:
        i = stack.pop()
        for j in range(m):
            if j not in seen and a[i][j] % p:
                seen.add(j)
                stack.append(j)
                tree.append((min(i, j) + 1, max(i, j) + 1))
    return sorted(tree) if len(seen) == m else None


def anick_connected_mod_p(weights: Sequence[Sequence[int]], p: int) -> bool:
    """Connectivity of the graph with an edge {i, j} whenever a_ij is nonzero mod p."""
    return anick_spanning_tree(weights, p) is not None


def check_anick(weights: Sequence[Sequence[int]], p: int) -> Verdict:
    """Connected mod p makes rho_1..rho_{m-1} (see :func:`anick_relators`) strongly free."""
    tree = anick_spanning_tree(weights, p)
    details = {"connected_mod_p": tree is not None, "spanning_tree": tree}
    if tree is None:
        return Verdict(Status.UNKNOWN, "anick", Certificate(details=details))
    return Verdict(Status.MILD, "anick", Certificate(details=details))


def anick_relators(weights: Sequence[Sequence[int]], p: int) -> list[Relator2]:
    """rho_i = sum_j a_ij [xi_i, xi_j] for i = 1..m-1 (the last one is minus their sum)."""
    m = len(weights)
    return [
        Relator2.from_terms(p, m, [(i + 1, j + 1, int(weights[i][j])) for j in range(m) if j != i])
        for i in range(m - 1)
    ]


# -- oracle ----------------------------------------------------------------------


def strong_freeness_oracle(
    relators: Sequence[Relator2], maxdeg: int, cap: Optional[int] = None
) -> Verdict:
    """Compare dim gr_n(L/(rho)) with the exponents of 1/(1 - m t + d t^2) for n <= maxdeg."""
    p, m = _common(relators)
    cap = oracle_cap() if cap is None else cap
    if maxdeg > cap:
        raise ResourceLimitError(f"oracle degree {maxdeg} exceeds the cap {cap} (MILD_MAXDEG)")
    if maxdeg < 1:
        raise InvalidInputError("oracle degree must be positive")
    d = len(relators)
    nonzero = [r.to_lie() for r in relators if not r.is_zero()]
    dims = lie.quotient_dims(m, nonzero, maxdeg, p=p)
    failed_at = None
    try:
        expected = series.extract_exponents(series.expand_rational(m, [2] * d, maxdeg))
    except NoValidFactorizationError as exc:
        failed_at = exc.degree
        expected = series.extract_exponents(series.expand_rational(m, [2] * d, failed_at - 1))
    details = {"quotient_dims": dims, "expected_dims": expected, "relators": d, "generators": m}
    for n, (got, want) in enumerate(zip(dims, expected), start=1):
        if got != want:
            return Verdict(
                Status.NOT_STRONGLY_FREE, "oracle", Certificate(refuted_at=n, details=details)
            )
    if failed_at is not None:
        details["series_failure"] = failed_at
        return Verdict(
            Status.NOT_STRONGLY_FREE, "oracle", Certificate(refuted_at=failed_at, details=details)
        )
    return Verdict(Status.UNKNOWN, "oracle", Certificate(consistent_up_to=maxdeg, details=details))
