"""Acceptance criteria, one test each.  A summary line per criterion is printed at the
end of the run (see conftest).  Run alone with ``pytest tests/test_acceptance.py``."""

import random
import time

import numpy as np
import pytest

from mildp import lie, linalg, series
from mildp.arith import linking_matrix, random_primitive_root, tame_primes
from mildp.errors import FormulaInconsistencyError, NoValidFactorizationError
from mildp.galois import find_labeling
from mildp.lie import LieElement, bracket
from mildp.mildness import (
    Partition,
    Status,
    build_ML,
    check_corollary7,
    check_koch,
    check_theorem1,
    find_partition,
    format_linear_form,
    koch_matrix,
    koch_rank,
    partitions_in_order,
    strong_freeness_oracle,
)

from instances import circuit_relators, random_relators, worked_example_relators

criterion = pytest.mark.criterion


def timed(fn, *args, warmup=True, **kwargs):
    """(result, seconds) for one call; an optional untimed warm-up call fills import and dispatch caches."""
    if warmup:
        fn(*args, **kwargs)
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


@criterion(1, "worked-example matrix: exact printed M_L and determinant 1")
def test_worked_example_matrix_exact():
    printed = np.array([[1, 0, 0, -1], [-1, 1, 0, 0], [0, 0, 1, 0], [0, 0, -1, 1]]) % 3
    rels = worked_example_relators()
    P = Partition.of(4, {1, 3})
    # the printed basis is [x1,x2], [x2,x3], [x3,x4], [x4,x1]
    cols = [(1, 2), (2, 3), (3, 4), (4, 1)]
    ML, secs = timed(build_ML, rels, P, cols)
    assert secs < 1e-3
    assert linalg.rank(ML, 3) == 4
    assert ML.tolist() == printed.tolist()
    assert linalg.det(ML.tolist(), 3) == 1


@criterion(2, "Koch example: printed M_K and rank 3")
def test_koch_example():
    rels = circuit_relators(3, 4)[:3]
    (K, kr), secs = timed(lambda: (koch_matrix(rels), koch_rank(rels)))
    text = [[format_linear_form(K[k, j], 3) for j in range(4)] for k in range(3)]
    assert text == [["-x2", "x1", "0", "0"], ["0", "-x3", "x2", "0"], ["0", "0", "-x4", "x3"]]
    assert kr.rank == 3 and kr.method == "minors"
    assert secs < 1e-3


@criterion(3, "headline set p=3, S={7,19,61,163}: labeling passes with odd positions {61,163}")
def test_headline_labeling():
    lab, secs = timed(find_labeling, 3, [7, 19, 61, 163], warmup=False)
    assert secs < 0.1
    assert lab is not None and lab.verdict.status is Status.MILD
    assert set(lab.order[0::2]) == {61, 163}
    assert check_theorem1(linking_matrix(3, lab.order)).is_mild


@criterion(4, "oracle and partition criterion agree on >= 100 random relator sets")
def test_oracle_criterion_agreement():
    rng = random.Random(20261015)
    start = time.perf_counter()
    counts = {"instances": 0, "partition_passes": 0, "refuted": 0}
    for k in range(160):
        p = rng.choice([3, 5])
        m = rng.randint(2, 4)
        d = rng.randint(1, 4)
        # about half the instances are built so that a random A passes condition (a)
        A = frozenset(rng.sample(range(1, m + 1), rng.randint(1, m - 1))) if k % 2 else frozenset()
        rels = random_relators(rng, p, m, d, A)
        passes = any(check_corollary7(rels, P).is_mild for P in partitions_in_order(m))
        assert passes == (find_partition(rels) is not None)
        v = strong_freeness_oracle(rels, 5)
        if passes:
            assert v.consistent and v.certificate.consistent_up_to == 5, (p, m, rels)
        if v.status is Status.NOT_STRONGLY_FREE:
            assert not passes, (p, m, rels)
        counts["instances"] += 1
        counts["partition_passes"] += passes
        counts["refuted"] += v.status is Status.NOT_STRONGLY_FREE
    secs = time.perf_counter() - start
    print(counts)
    assert counts["instances"] >= 100
    # both branches of the implication are exercised
    assert counts["partition_passes"] >= 20 and counts["refuted"] >= 20
    assert secs < 60


@criterion(5, "circuit family m=4 (degree 5) and m=6 (degree 4)")
def test_circuit_family():
    start = time.perf_counter()
    for m, N in [(4, 5), (6, 4)]:
        rels = circuit_relators(3, m)
        assert check_corollary7(rels, Partition.of(m, range(1, m + 1, 2))).is_mild
        v = strong_freeness_oracle(rels, N)
        expected = series.extract_exponents(series.expand_rational(m, [2] * m, N))
        assert v.consistent
        assert v.certificate.details["quotient_dims"] == expected
    assert time.perf_counter() - start < 30


@criterion(6, "closed-form g_n equals series extraction on {2,3,4}^2, n <= 12")
def test_series_formula_consistency():
    start = time.perf_counter()
    for m in (2, 3, 4):
        for e in (2, 3, 4):
            g = series.extract_exponents(series.expand_rational(m, [e], 12))
            assert [series.gn_closed_form(m, e, n) for n in range(1, 13)] == g
    assert [series.gn_closed_form(2, 3, n) for n in range(1, 6)] == [2, 1, 1, 1, 2]
    assert time.perf_counter() - start < 1


@criterion(7, "elimination dimensions m=4, S={1,3}, n <= 5, two ways")
def test_elimination_dimensions():
    start = time.perf_counter()
    N = 5
    T = lie.elimination_basis(4, {1, 3}, N)
    ideal = lie.ideal_dims([LieElement.generator(3, 4, 2), LieElement.generator(3, 4, 4)], N)
    from_series = series.extract_exponents(series.elimination_series(4, 2, N))
    for n in range(1, N + 1):
        assert sum(1 for t in T if t.degree == n) == 2 * 2 ** (n - 1)
        witt = lie.graded_dim_free(4, n) - lie.graded_dim_free(2, n)
        assert ideal[n - 1] == from_series[n - 1] == witt
    assert time.perf_counter() - start < 10


@criterion(8, "invariance: root re-choices, Witt identity, Jacobi and antisymmetry")
def test_invariance_suite():
    start = time.perf_counter()
    rng = random.Random(8)
    pool = tame_primes(3, 400)
    instances = [[61, 7, 163, 19]] + [rng.sample(pool, 4) for _ in range(7)] + [rng.sample(pool, 6) for _ in range(2)]
    for S in instances:
        base = check_theorem1(linking_matrix(3, S))
        for _ in range(50):
            roots = [random_primitive_root(q, rng) for q in S]
            v = check_theorem1(linking_matrix(3, S, roots))
            assert v.status is base.status
            for key in ("condition_a", "condition_b"):
                assert v.certificate.details[key] == base.certificate.details[key]
    for m in range(1, 6):
        for n in range(1, 13):
            assert sum(d * lie.graded_dim_free(m, d) for d in range(1, n + 1) if n % d == 0) == m**n
    for _ in range(60):
        p = rng.choice([3, 5, 7])
        m = rng.randint(2, 4)
        degs = [rng.randint(1, 3) for _ in range(3)]
        a, b, c = (
            LieElement(p, m, d, {w: rng.randrange(p) for w in lie.lyndon_words(m, d)}) for d in degs
        )
        assert (bracket(a, b) + bracket(b, a)).is_zero()
        assert (bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))).is_zero()
    assert time.perf_counter() - start < 30


@criterion(9, "negative controls: duplicate relator, 1/(1-2t+2t^2), Koch rank below m")
def test_negative_controls():
    start = time.perf_counter()
    dup = [circuit_relators(3, 4)[0]] * 2
    v = strong_freeness_oracle(dup, 4)
    assert v.status is Status.NOT_STRONGLY_FREE and v.certificate.refuted_at == 2
    with pytest.raises(NoValidFactorizationError):
        series.extract_exponents(series.expand_rational(2, [2, 2], 4))
    rng = random.Random(9)
    certified = 0
    for _ in range(60):
        m = rng.randint(2, 4)
        rels = random_relators(rng, rng.choice([3, 5]), m, rng.randint(1, 5))
        try:
            v = check_koch(rels)
        except FormulaInconsistencyError:
            pytest.fail("Koch rank reached d with d >= m")
        if v.is_mild:
            certified += 1
            assert len(rels) < m
        assert koch_rank(rels).rank <= m - 1
    assert certified > 0
    assert time.perf_counter() - start < 1


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
