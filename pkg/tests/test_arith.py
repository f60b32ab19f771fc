import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mildp.arith import (
    LinkingMatrix,
    TamePrime,
    column_scale_equivalent,
    divisors,
    dlog_small_order,
    is_prime,
    is_primitive_root,
    linking_matrix,
    linking_number,
    mobius,
    multiplicative_order,
    prime_factors,
    random_primitive_root,
    smallest_primitive_root,
    tame_primes,
)
from mildp.errors import InvalidInputError

from oracles import is_prime_naive, linking_number_brute, primitive_roots_brute

HEADLINE = (7, 19, 61, 163)


def test_is_prime_matches_trial_division():
    assert [n for n in range(2000) if is_prime(n)] == [n for n in range(2000) if is_prime_naive(n)]


@pytest.mark.parametrize(
    "n, expected",
    [(2**61 - 1, True), (2**64 - 59, True), (3215031751, False), (341550071728321, False), (1, False)],
)
def test_is_prime_large(n, expected):
    assert is_prime(n) is expected


@given(st.integers(2, 10**12))
@settings(max_examples=200, deadline=None)
def test_prime_factors_multiply_back(n):
    fs = prime_factors(n)
    assert all(is_prime(f) for f in fs)
    rest = n
    for f in fs:
        while rest % f == 0:
            rest //= f
    assert rest == 1


def test_mobius_and_divisors():
    assert [mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


@pytest.mark.parametrize("q", [7, 13, 19, 31, 37, 43, 61, 163])
def test_primitive_roots_match_brute_force(q):
    roots = primitive_roots_brute(q)
    assert smallest_primitive_root(q) == roots[0]
    assert [g for g in range(1, q) if is_primitive_root(g, q)] == roots
    assert all(multiplicative_order(g, q) == q - 1 for g in roots)


def test_primitive_root_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        is_primitive_root(2, 15)
    with pytest.raises(InvalidInputError):
        is_primitive_root(0, 7)


def test_random_primitive_root_is_primitive():
    rng = random.Random(4)
    for _ in range(20):
        assert is_primitive_root(random_primitive_root(163, rng), 163)


def test_dlog_small_order():
    # 2^6 = 64 = 7 mod 19 has order 3
    b = pow(2, 6, 19)
    for t in range(3):
        assert dlog_small_order(b, pow(b, t, 19), 19, 3) == t
    with pytest.raises(InvalidInputError):
        dlog_small_order(b, 2, 19, 3)


def test_tame_prime_validation():
    TamePrime(7, 3)
    with pytest.raises(InvalidInputError, match="not prime"):
        TamePrime(49, 3)
    with pytest.raises(InvalidInputError, match="1 mod 3"):
        TamePrime(11, 3)
    with pytest.raises(InvalidInputError):
        TamePrime(11, 2)


@pytest.mark.parametrize(
    "qi, qj, g, expected",
    [(19, 7, 3, 1), (7, 19, 2, 0), (457, 19, 2, 0)],  # 457 = 24*19 + 1
)
def test_linking_number_examples(qi, qj, g, expected):
    assert linking_number(TamePrime(qi, 3), TamePrime(qj, 3), g) == expected
    assert linking_number_brute(qi, qj, g, 3) == expected


def test_linking_number_errors():
    with pytest.raises(InvalidInputError):
        linking_number(TamePrime(7, 3), TamePrime(19, 3), 7)  # 7 has order 3 mod 19
    with pytest.raises(InvalidInputError):
        linking_number(TamePrime(7, 3), TamePrime(7, 3), 3)
    with pytest.raises(InvalidInputError):
        linking_number(TamePrime(7, 3), TamePrime(11, 5), 2)


def test_linking_matrix_two_primes():
    L = linking_matrix(3, [7, 19])
    assert L.to_rows() == [[None, 0], [1, None]]
    assert linking_matrix(3, [7, 19], roots=[3, 2]) == L


def test_headline_matrix_zero_pattern():
    L = linking_matrix(3, HEADLINE)
    zeros = {
        (HEADLINE[i], HEADLINE[j])
        for i in range(4)
        for j in range(4)
        if i != j and L.entries[i][j] == 0
    }
    assert zeros == {(7, 19), (163, 19), (61, 163), (163, 61)}
    # frozen values, cross-checked against the brute-force residue oracle
    assert L.to_rows() == [[None, 0, 2, 2], [1, None, 1, 1], [1, 1, None, 0], [1, 0, 0, None]]
    for i, qi in enumerate(HEADLINE):
        for j, qj in enumerate(HEADLINE):
            if i != j:
                g = L.roots[j]
                assert L.entries[i][j] == linking_number_brute(qi, qj, g, 3)


def test_linking_matrix_is_deterministic():
    assert linking_matrix(3, HEADLINE) == linking_matrix(3, HEADLINE)


def test_linking_matrix_rejects_duplicates_and_bad_roots():
    with pytest.raises(InvalidInputError):
        linking_matrix(3, [7, 7])
    with pytest.raises(InvalidInputError):
        linking_matrix(3, [7, 19], roots=[3])
    with pytest.raises(InvalidInputError):
        linking_matrix(3, [7, 11])


def test_column_scale_equivalent_examples():
    L = LinkingMatrix.from_rows(3, [[None, 1, 2], [1, None, 1], [2, 2, None]])
    assert column_scale_equivalent(L, L)
    assert column_scale_equivalent(L, L.column_scaled([1, 2, 1]))
    M = LinkingMatrix.from_rows(3, [[None, 0, 2], [1, None, 1], [2, 2, None]])
    assert not column_scale_equivalent(M, L)
    with pytest.raises(InvalidInputError):
        column_scale_equivalent(L, LinkingMatrix.from_rows(5, L.to_rows()))


def test_permuted_relabels():
    L = linking_matrix(3, HEADLINE)
    P = L.permuted([2, 0, 3, 1])
    assert P.primes == (61, 7, 163, 19)
    assert P.ell(1, 2) == L.ell(3, 1)
    with pytest.raises(InvalidInputError):
        L.permuted([0, 0, 1, 2])


tame3 = tame_primes(3, 400)
tame5 = tame_primes(5, 400)


@st.composite
def prime_pairs(draw):
    p = draw(st.sampled_from([3, 5]))
    pool = tame3 if p == 3 else tame5
    qi, qj = draw(st.lists(st.sampled_from(pool), min_size=2, max_size=2, unique=True))
    return p, qi, qj


@given(prime_pairs(), st.integers(0, 2**32))
@settings(max_examples=150, deadline=None)
def test_zero_iff_pth_power_residue_for_any_root(pair, seed):
    p, qi, qj = pair
    rng = random.Random(seed)
    g = random_primitive_root(qj, rng)
    l = linking_number(TamePrime(qi, p), TamePrime(qj, p), g)
    assert (l == 0) == (pow(qi, (qj - 1) // p, qj) == 1)


@given(st.sampled_from([3, 5]), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_root_change_scales_columns(p, seed):
    rng = random.Random(seed)
    pool = tame3 if p == 3 else tame5
    qs = rng.sample(pool[:25], 4)
    L1 = linking_matrix(p, qs)
    L2 = linking_matrix(p, qs, [random_primitive_root(q, rng) for q in qs])
    assert column_scale_equivalent(L1, L2)
    assert column_scale_equivalent(L2, L1)


def test_qi_one_mod_qj_gives_zero():
    hits = 0
    for qj in tame3[:20]:
        for qi in tame_primes(3, 5000):
            if qi != qj and qi % qj == 1:
                hits += 1
                assert linking_number(TamePrime(qi, 3), TamePrime(qj, 3), smallest_primitive_root(qj)) == 0
    assert hits > 10


def test_tame_primes():
    assert tame_primes(3, 50) == [7, 13, 19, 31, 37, 43]
    assert tame_primes(5, 50) == [11, 31, 41]
