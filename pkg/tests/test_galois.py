import logging
import time

import pytest

from mildp import galois, linalg
from mildp.arith import TamePrime, linking_matrix
from mildp.errors import InvalidInputError, ResourceLimitError
from mildp.galois import (
    find_labeling,
    is_degenerate,
    koch_presentation,
    koch_presentation_wild,
    linking_diagram,
    reduce_mod_pi,
    wild_linking_number,
)
from mildp.mildness import Partition, build_ML, check_corollary7, circuit_columns, strong_freeness_oracle

HEADLINE = (7, 19, 61, 163)


def test_koch_presentation_headline():
    P = koch_presentation(3, HEADLINE)
    assert P.generators == 4 and len(P.relators) == 4
    # c_i = (q_i - 1)/3 mod 3
    assert [r.pi_part[i] for i, r in enumerate(P.relators)] == [2, 0, 2, 0]
    L = linking_matrix(3, HEADLINE)
    for i, r in enumerate(P.relators):
        for j in range(4):
            if j != i:
                assert r.coefficient(i + 1, j + 1) == L.entries[i][j]


def test_wild_linking_number_brute_force():
    for q in [7, 13, 19, 31, 37, 43, 61, 163]:
        l = wild_linking_number(TamePrime(q, 3))
        assert (q * pow(4, l, 9)) % 9 == 1


def test_wild_presentation():
    P = koch_presentation_wild(3, [7, 19])
    assert P.generators == 3 and len(P.relators) == 2 and P.wild
    assert [row[-1] for row in P.linking] == [1, 0]
    assert P.relators[0].coefficient(1, 3) == 1
    D = linking_diagram(P)
    assert D.vertices[-1] == "p=3"


def test_reduce_mod_pi_keeps_positions(caplog):
    P = koch_presentation(3, HEADLINE)
    red = reduce_mod_pi(P)
    assert all(r.pi_part == (0,) * 4 for r in red)
    assert not is_degenerate(red)
    # 7 and 181 are cubic residues of each other, so both relators vanish mod pi
    P = koch_presentation(3, [7, 181])
    with caplog.at_level(logging.WARNING):
        red = reduce_mod_pi(P)
    assert len(red) == 2 and is_degenerate(red)
    assert "degenerate" in caplog.text


def test_linking_diagram():
    D = linking_diagram(linking_matrix(3, HEADLINE))
    assert D.directed and len(D.edges) == 8
    U = linking_diagram([[0, 1, 3], [1, 0, 2], [3, 2, 0]], 3)
    assert not U.directed and U.edges == {(0, 1): 1, (1, 2): 2}
    with pytest.raises(InvalidInputError):
        linking_diagram([[0, 1], [2, 0]], 3)
    with pytest.raises(InvalidInputError):
        linking_diagram([[0, 1], [1, 0]])


def test_find_labeling_headline():
    start = time.perf_counter()
    lab = find_labeling(3, HEADLINE)
    elapsed = time.perf_counter() - start
    assert lab is not None and lab.verdict.is_mild
    assert lab.order == (61, 7, 163, 19)
    assert set(lab.order[0::2]) == {61, 163}
    assert elapsed < 0.1


def test_labeling_relators_pass_partition_criterion():
    lab = find_labeling(3, HEADLINE)
    rels = reduce_mod_pi(koch_presentation(3, lab.order))
    P = Partition.of(4, {1, 3})
    assert check_corollary7(rels, P).is_mild
    det = linalg.det(build_ML(rels, P, circuit_columns(4)).tolist(), 3)
    assert det == lab.verdict.certificate.determinant == 2
    assert strong_freeness_oracle(rels, 5).consistent


def test_find_labeling_exhaustive_agreement():
    # the DFS with pruning finds a labeling exactly when some permutation passes
    from itertools import permutations

    from mildp.arith import tame_primes
    from mildp.mildness import check_theorem1

    pool = tame_primes(3, 120)
    import random

    rng = random.Random(3)
    for _ in range(25):
        S = rng.sample(pool, 4)
        L = linking_matrix(3, S)
        first = next(
            (perm for perm in permutations(range(4)) if check_theorem1(L.permuted(perm)).is_mild), None
        )
        lab = find_labeling(3, S)
        assert (lab is None) == (first is None)
        if lab is not None:
            assert lab.indices == first


def test_find_labeling_errors():
    with pytest.raises(InvalidInputError):
        find_labeling(3, [7, 19, 61])
    with pytest.raises(ResourceLimitError):
        find_labeling(3, list(range(12)), cap=10)
