import json

import pytest
from hypothesis import given, settings, strategies as st

from twistlab.linalg import (
    IntMatrix,
    determinant,
    integral_kernel,
    is_prime,
    rank,
    rank_mod_p,
    smith_normal_form,
)

from conftest import cofactor_det, rational_rank


def matrices(max_rows=6, max_cols=6, lo=-9, hi=9):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(
                st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=m, max_size=m
            )
        )
    ).map(IntMatrix)


def square_matrices(max_n=6, lo=-9, hi=9):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n
        )
    ).map(IntMatrix)


def test_determinant_examples():
    assert determinant(IntMatrix.identity(4)) == 1
    assert determinant(IntMatrix([[1, 2], [2, 4]])) == 0
    assert cofactor_det([[2, 4], [6, 8]]) == -8
    assert determinant(IntMatrix([[2, 4], [6, 8]])) == -8


def test_determinant_rejects_non_square():
    with pytest.raises(ValueError):
        determinant(IntMatrix([[1, 2, 3], [4, 5, 6]]))


@settings(max_examples=300)
@given(square_matrices())
def test_determinant_matches_cofactor_expansion(A):
    assert determinant(A) == cofactor_det(A.tolist())


@given(st.integers(1, 5).flatmap(
    lambda n: st.tuples(*[st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n),
                                   min_size=n, max_size=n)] * 2)))
def test_determinant_is_multiplicative(pair):
    A, B = IntMatrix(pair[0]), IntMatrix(pair[1])
    assert determinant(A @ B) == determinant(A) * determinant(B)


def test_determinant_big_entries():
    # entries far beyond 64 bits
    big = 10 ** 30
    A = IntMatrix([[big, 1], [1, big]])
    assert determinant(A) == big * big - 1


def test_smith_examples():
    assert smith_normal_form(IntMatrix.diag([2, 4])).d == (2, 4)
    z = smith_normal_form(IntMatrix.zeros(3, 2))
    assert z.d == (0, 0) and z.rank == 0
    snf = smith_normal_form(IntMatrix([[2, 4], [6, 8]]))
    assert snf.d == (2, 4)
    assert snf.torsion == (2, 4)


def _check_smith(A):
    snf = smith_normal_form(A)
    assert snf.U @ A @ snf.V == snf.diagonal_matrix(A.rows, A.cols)
    assert abs(determinant(snf.U)) == 1
    assert abs(determinant(snf.V)) == 1
    r = snf.rank
    assert all(x > 0 for x in snf.d[:r])
    assert all(x == 0 for x in snf.d[r:])
    assert all(snf.d[i + 1] % snf.d[i] == 0 for i in range(r - 1))
    assert r == rational_rank(A.tolist())
    return snf


@settings(max_examples=300)
@given(matrices())
def test_smith_invariants(A):
    snf = _check_smith(A)
    if A.is_square and snf.rank == A.rows:
        prod = 1
        for x in snf.d:
            prod *= x
        assert prod == abs(determinant(A))


@given(matrices(lo=-2, hi=2))
def test_smith_invariants_sparse(A):
    _check_smith(A)


def test_rank_mod_p_examples():
    for n in (1, 3, 5):
        for p in (2, 3, 7):
            assert rank_mod_p(IntMatrix.identity(n), p) == n
    A = IntMatrix([[2, 4], [6, 8]])
    assert rank_mod_p(A, 2) == 0
    assert rank_mod_p(A, 3) == 2


def test_rank_mod_p_rejects_composite():
    with pytest.raises(ValueError):
        rank_mod_p(IntMatrix.identity(2), 4)
    with pytest.raises(ValueError):
        rank_mod_p(IntMatrix.identity(2), 1)


def brute_rank_mod_p(rows, p):
    """Rank over F_p as log_p of the number of distinct row-space vectors (tiny cases)."""
    from itertools import product

    m, n = len(rows), len(rows[0])
    span = set()
    for coeffs in product(range(p), repeat=m):
        span.add(tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % p for j in range(n)))
    k = 0
    while p ** k < len(span):
        k += 1
    return k


@given(matrices(max_rows=3, max_cols=3), st.sampled_from([2, 3, 5]))
def test_rank_mod_p_matches_enumeration(A, p):
    assert rank_mod_p(A, p) == brute_rank_mod_p(A.tolist(), p)


@settings(max_examples=200)
@given(matrices(), st.sampled_from([2, 3, 5, 7, 11]))
def test_rank_mod_p_bounded_by_rational_rank(A, p):
    r = rank(A)
    rp = rank_mod_p(A, p)
    assert rp <= r
    snf = smith_normal_form(A)
    if all(x % p for x in snf.d[: snf.rank]):
        assert rp == r


def test_kernel_examples():
    assert integral_kernel(IntMatrix.identity(3)) == []
    assert len(integral_kernel(IntMatrix.zeros(1, 2))) == 2
    (k,) = integral_kernel(IntMatrix([[1, 2], [2, 4]]))
    # same lattice as (2, -1): a primitive multiple
    assert k in ((2, -1), (-2, 1))


@settings(max_examples=300)
@given(matrices())
def test_kernel_is_a_lattice_basis(A):
    basis = integral_kernel(A)
    for k in basis:
        assert all(x == 0 for x in A.apply(k))
    assert len(basis) + rank(A) == A.cols
    if basis:
        # primitive lattice: the basis extends to a unimodular matrix, so its
        # maximal minors have gcd 1, i.e. its Smith entries are all 1
        snf = smith_normal_form(IntMatrix(basis))
        assert snf.d[: snf.rank] == (1,) * len(basis)


def test_matrix_json_roundtrip():
    A = IntMatrix([[1, -2], [3, 10 ** 25]])
    assert IntMatrix.from_json(A.to_json()) == A
    assert json.loads(A.to_json()) == [[1, -2], [3, 10 ** 25]]


def test_matrix_shape_checks():
    with pytest.raises(ValueError):
        IntMatrix([[1, 2], [3]])
    with pytest.raises(ValueError):
        IntMatrix([])
    with pytest.raises(ValueError):
        IntMatrix([[1, 2]]) @ IntMatrix([[1, 2]])


def test_is_prime():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
