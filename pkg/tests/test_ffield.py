import random

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import GF, isprime
from sympy.polys.matrices import DomainMatrix

from ulrichfold import ffield
from ulrichfold.errors import ZeroInverse
from ulrichfold.ffield import PrimeField, field_inverse

P = 32003


def egcd_inverse(a, p):
    # independent oracle: extended Euclid by hand
    r0, r1, s0, s1 = p, a % p, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    assert r0 == 1
    return s0 % p


def sympy_rank(A, p):
    dm = DomainMatrix([[GF(p)(int(x)) for x in row] for row in A.tolist()], A.shape, GF(p))
    return dm.rank()


def test_inverse_matches_extended_euclid():
    F = PrimeField(P)
    rng = random.Random("inv")
    for _ in range(100):
        a = rng.randrange(1, P)
        inv = field_inverse(a, F)
        assert inv == egcd_inverse(a, P)
        assert a * inv % P == 1


def test_zero_has_no_inverse():
    with pytest.raises(ZeroInverse):
        field_inverse(0, PrimeField(P))
    with pytest.raises(ZeroInverse):
        PrimeField(7).inv(14)


@pytest.mark.parametrize("bad", [1, 2, 4, 32001, 2**31 + 11])
def test_prime_field_rejects_bad_modulus(bad):
    with pytest.raises(ValueError):
        PrimeField(bad)


@given(st.integers(min_value=0, max_value=10**7))
def test_is_prime_agrees_with_sympy(n):
    assert ffield.is_prime(n) == isprime(n)


def test_signed_representative():
    F = PrimeField(7)
    assert [F.signed(a) for a in range(7)] == [0, 1, 2, 3, -3, -2, -1]


mats = st.tuples(st.integers(1, 7), st.integers(1, 7), st.integers(0, 10**6), st.sampled_from([5, 7, 101, P]))


def _rand(m, n, seed, p, low_rank=False):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, p, size=(m, n), dtype=np.int64)
    if low_rank and m > 1:
        A[-1] = (A[0] * 3 + A[-1] * 0) % p
    return A


@given(mats, st.booleans())
def test_rank_matches_sympy(args, low):
    m, n, seed, p = args
    A = _rand(m, n, seed, p, low)
    assert ffield.rank(A, p) == sympy_rank(A, p)


@given(mats)
def test_kernel_is_complement_of_rank(args):
    m, n, seed, p = args
    A = _rand(m, n, seed, p, True)
    K = ffield.kernel(A, p)
    assert K.shape[0] == n - ffield.rank(A, p)
    if K.size:
        assert not (ffield.matmul_mod(A, K.T, p)).any()
        assert ffield.rank(K, p) == K.shape[0]


@given(mats)
def test_left_kernel_annihilates(args):
    m, n, seed, p = args
    A = _rand(m, n, seed, p, True)
    W = ffield.left_kernel(A, p)
    if W.size:
        assert not ffield.matmul_mod(W, A, p).any()
    assert W.shape[0] == m - ffield.rank(A, p)


@given(mats)
def test_solve_roundtrip(args):
    m, n, seed, p = args
    A = _rand(m, n, seed, p)
    x = np.random.default_rng(seed + 1).integers(0, p, size=n, dtype=np.int64)
    b = ffield.matmul_mod(A, x.reshape(-1, 1), p)[:, 0]
    y = ffield.solve(A, b, p)
    assert y is not None
    assert (ffield.matmul_mod(A, y.reshape(-1, 1), p)[:, 0] == b).all()


def test_solve_inconsistent():
    A = np.array([[1, 0], [1, 0]], dtype=np.int64)
    assert ffield.solve(A, np.array([1, 2], dtype=np.int64), 7) is None


def test_rref_is_reduced():
    A = _rand(5, 8, 3, 101)
    A[4] = (A[0] + A[1]) % 101
    R, piv = ffield.rref(A, 101)
    assert len(piv) == 4
    for r, c in enumerate(piv):
        col = R[:, c]
        assert col[r] == 1 and np.count_nonzero(col) == 1


def test_matmul_no_overflow():
    p = 2147483647
    A = np.full((3, 50), p - 1, dtype=np.int64)
    B = np.full((50, 2), p - 1, dtype=np.int64)
    assert (ffield.matmul_mod(A, B, p) == 50 % p).all()


def test_rowspace_tracks_rank():
    rs = ffield.RowSpace(4, 7)
    assert rs.add(np.array([1, 2, 0, 0]))
    assert rs.add(np.array([0, 1, 1, 0]))
    assert not rs.add(np.array([1, 3, 1, 0]))
    assert rs.add(np.array([0, 0, 0, 5]))
