import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccrcocycle.matcore import (
    BlockPartition,
    DimensionError,
    Tolerance,
    ValidationError,
    dag,
    in_algebra,
    is_projection,
    is_psd,
    opnorm,
    pisometry_between,
    rank,
)
from ccrcocycle.sampling import random_partition, random_projection, random_unitary

TOL = Tolerance()


def eig2_hermitian(M):
    # closed-form eigenvalues of a 2x2 Hermitian matrix
    a, d = M[0, 0].real, M[1, 1].real
    b = abs(M[0, 1])
    mid, rad = (a + d) / 2, np.hypot((a - d) / 2, b)
    return mid - rad, mid + rad


@pytest.mark.parametrize("M, expected", [
    (np.zeros((2, 2)), True),
    (np.array([[-1, 1], [1, -1]]), False),
    (np.array([[1, 1], [1, 1]]), True),
])
def test_is_psd_examples(M, expected):
    lo, _ = eig2_hermitian(np.asarray(M, dtype=complex))
    assert (lo >= -1e-12) == expected
    assert is_psd(M, TOL) == expected


def test_is_psd_rejects_non_square():
    with pytest.raises(DimensionError):
        is_psd(np.zeros((2, 3)))


def test_is_psd_rejects_non_hermitian():
    assert not is_psd(np.array([[1, 1], [0, 1]]))


@pytest.mark.parametrize("M, expected", [
    (np.eye(3), 3),
    (np.diag([1, 0]), 1),
    (np.array([[1, 1], [1, 1]]), 1),
    (np.zeros((2, 2)), 0),
])
def test_rank_examples(M, expected):
    assert rank(M) == expected


@pytest.mark.parametrize("M, expected", [
    (np.diag([1, 0]), True),
    (np.full((2, 2), 0.5), True),
    (np.array([[1, 1], [0, 0]]), False),
])
def test_is_projection_examples(M, expected):
    assert is_projection(M) == expected


def test_pisometry_examples():
    D = pisometry_between(np.diag([1, 0]), np.diag([0, 1]))
    np.testing.assert_allclose(D, [[0, 0], [1, 0]], atol=1e-15)
    np.testing.assert_allclose(pisometry_between(np.eye(3), np.eye(3)), np.eye(3), atol=1e-15)
    assert pisometry_between(np.diag([1, 0]), np.zeros((2, 2))) is None


def test_pisometry_same_projection_returns_it():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = random_projection(4, int(rng.integers(0, 5)), rng)
        np.testing.assert_allclose(pisometry_between(p, p), p, atol=1e-10)


def test_pisometry_rejects_non_projection():
    with pytest.raises(ValidationError):
        pisometry_between(np.array([[1, 1], [0, 0]]), np.eye(2))


def test_pisometry_deterministic():
    rng = np.random.default_rng(7)
    p, q = random_projection(4, 2, rng), random_projection(4, 2, rng)
    assert np.array_equal(pisometry_between(p, q), pisometry_between(p.copy(), q.copy()))


def test_pisometry_random_pairs_property():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        d = int(rng.integers(1, 6))
        r = int(rng.integers(0, d + 1))
        p, q = random_projection(d, r, rng), random_projection(d, r, rng)
        D = pisometry_between(p, q)
        assert D is not None
        assert opnorm(dag(D) @ D - p) <= 10 * TOL.atol
        assert opnorm(D @ dag(D) - q) <= 10 * TOL.atol


def test_pisometry_blockwise():
    part = BlockPartition(2, ((0,), (1,)))
    # block 0: rank 1 both; block 1: rank 1 both, so equivalent blockwise
    p = part.assemble([np.diag([1, 0]), np.diag([0, 1])])
    q = part.assemble([np.diag([0, 1]), np.diag([1, 0])])
    D = pisometry_between(p, q, part)
    assert in_algebra(D, part, 2)
    assert opnorm(dag(D) @ D - p) < 1e-12 and opnorm(D @ dag(D) - q) < 1e-12
    # same total rank, different block ranks: not equivalent in N (x) B(k)
    q2 = part.assemble([np.eye(2), np.zeros((2, 2))])
    assert pisometry_between(p, q2) is not None
    assert pisometry_between(p, q2, part) is None


def test_partition_validation():
    with pytest.raises(ValidationError):
        BlockPartition(3, ((0, 1), (1, 2)))
    with pytest.raises(ValidationError):
        BlockPartition(3, ((0, 1),))
    with pytest.raises(ValidationError):
        BlockPartition(2, ((0, 1), ()))


def test_in_algebra_examples():
    rng = np.random.default_rng(0)
    part = BlockPartition(3, ((0, 2), (1,)))
    T_B = rng.normal(size=(2, 2))
    assert in_algebra(np.kron(part.projector(0), T_B), part, 2)
    T = np.kron(part.projector(0), T_B)
    T[0, 2] = 1.0  # couples h-indices 0 and 1
    assert not in_algebra(T, part, 2)
    single = BlockPartition.single(1)
    assert in_algebra(rng.normal(size=(3, 3)), single, 3)
    with pytest.raises(DimensionError):
        in_algebra(np.eye(5), part, 2)


def test_in_algebra_block_fibers_must_agree():
    part = BlockPartition(2, ((0, 1),))
    T = np.kron(np.diag([1.0, 2.0]), np.eye(2))
    assert not in_algebra(T, part, 2)
    assert in_algebra(T, BlockPartition.discrete(2), 2)


@st.composite
def algebra_elements(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    part = random_partition(n, rng, max_blocks=3)
    S = part.assemble([rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in part.blocks])
    T = part.assemble([rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in part.blocks])
    return part, d, S, T


@settings(max_examples=200, deadline=None)
@given(algebra_elements())
def test_in_algebra_closed_under_products_and_adjoints(data):
    part, d, S, T = data
    tol = Tolerance(1e-8)
    assert in_algebra(S, part, d, tol) and in_algebra(T, part, d, tol)
    assert in_algebra(S @ T, part, d, tol)
    assert in_algebra(dag(S), part, d, tol)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rank_unitarily_invariant(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 7))
    r = int(rng.integers(0, d + 1))
    X = rng.normal(size=(d, r)) @ rng.normal(size=(r, d))
    U, W = random_unitary(d, rng), random_unitary(d, rng)
    assert rank(X) == rank(U @ X @ W) == r
