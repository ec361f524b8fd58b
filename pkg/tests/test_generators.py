import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccrcocycle.generators import (
    BlockGenerator,
    LocalProjectionPair,
    ProjectionGeneratorError,
    classify_projection_generator,
    delta,
    expectation_semigroup,
    from_local_pair,
    gamma_left,
    is_contraction_generator,
    is_local,
    is_projection_generator,
    partial_isometry_defect,
    projection_tests,
    projection_generator,
    tensor_permutation,
    theta_pair,
    to_local_pair,
)
from ccrcocycle.matcore import BlockPartition, ValidationError, dag
from ccrcocycle.sampling import (
    perturb_generator,
    random_local_pair,
    random_projection_generator,
)

F_PROJ = np.array([[-1, 1, 0], [1, -1, 0], [0, 0, 0]], dtype=complex)


def gamma_oracle(F: BlockGenerator) -> np.ndarray:
    # evaluate in h (x) k^ tensor order with Delta = I_h (x) diag(0, 1, ..., 1)
    T = F.tensor_matrix()
    Dt = np.kron(np.eye(F.n), np.diag([0.0] + [1.0] * F.d))
    G = T + dag(T) + dag(T) @ Dt @ T
    perm = tensor_permutation(F.n, F.d)
    out = np.empty_like(G)
    out[np.ix_(perm, perm)] = G
    return out


def test_delta_is_projection_of_rank_nd():
    Dl = delta(2, 3)
    np.testing.assert_array_equal(Dl @ Dl, Dl)
    assert np.trace(Dl).real == 6


def test_tensor_roundtrip():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(6, 6))
    F = BlockGenerator.from_matrix(M, 2, 2)
    G = BlockGenerator.from_tensor_matrix(F.tensor_matrix(), 2, 2)
    np.testing.assert_array_equal(G.matrix(), M)


@pytest.mark.parametrize("F, expected", [
    (BlockGenerator.zero(1, 1), np.zeros((2, 2))),
    (BlockGenerator.from_matrix([[1j, 0], [0, 0]], 1, 1), np.zeros((2, 2))),
    (BlockGenerator.from_matrix(F_PROJ, 1, 2), F_PROJ),
])
def test_gamma_left_examples(F, expected):
    np.testing.assert_allclose(gamma_oracle(F), expected, atol=1e-15)
    np.testing.assert_allclose(gamma_left(F), expected, atol=1e-15)


def test_gamma_left_matches_tensor_oracle_randomly():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n, d = int(rng.integers(1, 3)), int(rng.integers(0, 4))
        M = rng.normal(size=(n * (1 + d),) * 2) + 1j * rng.normal(size=(n * (1 + d),) * 2)
        F = BlockGenerator.from_matrix(M, n, d)
        np.testing.assert_allclose(gamma_left(F), gamma_oracle(F), atol=1e-12)


def test_is_contraction_generator_examples():
    assert is_contraction_generator(BlockGenerator.zero(2, 1))
    assert is_contraction_generator(BlockGenerator.from_matrix(F_PROJ, 1, 2))
    assert not is_contraction_generator(BlockGenerator.from_matrix([[1, 0], [0, 0]], 1, 1))


def test_classify_examples():
    L, P = classify_projection_generator(BlockGenerator.from_matrix(F_PROJ, 1, 2))
    np.testing.assert_allclose(L, [[1], [0]])
    np.testing.assert_allclose(P, np.diag([0, 1]))
    np.testing.assert_allclose(P @ L, 0)

    L, P = classify_projection_generator(BlockGenerator.zero(1, 2))
    np.testing.assert_allclose(L, 0)
    np.testing.assert_allclose(P, np.eye(2))

    with pytest.raises(ProjectionGeneratorError) as exc:
        classify_projection_generator(BlockGenerator.from_matrix([[-1, 1], [1, 0]], 1, 1))
    assert exc.value.reason == "structure-violated"


def test_classify_reasons():
    part = BlockPartition.discrete(2)
    F = BlockGenerator.from_matrix(np.diag([0, 1.0, 0, 0]), 2, 1)
    with pytest.raises(ProjectionGeneratorError) as exc:
        classify_projection_generator(F, BlockPartition.single(2))
    assert exc.value.reason == "not-in-algebra"
    with pytest.raises(ProjectionGeneratorError) as exc:
        classify_projection_generator(F, part)
    assert exc.value.reason == "identity-violated"


def test_classify_degenerate_no_noise():
    assert is_projection_generator(BlockGenerator.zero(2, 0))
    assert not is_projection_generator(BlockGenerator.from_matrix(-np.eye(2), 2, 0))


def test_remark_example_nonlocal_projection_generator():
    # dim h = 2, k = C, L = 0, P a nontrivial projection on h
    P = np.diag([1.0, 0.0])
    F = projection_generator(np.zeros((2, 2)), P, 2, 1)
    assert is_projection_generator(F)
    assert not is_local(F)


def test_is_local_examples():
    rng = np.random.default_rng(2)
    assert is_local(BlockGenerator.from_matrix(rng.normal(size=(3, 3)), 1, 2))
    f = rng.normal(size=(2, 2))
    assert is_local(BlockGenerator.from_tensor_matrix(np.kron(np.eye(2), f), 2, 1))
    F = BlockGenerator(2, 1, np.diag([0, 1]), np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2)))
    assert not is_local(F)


def test_from_local_pair_examples():
    F = from_local_pair(LocalProjectionPair(np.diag([0, 1]), [1, 0]))
    np.testing.assert_allclose(F.matrix(), F_PROJ)
    F = from_local_pair(LocalProjectionPair(np.eye(2), [0, 0]))
    np.testing.assert_allclose(F.matrix(), 0)
    F = from_local_pair(LocalProjectionPair(np.zeros((1, 1)), [0]))
    np.testing.assert_allclose(F.matrix(), [[0, 0], [0, -1]])


def test_local_pair_validation():
    with pytest.raises(ValidationError):
        LocalProjectionPair(np.diag([1, 0]), [1, 0])
    with pytest.raises(ValidationError):
        LocalProjectionPair(np.array([[1, 1], [0, 0]]), [0, 0])


def test_local_pair_roundtrip_and_properties():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        d = int(rng.integers(1, 5))
        n = int(rng.integers(1, 3))
        pair = random_local_pair(d, rng)
        F = from_local_pair(pair, n)
        assert is_contraction_generator(F)
        assert is_local(F)
        L, P = classify_projection_generator(F)
        np.testing.assert_allclose(P, np.kron(np.eye(n), pair.P), atol=1e-12)
        back = to_local_pair(F)
        np.testing.assert_allclose(back.u, pair.u, atol=1e-12)
        np.testing.assert_allclose(back.P, pair.P, atol=1e-12)


def test_identity_and_block_tests_agree_on_random_inputs():
    rng = np.random.default_rng(6)
    for k in range(1000):
        n, d = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        F, part, _, _ = random_projection_generator(n, d, rng)
        if k % 2:
            F = perturb_generator(F, rng, size=float(rng.uniform(1e-3, 0.5)))
        member, ident, struct = projection_tests(F, part)
        assert ident == struct
        assert ident == (k % 2 == 0)


def test_isometric_type_generators_have_zero_gamma():
    rng = np.random.default_rng(8)
    for _ in range(50):
        n, d = int(rng.integers(1, 3)), int(rng.integers(0, 3))
        w = rng.normal()
        M = np.zeros((n * (1 + d),) * 2, dtype=complex)
        M[:n, :n] = 1j * w * np.eye(n)
        np.testing.assert_allclose(gamma_left(BlockGenerator.from_matrix(M, n, d)), 0, atol=1e-15)


def test_partial_isometry_defect_examples():
    np.testing.assert_allclose(partial_isometry_defect(BlockGenerator.zero(1, 2)), 0)
    rng = np.random.default_rng(9)
    for _ in range(100):
        F, *_ = random_projection_generator(int(rng.integers(1, 3)), int(rng.integers(1, 4)), rng)
        assert np.abs(partial_isometry_defect(F)).max() < 1e-12


def test_theta_pair_examples():
    Z = BlockGenerator.zero(1, 2)
    tf, tg = theta_pair(Z)
    assert not tf.any() and not tg.any()
    H = BlockGenerator.from_matrix([[0, 0, 0], [0, -1, 0], [0, 1, -1]], 1, 2)
    tf, tg = theta_pair(H)
    np.testing.assert_allclose(tf, np.diag([0, 0, -1]), atol=1e-15)
    np.testing.assert_allclose(tg, np.diag([0, -1, 0]), atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_theta_pair_of_projection_generator_is_itself(seed):
    rng = np.random.default_rng(seed)
    F, *_ = random_projection_generator(int(rng.integers(1, 3)), int(rng.integers(1, 4)), rng)
    tf, tg = theta_pair(F)
    np.testing.assert_allclose(tf, F.matrix(), atol=1e-12)
    np.testing.assert_allclose(tg, F.matrix(), atol=1e-12)


def test_expectation_semigroup_examples():
    F = BlockGenerator.from_matrix([[-1, 1], [1, -1]], 1, 1)
    np.testing.assert_allclose(expectation_semigroup(F, 0), np.eye(1))
    assert expectation_semigroup(F, 1)[0, 0].real == pytest.approx(np.exp(-1), abs=1e-14)
    np.testing.assert_allclose(expectation_semigroup(BlockGenerator.zero(2, 1), 3.7), np.eye(2))
    with pytest.raises(ValidationError):
        expectation_semigroup(F, -1)
