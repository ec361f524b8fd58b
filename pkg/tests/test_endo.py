import numpy as np
import pytest

from ccrcocycle.endo import (
    NormalHom,
    apply,
    choi_matrix,
    coordinate_commutant_projections,
    difference_choi,
    distinct_subordinates,
    dominates_endo,
    is_commutant_projection,
    is_two_positive,
    matrix_unit,
    same_subordinate,
    subordinate,
    subordinate_hom,
    unit,
)
from ccrcocycle.matcore import DimensionError, ValidationError, dag, is_psd, opnorm
from ccrcocycle.sampling import random_commutant_projection, random_hom, random_unitary

EMBED = NormalHom(2, 1, 3, np.eye(3)[:, :2])  # S -> S + 0


def test_apply_examples():
    rng = np.random.default_rng(0)
    S = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    np.testing.assert_allclose(apply(NormalHom(2, 1, 2, np.eye(2)), S), S)
    np.testing.assert_allclose(apply(NormalHom(2, 2, 4, np.eye(4)), S), np.kron(S, np.eye(2)))
    out = apply(EMBED, S)
    np.testing.assert_allclose(out[:2, :2], S)
    assert not out[2].any() and not out[:, 2].any()
    with pytest.raises(DimensionError):
        apply(EMBED, np.eye(3))


def test_hom_validation():
    with pytest.raises(ValidationError):
        NormalHom(2, 1, 2, np.ones((2, 2)))
    with pytest.raises(DimensionError):
        NormalHom(2, 2, 3, np.eye(3))


def test_apply_is_star_homomorphism():
    rng = np.random.default_rng(1)
    for _ in range(50):
        h = random_hom(rng)
        S, T = (rng.normal(size=(h.m, h.m)) + 1j * rng.normal(size=(h.m, h.m)) for _ in range(2))
        np.testing.assert_allclose(apply(h, S @ T), apply(h, S) @ apply(h, T), atol=1e-12)
        np.testing.assert_allclose(apply(h, dag(S)), dag(apply(h, S)), atol=1e-12)


def test_commutant_examples():
    assert is_commutant_projection(EMBED, unit(EMBED))
    assert is_commutant_projection(EMBED, np.diag([0, 0, 1]))
    assert not is_commutant_projection(EMBED, np.diag([1, 0, 0]))
    tensor = NormalHom(2, 2, 4, np.eye(4))
    assert is_commutant_projection(tensor, np.kron(np.eye(2), np.diag([1, 0])))
    assert not is_commutant_projection(tensor, np.kron(np.diag([1, 0]), np.eye(2)))
    with pytest.raises(ValidationError):
        is_commutant_projection(EMBED, np.ones((3, 3)))


def test_random_commutant_projections_pass_both_tests():
    rng = np.random.default_rng(2)
    for _ in range(200):
        h = random_hom(rng)
        assert is_commutant_projection(h, random_commutant_projection(h, rng))


def test_subordinate_examples():
    rng = np.random.default_rng(3)
    h = random_hom(rng)
    S = rng.normal(size=(h.m, h.m))
    np.testing.assert_allclose(subordinate(h, unit(h))(S), apply(h, S), atol=1e-12)
    np.testing.assert_allclose(subordinate(h, np.zeros((h.n, h.n)))(S), 0, atol=1e-15)
    # the isometry example: P = I gives alpha, P = 0 + 0 + 1 gives 0
    S = rng.normal(size=(2, 2))
    np.testing.assert_allclose(subordinate(EMBED, np.eye(3))(S), apply(EMBED, S))
    np.testing.assert_allclose(subordinate(EMBED, np.diag([0, 0, 1]))(S), 0)
    with pytest.raises(ValidationError):
        subordinate(EMBED, np.diag([1, 0, 0]))


def test_subordinate_choi_of_difference_is_psd():
    rng = np.random.default_rng(4)
    for _ in range(500):
        h = random_hom(rng)
        P = random_commutant_projection(h, rng)
        gamma = subordinate(h, P)
        diff = choi_matrix(lambda S: apply(h, S), h.m) - gamma.choi()
        assert np.linalg.eigvalsh(diff).min() >= -1e-9


def test_choi_matrix_of_identity_is_unnormalised_bell_projector():
    C = choi_matrix(lambda S: S, 2)
    v = np.zeros(4)
    v[0] = v[3] = 1
    np.testing.assert_allclose(C, np.outer(v, v))


def test_dominates_endo_examples():
    rng = np.random.default_rng(5)
    for _ in range(100):
        h = random_hom(rng)
        assert dominates_endo(h, h)
        r = int(rng.integers(0, h.j + 1))
        U = random_unitary(h.j, rng)
        q = U[:, :r] @ dag(U[:, :r])
        beta = subordinate_hom(h, q)
        assert dominates_endo(h, beta)
        P = h.V @ np.kron(np.eye(h.m), q) @ dag(h.V)
        S = rng.normal(size=(h.m, h.m))
        np.testing.assert_allclose(apply(beta, S), subordinate(h, P)(S), atol=1e-12)


def test_dominates_endo_negative_cases():
    rng = np.random.default_rng(6)
    found = 0
    for _ in range(200):
        a = random_hom(rng)
        j = int(rng.integers(1, a.n // a.m + 1))
        b = NormalHom(a.m, j, a.n, random_unitary(a.n, rng)[:, : a.m * j])
        holds = dominates_endo(a, b)  # raises if the two tests disagree
        if not holds:
            found += 1
            assert not is_psd(difference_choi(a, b))
    assert found > 150


def test_dominates_endo_dimension_mismatch():
    with pytest.raises(DimensionError):
        dominates_endo(EMBED, NormalHom(2, 1, 2, np.eye(2)))


def test_two_positive_and_choi_agree_on_subordinates():
    rng = np.random.default_rng(7)
    for _ in range(200):
        h = random_hom(rng)
        P = random_commutant_projection(h, rng)
        gamma = subordinate(h, P)

        def diff(S, h=h, gamma=gamma):
            return apply(h, S) - gamma(S)

        assert is_two_positive(diff, h.m)
        assert is_psd(choi_matrix(diff, h.m))


def test_two_positive_detects_transpose():
    # transpose on M_3 is positive but not 2-positive
    assert not is_two_positive(lambda S: S.T, 3)
    assert is_two_positive(lambda S: S, 3)


def test_same_subordinate_examples():
    P = np.diag([0, 0, 1]).astype(complex)
    assert same_subordinate(EMBED, P, P)
    assert same_subordinate(EMBED, P, np.zeros((3, 3)))
    assert same_subordinate(EMBED, np.eye(3), unit(EMBED))
    assert not same_subordinate(EMBED, unit(EMBED), np.zeros((3, 3)))
    with pytest.raises(ValidationError):
        same_subordinate(EMBED, np.diag([1, 0, 0]), np.eye(3))


def test_isometry_example_subordinates_are_alpha_and_zero():
    reps = distinct_subordinates(EMBED)
    assert len(reps) == 2
    rng = np.random.default_rng(8)
    S = rng.normal(size=(2, 2))
    outs = sorted((opnorm(g(S)) for _, g in reps))
    assert outs[0] == 0
    assert outs[1] == pytest.approx(opnorm(apply(EMBED, S)))
    assert len(list(coordinate_commutant_projections(EMBED))) == 4


def test_unital_automorphism_has_only_trivial_subordinates():
    rng = np.random.default_rng(9)
    for _ in range(50):
        m = int(rng.integers(1, 4))
        alpha = NormalHom(m, 1, m, random_unitary(m, rng))
        reps = distinct_subordinates(alpha)
        assert len(reps) == 2
        beta = NormalHom(m, 1, m, random_unitary(m, rng))
        # another automorphism dominates only if it equals alpha
        same = all(opnorm(apply(alpha, matrix_unit(m, a, b)) - apply(beta, matrix_unit(m, a, b))) < 1e-9
                   for a in range(m) for b in range(m))
        assert dominates_endo(alpha, beta) == same
