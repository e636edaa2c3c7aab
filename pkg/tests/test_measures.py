import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from clustersync import eigen
from clustersync.measures import WeightMatrix, mu_1, mu_2, mu_2_weighted, mu_inf, similarity

NORM_ORD = {"1": 1, "2": 2, "inf": np.inf}
MEASURES = {"1": mu_1, "2": mu_2, "inf": mu_inf}


def limit_estimate(A, ord, h=1e-6, P=None):
    """(||I + hA|| - 1) / h for an induced norm, optionally weighted by P."""
    M = np.eye(len(A)) + h * A
    if P is not None:
        M = P @ M @ np.linalg.inv(P)
    return (np.linalg.norm(M, ord) - 1.0) / h


small_matrices = st.integers(2, 5).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-5, 5, allow_nan=False, allow_subnormal=False)))


def random_spd(rng, n):
    B = rng.normal(size=(n, n))
    return B @ B.T + n * np.eye(n)


@pytest.mark.parametrize("name", ["1", "2", "inf"])
def test_closed_forms_on_examples(name):
    A = np.array([[-3.0, 1.0], [2.0, -1.0]])
    expected = {"1": max(-3 + 2, -1 + 1), "inf": max(-3 + 1, -1 + 2),
                "2": max(np.linalg.eigvalsh(0.5 * (A + A.T)))}[name]
    assert MEASURES[name](A) == pytest.approx(expected, abs=1e-14)


@settings(max_examples=80, deadline=None)
@given(small_matrices, st.sampled_from(["1", "2", "inf"]))
def test_property_matches_defining_limit(A, name):
    assert MEASURES[name](A) == pytest.approx(limit_estimate(A, NORM_ORD[name]), abs=1e-4)


@settings(max_examples=60, deadline=None)
@given(small_matrices, small_matrices, st.sampled_from(["1", "2", "inf"]))
def test_property_subadditive(A, B, name):
    if A.shape != B.shape:
        return
    mu = MEASURES[name]
    assert mu(A + B) <= mu(A) + mu(B) + 1e-9


@settings(max_examples=60, deadline=None)
@given(small_matrices, st.floats(-10, 10), st.floats(0, 10), st.sampled_from(["1", "2", "inf"]))
def test_property_shift_and_scaling(A, c, alpha, name):
    mu = MEASURES[name]
    I = np.eye(len(A))
    assert mu(A + c * I) == pytest.approx(mu(A) + c, abs=1e-9)
    assert mu(alpha * A) == pytest.approx(alpha * mu(A), abs=1e-9 * max(1.0, alpha))


@settings(max_examples=60, deadline=None)
@given(small_matrices, st.sampled_from(["1", "2", "inf"]))
def test_property_bounds(A, name):
    mu = MEASURES[name]
    assert max(np.linalg.eigvals(A).real) <= mu(A) + 1e-9
    assert abs(mu(A)) <= np.linalg.norm(A, NORM_ORD[name]) + 1e-9
    assert -mu(-A) <= mu(A) + 1e-9


def test_weighted_measure_matches_limit():
    rng = np.random.default_rng(0)
    for n in (2, 3, 4):
        A = rng.normal(size=(n, n))
        P = random_spd(rng, n)
        assert mu_2_weighted(A, P) == pytest.approx(limit_estimate(A, 2, P=P), abs=1e-4)


def test_weighted_identity_is_plain():
    A = np.array([[0.5, -2.0], [1.0, -3.0]])
    assert mu_2_weighted(A, np.eye(2)) == pytest.approx(mu_2(A), abs=1e-14)


def test_similarity_uses_inverse():
    rng = np.random.default_rng(4)
    A, P = rng.normal(size=(3, 3)), random_spd(rng, 3)
    assert np.allclose(similarity(A, P), P @ A @ np.linalg.inv(P), atol=1e-12)


def test_lemma_semidefinite():
    # P^2 A + A^T P^2 - 2 mu P^2 <= 0 with mu = mu_{2,P}[A]
    rng = np.random.default_rng(9)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        A = rng.normal(size=(n, n))
        P = random_spd(rng, n)
        mu = mu_2_weighted(A, P)
        P2 = P @ P
        S = P2 @ A + A.T @ P2 - 2 * mu * P2
        assert eigen.eigvalsh(0.5 * (S + S.T))[-1] <= 1e-8 * max(1.0, np.abs(S).max())


def test_weight_matrix_validation():
    with pytest.raises(ValueError, match="symmetric"):
        WeightMatrix([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(ValueError, match="positive definite"):
        WeightMatrix([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(ValueError, match="condition"):
        WeightMatrix(np.diag([1.0, 1e-13]))
    P = WeightMatrix(np.diag([1.0, 2.0]))
    assert np.array_equal(P.P2, np.diag([1.0, 4.0]))
    assert np.array_equal(np.asarray(P), np.diag([1.0, 2.0]))
    with pytest.raises(ValueError):
        P.P[0, 0] = 3.0


def test_non_square_rejected():
    with pytest.raises(ValueError, match="square"):
        mu_1(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="does not match"):
        mu_2_weighted(np.zeros((2, 2)), np.eye(3))
