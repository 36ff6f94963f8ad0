import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qzeno import qalg
from qzeno.errors import InvalidDensity, NonHermitianInput, NotNormalized


def test_expm_zero_generator_is_identity():
    assert np.allclose(qalg.expm_hermitian(np.zeros((2, 2)), 3.7), np.eye(2), atol=1e-15)


def test_expm_pi_pulse_swaps_population():
    u = qalg.expm_hermitian(0.5 * qalg.SIGMA_X, math.pi)
    assert abs(u[0, 0]) < 1e-15
    assert abs(abs(u[0, 1]) - 1) < 1e-15


def test_expm_diagonal_generator():
    u = qalg.expm_hermitian(np.diag([0.0, 1.0]), 0.7)
    np.testing.assert_allclose(u, np.diag([1.0, np.exp(-0.7j)]), atol=1e-15)


def test_expm_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        qalg.expm_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


def test_eig_sigma_z():
    w, v = qalg.hermitian_eig(qalg.SIGMA_Z)
    np.testing.assert_allclose(w, [-1, 1])


def test_eig_sigma_x_vectors():
    w, v = qalg.hermitian_eig(qalg.SIGMA_X)
    np.testing.assert_allclose(w, [-1, 1], atol=1e-15)
    minus = np.array([1, -1]) / math.sqrt(2)
    plus = np.array([1, 1]) / math.sqrt(2)
    assert abs(abs(np.vdot(minus, v[:, 0])) - 1) < 1e-12
    assert abs(abs(np.vdot(plus, v[:, 1])) - 1) < 1e-12


def test_eig_reconstruction_random_5x5():
    m = qalg.random_hermitian(5, np.random.default_rng(5))
    w, v = qalg.hermitian_eig(m)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - m)) < 1e-9
    assert qalg.is_unitary(v, 1e-9)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        qalg.hermitian_eig(np.array([[1, 2], [0, 1]]))


@pytest.mark.parametrize(
    "psi, expected",
    [
        ([1, 0], [[1, 0], [0, 0]]),
        (np.array([1, 1]) / math.sqrt(2), [[0.5, 0.5], [0.5, 0.5]]),
        (np.array([1, 1j]) / math.sqrt(2), [[0.5, -0.5j], [0.5j, 0.5]]),
    ],
)
def test_density_from_state(psi, expected):
    rho = qalg.density_from_state(psi)
    np.testing.assert_allclose(rho, expected, atol=1e-15)
    assert abs(qalg.purity(rho) - 1) < 1e-10


def test_density_from_state_rejects_unnormalized():
    with pytest.raises(NotNormalized):
        qalg.density_from_state([1, 1])


def test_check_density_rejects_negative_eigenvalue():
    with pytest.raises(InvalidDensity):
        qalg.check_density(np.diag([1.5, -0.5]))


def test_predicates():
    assert qalg.is_hermitian(qalg.SIGMA_Y)
    assert qalg.is_unitary(qalg.SIGMA_Y)
    assert qalg.is_positive_semidefinite(np.diag([1.0, 0.0]))
    assert not qalg.is_positive_semidefinite(qalg.SIGMA_Z)


herm_inputs = st.tuples(st.integers(1, 6), st.integers(0, 2**32 - 1))
times = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(herm_inputs, times, times)
def test_group_property(dim_seed, s, t):
    dim, seed = dim_seed
    h = qalg.random_hermitian(dim, np.random.default_rng(seed))
    lhs = qalg.expm_hermitian(h, s) @ qalg.expm_hermitian(h, t)
    assert np.max(np.abs(lhs - qalg.expm_hermitian(h, s + t))) < 1e-9


@settings(max_examples=60, deadline=None)
@given(herm_inputs, times)
def test_expm_is_unitary(dim_seed, t):
    dim, seed = dim_seed
    u = qalg.expm_hermitian(qalg.random_hermitian(dim, np.random.default_rng(seed)), t)
    assert np.max(np.abs(u.conj().T @ u - np.eye(dim))) < 1e-10


@settings(max_examples=60, deadline=None)
@given(herm_inputs)
def test_density_eigenvalues_sum_to_one(dim_seed):
    dim, seed = dim_seed
    w, _ = qalg.hermitian_eig(qalg.random_density(dim, np.random.default_rng(seed)))
    assert abs(w.sum() - 1) < 1e-9
