import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steering_hierarchy.states import (
    INEPT_SIGMA_Z,
    SIGMA_X,
    BipartiteDensityMatrix,
    ProjectiveMeasurement,
    computational_measurement,
    conditioned_state,
    flip_operator,
    inept_sigma_z_measurement,
    inept_state,
    inept_z_constants,
    isotropic_state,
    sigma_theta_measurement,
    werner_state,
)


def test_flip_operator_swaps():
    d = 3
    v = flip_operator(d)
    phi, psi = np.eye(d)[0], np.eye(d)[2]
    assert np.allclose(v @ np.kron(phi, psi), np.kron(psi, phi))
    assert np.allclose(v @ v, np.eye(d * d))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.floats(0, 1))
def test_families_are_states(d, eta):
    for w in (werner_state(d, eta), isotropic_state(d, eta)):
        assert abs(np.trace(w.w) - 1) < 1e-12
        assert np.allclose(w.rho_a, np.eye(d) / d)
        assert np.allclose(w.rho_b, np.eye(d) / d)


def test_werner_eta_zero_is_maximally_mixed():
    assert np.allclose(werner_state(3, 0).w, np.eye(9) / 9)


def test_werner_eta_one_is_antisymmetric_projector():
    d = 3
    w = werner_state(d, 1.0).w
    proj = (np.eye(d * d) - flip_operator(d)) / 2
    assert np.allclose(w, proj / np.trace(proj))


def test_bad_parameters():
    with pytest.raises(ValueError):
        werner_state(2, 1.1)
    with pytest.raises(ValueError):
        isotropic_state(1, 0.5)
    with pytest.raises(ValueError):
        inept_state(1.5, 0.5)
    with pytest.raises(ValueError):
        BipartiteDensityMatrix(2, 2, np.eye(4))
    with pytest.raises(ValueError):
        BipartiteDensityMatrix(2, 2, np.diag([1.2, -0.2, 0, 0]))
    with pytest.raises(ValueError):
        ProjectiveMeasurement(np.array([[1, 1], [0, 1]]))


def test_unknown_label():
    with pytest.raises(KeyError):
        computational_measurement(2).vector(5)


def test_werner_conditioned_states():
    d, eta = 3, 0.4
    w = werner_state(d, eta)
    for a in range(d):
        cond = conditioned_state(w, computational_measurement(d), a)
        assert cond.weight == pytest.approx(1 / d)
        e = np.eye(d)[a]
        # the announced vector has the reduced weight (1 - eta)/d^2
        assert (e @ cond.rho_tilde @ e).real == pytest.approx((1 - eta) / d**2)


def test_isotropic_conditioned_states():
    d, eta = 3, 0.4
    w = isotropic_state(d, eta)
    for a in range(d):
        rho = conditioned_state(w, computational_measurement(d), a).rho_tilde
        e = np.eye(d)[a]
        assert (e @ rho @ e).real == pytest.approx(eta / d + (1 - eta) / d**2)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0, 1))
def test_inept_sigma_z_branches(eps, eta):
    w = inept_state(eps, eta)
    m = inept_sigma_z_measurement()
    z_plus, z_minus = inept_z_constants(eps, eta)
    for label, weight, z in ((+1, eps, z_plus), (-1, 1 - eps, z_minus)):
        cond = conditioned_state(w, m, label)
        assert cond.weight == pytest.approx(weight, abs=1e-12)
        expected = weight * (np.eye(2) - z * INEPT_SIGMA_Z) / 2
        assert np.allclose(cond.rho_tilde, expected, atol=1e-12)


def test_inept_sigma_x_coefficient():
    eps, eta = 0.3, 0.7
    cond = conditioned_state(inept_state(eps, eta), sigma_theta_measurement(0.0), +1)
    assert np.trace(SIGMA_X @ cond.rho_tilde).real == pytest.approx(eta * np.sqrt(eps * (1 - eps)))
