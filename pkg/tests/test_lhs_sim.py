import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from steering_hierarchy import lhs_sim
from steering_hierarchy.boundaries import harmonic_number


def test_haar_batch_shapes_and_weights(rng):
    psi, m2 = lhs_sim.haar_batch(3, 50_000, rng)
    assert psi.shape == (50_000, 3)
    assert np.allclose(np.linalg.norm(psi, axis=1), 1)
    assert m2.mean() == pytest.approx(1, abs=0.02)


def test_haar_first_component_distribution(rng):
    # |psi_0|^2 is Beta(1, d-1) for Haar-random vectors
    psi, _ = lhs_sim.haar_batch(4, 100_000, rng)
    p = np.abs(psi[:, 0]) ** 2
    assert p.mean() == pytest.approx(1 / 4, abs=3e-3)
    assert (p**2).mean() == pytest.approx(2 / (4 * 5), abs=3e-3)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_epsilon_d_three_ways(d):
    target = harmonic_number(d) / d**2
    assert lhs_sim.epsilon_d_alternating(d) == pytest.approx(target, abs=1e-14)
    assert lhs_sim.epsilon_d_quadrature(d) == pytest.approx(target, abs=1e-10)


def test_alternating_sum_guarded():
    with pytest.raises(ValueError):
        lhs_sim.epsilon_d_alternating(40)


def test_block_reduction_is_worker_independent():
    a = lhs_sim.cheat_overlap(3, 200_000, 11, "least_overlap", workers=1)
    b = lhs_sim.cheat_overlap(3, 200_000, 11, "least_overlap", workers=4)
    assert a == b


def test_seed_changes_result():
    a = lhs_sim.cheat_overlap(2, 100_000, 1, "least_overlap")
    b = lhs_sim.cheat_overlap(2, 100_000, 2, "least_overlap")
    assert a != b


@pytest.mark.parametrize("rule", ["uniform", "born", "second_least", "fixed_first", "random_outcome"])
def test_other_rules_do_not_beat_least_overlap(rule):
    d = 3
    best, _ = lhs_sim.cheat_overlap(d, 200_000, 5, "least_overlap")
    mean, se = lhs_sim.cheat_overlap(d, 200_000, 5, rule)
    assert mean > best
    assert best == pytest.approx(1 / d**3, abs=5e-4)


@pytest.mark.parametrize("rule", ["uniform", "born", "least_overlap", "fixed_first"])
def test_other_rules_do_not_beat_greatest_overlap(rule):
    d = 3
    best, _ = lhs_sim.cheat_overlap(d, 200_000, 6, "greatest_overlap")
    mean, _ = lhs_sim.cheat_overlap(d, 200_000, 6, rule)
    assert mean < best


def test_basis_invariance():
    d = 3
    basis = unitary_group.rvs(d, random_state=3)
    mean, se = lhs_sim.cheat_overlap(d, 300_000, 9, "least_overlap", basis=basis)
    assert abs(mean - 1 / d**3) < 4 * se


def test_analytic_verdicts():
    out = lhs_sim.steering_verdict("isotropic", 4, 0.2)
    assert out.empirical is None
    assert out.theoretical_quantum == pytest.approx(0.1)
    assert out.theoretical_cheat_bound == pytest.approx(harmonic_number(4) / 16)
    assert out.verdict == lhs_sim.NOT_STEERABLE
    # exactly on the boundary: equality is not steering
    assert lhs_sim.steering_verdict("werner", 2, 0.5).verdict == lhs_sim.NOT_STEERABLE
    assert lhs_sim.steering_verdict("werner", 2, 0.6).verdict == lhs_sim.STEERABLE
    with pytest.raises(ValueError):
        lhs_sim.steering_verdict("inept", 2, 0.5)


def test_werner_simulation_cli_example():
    out = lhs_sim.steering_verdict("werner", 2, 0.6, shots=1_000_000, seed=42)
    assert out.verdict == lhs_sim.STEERABLE
    assert abs(out.empirical - 0.125) < 3 * out.std_error


def test_too_few_shots():
    with pytest.raises(ValueError):
        lhs_sim.werner_cheat_overlap(2, 100, 0)


def test_inept_cheat_coefficient_examples():
    # eps = 1/2, eta = 0.6: z_plus = -0.6, z_minus = 0.6
    assert lhs_sim.inept_cheat_coefficient(0.5, 0.6) == pytest.approx(0.8 / math.pi)
    assert lhs_sim.inept_quantum_coefficient(0.5, 0.6) == pytest.approx(0.3)


def test_inept_simulation_statistics():
    eps, eta = 0.3, 0.7
    out = lhs_sim.inept_cheat_simulation(eps, eta, 300_000, seed=7)
    z_plus, z_minus = lhs_sim.inept_z_constants(eps, eta)
    assert abs(out.empirical - out.theoretical_cheat_bound) < 3 * out.std_error
    assert abs(out.plus_frequency - eps) < 3 * out.plus_frequency_se
    assert abs(out.z_mean_plus - z_plus) < 3 * out.z_mean_plus_se
    assert abs(out.z_mean_minus - z_minus) < 3 * out.z_mean_minus_se
    assert out.verdict == lhs_sim.STEERABLE


@pytest.mark.parametrize("k", range(10))
def test_werner_d2_random_bases(k):
    basis = unitary_group.rvs(2, random_state=100 + k)
    out = lhs_sim.werner_cheat_overlap(2, 100_000, seed=200 + k, basis=basis)
    assert abs(out.empirical - 1 / 8) < 3 * out.std_error
