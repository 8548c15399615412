import math

import numpy as np
import pytest

from steering_hierarchy.bell import chsh_max, chsh_threshold_inept, chsh_threshold_numeric, correlation_matrix
from steering_hierarchy.states import inept_state, isotropic_state, werner_state


def test_singlet_reaches_tsirelson():
    assert chsh_max(werner_state(2, 1.0)) == pytest.approx(2 * math.sqrt(2))
    assert np.allclose(correlation_matrix(werner_state(2, 1.0)), -np.eye(3))


def test_isotropic_threshold():
    root = chsh_threshold_numeric(lambda eta: isotropic_state(2, eta))
    assert root == pytest.approx(1 / math.sqrt(2), abs=1e-9)


def test_inept_closed_form_at_half():
    assert chsh_threshold_inept(0.5) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_inept_limit_small_epsilon():
    assert chsh_threshold_inept(1e-9) == pytest.approx(math.sqrt(3) - 1, abs=1e-6)


@pytest.mark.parametrize("eps", [0.05, 0.25, 0.6])
def test_inept_closed_form_matches_numeric(eps):
    root = chsh_threshold_numeric(lambda eta: inept_state(eps, eta))
    assert abs(root - chsh_threshold_inept(eps)) < 1e-8


def test_rejects_qutrits_and_bad_epsilon():
    with pytest.raises(ValueError):
        chsh_max(werner_state(3, 0.5))
    with pytest.raises(ValueError):
        chsh_threshold_inept(1.0)
