"""Boundaries between entangled, steerable and Bell-nonlocal states.

Covers Werner, isotropic and inept (two-qubit) state families, symmetric
two-mode Gaussian states, and Monte Carlo simulations of the optimal
local-hidden-state cheating strategies.
"""

from .boundaries import (
    BoundaryReport,
    gaussian_symmetric_boundaries,
    harmonic_number,
    inept_boundaries,
    isotropic_boundaries,
    werner_boundaries,
)
from .gaussian import CovarianceMatrix, GaussianMeasurement
from .states import inept_state, isotropic_state, werner_state

__version__ = "0.1.0"
