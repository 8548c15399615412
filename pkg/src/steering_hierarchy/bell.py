"""Optimal CHSH violation for two-qubit states (Horodecki criterion)."""

from __future__ import annotations

import math

import numpy as np

from .states import PAULIS, BipartiteDensityMatrix

BISECTION_TOL = 1e-10


def correlation_matrix(state: BipartiteDensityMatrix) -> np.ndarray:
    """``T[i, j] = Tr[W (sigma_i x sigma_j)]`` for i, j in x, y, z."""
    if (state.d_a, state.d_b) != (2, 2):
        raise ValueError(f"CHSH analysis needs two qubits, got {state.d_a}x{state.d_b}")
    t = np.empty((3, 3))
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            t[i, j] = np.trace(state.w @ np.kron(si, sj)).real
    return t


def chsh_max(state: BipartiteDensityMatrix) -> float:
    """Largest CHSH value over all settings: ``2 sqrt(u1 + u2)``.

    ``u1, u2`` are the two largest eigenvalues of ``T^T T``. A value above 2
    means the state violates CHSH.
    """
    t = correlation_matrix(state)
    u = np.linalg.eigvalsh(t.T @ t)
    return 2.0 * math.sqrt(max(u[-1] + u[-2], 0.0))


def chsh_threshold_inept(epsilon: float) -> float:
    """Mixing parameter above which the inept state violates CHSH."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    q = 4 * epsilon**2 - 4 * epsilon
    return (q + 1 - math.sqrt(q + 3)) / (q - 1)


def chsh_threshold_numeric(family, lo: float = 0.0, hi: float = 1.0, tol: float = BISECTION_TOL) -> float:
    """Bisect ``chsh_max(family(eta)) = 2`` for ``eta`` in ``[lo, hi]``.

    ``family`` maps a mixing parameter to a two-qubit state.
    """
    g = lambda eta: chsh_max(family(eta)) - 2.0  # noqa: E731
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo <= 0.0 < g_hi):
        raise ValueError(f"no CHSH crossing in [{lo}, {hi}] (excess {g_lo:.3g} .. {g_hi:.3g})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
