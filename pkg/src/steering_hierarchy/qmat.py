"""Dense linear algebra helpers shared by the state, Bell and Gaussian modules.

Matrices are plain numpy arrays. Hermiticity is checked (and float noise
symmetrized away) by :func:`as_hermitian`; every positivity test in the
package goes through :func:`is_psd` so the tolerance convention is uniform.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_ATOL = 1e-12
PSD_TOL = 1e-9
PIVOT_ATOL = 1e-12


class SingularBlockError(np.linalg.LinAlgError):
    """Raised when the block to be inverted in a Schur complement is singular."""


def as_hermitian(m, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Return ``(m + m^dagger)/2`` after checking ``m`` is Hermitian to ``atol``.

    Raises
    ------
    ValueError
        If ``m`` is not square or its anti-Hermitian part exceeds ``atol``.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    asym = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if asym > atol:
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    out = 0.5 * (m + m.conj().T)
    if not np.iscomplexobj(m):
        out = out.real
    return out


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace_a(w, d_a: int, d_b: int) -> np.ndarray:
    """Trace out the first factor of a ``d_a*d_b`` square operator.

    Index convention: ``|i>|j>`` sits at row ``i*d_b + j``.
    """
    w = np.asarray(w)
    if w.shape != (d_a * d_b, d_a * d_b):
        raise ValueError(f"operator of shape {w.shape} does not act on C^{d_a} x C^{d_b}")
    return np.einsum("ijik->jk", w.reshape(d_a, d_b, d_a, d_b))


def partial_trace_b(w, d_a: int, d_b: int) -> np.ndarray:
    w = np.asarray(w)
    if w.shape != (d_a * d_b, d_a * d_b):
        raise ValueError(f"operator of shape {w.shape} does not act on C^{d_a} x C^{d_b}")
    return np.einsum("ijkj->ik", w.reshape(d_a, d_b, d_a, d_b))


def min_eigenvalue(m) -> float:
    m = as_hermitian(m, atol=np.inf)
    if m.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(m)[0])


def spectral_norm(m) -> float:
    m = np.asarray(m)
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def psd_threshold(m, tol: float = PSD_TOL) -> float:
    """Eigenvalue floor used by :func:`is_psd`: ``-tol * max(1, ||m||_2)``."""
    return -tol * max(1.0, spectral_norm(m))


def is_psd(m, tol: float = PSD_TOL) -> bool:
    """True iff the smallest eigenvalue is above ``-tol * max(1, ||m||_2)``.

    The relative floor matters for Gaussian covariance matrices, whose
    entries grow with the photon number.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    m = as_hermitian(m, atol=np.inf)
    if m.size == 0:
        return True
    eig = np.linalg.eigvalsh(m)
    norm = max(abs(eig[0]), abs(eig[-1]))
    return bool(eig[0] >= -tol * max(1.0, norm))


def schur_complement(m, split: int, which: str = "upper", pivot_atol: float = PIVOT_ATOL) -> np.ndarray:
    """Schur complement of a 2x2-blocked matrix ``[[P, R], [R^H, Q]]``.

    ``which="upper"`` eliminates ``P`` and returns ``Q - R^H P^-1 R``;
    ``which="lower"`` eliminates ``Q`` and returns ``P - R Q^-1 R^H``.
    ``split`` is the size of ``P``.
    """
    m = np.asarray(m)
    n = m.shape[0]
    if m.shape != (n, n) or not 0 < split < n:
        raise ValueError(f"cannot split a {m.shape} matrix at {split}")
    p, r, q = m[:split, :split], m[:split, split:], m[split:, split:]
    if which == "upper":
        pivot, name = p, "upper-left block P"
    elif which == "lower":
        pivot, name = q, "lower-right block Q"
    else:
        raise ValueError(f"which must be 'upper' or 'lower', got {which!r}")

    smallest = np.min(np.abs(np.linalg.eigvals(pivot)))
    if smallest <= pivot_atol:
        raise SingularBlockError(f"{name} is singular (min |eigenvalue| = {smallest:.3e})")

    if which == "upper":
        return q - r.conj().T @ np.linalg.solve(p, r)
    return p - r @ np.linalg.solve(q, r.conj().T)
