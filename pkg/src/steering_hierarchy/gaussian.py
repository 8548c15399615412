"""Covariance-matrix tests for bipartite Gaussian states.

Conventions: quadratures ``q = a + a^dagger``, ``p = -i(a - a^dagger)``, so
``[R_i, R_j] = 2i Sigma_ij`` and the vacuum covariance matrix is the
identity. Ordering is ``(q1, p1, q2, p2, ...)`` with Alice's modes first,
and the matrix is blocked as ``[[V_a, C], [C^T, V_b]]``.

Steerability refers to Alice's Gaussian measurements throughout: the state is
not steerable iff ``V + 0_a (+) i Sigma_b >= 0``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .qmat import PSD_TOL, is_psd, min_eigenvalue, schur_complement

log = logging.getLogger(__name__)

SYMMETRY_ATOL = 1e-10
REGULARIZATION = 1e-10
STANDARD_FORM_ATOL = 1e-12
CLOSED_FORM_BAND = 1e-8
WITNESS_MIN_CONJUGATE = 1e3


class InvalidCovarianceError(ValueError):
    """The matrix violates V + i Sigma >= 0, or has the wrong shape."""


class SteeringPreconditionError(ValueError):
    """An operation was called on the wrong side of the steering boundary."""


class NotStandardFormError(ValueError):
    pass


def symplectic_form(n: int) -> np.ndarray:
    """``Sigma = J (+) ... (+) J`` with ``J = [[0, 1], [-1, 0]]`` for ``n`` modes."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class CovarianceMatrix:
    n_modes_a: int
    n_modes_b: int
    v: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.v, dtype=float)
        dim = 2 * (self.n_modes_a + self.n_modes_b)
        if self.n_modes_a < 1 or self.n_modes_b < 1:
            raise InvalidCovarianceError("each party needs at least one mode")
        if v.shape != (dim, dim):
            raise InvalidCovarianceError(f"expected a {dim}x{dim} matrix, got {v.shape}")
        if np.max(np.abs(v - v.T)) > SYMMETRY_ATOL:
            raise InvalidCovarianceError("covariance matrix is not symmetric")
        v = 0.5 * (v + v.T)
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def dim_a(self) -> int:
        return 2 * self.n_modes_a

    @property
    def va(self) -> np.ndarray:
        return self.v[: self.dim_a, : self.dim_a]

    @property
    def vb(self) -> np.ndarray:
        return self.v[self.dim_a :, self.dim_a :]

    @property
    def c(self) -> np.ndarray:
        return self.v[: self.dim_a, self.dim_a :]

    @property
    def sigma(self) -> np.ndarray:
        return symplectic_form(self.n_modes_a + self.n_modes_b)

    @property
    def sigma_a(self) -> np.ndarray:
        return symplectic_form(self.n_modes_a)

    @property
    def sigma_b(self) -> np.ndarray:
        return symplectic_form(self.n_modes_b)

    @classmethod
    def two_mode(cls, v) -> "CovarianceMatrix":
        return cls(1, 1, v)

    @classmethod
    def from_json_dict(cls, data: dict) -> "CovarianceMatrix":
        try:
            return cls(int(data["n_modes_a"]), int(data["n_modes_b"]), np.array(data["matrix"], dtype=float))
        except (KeyError, TypeError) as exc:
            raise InvalidCovarianceError(f"malformed covariance matrix record: {exc}") from exc

    def to_json_dict(self) -> dict:
        return {"n_modes_a": self.n_modes_a, "n_modes_b": self.n_modes_b, "matrix": self.v.tolist()}


@dataclass(frozen=True)
class GaussianMeasurement:
    """Gaussian measurement on Alice's modes, described by its seed covariance ``t``."""

    t: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        n = t.shape[0]
        if t.shape != (n, n) or n % 2:
            raise ValueError(f"measurement covariance must be 2n x 2n, got {t.shape}")
        if np.max(np.abs(t - t.T)) > SYMMETRY_ATOL * max(1.0, np.max(np.abs(t))):
            raise ValueError("measurement covariance is not symmetric")
        t = 0.5 * (t + t.T)
        if not is_psd(t + 1j * symplectic_form(n // 2)):
            raise ValueError("T + i Sigma is not positive semidefinite")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    @property
    def n_modes(self) -> int:
        return self.t.shape[0] // 2


def heterodyne(n_modes: int = 1) -> GaussianMeasurement:
    return GaussianMeasurement(np.eye(2 * n_modes))


def squeezed_measurement(direction, small: float, large: Optional[float] = None) -> GaussianMeasurement:
    """Pure-or-noisier squeezed measurement with eigenvalue ``small`` along ``direction``.

    The symplectic partner ``Sigma @ direction`` gets ``large`` (default
    ``1/small``); any remaining modes get the vacuum value 1.
    """
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    n = u.shape[0] // 2
    w = symplectic_form(n) @ u
    large = 1.0 / small if large is None else large
    rest = np.eye(2 * n) - np.outer(u, u) - np.outer(w, w)
    return GaussianMeasurement(small * np.outer(u, u) + large * np.outer(w, w) + rest)


def is_valid_cm(v: CovarianceMatrix, tol: float = PSD_TOL) -> bool:
    """``V + i Sigma >= 0``."""
    return is_psd(v.v + 1j * v.sigma, tol)


def _require_valid(v):
    if not is_valid_cm(v):
        raise InvalidCovarianceError("invalid covariance matrix: V + i Sigma is not positive semidefinite")


def _measurement_matrix(t) -> np.ndarray:
    return t.t if isinstance(t, GaussianMeasurement) else np.asarray(t, dtype=float)


def conditioned_cm(v: CovarianceMatrix, t) -> np.ndarray:
    """Bob's covariance after Alice's Gaussian measurement: ``V_b - C^T (V_a + T)^-1 C``.

    Independent of Alice's outcome.
    """
    tm = _measurement_matrix(t)
    if tm.shape != v.va.shape:
        raise ValueError(f"measurement acts on {tm.shape[0] // 2} modes, Alice has {v.n_modes_a}")
    pivot = v.va + tm
    if min(abs(np.linalg.eigvalsh(pivot))) <= 1e-12:
        raise np.linalg.LinAlgError("V_a + T is singular")
    out = v.vb - v.c.T @ np.linalg.solve(pivot, v.c)
    return 0.5 * (out + out.T)


def _require_two_mode(v):
    if (v.n_modes_a, v.n_modes_b) != (1, 1):
        raise ValueError(f"needs one mode per party, got {v.n_modes_a}+{v.n_modes_b}")


def standard_form_params(v: CovarianceMatrix, atol: float = STANDARD_FORM_ATOL) -> Optional[tuple[float, float, float, float]]:
    """``(n, m, c, c')`` if ``v`` is a 1+1 matrix in standard form, else None."""
    if (v.n_modes_a, v.n_modes_b) != (1, 1):
        return None
    n, m, c, cp = v.v[0, 0], v.v[2, 2], v.v[0, 2], v.v[1, 3]
    template = np.array([[n, 0, c, 0], [0, n, 0, cp], [c, 0, m, 0], [0, cp, 0, m]])
    scale = max(1.0, float(np.max(np.abs(v.v))))
    if np.max(np.abs(v.v - template)) > atol * scale:
        return None
    return float(n), float(m), float(c), float(cp)


def standard_form_cm(n: float, m: float, c: float, cp: float) -> CovarianceMatrix:
    return CovarianceMatrix.two_mode([[n, 0, c, 0], [0, n, 0, cp], [c, 0, m, 0], [0, cp, 0, m]])


def two_mode_squeezed_cm(r: float) -> CovarianceMatrix:
    ch, sh = math.cosh(2 * r), math.sinh(2 * r)
    return standard_form_cm(ch, ch, sh, -sh)


def symmetric_two_mode_cm(nbar: float, eta: float) -> CovarianceMatrix:
    """``gamma = 1 + 2 nbar`` on the diagonal, ``+-delta`` with ``delta = 2 eta sqrt(nbar (1+nbar))``."""
    if not nbar > 0:
        raise ValueError(f"nbar must be positive, got {nbar}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    gamma = 1 + 2 * nbar
    delta = 2 * eta * math.sqrt(nbar * (1 + nbar))
    return standard_form_cm(gamma, gamma, delta, -delta)


def separability_closed_form_margin(n, m, c, cp) -> float:
    """LHS minus RHS of the standard-form separability inequality (>= 0 iff separable)."""
    k = n * n - 1
    return (m - c * c * n / k) * (m - cp * cp * n / k) - (1 - c * cp / k) ** 2


def steering_closed_form_margin(n, m, c, cp) -> float:
    """``(m - c^2/n)(m - c'^2/n) - 1``; negative iff steerable."""
    return (m - c * c / n) * (m - cp * cp / n) - 1.0


def is_separable_two_mode(v: CovarianceMatrix, tol: float = PSD_TOL) -> bool:
    """Partial-transpose test ``Lambda V Lambda + i Sigma >= 0``, ``Lambda = diag(1,1,1,-1)``."""
    _require_two_mode(v)
    lam = np.diag([1.0, 1.0, 1.0, -1.0])
    verdict = is_psd(lam @ v.v @ lam + 1j * v.sigma, tol)
    params = standard_form_params(v)
    if params is not None and params[0] > 1.0 and is_valid_cm(v):
        margin = separability_closed_form_margin(*params)
        if abs(margin) > CLOSED_FORM_BAND and (margin >= 0) != verdict:
            raise RuntimeError(f"PPT test and closed form disagree (margin {margin:.3e})")
    return verdict


def steering_lmi_matrix(v: CovarianceMatrix) -> np.ndarray:
    """``V + 0_a (+) i Sigma_b``."""
    out = v.v.astype(complex)
    out[v.dim_a :, v.dim_a :] += 1j * v.sigma_b
    return out


def is_steerable_gaussian(v: CovarianceMatrix, tol: float = PSD_TOL) -> bool:
    _require_valid(v)
    verdict = not is_psd(steering_lmi_matrix(v), tol)
    params = standard_form_params(v)
    if params is not None:
        margin = steering_closed_form_margin(*params)
        if abs(margin) > CLOSED_FORM_BAND and (margin < 0) != verdict:
            raise RuntimeError(f"steering LMI and closed form disagree (margin {margin:.3e})")
    return verdict


def reid_epr_product(v: CovarianceMatrix) -> float:
    """Product of the inferred variances ``V(q_b|q_a) V(p_b|p_a)``; below 1 signals EPR correlations."""
    params = standard_form_params(v)
    if params is None:
        raise NotStandardFormError("Reid product is defined here for 1+1 standard-form matrices only")
    n, m, c, cp = params
    return (m - c * c / n) * (m - cp * cp / n)


def non_steering_ensemble_cm(v: CovarianceMatrix) -> np.ndarray:
    """Covariance ``U = V_b - C^T V_a^-1 C`` of an LHS ensemble reproducing every Gaussian measurement.

    Bob's states all share covariance ``U``; their displacements are
    Gaussian-distributed with covariance ``C^T V_a^-1 C``.
    """
    if is_steerable_gaussian(v):
        raise SteeringPreconditionError("state is steerable by Gaussian measurements; no such ensemble exists")
    u = schur_complement(v.v, v.dim_a, which="upper")
    return 0.5 * (u + u.T)


def ensemble_lmi_margins(v: CovarianceMatrix, u, t) -> tuple[float, float]:
    """Smallest eigenvalues of ``U + i Sigma_b`` and ``V_b^A - U`` for measurement ``t``."""
    u = np.asarray(u, dtype=float)
    return min_eigenvalue(u + 1j * v.sigma_b), min_eigenvalue(conditioned_cm(v, t) - u)


def ensemble_passes(v: CovarianceMatrix, u, t, tol: float = PSD_TOL) -> bool:
    u = np.asarray(u, dtype=float)
    return is_psd(u + 1j * v.sigma_b, tol) and is_psd(conditioned_cm(v, t) - u, tol)


def _bob_inverse(v):
    """``(V_b + i Sigma_b)^-1``, regularized by ``1e-10 I`` when nearly singular."""
    m = v.vb + 1j * v.sigma_b
    regularized = np.min(np.abs(np.linalg.eigvalsh(m))) < REGULARIZATION
    if regularized:
        log.warning("V_b + i Sigma_b is nearly singular; regularizing its inverse with %g I", REGULARIZATION)
        m = m + REGULARIZATION * np.eye(m.shape[0])
    return np.linalg.inv(m), regularized


def alice_schur_matrix(v: CovarianceMatrix) -> np.ndarray:
    """Hermitian ``G = V_a - C (V_b + i Sigma_b)^-1 C^T``."""
    inv, _ = _bob_inverse(v)
    g = v.va - v.c @ inv @ v.c.T
    return 0.5 * (g + g.conj().T)


def witness_schur_matrix(v: CovarianceMatrix, t) -> np.ndarray:
    """``V_a + T - C (V_b + i Sigma_b)^-1 C^T`` for measurement ``t``."""
    return alice_schur_matrix(v) + _measurement_matrix(t)


def steering_witness_measurement(v: CovarianceMatrix) -> GaussianMeasurement:
    """Squeezed measurement aimed at the negative direction of ``G``.

    Takes the eigenvector of the most negative eigenvalue ``-g`` of
    :func:`alice_schur_matrix`, and returns a measurement with eigenvalue
    ``g/2`` along the real part of that eigenvector and
    ``max(2/g, 1e3)`` along its symplectic partner.

    Note that for any physical measurement ``G + T`` is the Schur complement
    of a matrix whose other Schur complement is ``V_b^A + i Sigma_b``, the
    (always valid) conditioned state, so ``G + T`` cannot have a negative
    eigenvalue. Use :func:`steering_certificate` for a certificate that
    actually rules out every local-hidden-state ensemble.
    """
    _require_valid(v)
    if not is_steerable_gaussian(v):
        raise SteeringPreconditionError("state is not steerable by Gaussian measurements")
    eig, vecs = np.linalg.eigh(alice_schur_matrix(v))
    g = -eig[0]
    if g <= 0:
        raise SteeringPreconditionError("G has no negative eigenvalue")
    nu = vecs[:, 0]
    direction = nu.real if np.linalg.norm(nu.real) >= np.linalg.norm(nu.imag) else nu.imag
    small = g / 2
    return squeezed_measurement(direction, small, max(1.0 / small, WITNESS_MIN_CONJUGATE))


@dataclass(frozen=True)
class SteeringCertificate:
    """Two Gaussian measurements no single LHS ensemble can reproduce together.

    For a complex vector ``nu = x + i y`` on Bob's phase space with
    ``nu^H (U0 + i Sigma_b) nu < 0`` (``U0`` the Schur complement of ``V_a``),
    any ensemble covariance ``U`` with ``U + i Sigma_b >= 0`` obeys
    ``x^T U x + y^T U y >= 2 x^T Sigma_b y``. Reproducing measurement ``k``
    needs ``U <= V_b^{A_k}``, so if
    ``x^T V_b^{A_1} x + y^T V_b^{A_2} y < 2 x^T Sigma_b y`` no ``U`` serves
    both measurements.
    """

    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    measurements: tuple = field(repr=False)
    margin: float = math.nan


def certificate_margin(v: CovarianceMatrix, x, y, measurements) -> float:
    """``x^T V_b^{A_1} x + y^T V_b^{A_2} y - 2 x^T Sigma_b y``; negative certifies steering."""
    t1, t2 = measurements
    lhs = x @ conditioned_cm(v, t1) @ x + y @ conditioned_cm(v, t2) @ y
    return float(lhs - 2 * x @ v.sigma_b @ y)


def steering_certificate(v: CovarianceMatrix, max_squeezing_exponent: int = 14) -> SteeringCertificate:
    """Build a two-measurement steering certificate for a steerable state.

    Each measurement is squeezed along ``V_a^-1 C x`` (resp. ``y``), the
    direction maximizing the information Alice's result carries about Bob's
    quadrature ``x``. Squeezing is increased until the margin reaches half
    its infinite-squeezing limit, the smallest eigenvalue of ``U0 + i Sigma_b``.
    """
    _require_valid(v)
    if not is_steerable_gaussian(v):
        raise SteeringPreconditionError("state is not steerable by Gaussian measurements")
    u0 = schur_complement(v.v, v.dim_a, which="upper")
    eig, vecs = np.linalg.eigh(0.5 * (u0 + u0.T) + 1j * v.sigma_b)
    nu = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    x, y = nu.real.copy(), nu.imag.copy()

    def aimed(vec, small):
        target = np.linalg.solve(v.va, v.c @ vec)
        if np.linalg.norm(target) < 1e-14:
            return heterodyne(v.n_modes_a)
        return squeezed_measurement(target, small)

    # with infinite squeezing the margin tends to eig[0]; stop once halfway there
    best = None
    for k in range(1, max_squeezing_exponent + 1):
        pair = (aimed(x, 10.0**-k), aimed(y, 10.0**-k))
        margin = certificate_margin(v, x, y, pair)
        if best is None or margin < best.margin:
            best = SteeringCertificate(x, y, pair, margin)
        if margin <= 0.5 * eig[0]:
            break
    if best.margin >= 0:
        raise RuntimeError(f"no certificate found up to squeezing 1e-{max_squeezing_exponent} (margin {best.margin:.3e})")
    return best


def random_symplectic(n: int, rng, scale: float = 0.6) -> np.ndarray:
    """``expm(Sigma H)`` for a random symmetric ``H``; always symplectic."""
    from scipy.linalg import expm

    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    h = rng.normal(scale=scale, size=(2 * n, 2 * n))
    return expm(symplectic_form(n) @ (0.5 * (h + h.T)))


def random_valid_cm(n_a: int, n_b: int, rng, max_thermal: float = 1.5, scale: float = 0.6) -> CovarianceMatrix:
    """Random physical covariance matrix ``S diag(nu_i) S^T`` with symplectic eigenvalues ``nu_i >= 1``."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    n = n_a + n_b
    nus = 1.0 + max_thermal * rng.random(n) ** 2
    s = random_symplectic(n, rng, scale)
    v = s @ np.diag(np.repeat(nus, 2)) @ s.T
    return CovarianceMatrix(n_a, n_b, 0.5 * (v + v.T))


def random_measurement(n_modes: int, rng, scale: float = 1.0) -> GaussianMeasurement:
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    s = random_symplectic(n_modes, rng, scale)
    nus = 1.0 + rng.exponential(0.5, n_modes) * (rng.random(n_modes) < 0.5)
    t = s @ np.diag(np.repeat(nus, 2)) @ s.T
    return GaussianMeasurement(0.5 * (t + t.T))


def random_standard_form_cm(rng, max_variance: float = 4.0, max_tries: int = 1000) -> CovarianceMatrix:
    """Random physical 1+1 matrix in standard form, by rejection sampling."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    for _ in range(max_tries):
        n, m = 1.0 + (max_variance - 1.0) * rng.random(2)
        bound = math.sqrt(n * m)
        c, cp = rng.uniform(-bound, bound, 2)
        v = standard_form_cm(n, m, c, cp)
        if is_valid_cm(v):
            return v
    raise RuntimeError("rejection sampling of a standard-form matrix did not converge")
