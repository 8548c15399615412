"""Werner, isotropic and inept states, and Bob's conditioned states.

Basis ordering is fixed project-wide: ``|i>_A |j>_B`` is index ``i*d_B + j``.
Mixing parameters are restricted to ``eta in [0, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qmat import as_hermitian, is_psd, partial_trace_a, partial_trace_b

TRACE_ATOL = 1e-10
ORTHO_ATOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# z-axis convention of the inept-state analysis: |1> is the +1 eigenvector,
# so a qubit state reads (I - z * INEPT_SIGMA_Z)/2 with z = +1 for |0>.
INEPT_SIGMA_Z = -SIGMA_Z


@dataclass(frozen=True)
class BipartiteDensityMatrix:
    """Density matrix on C^dA x C^dB, checked for unit trace and positivity."""

    d_a: int
    d_b: int
    w: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = as_hermitian(np.asarray(self.w, dtype=complex))
        if w.shape != (self.d_a * self.d_b,) * 2:
            raise ValueError(f"matrix of shape {w.shape} does not match dims {self.d_a}x{self.d_b}")
        tr = np.trace(w).real
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace is {tr}, expected 1")
        if not is_psd(w):
            raise ValueError("density matrix is not positive semidefinite")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def rho_a(self) -> np.ndarray:
        return partial_trace_b(self.w, self.d_a, self.d_b)

    @property
    def rho_b(self) -> np.ndarray:
        return partial_trace_a(self.w, self.d_a, self.d_b)


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Rank-one projective measurement; ``basis[:, k]`` is the vector for ``labels[k]``."""

    basis: np.ndarray = field(repr=False)
    labels: tuple = None

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=complex)
        d = basis.shape[0]
        if basis.shape != (d, d):
            raise ValueError("a projective measurement needs exactly d basis vectors of length d")
        if np.max(np.abs(basis.conj().T @ basis - np.eye(d))) > ORTHO_ATOL:
            raise ValueError("basis vectors are not orthonormal")
        labels = tuple(range(d)) if self.labels is None else tuple(self.labels)
        if len(labels) != d or len(set(labels)) != d:
            raise ValueError("need one distinct label per basis vector")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def vector(self, label) -> np.ndarray:
        try:
            k = self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown outcome label {label!r}; labels are {self.labels}") from None
        return self.basis[:, k]


@dataclass(frozen=True)
class ConditionedState:
    rho_tilde: np.ndarray = field(repr=False)
    weight: float


def computational_measurement(d: int) -> ProjectiveMeasurement:
    return ProjectiveMeasurement(np.eye(d))


def inept_sigma_z_measurement() -> ProjectiveMeasurement:
    """Alice's sigma_z in the inept-state convention: +1 <-> |1>, -1 <-> |0>."""
    return ProjectiveMeasurement(np.array([[0, 1], [1, 0]]), labels=(+1, -1))


def sigma_theta_measurement(theta: float) -> ProjectiveMeasurement:
    """Eigenbasis of cos(theta) sigma_x + sin(theta) sigma_y, labels +1/-1."""
    plus = np.array([1, np.exp(1j * theta)]) / np.sqrt(2)
    minus = np.array([1, -np.exp(1j * theta)]) / np.sqrt(2)
    return ProjectiveMeasurement(np.column_stack([plus, minus]), labels=(+1, -1))


def _check_eta(eta):
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")


def _check_dim(d):
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d}")


def flip_operator(d: int) -> np.ndarray:
    """Swap operator V with V|phi>|psi> = |psi>|phi>."""
    v = np.zeros((d * d, d * d))
    i, j = np.divmod(np.arange(d * d), d)
    v[j * d + i, i * d + j] = 1.0
    return v


def max_entangled_projector(d: int) -> np.ndarray:
    psi = np.eye(d).reshape(d * d) / np.sqrt(d)
    return np.outer(psi, psi)


def werner_state(d: int, eta: float) -> BipartiteDensityMatrix:
    """``((d-1+eta)/(d-1)) I/d^2 - (eta/(d-1)) V/d``; product at eta=0.

    Werner's original parameter is ``Phi = (1 - (d+1) eta) / d``, the
    expectation value of the flip operator; it is not used here.
    """
    _check_dim(d)
    _check_eta(eta)
    w = (d - 1 + eta) / (d - 1) * np.eye(d * d) / d**2 - eta / (d - 1) * flip_operator(d) / d
    return BipartiteDensityMatrix(d, d, w)


def isotropic_state(d: int, eta: float) -> BipartiteDensityMatrix:
    _check_dim(d)
    _check_eta(eta)
    w = (1 - eta) * np.eye(d * d) / d**2 + eta * max_entangled_projector(d)
    return BipartiteDensityMatrix(d, d, w)


def inept_state(epsilon: float, eta: float) -> BipartiteDensityMatrix:
    """Mixture of ``sqrt(1-eps)|00> + sqrt(eps)|11>`` with the product of its marginals."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    _check_eta(eta)
    psi = np.zeros(4)
    psi[0], psi[3] = np.sqrt(1 - epsilon), np.sqrt(epsilon)
    marginal = np.diag([1 - epsilon, epsilon])
    w = eta * np.outer(psi, psi) + (1 - eta) * np.kron(marginal, marginal)
    return BipartiteDensityMatrix(2, 2, w)


def conditioned_state(state: BipartiteDensityMatrix, m: ProjectiveMeasurement, a) -> ConditionedState:
    """Bob's unnormalized state ``Tr_A[W (|a><a| x I)]`` after Alice obtains ``a``."""
    if m.dim != state.d_a:
        raise ValueError(f"measurement acts on C^{m.dim}, Alice holds C^{state.d_a}")
    vec = m.vector(a)
    w4 = state.w.reshape(state.d_a, state.d_b, state.d_a, state.d_b)
    rho = np.einsum("i,ikjl,j->kl", vec.conj(), w4, vec)
    rho = as_hermitian(rho, atol=1e-10)
    return ConditionedState(rho, float(np.trace(rho).real))


def inept_z_constants(epsilon: float, eta: float) -> tuple[float, float]:
    """Bloch z-coordinates ``(z_plus, z_minus)`` of Bob's sigma_z-conditioned states."""
    z_plus = 1 - 2 * eta - 2 * epsilon * (1 - eta)
    z_minus = 1 - 2 * epsilon * (1 - eta)
    return z_plus, z_minus
