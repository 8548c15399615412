"""Monte Carlo simulation of Alice's optimal local-hidden-state cheating strategies.

Alice sends Bob pure states from a fixed ensemble and, when asked for the
result of a measurement, answers with a deterministic rule. The simulation
estimates the overlaps Bob would see and compares them with the closed-form
bounds; the verdicts themselves are always taken from the closed forms.

Reproducibility: shots are cut into fixed blocks of ``BLOCK_SIZE``; block
``b`` draws from ``SeedSequence(seed, spawn_key=(b,))`` and block sums are
combined in block order with ``math.fsum``. Results therefore depend only on
``(seed, shots)``, not on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .boundaries import harmonic_number
from .states import inept_z_constants

BLOCK_SIZE = 1 << 16
STEERABLE = "steerable"
NOT_STEERABLE = "not_steerable_at_this_eta"


@dataclass(frozen=True)
class HaarSample:
    psi: np.ndarray
    weight_m2: float


@dataclass(frozen=True)
class SimOutcome:
    shots: int
    empirical: Optional[float]
    std_error: Optional[float]
    theoretical_quantum: Optional[float]
    theoretical_cheat_bound: float
    verdict: Optional[str]

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class IneptSimOutcome(SimOutcome):
    # sigma_z query: frequency of the +1 announcement and the mean Bloch z of
    # the states sent in each sub-ensemble, estimated from Bob's sigma_z outcomes
    plus_frequency: float = math.nan
    plus_frequency_se: float = math.nan
    z_mean_plus: float = math.nan
    z_mean_plus_se: float = math.nan
    z_mean_minus: float = math.nan
    z_mean_minus_se: float = math.nan


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def haar_batch(d: int, n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` Haar-random unit vectors in C^d via normalized complex Gaussians.

    Returns ``(psi, weight_m2)`` with ``psi`` of shape ``(n, d)``. The weight is
    ``|z|^2 / d``, the squared norm of ``z / sqrt(d)``, whose mean is 1.
    """
    rng = _as_rng(rng)
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    z *= math.sqrt(0.5)
    norm2 = np.einsum("ij,ij->i", z.real, z.real) + np.einsum("ij,ij->i", z.imag, z.imag)
    psi = z / np.sqrt(norm2)[:, None]
    return psi, norm2 / d


def sample_haar(d: int, rng) -> HaarSample:
    if d < 2:
        raise ValueError("d must be >= 2")
    psi, m2 = haar_batch(d, 1, rng)
    return HaarSample(psi[0], float(m2[0]))


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def run_blocks(kernel: Callable, shots: int, seed: int, workers: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``kernel(rng, n) -> (k, n) array`` over all shots.

    Returns per-statistic ``(sum, sum of squares)`` accumulated block by block.
    """
    if shots < 1:
        raise ValueError("need at least one shot")
    n_blocks = -(-shots // BLOCK_SIZE)

    def one(block):
        n = min(BLOCK_SIZE, shots - block * BLOCK_SIZE)
        x = np.atleast_2d(kernel(_block_rng(seed, block), n))
        return x.sum(axis=1), (x * x).sum(axis=1)

    if workers is None or workers <= 1:
        parts = [one(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(n_blocks)))
    k = parts[0][0].shape[0]
    s1 = np.array([math.fsum(p[0][i] for p in parts) for i in range(k)])
    s2 = np.array([math.fsum(p[1][i] for p in parts) for i in range(k)])
    return s1, s2


def _mean_se(s1: float, s2: float, n: float) -> tuple[float, float]:
    mean = s1 / n
    if n < 2:
        return mean, math.inf
    var = max(s2 - s1 * s1 / n, 0.0) / (n - 1)
    return mean, math.sqrt(var / n)


# Announcement rules for a rank-one measurement in the basis of ``basis``.
# Each maps the overlaps p[:, a] = |<a|psi>|^2 to the probability vector of
# announcements; the deterministic ones are indicator functions.
def _indicator(idx, d):
    return np.eye(d)[idx]


RULES: dict[str, Callable[[np.ndarray, np.random.Generator], np.ndarray]] = {
    "least_overlap": lambda p, rng: _indicator(np.argmin(p, axis=1), p.shape[1]),
    "greatest_overlap": lambda p, rng: _indicator(np.argmax(p, axis=1), p.shape[1]),
    "uniform": lambda p, rng: np.full_like(p, 1.0 / p.shape[1]),
    "born": lambda p, rng: p,
    "second_least": lambda p, rng: _indicator(np.argsort(p, axis=1, kind="stable")[:, 1], p.shape[1]),
    "fixed_first": lambda p, rng: _indicator(np.zeros(len(p), dtype=int), p.shape[1]),
    "random_outcome": lambda p, rng: _indicator(rng.integers(0, p.shape[1], len(p)), p.shape[1]),
}


def _overlap_kernel(d, rule, basis):
    announce = RULES[rule]

    def kernel(rng, n):
        psi, m2 = haar_batch(d, n, rng)
        if basis is not None:
            psi = psi @ basis.conj()
        p = np.abs(psi) ** 2
        # overlap of the sent (weighted) state with the announced basis vector,
        # averaged over the d possible announcements
        return m2 * np.einsum("ij,ij->i", announce(p, rng), p) / d

    return kernel


def cheat_overlap(d: int, shots: int, seed: int, rule: str, basis=None, workers=None) -> tuple[float, float]:
    """Mean of ``<a| rho_tilde_a |a>`` (averaged over ``a``) under an announcement rule.

    ``basis`` (columns) defaults to the computational basis.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}; choose from {sorted(RULES)}")
    if basis is not None:
        basis = np.asarray(basis, dtype=complex)
    s1, s2 = run_blocks(_overlap_kernel(d, rule, basis), shots, seed, workers)
    return _mean_se(s1[0], s2[0], shots)


def werner_quantum_overlap(d: int, eta: float) -> float:
    return (1 - eta) / d**2


def isotropic_quantum_overlap(d: int, eta: float) -> float:
    return eta / d + (1 - eta) / d**2


def werner_verdict(d: int, eta: float) -> str:
    # Alice cannot reach overlaps below 1/d^3
    return STEERABLE if werner_quantum_overlap(d, eta) < 1 / d**3 else NOT_STEERABLE


def isotropic_verdict(d: int, eta: float) -> str:
    return STEERABLE if isotropic_quantum_overlap(d, eta) > harmonic_number(d) / d**2 else NOT_STEERABLE


def werner_cheat_overlap(d, shots, seed, *, eta=None, rule="least_overlap", basis=None, workers=None) -> SimOutcome:
    """Least-overlap strategy against a Werner state; bound ``1/d^3``."""
    if shots < 10_000:
        raise ValueError("use at least 10^4 shots")
    mean, se = cheat_overlap(d, shots, seed, rule, basis, workers)
    return SimOutcome(
        shots=shots,
        empirical=mean,
        std_error=se,
        theoretical_quantum=None if eta is None else werner_quantum_overlap(d, eta),
        theoretical_cheat_bound=1 / d**3,
        verdict=None if eta is None else werner_verdict(d, eta),
    )


def isotropic_cheat_overlap(d, shots, seed, *, eta=None, rule="greatest_overlap", basis=None, workers=None) -> SimOutcome:
    """Greatest-overlap strategy against an isotropic state; bound ``H_d/d^2``."""
    if shots < 10_000:
        raise ValueError("use at least 10^4 shots")
    mean, se = cheat_overlap(d, shots, seed, rule, basis, workers)
    return SimOutcome(
        shots=shots,
        empirical=mean,
        std_error=se,
        theoretical_quantum=None if eta is None else isotropic_quantum_overlap(d, eta),
        theoretical_cheat_bound=harmonic_number(d) / d**2,
        verdict=None if eta is None else isotropic_verdict(d, eta),
    )


def steering_verdict(family: str, d: int, eta: float, shots: int = 0, seed: int = 0, workers=None) -> SimOutcome:
    """Closed-form verdict, optionally accompanied by a Monte Carlo run (``shots > 0``)."""
    if family not in ("werner", "isotropic"):
        raise ValueError(f"steering_verdict handles werner and isotropic, not {family!r}")
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    sim = werner_cheat_overlap if family == "werner" else isotropic_cheat_overlap
    if shots:
        return sim(d, shots, seed, eta=eta, workers=workers)
    if family == "werner":
        quantum, bound, verdict = werner_quantum_overlap(d, eta), 1 / d**3, werner_verdict(d, eta)
    else:
        quantum, bound, verdict = isotropic_quantum_overlap(d, eta), harmonic_number(d) / d**2, isotropic_verdict(d, eta)
    return SimOutcome(0, None, None, quantum, bound, verdict)


def inept_cheat_coefficient(epsilon: float, eta: float) -> float:
    """sigma_x coefficient Bob sees under the optimal two-ring ensemble."""
    z_plus, z_minus = inept_z_constants(epsilon, eta)
    return (epsilon * math.sqrt(max(1 - z_plus**2, 0.0)) + (1 - epsilon) * math.sqrt(max(1 - z_minus**2, 0.0))) / math.pi


def inept_quantum_coefficient(epsilon: float, eta: float) -> float:
    return eta * math.sqrt(epsilon * (1 - epsilon))


def _inept_kernel(epsilon, eta):
    z_plus, z_minus = inept_z_constants(epsilon, eta)

    def kernel(rng, n):
        in_plus = rng.random(n) < epsilon
        z = np.where(in_plus, z_plus, z_minus)
        phi = rng.uniform(0.0, 2 * np.pi, n)
        x = np.sqrt(np.clip(1 - z * z, 0.0, None)) * np.cos(phi)
        # sigma_x query: +1 iff phi in [-pi/2, pi/2)
        announce_plus_x = np.cos(phi) >= 0.0
        # Bob's sigma_z outcome b on (I - z sigma_z)/2 has mean -z
        b = np.where(rng.random(n) < 0.5 * (1 - z), 1.0, -1.0)
        plus = in_plus.astype(float)
        return np.stack([x * announce_plus_x, plus, -b * plus, -b * (1.0 - plus)])

    return kernel


def inept_cheat_simulation(epsilon: float, eta: float, shots: int, seed: int, workers=None) -> IneptSimOutcome:
    """Simulate the two-ring cheating ensemble against an inept state.

    ``empirical`` estimates the sigma_x coefficient of Bob's state for the +1
    announcement, ``Tr[sigma_x rho_tilde_+]``; the quantum value is
    ``eta sqrt(eps (1-eps))``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    s1, s2 = run_blocks(_inept_kernel(epsilon, eta), shots, seed, workers)
    coef, coef_se = _mean_se(s1[0], s2[0], shots)
    freq, freq_se = _mean_se(s1[1], s2[1], shots)
    n_plus, n_minus = s1[1], shots - s1[1]

    def branch_mean(total, count):
        if count < 2:
            return math.nan, math.nan
        mean = total / count
        # b^2 = 1, so the within-branch variance is 1 - mean^2
        return mean, math.sqrt(max(1.0 - mean * mean, 0.0) / (count - 1))

    zp, zp_se = branch_mean(s1[2], n_plus)
    zm, zm_se = branch_mean(s1[3], n_minus)
    cheat = inept_cheat_coefficient(epsilon, eta)
    quantum = inept_quantum_coefficient(epsilon, eta)
    return IneptSimOutcome(
        shots=shots,
        empirical=coef,
        std_error=coef_se,
        theoretical_quantum=quantum,
        theoretical_cheat_bound=cheat,
        verdict=STEERABLE if quantum > cheat else NOT_STEERABLE,
        plus_frequency=freq,
        plus_frequency_se=freq_se,
        z_mean_plus=zp,
        z_mean_plus_se=zp_se,
        z_mean_minus=zm,
        z_mean_minus_se=zm_se,
    )


def epsilon_d_alternating(d: int) -> float:
    """``(1/d^2) sum_k (-1)^(k-1) C(d,k)/k`` in exact rationals; d <= 10 only."""
    if not 1 <= d <= 10:
        raise ValueError("the alternating sum cancels catastrophically; use it for d <= 10")
    total = sum(Fraction((-1) ** (k - 1) * math.comb(d, k), k) for k in range(1, d + 1))
    return float(total / d**2)


def epsilon_d_quadrature(d: int) -> float:
    """``(1/d) int_0^inf u e^-u (1 - e^-u)^(d-1) du`` by adaptive quadrature."""
    val, _ = quad(lambda u: u * math.exp(-u) * (-math.expm1(-u)) ** (d - 1), 0.0, math.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val / d
