"""Entanglement, steering and Bell boundaries in the mixing parameter eta.

Each ``*_boundaries`` function returns a :class:`BoundaryReport` for one
point of its family. Steering boundaries are exact for Werner and isotropic
states; for inept and symmetric Gaussian states only an upper bound is
known (restricted measurement sets), which ``eta_steer_kind`` records.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .bell import chsh_threshold_inept

GROTHENDIECK_K3 = 1.5163
CATALAN = 0.9159
# 1/K_g(3) as quoted for two-qubit Werner states.
WERNER_D2_BELL_LOWER = 0.6595
EULER_GAMMA = 0.5772156649015329

HARMONIC_DIRECT_MAX = 10**7
ROOT_TOL = 1e-10
_BRACKET_GRID = 257

FAMILIES = ("werner", "isotropic", "inept", "gaussian_symmetric")


class BoundaryError(ValueError):
    """The requested boundary is undefined or could not be bracketed."""


@dataclass(frozen=True)
class BoundaryReport:
    family: str
    params: dict
    eta_ent: float
    eta_steer: float
    eta_steer_kind: str
    eta_bell_upper: Optional[float] = None
    eta_bell_lower: Optional[float] = None
    bell_upper_trivial: bool = False
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.eta_steer_kind not in ("exact", "upper_bound"):
            raise ValueError(f"bad eta_steer_kind {self.eta_steer_kind!r}")
        if not 0.0 <= self.eta_ent <= self.eta_steer <= 1.0:
            raise ValueError(f"hierarchy violated: eta_ent={self.eta_ent}, eta_steer={self.eta_steer}")
        if self.eta_bell_upper is not None and self.eta_steer > self.eta_bell_upper:
            raise ValueError("eta_steer exceeds the Bell upper bound")
        if (
            self.eta_bell_lower is not None
            and self.eta_bell_upper is not None
            and self.eta_bell_lower > self.eta_bell_upper
        ):
            raise ValueError("Bell lower bound exceeds Bell upper bound")

    def as_dict(self) -> dict:
        return asdict(self)


def _check_d(d):
    if int(d) != d or d < 2:
        raise BoundaryError(f"d must be an integer >= 2, got {d}")
    return int(d)


def harmonic_number(d: int) -> float:
    """``H_d = 1 + 1/2 + ... + 1/d``; summed directly up to 10^7 terms."""
    if d < 1:
        raise ValueError("harmonic number needs d >= 1")
    if d <= HARMONIC_DIRECT_MAX:
        if d <= 1000:
            return math.fsum(1.0 / k for k in range(1, d + 1))
        # smallest terms first
        return float(np.sum(1.0 / np.arange(d, 0, -1, dtype=np.float64)))
    return math.log(d) + EULER_GAMMA + 1.0 / (2 * d)


def collins_I_d(d: int) -> float:
    """Maximal quantum value ``I_d(QM)`` of the d-outcome Bell expression.

    ``4d sum_{k=0}^{[d/2]-1} (1 - 2k/(d-1)) (q_k - q_{-(k+1)})`` with
    ``q_k = 1 / (2 d^3 sin^2(pi (k + 1/4) / d))``.
    """
    d = _check_d(d)
    k = np.arange(d // 2, dtype=np.float64)

    def q(kk):
        return 1.0 / (2.0 * d**3 * np.sin(np.pi * (kk + 0.25) / d) ** 2)

    terms = (1.0 - 2.0 * k / (d - 1)) * (q(k) - q(-(k + 1)))
    return float(4 * d * math.fsum(terms))


def werner_boundaries(d: int) -> BoundaryReport:
    d = _check_d(d)
    if d == 2:
        bell_upper, bell_lower, trivial = 1 / math.sqrt(2), WERNER_D2_BELL_LOWER, False
    else:
        bell_upper, bell_lower, trivial = 1.0, 1 - 1 / d, True
    return BoundaryReport(
        family="werner",
        params={"d": d},
        eta_ent=1 / (d + 1),
        eta_steer=1 - 1 / d,
        eta_steer_kind="exact",
        eta_bell_upper=bell_upper,
        eta_bell_lower=bell_lower,
        bell_upper_trivial=trivial,
    )


def isotropic_boundaries(d: int) -> BoundaryReport:
    d = _check_d(d)
    return BoundaryReport(
        family="isotropic",
        params={"d": d},
        eta_ent=1 / (d + 1),
        eta_steer=(harmonic_number(d) - 1) / (d - 1),
        eta_steer_kind="exact",
        eta_bell_upper=2.0 / collins_I_d(d),
        eta_bell_lower=WERNER_D2_BELL_LOWER if d == 2 else None,
    )


def _check_epsilon(epsilon):
    if not 0.0 < epsilon < 1.0:
        raise BoundaryError(
            f"epsilon={epsilon}: the inept state is a product state for every eta, boundaries are undefined"
        )


def inept_eta_ent(epsilon: float) -> float:
    _check_epsilon(epsilon)
    p = epsilon * (1 - epsilon)
    return p / (p + math.sqrt(p))


def inept_steering_excess(epsilon: float, eta):
    """Quantum minus best-cheating sigma_x coefficient, scaled by pi.

    Positive values mean the optimal local-hidden-state strategy fails for
    Alice's measurement set {sigma_z} + {sigma_theta}. Vectorized in ``eta``.
    """
    eta = np.asarray(eta, dtype=float)
    z_plus = 1 - 2 * eta - 2 * epsilon * (1 - eta)
    z_minus = 1 - 2 * epsilon * (1 - eta)
    out = (
        np.pi * eta * np.sqrt(epsilon * (1 - epsilon))
        - (1 - epsilon) * np.sqrt(np.clip(1 - z_minus**2, 0.0, None))
        - epsilon * np.sqrt(np.clip(1 - z_plus**2, 0.0, None))
    )
    return out if out.ndim else float(out)


def inept_steering_root(epsilon: float, tol: float = ROOT_TOL) -> float:
    """Root in eta of :func:`inept_steering_excess`, found by bisection on [eta_ent, 1].

    The sign change and a single crossing are checked on a grid before
    bisecting, since monotonicity in eta is not known analytically.
    """
    lo, hi = inept_eta_ent(epsilon), 1.0
    grid = np.linspace(lo, hi, _BRACKET_GRID)
    vals = inept_steering_excess(epsilon, grid)
    if not (vals[0] <= 0.0 < vals[-1]):
        raise BoundaryError(
            f"epsilon={epsilon}: no sign change on [{lo:.6g}, 1] (f = {vals[0]:.3g} .. {vals[-1]:.3g})"
        )
    crossings = np.count_nonzero(np.diff(np.sign(vals)) != 0)
    if crossings != 1 and not (crossings == 2 and vals[0] == 0.0):
        raise BoundaryError(f"epsilon={epsilon}: {crossings} sign changes on the bracket, root ambiguous")

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if inept_steering_excess(epsilon, mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def inept_boundaries(epsilon: float) -> BoundaryReport:
    _check_epsilon(epsilon)
    root = inept_steering_root(epsilon)
    if math.isclose(epsilon, 0.5, abs_tol=1e-12):
        # equivalent to the two-qubit isotropic state, where the boundary is exact
        eta_steer, kind = 0.5, "exact"
    else:
        eta_steer, kind = root, "upper_bound"
    return BoundaryReport(
        family="inept",
        params={"epsilon": epsilon},
        eta_ent=inept_eta_ent(epsilon),
        eta_steer=eta_steer,
        eta_steer_kind=kind,
        eta_bell_upper=chsh_threshold_inept(epsilon),
        extras={"restricted_measurement_root": root},
    )


def gaussian_symmetric_boundaries(nbar: float) -> BoundaryReport:
    if not nbar > 0:
        raise BoundaryError(f"nbar must be positive, got {nbar}")
    return BoundaryReport(
        family="gaussian_symmetric",
        params={"nbar": nbar},
        eta_ent=math.sqrt(nbar / (1 + nbar)),
        eta_steer=math.sqrt((1 + 2 * nbar) / (2 * (1 + nbar))),
        eta_steer_kind="upper_bound",
        eta_bell_upper=1.0,
        bell_upper_trivial=True,
    )


def boundaries(family: str, value) -> BoundaryReport:
    """Dispatch on family name; ``value`` is d, epsilon or nbar."""
    funcs = {
        "werner": werner_boundaries,
        "isotropic": isotropic_boundaries,
        "inept": inept_boundaries,
        "gaussian_symmetric": gaussian_symmetric_boundaries,
    }
    try:
        func = funcs[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}") from None
    return func(value)
