"""Globally optimal rate balancing with proper signals and pure strategies.

For a rate profile ``(rho1, rho2)`` the balancing problem maximizes the
common scaling ``R`` such that ``r_k >= rho_k * R`` subject to per-user
power caps.  A bisection over ``R`` reduces it to feasibility checks that
are solved by alternating MMSE filter updates with a dominant-eigenpair
computation of a 3x3 nonnegative matrix; one user's power constraint is
active at the eigen fixed point, and the other user's power is checked for
admissibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SimoChannel, validate_channel
from .errors import ConvergenceError, ValidationError
from .rates import RatePoint, mmse_filter, rate_proper

__all__ = [
    "RateProfile",
    "BalanceResult",
    "dominant_eigenpair",
    "gamma_of_R",
    "balance_pure_proper",
]

# Feasibility margin reported for R = 0 (all-zero rate targets).
GAMMA_CAP = 1e18

_FP_MAX_ITER = 500
FP_TOL = 1e-10  # default tolerance on the eigenvalue change per filter update


@dataclass(frozen=True)
class RateProfile:
    rho1: float
    rho2: float

    def __post_init__(self):
        if not (0.0 <= self.rho1 <= 1.0 and 0.0 <= self.rho2 <= 1.0):
            raise ValidationError("profile entries must lie in [0, 1]")
        if abs(self.rho1 + self.rho2 - 1.0) > 1e-9:
            raise ValidationError("profile must sum to 1")

    @classmethod
    def from_beta(cls, beta: float) -> "RateProfile":
        return cls(float(beta), float(1.0 - beta))


@dataclass(frozen=True)
class BalanceResult:
    R: float
    p1: float
    p2: float
    rates: RatePoint


def dominant_eigenpair(a, tol: float = 1e-12, max_iter: int = 20000):
    """Dominant eigenpair of a 3x3 entrywise-nonnegative matrix.

    Power iteration with a tiny diagonal shift (breaks ties for reducible
    matrices such as one-sided channels).  If convergence stalls, the shift
    is enlarged: for a nonnegative matrix any positive shift keeps the
    spectral-radius eigenpair dominant while separating it from negative or
    complex eigenvalues of similar magnitude.  The eigenvector is scaled so
    its last entry is 1 when that entry is nonzero, otherwise to unit norm.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (3, 3):
        raise ValidationError(f"expected 3x3 matrix, got {a.shape}")
    if (a < 0).any():
        raise ValidationError("matrix must be entrywise nonnegative")
    tr = float(np.trace(a))
    v = np.full(3, 1.0 / np.sqrt(3.0))
    for shift in (tr * 1e-12, max(tr, 1.0)):
        b = a + shift * np.eye(3)
        lam = 0.0
        for _ in range(max_iter):
            w = b @ v
            lam = float(np.linalg.norm(w))
            if lam == 0.0:
                return 0.0, v  # zero matrix: every vector is an eigenvector
            w /= lam
            if np.linalg.norm(b @ w - lam * w) <= tol * max(lam, 1e-300):
                lam -= shift
                if abs(w[2]) > 1e-12:
                    w = w / w[2]
                return lam, w
            v = w
    raise ConvergenceError("power iteration did not converge")


def _balance_matrix(ch: SimoChannel, profile: RateProfile, R: float, p, i: int):
    """Filters, coupling matrix, and noise vector at the current powers."""
    w1 = mmse_filter(ch, 1, p[1])
    w2 = mmse_filter(ch, 2, p[0])
    targets = (2.0 ** (profile.rho1 * R) - 1.0, 2.0 ** (profile.rho2 * R) - 1.0)
    d = []
    for k, w in ((1, w1), (2, w2)):
        gain = abs(np.vdot(w, ch.direct(k))) ** 2
        d.append(targets[k - 1] / gain)
    psi = np.array(
        [
            [0.0, d[0] * abs(np.vdot(w1, ch.h12)) ** 2],
            [d[1] * abs(np.vdot(w2, ch.h21)) ** 2, 0.0],
        ]
    )
    sigma = np.array(
        [d[0] * np.vdot(w1, w1).real, d[1] * np.vdot(w2, w2).real]
    )
    pk = ch.power(i)
    a = np.zeros((3, 3))
    a[:2, :2] = psi
    a[:2, 2] = sigma
    a[2, :2] = psi[i - 1] / pk
    a[2, 2] = sigma[i - 1] / pk
    return a, (w1, w2)


def _single_user_gamma(ch: SimoChannel, k: int, target: float):
    """Feasibility margin when only user ``k`` has a nonzero rate target."""
    if target <= 0.0:
        return GAMMA_CAP, (0.0, 0.0)
    gain = float(np.linalg.norm(ch.direct(k)) ** 2)
    gamma = ch.power(k) * gain / target
    powers = (ch.power(1), 0.0) if k == 1 else (0.0, ch.power(2))
    return gamma, powers


def _gamma_powers(ch: SimoChannel, profile: RateProfile, R: float, eps: float):
    """Feasibility margin for targets ``rho_k * R`` plus achieving powers."""
    if R <= 0.0:
        return GAMMA_CAP, (0.0, 0.0)
    if profile.rho2 == 0.0:
        return _single_user_gamma(ch, 1, 2.0 ** (profile.rho1 * R) - 1.0)
    if profile.rho1 == 0.0:
        return _single_user_gamma(ch, 2, 2.0 ** (profile.rho2 * R) - 1.0)

    budget = np.array([ch.p1, ch.p2])
    for i in (1, 2):
        p = np.zeros(2)
        lam_prev = None
        lam = 0.0
        converged = False
        for _ in range(_FP_MAX_ITER):
            a, _ = _balance_matrix(ch, profile, R, p, i)
            lam, v = dominant_eigenpair(a)
            if lam <= 0.0 or abs(v[2]) < 1e-12:
                raise ConvergenceError(
                    "balance fixed point degenerated (zero eigenvalue)"
                )
            p = np.clip(v[:2], 0.0, None)
            if lam_prev is not None and abs(lam - lam_prev) <= eps * max(
                1.0, abs(lam)
            ):
                converged = True
                break
            lam_prev = lam
        if not converged:
            raise ConvergenceError(
                f"filter/eigenpair fixed point did not converge (i={i}, R={R})"
            )
        if (p <= budget * (1.0 + 1e-9) + 1e-12).all():
            return 1.0 / lam, (float(p[0]), float(p[1]))
    raise ConvergenceError(
        "neither power constraint yields admissible balancing powers"
    )


def gamma_of_R(
    ch: SimoChannel, profile: RateProfile, R: float, eps: float = FP_TOL
) -> float:
    """Largest common SINR margin for the rate targets ``rho_k * R``.

    Values >= 1 mean the targets are feasible; the function is nonincreasing
    in ``R``.  ``R = 0`` reports :data:`GAMMA_CAP`.
    """
    gamma, _ = _gamma_powers(ch, profile, R, eps)
    return gamma


def _upper_bracket(ch: SimoChannel) -> float:
    g1 = float(np.linalg.norm(ch.h11) ** 2)
    g2 = float(np.linalg.norm(ch.h22) ** 2)
    return np.log2(1.0 + ch.p1 * g1) + np.log2(1.0 + ch.p2 * g2)


def balance_pure_proper(
    ch: SimoChannel, profile: RateProfile, eps: float = 1e-8
) -> BalanceResult:
    """Solve the rate balancing problem by bisection on the scaling ``R``.

    Returns the feasible endpoint of the final bracket, so the reported
    powers achieve rates of at least ``rho_k * R - eps``.
    """
    validate_channel(ch)
    if eps <= 0:
        raise ValidationError("eps must be positive")

    # Degenerate single-user profiles skip the bisection entirely.
    if profile.rho2 == 0.0 or profile.rho1 == 0.0:
        k = 1 if profile.rho2 == 0.0 else 2
        gain = float(np.linalg.norm(ch.direct(k)) ** 2)
        r = float(np.log2(1.0 + ch.power(k) * gain))
        powers = (ch.p1, 0.0) if k == 1 else (0.0, ch.p2)
        return BalanceResult(
            R=r, p1=powers[0], p2=powers[1], rates=rate_proper(ch, *powers)
        )

    lo, hi = 0.0, _upper_bracket(ch)
    # The bracket top is infeasible by construction; widen defensively anyway.
    for _ in range(4):
        if gamma_of_R(ch, profile, hi) < 1.0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError("could not bracket the balancing optimum")
    while hi - lo > eps:
        mid = 0.5 * (lo + hi)
        if gamma_of_R(ch, profile, mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    _, powers = _gamma_powers(ch, profile, lo, FP_TOL)
    return BalanceResult(
        R=lo, p1=powers[0], p2=powers[1], rates=rate_proper(ch, *powers)
    )
