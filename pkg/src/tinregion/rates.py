"""TIN rate formulas: improper complex form, composite-real form, proper
special case, filter-SINR form, and the enhanced-channel upper bound.

All rates are in bits per channel use.  Each receiver treats the other
user's signal as additional Gaussian noise.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .channel import (
    SimoChannel,
    TransformedChannel,
    TxStrategy,
    channel_from_transform,
    check_composite_cov,
    composite_cov_from_strategy,
    composite_real_embed,
    enhance_channel,
)
from .errors import TinRegionError, ValidationError

__all__ = [
    "RatePoint",
    "rate_complex",
    "rate_composite",
    "rate_proper",
    "sinr",
    "mmse_filter",
    "enhanced_upper_bound",
    "transformed_rates",
]


class RatePoint(NamedTuple):
    r1: float
    r2: float


def _clip_rate(r: float) -> float:
    if not np.isfinite(r):
        raise TinRegionError(f"rate evaluation produced non-finite value {r}")
    if r < 0.0:
        if r < -1e-9:
            raise TinRegionError(f"rate evaluation produced negative value {r}")
        return 0.0
    return float(r)


def _rate_complex_one(hkk, hkj, ck, cj, ctk, ctj) -> float:
    n = len(hkk)
    eye = np.eye(n)
    cs = cj * np.outer(hkj, hkj.conj()) + eye
    cy = ck * np.outer(hkk, hkk.conj()) + cs
    r = np.log2(np.linalg.det(cy).real / np.linalg.det(cs).real)
    if ctk != 0 or ctj != 0:
        pcs = ctj * np.outer(hkj, hkj)
        pcy = ctk * np.outer(hkk, hkk) + pcs
        cyi = np.linalg.inv(cy)
        csi = np.linalg.inv(cs)
        num = np.linalg.det(eye - cyi @ pcy @ cyi.T @ pcy.conj().T).real
        den = np.linalg.det(eye - csi @ pcs @ csi.T @ pcs.conj().T).real
        r += 0.5 * np.log2(num / den)
    return r


def rate_complex(ch: SimoChannel, x: TxStrategy) -> RatePoint:
    """Achievable TIN rate pair for a (possibly improper) strategy.

    The first term is the proper-signal determinant ratio; the second
    corrects for the pseudocovariances of the receive and interference
    signals and vanishes for proper inputs.
    """
    r1 = _rate_complex_one(ch.h11, ch.h12, x.c1, x.c2, complex(x.ct1), complex(x.ct2))
    r2 = _rate_complex_one(ch.h22, ch.h21, x.c2, x.c1, complex(x.ct2), complex(x.ct1))
    return RatePoint(_clip_rate(r1), _clip_rate(r2))


def _rate_composite_one(hkk_e, hkj_e, mk, mj) -> float:
    n2 = hkk_e.shape[0]
    cs = hkj_e @ mj @ hkj_e.T + 0.5 * np.eye(n2)
    cy = hkk_e @ mk @ hkk_e.T + cs
    return 0.5 * np.log2(np.linalg.det(cy) / np.linalg.det(cs))


def rate_composite(ch: SimoChannel, m1, m2) -> RatePoint:
    """Rate pair from 2x2 composite real input covariances.

    Equals :func:`rate_complex` when ``m_k`` comes from
    :func:`composite_cov_from_strategy`.
    """
    m1 = check_composite_cov(m1)
    m2 = check_composite_cov(m2)
    e11 = composite_real_embed(ch.h11)
    e12 = composite_real_embed(ch.h12)
    e21 = composite_real_embed(ch.h21)
    e22 = composite_real_embed(ch.h22)
    r1 = _rate_composite_one(e11, e12, m1, m2)
    r2 = _rate_composite_one(e22, e21, m2, m1)
    return RatePoint(_clip_rate(r1), _clip_rate(r2))


def rate_proper(ch: SimoChannel, p1: float, p2: float) -> RatePoint:
    """Rate pair for proper signaling with transmit powers ``(p1, p2)``."""
    r1 = _rate_complex_one(ch.h11, ch.h12, p1, p2, 0.0, 0.0)
    r2 = _rate_complex_one(ch.h22, ch.h21, p2, p1, 0.0, 0.0)
    return RatePoint(_clip_rate(r1), _clip_rate(r2))


def mmse_filter(ch: SimoChannel, k: int, p_j: float) -> np.ndarray:
    """Interference-aware MMSE receive filter for user ``k``.

    ``w = (h_kj p_j h_kj^H + I)^{-1} h_kk``; maximizes the SINR over all
    receive filters.
    """
    if p_j < 0:
        raise ValidationError("interferer power must be nonnegative")
    hkk = ch.direct(k)
    hkj = ch.cross(k)
    cs = p_j * np.outer(hkj, hkj.conj()) + np.eye(len(hkk))
    return np.linalg.solve(cs, hkk)


def sinr(ch: SimoChannel, w1, w2, p1: float, p2: float) -> tuple[float, float]:
    """Per-user SINRs for given receive filters and transmit powers."""
    out = []
    for k, w, pk, pj in ((1, w1, p1, p2), (2, w2, p2, p1)):
        w = np.asarray(w, dtype=complex)
        nw = float(np.vdot(w, w).real)
        if nw <= 0.0:
            raise ValidationError(f"zero receive filter for user {k}")
        sig = abs(np.vdot(w, ch.direct(k))) ** 2 * pk
        intf = abs(np.vdot(w, ch.cross(k))) ** 2 * pj
        out.append(sig / (intf + nw))
    return out[0], out[1]


def transformed_rates(
    tc: TransformedChannel, x: TxStrategy, original_coords: bool = True
) -> RatePoint:
    """Rates of the two-antenna transformed channel for a strategy.

    With ``original_coords`` the strategy is interpreted in the original
    channel's coordinates and the internal phase bookkeeping is applied, so
    the result matches the original channel's rates.
    """
    ch2 = channel_from_transform(tc, p1=0.0, p2=0.0)  # budgets unused here
    if original_coords:
        x = tc.map_strategy(x)
    return rate_complex(ch2, x)


def enhanced_upper_bound(tc: TransformedChannel, x: TxStrategy) -> RatePoint:
    """Per-user rate upper bound from the phase-enhanced channel.

    Evaluates the enhanced channel (residual phase zeroed) with the two
    pseudovariance phases anti-aligned, keeping variances and
    pseudovariance magnitudes.  The result bounds the transformed channel's
    rates for the same magnitudes under any phase choice, and is attained
    with equality on the enhanced channel itself.
    """
    etc = enhance_channel(tc)
    ch2 = channel_from_transform(etc, p1=0.0, p2=0.0)
    aligned = TxStrategy(
        c1=x.c1, c2=x.c2, ct1=abs(complex(x.ct1)), ct2=-abs(complex(x.ct2))
    )
    return rate_complex(ch2, aligned)


def strategy_rates(ch: SimoChannel, x: TxStrategy) -> RatePoint:
    """Convenience alias used by sweeps: rates of ``x`` on ``ch``."""
    return rate_complex(ch, x)


def composite_from_strategy(x: TxStrategy) -> tuple[np.ndarray, np.ndarray]:
    """Both users' composite real covariances for a strategy."""
    return (
        composite_cov_from_strategy(x.c1, complex(x.ct1)),
        composite_cov_from_strategy(x.c2, complex(x.ct2)),
    )
