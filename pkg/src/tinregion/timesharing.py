"""Globally optimal coded time-sharing with proper signals.

The time-sharing problem (average rates and average powers over strategies)
has zero duality gap, so it is solved through its Lagrangian dual: the
outer minimization over multipliers runs a cutting-plane method, and each
inner maximization is a mixed-monotonic program solved to global optimality
by branch-and-bound over power boxes.  A restricted primal LP over the
collected inner maximizers recovers an explicit mixture of at most four
strategies.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, linprog

from .channel import SimoChannel, validate_channel
from .errors import ConvergenceError, ValidationError
from .proper_pure import RateProfile
from .rates import RatePoint, rate_proper

__all__ = [
    "DualVariables",
    "Box",
    "TimeSharingSolution",
    "mm_objective",
    "box_bounds",
    "branch_box",
    "init_box",
    "solve_inner",
    "dual_value",
    "cutting_plane",
    "primal_recovery",
    "Cut",
]

LAMBDA_FLOOR = 1e-9
_LN2 = math.log(2.0)
_MAX_BOXES = 2_000_000


@dataclass(frozen=True)
class DualVariables:
    """Multipliers for the rate constraints (mu) and power constraints (lambda)."""

    mu1: float
    mu2: float
    lam1: float
    lam2: float

    def __post_init__(self):
        if self.mu1 < 0 or self.mu2 < 0:
            raise ValidationError("rate multipliers must be nonnegative")
        if self.lam1 < LAMBDA_FLOOR * (1 - 1e-12) or self.lam2 < LAMBDA_FLOOR * (
            1 - 1e-12
        ):
            raise ValidationError("power multipliers must be >= the lambda floor")


@dataclass
class Box:
    """Axis-aligned power box with cached objective bounds."""

    lo: tuple[float, float]
    hi: tuple[float, float]
    U: float = field(default=math.inf)
    L: float = field(default=-math.inf)

    def widths(self) -> tuple[float, float]:
        return (self.hi[0] - self.lo[0], self.hi[1] - self.lo[1])


@dataclass(frozen=True)
class TimeSharingSolution:
    """Convex combination of proper power strategies and its averaged rates."""

    entries: tuple[tuple[float, float, float], ...]  # (tau, p1, p2)
    rates: RatePoint

    def average_powers(self) -> tuple[float, float]:
        p1 = sum(t * a for t, a, _ in self.entries)
        p2 = sum(t * b for t, _, b in self.entries)
        return p1, p2

    def to_dict(self) -> dict:
        return {
            "entries": [
                {"tau": t, "p1": a, "p2": b} for t, a, b in self.entries
            ],
            "rates": [self.rates.r1, self.rates.r2],
        }


@dataclass(frozen=True)
class Cut:
    """One dual evaluation: multipliers, inner maximizer, rates, and value."""

    dv: DualVariables
    p_star: tuple[float, float]
    rates: RatePoint
    value: float


class _InnerProblem:
    """Scalar-form evaluation of the mixed-monotonic objective.

    Uses the rank-one identity
    ``h_kk^H (I + t h_kj h_kj^H)^{-1} h_kk = g_kk - t |h_kj^H h_kk|^2 / (1 + t |h_kj|^2)``
    so bound evaluations cost a handful of scalar operations.
    """

    def __init__(self, ch: SimoChannel, dv: DualVariables):
        self.dv = dv
        self.g = (
            float(np.linalg.norm(ch.h11) ** 2),
            float(np.linalg.norm(ch.h22) ** 2),
        )
        self.x = (
            float(abs(np.vdot(ch.h12, ch.h11)) ** 2),
            float(abs(np.vdot(ch.h21, ch.h22)) ** 2),
        )
        self.n = (
            float(np.linalg.norm(ch.h12) ** 2),
            float(np.linalg.norm(ch.h21) ** 2),
        )

    def gain(self, k: int, t: float) -> float:
        g, x, n = self.g[k], self.x[k], self.n[k]
        val = g - t * x / (1.0 + t * n)
        return val if val > 0.0 else 0.0

    def value(self, x1: float, x2: float, y1: float, y2: float) -> float:
        dv = self.dv
        return (
            dv.mu1 * math.log2(1.0 + x1 * self.gain(0, y2))
            + dv.mu2 * math.log2(1.0 + x2 * self.gain(1, y1))
            - dv.lam1 * y1
            - dv.lam2 * y2
        )


def mm_objective(ch: SimoChannel, x, y, dv: DualVariables) -> float:
    """Mixed-monotonic surrogate: nondecreasing in ``x``, nonincreasing in ``y``.

    On the diagonal ``x == y`` it equals the weighted proper sum rate minus
    the power penalty.
    """
    x1, x2 = float(x[0]), float(x[1])
    y1, y2 = float(y[0]), float(y[1])
    if min(x1, x2, y1, y2) < 0:
        raise ValidationError("power arguments must be nonnegative")
    return _InnerProblem(ch, dv).value(x1, x2, y1, y2)


def box_bounds(ch: SimoChannel, b: Box, dv: DualVariables) -> tuple[float, float]:
    """Upper and lower bounds on the boxed inner maximum; tight as the box
    shrinks to a point."""
    prob = _InnerProblem(ch, dv)
    u = prob.value(b.hi[0], b.hi[1], b.lo[0], b.lo[1])
    low = prob.value(b.lo[0], b.lo[1], b.lo[0], b.lo[1])
    return u, low


def branch_box(b: Box) -> tuple[Box, Box]:
    """Split a box at the midpoint of its longest edge (ties: first axis)."""
    w = b.widths()
    if max(w) <= 0.0:
        raise ValidationError("cannot branch a degenerate box")
    k = 0 if w[0] >= w[1] else 1
    mid = 0.5 * (b.lo[k] + b.hi[k])
    hi1 = list(b.hi)
    hi1[k] = mid
    lo2 = list(b.lo)
    lo2[k] = mid
    return Box(b.lo, tuple(hi1)), Box(tuple(lo2), b.hi)


def _box_edge(prob: _InnerProblem, k: int, lam: float, mu: float) -> float:
    """Smallest power beyond which the interference-free objective of user
    ``k`` plus the other user's best case cannot be positive."""
    g = prob.g[k]

    def f_hat(p: float, kk: int) -> float:
        mus = (prob.dv.mu1, prob.dv.mu2)[kk]
        lams = (prob.dv.lam1, prob.dv.lam2)[kk]
        return mus * math.log2(1.0 + p * prob.g[kk]) - lams * p

    j = 1 - k
    pj_peak = max(
        (prob.dv.mu1, prob.dv.mu2)[j] / ((prob.dv.lam1, prob.dv.lam2)[j] * _LN2)
        - 1.0 / prob.g[j],
        0.0,
    )
    f_max_j = f_hat(pj_peak, j)
    pk_peak = max(mu / (lam * _LN2) - 1.0 / g, 0.0)

    def h(p: float) -> float:
        return f_hat(p, k) + f_max_j

    if h(pk_peak) <= 0.0:
        return pk_peak
    hi = max(pk_peak, 1.0)
    for _ in range(200):
        hi *= 2.0
        if h(hi) < 0.0:
            break
    else:
        raise ConvergenceError("could not bracket the box-sizing root")
    return float(brentq(h, pk_peak, hi, xtol=1e-9, rtol=1e-12))


def init_box(ch: SimoChannel, dv: DualVariables) -> Box:
    """Box guaranteed to contain the global maximizer of the inner problem.

    Beyond the returned corner, the concave interference-free upper
    envelope of the objective is nonpositive while the origin achieves 0.
    """
    prob = _InnerProblem(ch, dv)
    p0 = (
        _box_edge(prob, 0, dv.lam1, dv.mu1),
        _box_edge(prob, 1, dv.lam2, dv.mu2),
    )
    b = Box((0.0, 0.0), p0)
    b.U, b.L = box_bounds(ch, b, dv)
    return b


def _branch_and_bound(ch: SimoChannel, dv: DualVariables, eps: float,
                      max_boxes: int, batch: int = 256):
    """Shared engine: returns ``(p, L, U_cert, resolved)`` where ``U_cert``
    upper-bounds the true inner maximum even if the budget ran out.

    Boxes are processed best-upper-bound-first in deterministic batches so
    the bound arithmetic vectorizes; children whose upper bound cannot beat
    the incumbent by more than ``eps`` are pruned, which keeps the returned
    value within ``eps`` of the global maximum.
    """
    prob = _InnerProblem(ch, dv)
    g1, x1, n1 = prob.g[0], prob.x[0], prob.n[0]
    g2, x2, n2 = prob.g[1], prob.x[1], prob.n[1]
    mu1, mu2, lam1, lam2 = dv.mu1, dv.mu2, dv.lam1, dv.lam2
    inv_ln2 = 1.0 / _LN2

    def values(xa, xb, ya, yb):
        # F evaluated elementwise on arrays: x = signal powers, y = penalized
        qa = g1 - yb * x1 / (1.0 + yb * n1)
        qb = g2 - ya * x2 / (1.0 + ya * n2)
        np.clip(qa, 0.0, None, out=qa)
        np.clip(qb, 0.0, None, out=qb)
        return (
            mu1 * inv_ln2 * np.log1p(xa * qa)
            + mu2 * inv_ln2 * np.log1p(xb * qb)
            - lam1 * ya
            - lam2 * yb
        )

    peak1 = max(mu1 / (lam1 * _LN2) - 1.0 / g1, 0.0) if g1 > 0 else 0.0
    peak2 = max(mu2 / (lam2 * _LN2) - 1.0 / g2, 0.0) if g2 > 0 else 0.0

    def envelope(lo_arr, hi_arr):
        # interference-free concave envelope maximized per box; a second
        # valid upper bound that is tight where cross links are weak
        p1 = np.clip(peak1, lo_arr[:, 0], hi_arr[:, 0])
        p2 = np.clip(peak2, lo_arr[:, 1], hi_arr[:, 1])
        return (
            mu1 * inv_ln2 * np.log1p(p1 * g1)
            - lam1 * p1
            + mu2 * inv_ln2 * np.log1p(p2 * g2)
            - lam2 * p2
        )

    root = init_box(ch, dv)
    # Any maximizer satisfies mu_k * (own-rate marginal) >= lam_k because
    # the cross term only decreases the objective, and the marginal is at
    # most 1/(p ln 2); intersecting with that cap keeps the search box from
    # exploding when a multiplier sits near its floor.
    root.hi = (min(root.hi[0], peak1 + 1.0 / g1 if g1 > 0 else 0.0),
               min(root.hi[1], peak2 + 1.0 / g2 if g2 > 0 else 0.0))
    root.U, root.L = box_bounds(ch, root, dv)
    root.U = min(
        root.U,
        float(
            envelope(
                np.array([[root.lo[0], root.lo[1]]]),
                np.array([[root.hi[0], root.hi[1]]]),
            )[0]
        ),
    )
    best_l = root.L
    best_p = np.array(root.lo)
    # heap entries: (-U, counter, lo1, lo2, hi1, hi2)
    heap = [(-root.U, 0, root.lo[0], root.lo[1], root.hi[0], root.hi[1])]
    counter = 1
    resolved = True
    u_cert = root.U
    while heap:
        top_u = -heap[0][0]
        if top_u - best_l <= eps:
            u_cert = min(u_cert, max(top_u, best_l + eps))
            break
        batch_boxes = []
        while heap and len(batch_boxes) < batch:
            neg_u, _, lo1, lo2, hi1, hi2 = heapq.heappop(heap)
            if -neg_u - best_l <= eps:
                break  # heap is U-sorted: everything below is converged too
            if max(hi1 - lo1, hi2 - lo2) <= 1e-14 * (1.0 + max(hi1, hi2)):
                continue  # numerically a point; bound gap is roundoff
            batch_boxes.append((lo1, lo2, hi1, hi2))
        if not batch_boxes:
            continue
        b = np.asarray(batch_boxes)
        lo, hi = b[:, :2], b[:, 2:]
        widths = hi - lo
        axis = (widths[:, 1] > widths[:, 0]).astype(int)
        mid = 0.5 * (lo[np.arange(len(b)), axis] + hi[np.arange(len(b)), axis])
        lo_a, hi_a = lo.copy(), hi.copy()
        hi_a[np.arange(len(b)), axis] = mid  # lower child
        lo_b, hi_b = lo.copy(), hi.copy()
        lo_b[np.arange(len(b)), axis] = mid  # upper child
        clo = np.vstack([lo_a, lo_b])
        chi = np.vstack([hi_a, hi_b])
        cu = values(chi[:, 0], chi[:, 1], clo[:, 0], clo[:, 1])
        np.minimum(cu, envelope(clo, chi), out=cu)
        cl = values(clo[:, 0], clo[:, 1], clo[:, 0], clo[:, 1])
        imax = int(np.argmax(cl))
        if cl[imax] > best_l:
            best_l = float(cl[imax])
            best_p = clo[imax].copy()
        # box centers are feasible too; evaluating them sharpens the
        # incumbent faster than corner values alone
        cmid = 0.5 * (clo + chi)
        cm = values(cmid[:, 0], cmid[:, 1], cmid[:, 0], cmid[:, 1])
        imax = int(np.argmax(cm))
        if cm[imax] > best_l:
            best_l = float(cm[imax])
            best_p = cmid[imax].copy()
        for i in range(len(cu)):
            if cu[i] > best_l + eps:
                heapq.heappush(
                    heap,
                    (-float(cu[i]), counter, clo[i, 0], clo[i, 1],
                     chi[i, 0], chi[i, 1]),
                )
                counter += 1
        if counter > max_boxes:
            live = max((-h[0] for h in heap), default=best_l)
            u_cert = max(live, best_l + eps)
            resolved = False
            break
    else:
        u_cert = best_l + eps
    return (
        (float(best_p[0]), float(best_p[1])),
        float(best_l),
        float(u_cert),
        resolved,
    )


def solve_inner(
    ch: SimoChannel, dv: DualVariables, eps: float
) -> tuple[tuple[float, float], float]:
    """Branch-and-bound maximization of the penalized proper sum rate.

    Returns a power vector and a value within ``eps`` of the global
    maximum.  Boxes are explored best-upper-bound-first; a box list blowup
    beyond the memory cap raises with the best bounds found so far.
    """
    if eps <= 0:
        raise ValidationError("eps must be positive")
    p, low, u_cert, resolved = _branch_and_bound(ch, dv, eps, _MAX_BOXES)
    if not resolved:
        raise ConvergenceError(
            f"box list exceeded {_MAX_BOXES} entries "
            f"(best bounds: U={u_cert:.6g}, L={low:.6g})"
        )
    return p, low


def dual_value(ch: SimoChannel, dv: DualVariables, eps: float) -> float:
    """Dual objective: power-budget term plus the inner maximum."""
    _, val = solve_inner(ch, dv, eps)
    return dv.lam1 * ch.p1 + dv.lam2 * ch.p2 + val


def _lambda_max(ch: SimoChannel, profile: RateProfile) -> float:
    mu_max = []
    for rho, h in ((profile.rho1, ch.h11), (profile.rho2, ch.h22)):
        if rho > 0:
            mu_max.append(float(np.linalg.norm(h) ** 2) / rho)
    return 10.0 * max(mu_max) / _LN2


def cutting_plane(
    ch: SimoChannel,
    profile: RateProfile,
    eps: float,
    max_iter: int = 200,
    seed_cuts: list[Cut] | None = None,
) -> tuple[float, DualVariables, list[Cut]]:
    """Minimize the dual by Kelley's cutting-plane method.

    Each iteration solves a master LP over the affine cut model on the
    compact multiplier domain, then evaluates the true dual (via the inner
    branch-and-bound) at the LP minimizer to add a new cut.  Stops when the
    gap between the best evaluated dual value and the LP model optimum is
    at most ``eps``.

    ``seed_cuts`` warm-starts the affine model.  The dual function itself
    does not depend on the profile (only the multiplier constraint does),
    so cuts collected at one profile remain valid minorants at any other;
    region sweeps exploit this.  Certified dual values are nevertheless
    recomputed under the current profile's constraint.
    """
    validate_channel(ch)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    inner_eps = eps / 10.0
    lam_max = max(_lambda_max(ch, profile), 10 * LAMBDA_FLOOR)
    mu_bounds = []
    for rho in (profile.rho1, profile.rho2):
        mu_bounds.append((0.0, 1.0 / rho) if rho > 0 else (0.0, 0.0))

    # Box budget per inner solve.  Budget exhaustion still yields a valid
    # cut (from the incumbent) and a valid dual upper bound (from the live
    # bound), so probes at extreme multipliers stay cheap.  When the master
    # stalls on an unresolved point the budget is escalated there.
    inner_budget = 400_000

    def evaluate(dv: DualVariables, budget=None) -> tuple[Cut, float, bool]:
        p_star, low, u_cert, resolved = _branch_and_bound(
            ch, dv, inner_eps, budget or inner_budget
        )
        rates = rate_proper(ch, *p_star)
        base = dv.lam1 * ch.p1 + dv.lam2 * ch.p2
        cut = Cut(dv=dv, p_star=p_star, rates=rates, value=base + low)
        return cut, base + u_cert, resolved

    if profile.rho1 > 0 and profile.rho2 > 0:
        mu0 = (1.0, 1.0)  # satisfies rho1*mu1 + rho2*mu2 = 1
    elif profile.rho1 > 0:
        mu0 = (1.0 / profile.rho1, 0.0)
    else:
        mu0 = (0.0, 1.0 / profile.rho2)

    cuts: list[Cut] = list(seed_cuts) if seed_cuts else []
    best_upper = math.inf
    best_dv = None
    if not cuts:
        # Seed the model across the multiplier scale so the first master
        # LPs do not chase the lambda floor.
        for scale in (1e-3, 1e-2, 1e-1):
            lam0 = max(LAMBDA_FLOOR, scale * lam_max)
            cut, upper, _ = evaluate(DualVariables(mu0[0], mu0[1], lam0, lam0))
            cuts.append(cut)
            if upper < best_upper:
                best_upper, best_dv = upper, cut.dv

    prev_dv = None
    budget = inner_budget
    for _ in range(max_iter):
        n = len(cuts)
        # variables z = [t, mu1, mu2, lam1, lam2]
        c = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
        a_ub = np.zeros((n, 5))
        for i, cut in enumerate(cuts):
            a_ub[i] = [
                -1.0,
                cut.rates.r1,
                cut.rates.r2,
                ch.p1 - cut.p_star[0],
                ch.p2 - cut.p_star[1],
            ]
        b_ub = np.zeros(n)
        a_eq = np.array([[0.0, profile.rho1, profile.rho2, 0.0, 0.0]])
        b_eq = np.array([1.0])
        bounds = [(None, None), mu_bounds[0], mu_bounds[1]] + [
            (LAMBDA_FLOOR, lam_max)
        ] * 2
        res = linprog(
            c,
            A_ub=a_ub,
            b_ub=b_ub,
            A_eq=a_eq,
            b_eq=b_eq,
            bounds=bounds,
            method="highs",
        )
        if not res.success:
            raise ConvergenceError(f"master LP failed: {res.message}")
        t_model = float(res.x[0])
        if best_upper - t_model <= eps:
            return best_upper, best_dv, cuts
        dv = DualVariables(
            mu1=max(res.x[1], 0.0),
            mu2=max(res.x[2], 0.0),
            lam1=min(max(res.x[3], LAMBDA_FLOOR), lam_max),
            lam2=min(max(res.x[4], LAMBDA_FLOOR), lam_max),
        )
        stalled = prev_dv is not None and all(
            abs(a - b) <= 1e-12 * max(1.0, abs(a))
            for a, b in zip(
                (dv.mu1, dv.mu2, dv.lam1, dv.lam2),
                (prev_dv.mu1, prev_dv.mu2, prev_dv.lam1, prev_dv.lam2),
            )
        )
        if stalled:
            budget = min(budget * 4, 16 * inner_budget)
        else:
            budget = inner_budget
        prev_dv = dv
        cut, upper, resolved = evaluate(dv, budget)
        cuts.append(cut)
        if upper < best_upper:
            best_upper, best_dv = upper, dv
        if stalled and not resolved and budget >= 16 * inner_budget:
            raise ConvergenceError(
                "cutting-plane stalled on an unresolved inner problem "
                f"(gap {best_upper - t_model:.4g} > {eps})"
            )
    raise ConvergenceError(
        f"cutting-plane method did not reach gap {eps} in {max_iter} iterations"
    )


def primal_recovery(
    cuts: list[Cut], profile: RateProfile, ch: SimoChannel, eps: float = 1e-6
) -> TimeSharingSolution:
    """Recover an explicit time-sharing mixture from the collected cuts.

    Solves the restricted primal LP over the inner maximizers: maximize the
    common scaling subject to averaged rate targets and averaged power
    budgets.  A vertex solution uses at most four strategies.
    """
    if not cuts:
        raise ValidationError("no cuts to recover from")
    # Candidate strategies: the inner maximizers plus the power-budget
    # corners (always feasible, and they let degenerate profiles collapse
    # to a single full-power strategy).  Near-identical ones are merged.
    candidates = [cut.p_star for cut in cuts]
    candidates += [(ch.p1, 0.0), (0.0, ch.p2), (ch.p1, ch.p2)]
    strategies: list[tuple[float, float]] = []
    rates: list[RatePoint] = []
    for p_star in candidates:
        for p in strategies:
            if abs(p[0] - p_star[0]) <= 1e-9 and abs(p[1] - p_star[1]) <= 1e-9:
                break
        else:
            strategies.append(p_star)
            rates.append(rate_proper(ch, *p_star))
    n = len(strategies)

    def solve(tol: float):
        # variables: [tau_1..tau_n, R]; maximize R
        c = np.zeros(n + 1)
        c[-1] = -1.0
        a_ub = np.zeros((4, n + 1))
        for i, r in enumerate(rates):
            a_ub[0, i] = -r.r1
            a_ub[1, i] = -r.r2
        a_ub[0, -1] = profile.rho1
        a_ub[1, -1] = profile.rho2
        for i, p in enumerate(strategies):
            a_ub[2, i] = p[0]
            a_ub[3, i] = p[1]
        b_ub = np.array([0.0, 0.0, ch.p1 + tol, ch.p2 + tol])
        a_eq = np.zeros((1, n + 1))
        a_eq[0, :n] = 1.0
        b_eq = np.array([1.0])
        bounds = [(0.0, None)] * n + [(0.0, None)]
        return linprog(
            c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds,
            method="highs",
        )

    res = solve(0.0)
    if not res.success:
        res = solve(eps)  # widen once, then report
        if not res.success:
            raise ConvergenceError(f"primal recovery LP infeasible: {res.message}")
    tau = np.asarray(res.x[:n])
    keep = [int(i) for i in np.where(tau > 1e-9)[0]]
    # A vertex solution activates at most 4 strategies; if the solver hands
    # back more, drop the smallest weight and re-solve on the support.
    while len(keep) > 4:
        keep.remove(min(keep, key=lambda i: tau[i]))
        sub_idx = keep
        sub_strats = [strategies[i] for i in sub_idx]
        sub_rates = [rates[i] for i in sub_idx]
        strategies, rates, n = sub_strats, sub_rates, len(sub_idx)
        res = solve(eps)
        if not res.success:
            raise ConvergenceError("primal recovery could not reduce the support")
        tau = np.asarray(res.x[:n])
        keep = [int(i) for i in np.where(tau > 1e-9)[0]]
    tau_kept = tau[keep]
    tau_kept = tau_kept / tau_kept.sum()
    entries = tuple(
        (float(t), float(strategies[i][0]), float(strategies[i][1]))
        for t, i in zip(tau_kept, keep)
    )
    avg_r1 = sum(t * rates[i].r1 for t, i in zip(tau_kept, keep))
    avg_r2 = sum(t * rates[i].r2 for t, i in zip(tau_kept, keep))
    return TimeSharingSolution(entries=entries, rates=RatePoint(avg_r1, avg_r2))
