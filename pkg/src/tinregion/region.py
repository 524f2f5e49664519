"""Rate-region orchestration: per-method profile sweeps, the 2-D Pareto
convex hull, point containment, and the bundled example scenarios."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .channel import SimoChannel, load_scenario, validate_channel
from .errors import ValidationError
from .improper_gp import multistart
from .proper_pure import RateProfile, balance_pure_proper
from .rates import RatePoint
from .timesharing import cutting_plane, primal_recovery

__all__ = [
    "RegionCurve",
    "METHODS",
    "sweep_region",
    "convex_hull_2d",
    "contains",
    "preset_scenario",
    "PRESETS",
    "curve_to_csv_rows",
    "curve_to_dict",
]

METHODS = (
    "proper-pure",
    "proper-timesharing",
    "improper-heuristic",
    "convex-hull",
)


@dataclass(frozen=True)
class RegionCurve:
    method: str
    samples: tuple[tuple[float, RatePoint], ...]  # (beta, point), sorted by beta

    def points(self) -> list[RatePoint]:
        return [p for _, p in self.samples]


# Bundled two-antenna scenarios (all with p1 = p2 = 10): "fig1" and "fig2"
# are fixed realizations; "fig3" is "fig1" with the link into receiver 1
# zeroed (one-sided interference).
PRESETS = {
    "fig1": {
        "h11": [[-0.0878, 0.3457], [1.0534, 0.7316]],
        "h12": [[0.9963, 0.5140], [1.0021, -0.2146]],
        "h21": [[0.9496, 0.4156], [-1.7076, -1.1134]],
        "h22": [[0.5072, 0.6282], [1.1528, -0.8111]],
        "p1": 10.0,
        "p2": 10.0,
    },
    "fig2": {
        "h11": [[0.9578, 2.0563], [-0.7581, 0.5835]],
        "h12": [[0.6795, 0.9751], [0.0877, -0.7482]],
        "h21": [[1.0159, -0.3314], [-1.3866, -0.1927]],
        "h22": [[-0.1398, 0.7767], [-0.8541, -0.1965]],
        "p1": 10.0,
        "p2": 10.0,
    },
}
PRESETS["fig3"] = dict(PRESETS["fig1"], h12=[[0.0, 0.0], [0.0, 0.0]])


def preset_scenario(name: str) -> SimoChannel:
    """One of the bundled scenarios: fig1, fig2, or fig3."""
    try:
        raw = PRESETS[name]
    except KeyError:
        raise ValidationError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None
    return load_scenario(raw)


def _solve_beta(ch, method, beta, eps, seed, n_starts):
    profile = RateProfile.from_beta(beta)
    if method == "proper-pure":
        res = balance_pure_proper(ch, profile, eps=eps)
        return RatePoint(res.rates.r1, res.rates.r2)
    if method == "proper-timesharing":
        _, _, cuts = cutting_plane(ch, profile, eps=eps)
        sol = primal_recovery(cuts, profile, ch)
        return sol.rates
    if method == "improper-heuristic":
        # mix the seed per beta so starts differ along the sweep
        best, _ = multistart(
            ch, (beta, 1.0 - beta), n_starts=n_starts,
            seed=seed + int(round(beta * 10_000)),
        )
        return best.rates
    raise ValidationError(f"unknown sweep method {method!r}")


def sweep_region(
    ch: SimoChannel,
    method: str,
    betas,
    eps: float | None = None,
    seed: int = 0,
    n_starts: int = 20,
    threads: int = 1,
) -> RegionCurve:
    """One solver call per profile weight; results are keyed by beta so the
    outcome does not depend on evaluation order.

    For ``convex-hull`` the proper-pure curve is swept first and hulled.
    Solver failures propagate immediately rather than dropping samples.
    The default ``eps`` is 1e-6 for pure balancing and 1e-2 for the
    time-sharing solver.
    """
    validate_channel(ch)
    if eps is None:
        eps = 1e-2 if method == "proper-timesharing" else 1e-6
    betas = sorted(float(b) for b in betas)
    if not betas:
        raise ValidationError("empty beta grid")
    if any(b < 0 or b > 1 for b in betas):
        raise ValidationError("betas must lie in [0, 1]")
    if method == "convex-hull":
        pure = sweep_region(
            ch, "proper-pure", betas, eps=eps, seed=seed,
            n_starts=n_starts, threads=threads,
        )
        return convex_hull_2d(pure.points())
    if method not in METHODS:
        raise ValidationError(f"unknown sweep method {method!r}")

    if method == "proper-timesharing":
        # Sequential sweep sharing one cut pool: the dual cuts are valid at
        # every profile, so later betas converge in a few iterations.
        samples = []
        pool = None
        for b in betas:
            profile = RateProfile.from_beta(b)
            _, _, cuts = cutting_plane(ch, profile, eps=eps, seed_cuts=pool)
            pool = cuts
            sol = primal_recovery(cuts, profile, ch)
            samples.append((b, sol.rates))
        return RegionCurve(method=method, samples=tuple(samples))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pts = list(
                pool.map(
                    lambda b: _solve_beta(ch, method, b, eps, seed, n_starts), betas
                )
            )
    else:
        pts = [_solve_beta(ch, method, b, eps, seed, n_starts) for b in betas]
    samples = tuple((b, p) for b, p in zip(betas, pts))
    return RegionCurve(method=method, samples=samples)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points) -> RegionCurve:
    """Upper-right Pareto hull of a set of rate points.

    The single-user axis points ``(r1_max, 0)`` and ``(0, r2_max)`` are
    always appended first (switching between the extremes in time is always
    available), so the hull runs from the r2 axis to the r1 axis.  Collinear
    interior points are dropped.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    if not pts:
        raise ValidationError("need at least one point to hull")
    r1_max = max(p[0] for p in pts)
    r2_max = max(p[1] for p in pts)
    pts.extend([(r1_max, 0.0), (0.0, r2_max)])
    pts = sorted(set(pts), key=lambda p: (p[0], -p[1]))
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0.0:
            hull.pop()
        hull.append(p)
    chain = hull  # runs from (0, r2_max) down to (r1_max, 0)
    n = len(chain)
    samples = tuple(
        (i / (n - 1) if n > 1 else 0.0, RatePoint(p[0], p[1]))
        for i, p in enumerate(chain)
    )
    return RegionCurve(method="convex-hull", samples=samples)


def contains(region: RegionCurve, pt, tol: float = 0.0) -> bool:
    """Whether a rate pair lies in the downward closure of the curve.

    The region is the union of everything dominated by a sample or by the
    piecewise-linear interpolation between consecutive samples (sorted by
    the first rate), with free rate reduction toward the axes.
    """
    if not region.samples:
        raise ValidationError("empty region")
    x, y = float(pt[0]), float(pt[1])
    if x < 0 or y < 0:
        return False
    pts = sorted((p.r1, p.r2) for p in region.points())
    xq = x - tol
    best = -math.inf
    for px, py in pts:
        if px >= xq:
            best = max(best, py)
    for (ax, ay), (bx, by) in zip(pts[:-1], pts[1:]):
        if bx <= xq or ax == bx:
            continue
        t = (max(xq, ax) - ax) / (bx - ax)
        best = max(best, ay + t * (by - ay))
    return y <= best + tol


def curve_to_csv_rows(curve: RegionCurve) -> list[str]:
    rows = ["method,beta,r1,r2"]
    for beta, p in curve.samples:
        rows.append(f"{curve.method},{beta:.12g},{p.r1:.12g},{p.r2:.12g}")
    return rows


def curve_to_dict(curve: RegionCurve) -> dict:
    return {
        "method": curve.method,
        "samples": [
            {"beta": beta, "r1": p.r1, "r2": p.r2} for beta, p in curve.samples
        ],
    }


def curve_from_dict(d: dict) -> RegionCurve:
    samples = tuple(
        (float(s["beta"]), RatePoint(float(s["r1"]), float(s["r2"])))
        for s in d["samples"]
    )
    return RegionCurve(method=str(d["method"]), samples=samples)


def write_curve(path, curve: RegionCurve, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = "\n".join(curve_to_csv_rows(curve)) + "\n"
    elif fmt == "json":
        text = json.dumps(curve_to_dict(curve), indent=2) + "\n"
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
