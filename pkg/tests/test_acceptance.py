"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every tolerance is pinned here.  Reference values marked "published" come
from the originally published curves for the bundled scenarios; where those
values are not reproducible from the bundled channel constants the test
fails honestly (see the repository notes for the analysis).  Run with
``pytest -s tests/test_acceptance.py`` to see the per-criterion lines.
"""

import time

import numpy as np
import pytest

from tinregion import (
    DualVariables,
    RateProfile,
    TxStrategy,
    balance_pure_proper,
    composite_cov_from_strategy,
    contains,
    convex_hull_2d,
    cutting_plane,
    enhanced_upper_bound,
    multistart,
    preset_scenario,
    primal_recovery,
    rate_complex,
    rate_composite,
    rate_proper,
    solve_inner,
    sweep_region,
    transform_channel,
    transformed_rates,
    wsr_gradient,
    wsr_objective,
)
from tinregion.timesharing import _InnerProblem

from conftest import random_channel, random_strategy

PRESET_NAMES = ("fig1", "fig2", "fig3")


def _report(cid: str, ok: bool, detail: str) -> bool:
    print(f"ACCEPTANCE {cid}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


@pytest.fixture(scope="module")
def channels():
    return {name: preset_scenario(name) for name in PRESET_NAMES}


@pytest.fixture(scope="module")
def multistart_runs(channels):
    """20-start weighted-sum-rate runs used by criteria 4, 5, and 6."""
    out = {}
    for name in ("fig1", "fig3"):
        t0 = time.perf_counter()
        best, runs = multistart(channels[name], (1.0, 1.0), n_starts=20, seed=0)
        out[name] = (best, runs, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="module")
def pure_curves(channels):
    betas = np.linspace(0.0, 1.0, 21)
    return {
        name: sweep_region(channels[name], "proper-pure", betas, eps=1e-6)
        for name in PRESET_NAMES
    }


@pytest.fixture(scope="module")
def ts_curves(channels, multistart_runs):
    """Time-sharing curves on the 21-point grid plus the rays of the
    improper terminal points (so containment checks are ray-exact)."""
    curves = {}
    for name in PRESET_NAMES:
        betas = set(np.linspace(0.0, 1.0, 21))
        if name in multistart_runs:
            for r in multistart_runs[name][1]:
                s = r.rates.r1 + r.rates.r2
                if s > 1e-9:
                    betas.add(min(max(r.rates.r1 / s, 0.0), 1.0))
        curves[name] = sweep_region(
            channels[name], "proper-timesharing", sorted(betas), eps=2e-2
        )
    return curves


def test_criterion_1_single_user_corners(channels):
    ch = channels["fig1"]
    t0 = time.perf_counter()
    r1 = rate_proper(ch, ch.p1, 0.0).r1
    r2 = rate_proper(ch, 0.0, ch.p2).r2
    elapsed = time.perf_counter() - t0
    ok = (
        abs(r1 - 4.22659234751577) <= 1e-3
        and abs(r2 - 4.77534426964198) <= 1e-3
        and elapsed < 1.0
    )
    assert _report(
        "C1",
        ok,
        f"fig1 corners r1={r1:.6f} (ref 4.2266 +/- 1e-3), "
        f"r2={r2:.6f} (ref 4.7753 +/- 1e-3), {elapsed:.2f}s < 1s",
    )


@pytest.mark.parametrize(
    "name,ref",
    [("fig1", 1.91739291082309), ("fig2", 2.87326975409803)],
)
def test_criterion_2_pure_balanced(channels, name, ref):
    ch = channels[name]
    t0 = time.perf_counter()
    res = balance_pure_proper(ch, RateProfile(0.5, 0.5), eps=1e-8)
    elapsed = time.perf_counter() - t0
    dev = max(abs(res.rates.r1 - ref), abs(res.rates.r2 - ref))
    ok = dev <= 1e-2 and elapsed < 5.0
    assert _report(
        "C2",
        ok,
        f"{name} balanced pure rates=({res.rates.r1:.4f},{res.rates.r2:.4f}) "
        f"vs published ({ref:.4f},{ref:.4f}), deviation {dev:.4f} "
        f"(allowed 1e-2), {elapsed:.1f}s < 5s",
    ), (
        "published balanced-pure value is not reproducible from the bundled "
        "channel constants; the solver output is verified against a dense "
        "power-grid oracle elsewhere in the suite"
    )


@pytest.mark.parametrize(
    "name,ref",
    [("fig1", 3.04664756017678), ("fig2", 3.59405774404157)],
)
def test_criterion_3_timesharing_balanced(channels, name, ref):
    ch = channels[name]
    prof = RateProfile(0.5, 0.5)
    t0 = time.perf_counter()
    _, _, cuts = cutting_plane(ch, prof, eps=2e-2)
    sol = primal_recovery(cuts, prof, ch)
    elapsed = time.perf_counter() - t0
    dev = max(abs(sol.rates.r1 - ref), abs(sol.rates.r2 - ref))
    ok = dev <= 2e-2 and elapsed < 60.0
    assert _report(
        "C3",
        ok,
        f"{name} balanced time-sharing rates=({sol.rates.r1:.4f},"
        f"{sol.rates.r2:.4f}) vs published ({ref:.4f},{ref:.4f}), "
        f"deviation {dev:.4f} (allowed 2e-2), {elapsed:.1f}s < 60s",
    ), (
        "published balanced time-sharing value is not reproducible from the "
        "bundled channel constants; the solver is certified by matching "
        "dual and primal bounds elsewhere in the suite"
    )


def test_criterion_4_improper_gain(channels, multistart_runs):
    ch = channels["fig1"]
    best, _, elapsed = multistart_runs["fig1"]
    best_sum = best.rates.r1 + best.rates.r2

    # dense proper-power grid oracle for the pure-proper maximum sum rate
    g11 = np.linalg.norm(ch.h11) ** 2
    g22 = np.linalg.norm(ch.h22) ** 2
    x1 = abs(np.vdot(ch.h12, ch.h11)) ** 2
    n1 = np.linalg.norm(ch.h12) ** 2
    x2 = abs(np.vdot(ch.h21, ch.h22)) ** 2
    n2 = np.linalg.norm(ch.h21) ** 2
    p = np.linspace(0.0, 10.0, 401)
    a, b = np.meshgrid(p, p, indexing="ij")
    r1 = np.log2(1 + a * np.clip(g11 - b * x1 / (1 + b * n1), 0, None))
    r2 = np.log2(1 + b * np.clip(g22 - a * x2 / (1 + a * n2), 0, None))
    grid_max = float((r1 + r2).max())
    # anchor the vectorized oracle to the library rate path
    i = np.unravel_index(np.argmax(r1 + r2), r1.shape)
    check = rate_proper(ch, float(a[i]), float(b[i]))
    assert abs(check.r1 + check.r2 - grid_max) <= 1e-9

    parts = {
        "best improper sum >= 6.0": best_sum >= 6.0,
        "proper grid bound <= 4.9": grid_max <= 4.9,
        "improper strictly above proper bound": best_sum > grid_max,
        "runtime < 30s": elapsed < 30.0,
    }
    ok = all(parts.values())
    assert _report(
        "C4",
        ok,
        f"fig1 improper best sum={best_sum:.4f}, proper grid max={grid_max:.4f}, "
        f"{elapsed:.1f}s; " + ", ".join(
            f"{k}: {'ok' if v else 'FAILED'}" for k, v in parts.items()
        ),
    ), (
        "the dense proper-power grid oracle measures a pure-proper maximum "
        "sum rate above 4.9 for these channel constants"
    )


def test_criterion_5_z_channel_point(multistart_runs):
    _, runs, elapsed = multistart_runs["fig3"]
    ref = (4.22659234751564, 3.27626740281447)
    best_dev = min(
        max(abs(r.rates.r1 - ref[0]), abs(r.rates.r2 - ref[1])) for r in runs
    )
    ok = best_dev <= 0.1 and elapsed < 30.0
    assert _report(
        "C5",
        ok,
        f"fig3 closest terminal point deviation {best_dev:.4f} "
        f"(allowed 0.1), {elapsed:.1f}s < 30s",
    )


def test_criterion_6_containment(multistart_runs, ts_curves):
    failures = []
    for name in ("fig1", "fig3"):
        _, runs, _ = multistart_runs[name]
        curve = ts_curves[name]
        for r in runs:
            if not contains(curve, r.rates, tol=2e-2):
                failures.append((name, r.rates))
    ok = not failures
    assert _report(
        "C6",
        ok,
        "all improper terminal points inside the computed time-sharing "
        f"region (tol 2e-2); violations: {failures if failures else 'none'}",
    )


def test_criterion_7_nesting(channels, pure_curves, ts_curves):
    problems = []
    for name in PRESET_NAMES:
        pure = pure_curves[name]
        hull = convex_hull_2d(pure.points())
        ts = ts_curves[name]
        for p in pure.points():
            if not contains(hull, p, tol=2e-2):
                problems.append(f"{name}: pure point {p} outside hull")
        for p in hull.points():
            if not contains(ts, p, tol=2e-2):
                problems.append(f"{name}: hull point {p} outside time-sharing")
    nesting_ok = not problems

    # published claim: the fig1 hull collapses onto the corner segment
    pure1 = pure_curves["fig1"].points()
    hull1 = convex_hull_2d(pure1)
    r1m = max(p.r1 for p in pure1)
    r2m = max(p.r2 for p in pure1)
    seg = np.array([r1m, 0.0]) - np.array([0.0, r2m])
    seg = seg / np.linalg.norm(seg)
    dev = max(
        abs(seg[0] * (p.r2 - r2m) - seg[1] * p.r1) for p in hull1.points()
    )
    collapse_ok = dev <= 1e-2
    ok = nesting_ok and collapse_ok
    assert _report(
        "C7",
        ok,
        f"nesting pure within hull within time-sharing on all presets: "
        f"{'ok' if nesting_ok else problems}; fig1 hull deviation from the "
        f"corner segment {dev:.4f} (allowed 1e-2): "
        f"{'ok' if collapse_ok else 'FAILED'}",
    ), (
        "the pure-proper curve computed from the bundled fig1 constants "
        "rises above the corner segment, so its hull does not collapse"
    )


def test_criterion_8_formula_equivalence():
    rng = np.random.default_rng(80)
    worst = 0.0
    for _ in range(1000):
        ch = random_channel(rng, n1=rng.integers(1, 4), n2=rng.integers(1, 4))
        x = random_strategy(rng)
        ra = rate_complex(ch, x)
        rb = rate_composite(
            ch,
            composite_cov_from_strategy(x.c1, x.ct1),
            composite_cov_from_strategy(x.c2, x.ct2),
        )
        worst = max(worst, abs(ra.r1 - rb.r1), abs(ra.r2 - rb.r2))
    eq_ok = worst <= 1e-10

    worst_t = 0.0
    for _ in range(100):
        ch = random_channel(rng)
        tc = transform_channel(ch)
        x = random_strategy(rng)
        ro = rate_complex(ch, x)
        rt = transformed_rates(tc, x)
        worst_t = max(worst_t, abs(ro.r1 - rt.r1), abs(ro.r2 - rt.r2))
    trans_ok = worst_t <= 1e-10

    from dataclasses import replace

    worst_p = 0.0
    for _ in range(100):
        ch = random_channel(rng)
        tc = transform_channel(ch)
        x = TxStrategy(10 * rng.uniform(), 10 * rng.uniform())
        base = transformed_rates(tc, x)
        rot = transformed_rates(replace(tc, theta=rng.uniform(0, 2 * np.pi)), x)
        worst_p = max(worst_p, abs(base.r1 - rot.r1), abs(base.r2 - rot.r2))
    phase_ok = worst_p <= 1e-10

    ok = eq_ok and trans_ok and phase_ok
    assert _report(
        "C8",
        ok,
        f"formula equivalence max dev {worst:.2e} (allowed 1e-10); "
        f"transform invariance {worst_t:.2e}; phase independence {worst_p:.2e}",
    )


def test_criterion_9_enhancement_dominance(channels):
    rng = np.random.default_rng(90)
    worst = -np.inf
    for name in PRESET_NAMES:
        tc = transform_channel(channels[name])
        for _ in range(200):
            c1, c2 = 10 * rng.uniform(), 10 * rng.uniform()
            m1, m2 = c1 * rng.uniform(), c2 * rng.uniform()
            a1, a2 = rng.uniform(0, 2 * np.pi, 2)
            x = TxStrategy(c1, c2, m1 * np.exp(1j * a1), m2 * np.exp(1j * a2))
            bound = enhanced_upper_bound(tc, x)
            act = transformed_rates(tc, x, original_coords=False)
            worst = max(worst, act.r1 - bound.r1, act.r2 - bound.r2)
    ok = worst <= 1e-10
    assert _report(
        "C9", ok, f"max bound violation {worst:.2e} (allowed 1e-10)"
    )


def _grid_oracle(ch, dv):
    from tinregion.timesharing import init_box

    prob = _InnerProblem(ch, dv)
    root = init_box(ch, dv)
    lo = np.zeros(2)
    span = np.array(root.hi)
    best = 0.0
    for stage in range(8):
        n = 400 if stage == 0 else 60
        p1 = np.linspace(lo[0], lo[0] + span[0], n)
        p2 = np.linspace(lo[1], lo[1] + span[1], n)
        a, b = np.meshgrid(p1, p2, indexing="ij")
        q1 = np.clip(prob.g[0] - b * prob.x[0] / (1 + b * prob.n[0]), 0, None)
        q2 = np.clip(prob.g[1] - a * prob.x[1] / (1 + a * prob.n[1]), 0, None)
        f = (
            dv.mu1 * np.log2(1 + a * q1)
            + dv.mu2 * np.log2(1 + b * q2)
            - dv.lam1 * a
            - dv.lam2 * b
        )
        i = np.unravel_index(np.argmax(f), f.shape)
        best = max(best, float(f[i]))
        center = np.array([a[i], b[i]])
        span = span * 0.2
        lo = np.maximum(center - span / 2, 0.0)
    return best


def test_criterion_10_inner_oracle(channels):
    rng = np.random.default_rng(100)
    worst = 0.0
    for name in PRESET_NAMES:
        ch = channels[name]
        for _ in range(10):
            mu1 = rng.uniform(0, 2)
            dv = DualVariables(
                mu1, 2 - mu1, rng.uniform(0.02, 0.5), rng.uniform(0.02, 0.5)
            )
            _, val = solve_inner(ch, dv, eps=5e-4)
            worst = max(worst, abs(val - _grid_oracle(ch, dv)))
    ok = worst <= 1e-3
    assert _report(
        "C10", ok, f"max |solver - grid oracle| {worst:.2e} (allowed 1e-3)"
    )


def test_criterion_11_gradient_check(channels):
    rng = np.random.default_rng(110)
    worst = 0.0
    h = 1e-5
    count = 0
    while count < 50:
        ch = channels[PRESET_NAMES[count % 3]]
        c1 = ch.p1 * (0.2 + 0.8 * rng.uniform())
        c2 = ch.p2 * (0.2 + 0.8 * rng.uniform())
        m1 = composite_cov_from_strategy(
            c1, 0.7 * c1 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        )
        m2 = composite_cov_from_strategy(
            c2, 0.7 * c2 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        )
        w = (rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5))
        g1, g2 = wsr_gradient(ch, m1, m2, w)
        for which, m, g in ((0, m1, g1), (1, m2, g2)):
            for i in range(2):
                for j in range(i, 2):
                    e = np.zeros((2, 2))
                    e[i, j] = e[j, i] = 1.0
                    up = [m1, m2]
                    dn = [m1, m2]
                    up[which] = m + h * e
                    dn[which] = m - h * e
                    fd = (
                        wsr_objective(ch, up[0], up[1], *w)
                        - wsr_objective(ch, dn[0], dn[1], *w)
                    ) / (2 * h)
                    an = g[i, j] * (2.0 if i != j else 1.0)
                    worst = max(worst, abs(fd - an) / max(1e-8, abs(fd)))
        count += 1
    ok = worst <= 1e-5
    assert _report(
        "C11", ok, f"max gradient relative error {worst:.2e} (allowed 1e-5)"
    )
