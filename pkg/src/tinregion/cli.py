"""Command-line interface.

Subcommands:

* ``region``     — sweep one or more methods over a beta grid, export CSV/JSON.
* ``verify``     — run the cross-module consistency suite, emit a JSON report.
* ``reproduce``  — run all methods on a bundled scenario and compare against
  the published reference values.

Exit codes: 0 success, 1 tolerance/check failure, 2 usage or IO error.
``TINREGION_THREADS`` caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import reference_points
from .channel import (
    SimoChannel,
    load_scenario,
    transform_channel,
    validate_channel,
    TxStrategy,
)
from .errors import TinRegionError, ValidationError
from .improper_gp import multistart, wsr_gradient, wsr_objective
from .proper_pure import RateProfile, balance_pure_proper
from .rates import (
    rate_complex,
    rate_composite,
    transformed_rates,
    enhanced_upper_bound,
)
from .region import (
    METHODS,
    PRESETS,
    contains,
    convex_hull_2d,
    curve_to_dict,
    preset_scenario,
    sweep_region,
    write_curve,
)
from .channel import composite_cov_from_strategy

_METHOD_ALIASES = {
    "proper-pure": "proper-pure",
    "proper-ts": "proper-timesharing",
    "proper-timesharing": "proper-timesharing",
    "improper": "improper-heuristic",
    "improper-heuristic": "improper-heuristic",
    "hull": "convex-hull",
    "convex-hull": "convex-hull",
}


def _threads() -> int:
    raw = os.environ.get("TINREGION_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _resolve_scenario(name: str, seed: int) -> SimoChannel:
    if name in PRESETS:
        return preset_scenario(name)
    if name == "random":
        rng = np.random.default_rng(seed)
        draw = lambda: rng.standard_normal(2) + 1j * rng.standard_normal(2)
        return validate_channel(
            SimoChannel(h11=draw(), h12=draw(), h21=draw(), h22=draw(),
                        p1=10.0, p2=10.0)
        )
    path = Path(name)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read scenario file {name}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"scenario file {name} is not valid JSON: {exc}") from exc
    return load_scenario(data)


def _parse_betas(text: str) -> list[float]:
    """Either a sample count N (uniform grid on [0, 1]) or a comma list."""
    try:
        if "," not in text and "." not in text:
            n = int(text)
            if n < 1:
                raise ValueError("need at least one sample")
            return list(np.linspace(0.0, 1.0, n)) if n > 1 else [0.5]
        vals = [float(tok) for tok in text.split(",") if tok.strip()]
        if not vals:
            raise ValueError("empty grid")
        return vals
    except ValueError as exc:
        raise ValidationError(f"bad beta grid {text!r}: {exc}") from exc


def cmd_region(args) -> int:
    ch = _resolve_scenario(args.scenario, args.seed)
    betas = _parse_betas(args.betas)
    methods = [tok.strip() for tok in args.method.split(",") if tok.strip()]
    curves = []
    t0 = time.perf_counter()
    for raw in methods:
        try:
            method = _METHOD_ALIASES[raw]
        except KeyError:
            raise ValidationError(
                f"unknown method {raw!r}; choose from {sorted(_METHOD_ALIASES)}"
            ) from None
        curves.append(
            sweep_region(
                ch, method, betas, eps=args.eps, seed=args.seed,
                n_starts=args.starts, threads=_threads(),
            )
        )
    elapsed = time.perf_counter() - t0

    out = Path(args.out) if args.out else None
    if out is not None:
        if len(curves) == 1:
            write_curve(out, curves[0], fmt=args.format)
        elif args.format == "csv":
            rows = ["method,beta,r1,r2"]
            for c in curves:
                rows.extend(
                    f"{c.method},{b:.12g},{p.r1:.12g},{p.r2:.12g}"
                    for b, p in c.samples
                )
            out.write_text("\n".join(rows) + "\n", encoding="utf-8")
        else:
            out.write_text(
                json.dumps([curve_to_dict(c) for c in curves], indent=2) + "\n",
                encoding="utf-8",
            )

    for c in curves:
        first = c.samples[0][1]
        last = c.samples[-1][1]
        mid = c.samples[len(c.samples) // 2][1]
        print(
            f"{c.method}: {len(c.samples)} samples, "
            f"ends ({first.r1:.4f}, {first.r2:.4f}) .. ({last.r1:.4f}, {last.r2:.4f}), "
            f"middle ({mid.r1:.4f}, {mid.r2:.4f})"
        )
    print(f"runtime: {elapsed:.2f} s" + (f", wrote {out}" if out else ""))
    return 0


def _verify_checks(ch: SimoChannel, eps: float, betas: int, seed: int):
    rng = np.random.default_rng(seed)
    checks = []

    def record(name, measured, allowed):
        checks.append(
            {
                "name": name,
                "measured": float(measured),
                "allowed": float(allowed),
                "passed": bool(measured <= allowed),
            }
        )

    # rate formula equivalence: complex vs composite real
    worst = 0.0
    for _ in range(200):
        c1, c2 = rng.uniform(0, ch.p1), rng.uniform(0, ch.p2)
        x = TxStrategy(
            c1, c2,
            c1 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()),
            c2 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()),
        )
        ra = rate_complex(ch, x)
        rb = rate_composite(
            ch,
            composite_cov_from_strategy(x.c1, x.ct1),
            composite_cov_from_strategy(x.c2, x.ct2),
        )
        worst = max(worst, abs(ra.r1 - rb.r1), abs(ra.r2 - rb.r2))
    record("formula-equivalence", worst, 1e-10)

    # rate invariance under the two-antenna transformation
    tc = transform_channel(ch)
    worst = 0.0
    for _ in range(100):
        c1, c2 = rng.uniform(0, ch.p1), rng.uniform(0, ch.p2)
        x = TxStrategy(
            c1, c2,
            c1 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()),
            c2 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()),
        )
        ro = rate_complex(ch, x)
        rt = transformed_rates(tc, x)
        worst = max(worst, abs(ro.r1 - rt.r1), abs(ro.r2 - rt.r2))
    record("transform-rate-invariance", worst, 1e-10)

    # proper rates do not depend on the residual phase
    from dataclasses import replace

    worst = 0.0
    for _ in range(50):
        p1, p2 = rng.uniform(0, ch.p1), rng.uniform(0, ch.p2)
        x = TxStrategy(p1, p2)
        base = transformed_rates(tc, x)
        rot = transformed_rates(replace(tc, theta=rng.uniform(0, 2 * np.pi)), x)
        worst = max(worst, abs(base.r1 - rot.r1), abs(base.r2 - rot.r2))
    record("phase-independence-proper", worst, 1e-12)

    # enhancement dominance
    worst = -np.inf
    for _ in range(200):
        c1, c2 = rng.uniform(0, ch.p1), rng.uniform(0, ch.p2)
        x = TxStrategy(
            c1, c2,
            c1 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()),
            c2 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()),
        )
        bound = enhanced_upper_bound(tc, x)
        actual = transformed_rates(tc, x)
        worst = max(worst, actual.r1 - bound.r1, actual.r2 - bound.r2)
    record("enhancement-dominance-violation", worst, 1e-10)

    # gradient vs central finite differences
    worst = 0.0
    for _ in range(10):
        c1 = ch.p1 * (0.2 + 0.8 * rng.uniform())
        c2 = ch.p2 * (0.2 + 0.8 * rng.uniform())
        m1 = composite_cov_from_strategy(
            c1, 0.7 * c1 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        )
        m2 = composite_cov_from_strategy(
            c2, 0.7 * c2 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        )
        w = (rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0))
        g1, g2 = wsr_gradient(ch, m1, m2, w)
        h = 1e-5
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
                    denom = max(1e-8, abs(fd))
                    worst = max(worst, abs(fd - an) / denom)
    record("gradient-relative-error", worst, 1e-5)

    # region nesting: pure inside hull inside time-sharing
    grid = list(np.linspace(0.0, 1.0, betas))
    pure = sweep_region(ch, "proper-pure", grid, eps=1e-6)
    hull = convex_hull_2d(pure.points())
    ts = sweep_region(ch, "proper-timesharing", grid, eps=min(eps, 2e-2))
    nest1 = all(contains(hull, p, tol=2e-2) for p in pure.points())
    nest2 = all(contains(ts, p, tol=2e-2) for p in hull.points())
    checks.append(
        {
            "name": "nesting-pure-hull-timesharing",
            "measured": float(not (nest1 and nest2)),
            "allowed": 0.0,
            "passed": bool(nest1 and nest2),
        }
    )
    return checks


def cmd_verify(args) -> int:
    ch = _resolve_scenario(args.scenario, args.seed)
    checks = _verify_checks(ch, args.eps, args.betas, args.seed)
    report = {
        "scenario": args.scenario,
        "eps": args.eps,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0 if report["passed"] else 1


def cmd_reproduce(args) -> int:
    name = args.figure
    ch = preset_scenario(name)
    outdir = Path(args.out) if args.out else Path(f"reproduce_{name}")
    outdir.mkdir(parents=True, exist_ok=True)
    grid = list(np.linspace(0.0, 1.0, args.betas))
    threads = _threads()

    curves = {}
    for method in METHODS:
        eps = 2e-2 if method == "proper-timesharing" else 1e-6
        curves[method] = sweep_region(
            ch, method, grid, eps=eps, seed=args.seed,
            n_starts=args.starts, threads=threads,
        )
        write_curve(outdir / f"{method}.csv", curves[method], fmt="csv")

    best, runs = multistart(ch, (1.0, 1.0), n_starts=args.starts, seed=args.seed)
    terminal_points = [r.rates for r in runs]

    failures = 0
    lines = []
    for chk in reference_points.REFERENCE_CHECKS:
        if chk.scenario != name:
            continue
        if chk.kind == "corner-r1":
            got = max(p.r1 for p in curves["proper-pure"].points())
            dev = abs(got - chk.expected[0])
            ok = dev <= chk.tol
        elif chk.kind == "corner-r2":
            got = max(p.r2 for p in curves["proper-pure"].points())
            dev = abs(got - chk.expected[0])
            ok = dev <= chk.tol
        elif chk.kind == "pure-balanced":
            res = balance_pure_proper(ch, RateProfile(0.5, 0.5), eps=1e-8)
            dev = max(
                abs(res.rates.r1 - chk.expected[0]),
                abs(res.rates.r2 - chk.expected[1]),
            )
            ok = dev <= chk.tol
        elif chk.kind == "ts-balanced":
            pt = next(
                p for b, p in curves["proper-timesharing"].samples
                if abs(b - 0.5) < 1e-9
            )
            dev = max(abs(pt.r1 - chk.expected[0]), abs(pt.r2 - chk.expected[1]))
            ok = dev <= chk.tol
        elif chk.kind == "improper-min-sum":
            got = best.rates.r1 + best.rates.r2
            dev = max(0.0, chk.expected[0] - got)
            ok = got >= chk.expected[0]
        elif chk.kind == "improper-point":
            dev = min(
                max(abs(p.r1 - chk.expected[0]), abs(p.r2 - chk.expected[1]))
                for p in terminal_points
            )
            ok = dev <= chk.tol
        else:  # pragma: no cover
            continue
        failures += 0 if ok else 1
        lines.append(
            f"{'PASS' if ok else 'FAIL'}  {chk.name}: deviation {dev:.4g} "
            f"(allowed {chk.tol:.4g})"
        )

    report = "\n".join(lines)
    (outdir / "report.txt").write_text(report + "\n", encoding="utf-8")
    print(report)
    print(f"wrote curves and report to {outdir}/")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tinregion",
        description="TIN rate regions of the two-user SIMO interference channel",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = dict(add_help=True)
    p_region = sub.add_parser("region", help="sweep a rate region", **common)
    p_region.add_argument("--scenario", required=True,
                          help="preset name, JSON file, or 'random'")
    p_region.add_argument("--method", default="proper-pure",
                          help="comma-separated: proper-pure, proper-ts, improper, hull")
    p_region.add_argument("--betas", default="21", help="N or comma list")
    p_region.add_argument("--eps", type=float, default=None)
    p_region.add_argument("--seed", type=int, default=0)
    p_region.add_argument("--starts", type=int, default=20)
    p_region.add_argument("--out", default=None)
    p_region.add_argument("--format", choices=("csv", "json"), default="csv")
    p_region.set_defaults(func=cmd_region)

    p_verify = sub.add_parser("verify", help="run the consistency suite", **common)
    p_verify.add_argument("--scenario", required=True)
    p_verify.add_argument("--eps", type=float, default=2e-2)
    p_verify.add_argument("--betas", type=int, default=5)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_rep = sub.add_parser("reproduce", help="reproduce a bundled scenario",
                           **common)
    p_rep.add_argument("figure", choices=sorted(PRESETS))
    p_rep.add_argument("--betas", type=int, default=21)
    p_rep.add_argument("--seed", type=int, default=0)
    p_rep.add_argument("--starts", type=int, default=20)
    p_rep.add_argument("--out", default=None)
    p_rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TinRegionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
