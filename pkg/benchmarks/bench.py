#!/usr/bin/env python3
"""Compare the numpy and compiled simplex kernels on planner workloads.

Runs each backend in its own process (the backend is chosen at import
time) and reports median wall times for three workloads: a cold LP
relaxation of the full 11-debris path model, the branch-and-bound
search on that model, and — with ``--full`` — an entire planning run.

Usage: python benchmarks/bench.py [--repeats N] [--full]
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import os
import statistics
import subprocess
import sys
import time


def _build_fixtures():
    from driftplan.catalog import parse_catalog
    from driftplan.linmodel import build_path_model, linearize_transfer
    from driftplan.transfer import admissible_interval, pre_optimize
    from driftplan.units import DAY, KM

    path = importlib.resources.files("driftplan") / "data" / "catalog.csv"
    elements = parse_catalog(path).elements()
    legs = {}
    for i, from_el in elements.items():
        for j, to_el in elements.items():
            if i == j:
                continue
            sol = pre_optimize(from_el, to_el, 0.0, 61.0 * DAY,
                               from_id=i, to_id=j)
            if not sol.feasible:
                continue
            band = admissible_interval(to_el, sol.side, sol.i_drift)
            lo = max(sol.a_drift - 50.0 * KM, band[0])
            hi = min(sol.a_drift + 50.0 * KM, band[1])
            legs[(i, j)] = linearize_transfer(
                sol, from_el, to_el, (lo - sol.a_drift, hi - sol.a_drift),
                (0.0, 366.0 * DAY))
    model = build_path_model(sorted(elements), legs, 5, 366.0)
    return elements, model


def _median_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def run_backend(repeats: int, full: bool) -> None:
    import driftplan.lpsolve as lpsolve
    from driftplan.bnb import SearchConfig, greedy_incumbent, solve
    from driftplan.planner import plan

    elements, model = _build_fixtures()
    problem = model.to_lp_problem()
    mask = model.binary_mask

    out = {"backend": lpsolve.BACKEND_NAME}
    out["relaxation_s"] = _median_time(
        lambda: lpsolve.solve_primal(problem), repeats)
    seed = greedy_incumbent(model)
    out["bnb_s"] = _median_time(
        lambda: solve(model.to_lp_problem(), mask, SearchConfig(),
                      incumbent=seed[0] if seed else None), repeats)
    if full:
        out["plan_s"] = _median_time(lambda: plan(elements, 5), 1)
    print(json.dumps(out))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--full", action="store_true",
                    help="also time a complete planning run (slow)")
    ap.add_argument("--one-backend", action="store_true",
                    help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.one_backend:
        run_backend(args.repeats, args.full)
        return

    rows = []
    for backend in ("py", "cy"):
        env = dict(os.environ, DRIFTPLAN_BACKEND=backend)
        cmd = [sys.executable, __file__, "--one-backend",
               "--repeats", str(args.repeats)]
        if args.full:
            cmd.append("--full")
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            raise SystemExit(proc.returncode)
        rows.append(json.loads(proc.stdout.strip().splitlines()[-1]))

    workloads = [k for k in rows[0] if k != "backend"]
    print(f"{'workload':<14}" + "".join(f"{r['backend']:>12}" for r in rows)
          + f"{'speedup':>10}")
    for key in workloads:
        base, comp = rows[0][key], rows[1][key]
        print(f"{key[:-2]:<14}" + "".join(f"{r[key]:>11.4f}s" for r in rows)
              + f"{base / comp:>9.2f}x")


if __name__ == "__main__":
    main()
