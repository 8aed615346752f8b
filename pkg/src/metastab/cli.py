"""Command-line experiment runner.

Subcommands:

  gallery                         list operators with constants and tags
  bounds <scenario>               print every modulus (decimal or saturation token)
  iterate <scenario> --steps N --out file.csv
  verify <scenario> [--suite ...] --out report.json [--strict]
  metastable <scenario> --k K --g "<dsl>" [--cap N]

Reports are deterministic for a fixed (scenario, seed): the JSON written by
`verify` is byte-identical across runs (its runtime_ms field is pinned to 0;
measured wall time goes to the console).  Exit codes: 0 when no check
failed, 1 on any Fail (with --strict also on Inconclusive), 2 for usage
errors, and 10-13 for scenario loading errors (parse error, unknown
operator, start point outside the set, invalid schedule).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time

import numpy as np

from . import bounds as bnd
from .bignat import BoundNat
from .checks import (
    MetastabilityQuery,
    check_combined_metastability,
    check_fejer_descent,
    check_lemma_suite,
    check_liminf_modulus,
    check_metastability_bound,
    check_uniform_closedness,
    check_uniform_fejer,
)
from .counterfn import CounterfunctionError, parse_counterfunction
from .geometry import total_boundedness_modulus
from .iteration import Trajectory, dump_csv, ishikawa, shifted_view
from .operators import gallery
from .report import CertReport, FAIL, INCONCLUSIVE
from .scenario import ALL_SUITES, Scenario, ScenarioError, load_scenario

SCENARIO_ERROR_EXIT = {
    "parse-error": 10,
    "unknown-operator": 11,
    "x0-not-in-domain": 12,
    "schedule-invalid": 13,
}

LEMMA_SUITE_STEPS = 10_000
DEFAULT_CAP = 100_000


def _truncated(traj: Trajectory, steps: int) -> Trajectory:
    if len(traj) - 1 <= steps:
        return traj
    return Trajectory(
        x=traj.x[: steps + 1],
        y=traj.y[:steps],
        residuals=traj.residuals[: steps + 1],
        schedule_label=traj.schedule_label,
        operator_label=traj.operator_label,
        shift_K=traj.shift_K,
        drift_events=traj.drift_events,
    )


def compute_bounds(scenario: Scenario, traj: Trajectory | None = None) -> dict:
    """Every modulus of the scenario as a flat {name: decimal-or-token} map."""
    op, sched, tau = scenario.operator, scenario.schedule, scenario.tau
    L = op.lipschitz_L
    theta = sched.rate_theta
    rate_beta = sched.rate_beta
    b = scenario.ambient.diameter_bound
    gamma = total_boundedness_modulus(scenario.ambient)
    canonical = sched.label == "canonical"
    l_max, k_max = scenario.liminf_grid
    shift_k = bnd.shift_index(L, rate_beta)

    out = {
        "shift_index": str(shift_k),
        "diameter_bound": str(b),
        "half_descent_index": str(bnd.half_descent_index(L)),
    }
    closed = bnd.closedness_moduli(L)
    for k in range(scenario.closedness_k_max + 1):
        out[f"closedness_omega[k={k}]"] = str(closed.omega(k))
        out[f"closedness_delta[k={k}]"] = str(closed.delta(k))
    for n in scenario.fejer_grid[0]:
        for m in scenario.fejer_grid[1]:
            for r in scenario.fejer_grid[2]:
                out[f"fejer_chi[n={n},m={m},r={r}]"] = str(
                    bnd.uniform_fejer_modulus(b, n, m, r)
                )
    afp = bnd.afp_bounds(b, theta, shift_k, tau)
    for k in range(k_max + 1):
        out[f"afp_bound[k={k}]"] = afp.original(k).token()
        out[f"afp_bound_shifted[k={k}]"] = afp.shifted(k).token()
        out[f"afp_bound_monotone[k={k}]"] = afp.monotone(k).token()
    for l in range(l_max + 1):
        for k in range(k_max + 1):
            out[f"liminf[l={l},k={k}]"] = bnd.liminf_modulus(
                b, theta, l, k, shift_k, tau
            ).token()
            out[f"liminf_successive[l={l},k={k}]"] = bnd.liminf_modulus_successive(
                b, L, rate_beta, theta, l, k, tau
            ).token()
            if canonical:
                out[f"liminf_sqrt_schedule[l={l},k={k}]"] = (
                    bnd.liminf_modulus_sqrt_schedule(b, L, l, k, tau).token()
                )
    for q in scenario.queries:
        key = f"k={q.k},g={q.g}"
        out[f"metastability[{key}]"] = bnd.metastability_bound(
            b, theta, gamma, rate_beta, L, q.k, q.g, tau
        ).token()
        out[f"combined[{key}]"] = bnd.combined_metastability_bound(
            b, theta, gamma, rate_beta, L, q.k, q.g, tau
        ).token()
        if canonical:
            out[f"combined_sqrt_schedule[{key}]"] = bnd.combined_bound_sqrt_schedule(
                b, gamma, L, q.k, q.g, tau
            ).token()
    if traj is not None and op.known_fixed_points and len(traj) > shift_k:
        sharp = min(
            float(np.linalg.norm(traj.x[shift_k] - p)) for p in op.known_fixed_points
        )
        out["sharp_diameter_bound"] = str(math.ceil(sharp))
    return out


def _sampled_points(scenario: Scenario, count: int = 3):
    rng = np.random.default_rng([scenario.seed, 0xC0FFEE])
    return list(scenario.ambient.sample(rng, count))


def run(scenario: Scenario) -> dict:
    """Execute the scenario: iterate, compute bounds, run the selected suites."""
    op, sched, tau = scenario.operator, scenario.schedule, scenario.tau
    tols = scenario.tolerances
    b = scenario.ambient.diameter_bound
    gamma = total_boundedness_modulus(scenario.ambient)
    theta = sched.rate_theta
    L = op.lipschitz_L
    shift_k = bnd.shift_index(L, sched.rate_beta)

    traj = ishikawa(op, scenario.x0, sched, scenario.steps)
    z_view = shifted_view(traj, min(shift_k, len(traj) - 1))
    bounds_map = compute_bounds(scenario, traj)
    reports: list[CertReport] = []

    if "lemmas" in scenario.suites:
        p_list = list(op.known_fixed_points) + _sampled_points(scenario)
        reports.extend(
            check_lemma_suite(
                _truncated(traj, LEMMA_SUITE_STEPS), op, sched, p_list, b, tols.tol_scale
            )
        )

    if "fejer" in scenario.suites:
        for p in op.known_fixed_points:
            reports.append(check_fejer_descent(z_view, p, sched, tols.tol_scale))
        for n in scenario.fejer_grid[0]:
            for m in scenario.fejer_grid[1]:
                for r in scenario.fejer_grid[2]:
                    reports.append(
                        check_uniform_fejer(
                            z_view, op, b, n, m, r,
                            seed=scenario.seed, tol_scale=tols.tol_scale,
                        )
                    )

    if "closedness" in scenario.suites:
        closed = bnd.closedness_moduli(L)
        reports.append(
            check_uniform_closedness(
                op, closed.omega, closed.delta,
                n_samples=scenario.closedness_samples,
                k_max=scenario.closedness_k_max,
                seed=scenario.seed, tol=tols.cert_slack,
            )
        )

    if "liminf" in scenario.suites:
        l_max, k_max = scenario.liminf_grid

        def bound_fn(l, k):
            return bnd.liminf_modulus(b, theta, l, k, shift_k, tau)

        reports.append(check_liminf_modulus(traj, bound_fn, l_max, k_max))
        if "sharp_diameter_bound" in bounds_map:
            b_sharp = int(bounds_map["sharp_diameter_bound"])

            def sharp_fn(l, k):
                return bnd.liminf_modulus(b_sharp, theta, l, k, shift_k, tau)

            sharp_rep = check_liminf_modulus(traj, sharp_fn, l_max, k_max)
            reports.append(
                CertReport(
                    name=f"liminf-modulus-sharp-b[{traj.operator_label}]",
                    outcome=sharp_rep.outcome,
                    detail=sharp_rep.detail,
                    worst_margin=sharp_rep.worst_margin,
                    samples_or_steps=sharp_rep.samples_or_steps,
                    witness=sharp_rep.witness,
                    bound=sharp_rep.bound,
                )
            )

    if "metastability" in scenario.suites:
        for q in scenario.queries:
            sigma = bnd.metastability_bound(b, theta, gamma, sched.rate_beta, L, q.k, q.g, tau)
            reports.append(check_metastability_bound(traj, q, sigma, tau))
        if scenario.fake_sigma is not None and scenario.queries:
            q = scenario.queries[0]
            fake = BoundNat.exact(scenario.fake_sigma, tau)
            rep = check_metastability_bound(traj, q, fake, tau)
            reports.append(
                CertReport(
                    name=f"selftest-fail-path[k={q.k},g={q.g},fake={scenario.fake_sigma}]",
                    outcome=rep.outcome,
                    detail=f"fake bound self-test: {rep.detail}",
                    worst_margin=rep.worst_margin,
                    samples_or_steps=rep.samples_or_steps,
                    witness=rep.witness,
                    bound=rep.bound,
                )
            )

    if "combined" in scenario.suites:
        for q in scenario.queries:
            omega = bnd.combined_metastability_bound(
                b, theta, gamma, sched.rate_beta, L, q.k, q.g, tau
            )
            reports.append(check_combined_metastability(traj, q, omega, tau))

    return {
        "scenario": scenario.describe(),
        "bounds": bounds_map,
        "reports": [r.to_dict() for r in reports],
        "runtime_ms": 0,
    }


def report_exit_code(report: dict, strict: bool = False) -> int:
    outcomes = {r["outcome"] for r in report["reports"]}
    if FAIL in outcomes:
        return 1
    if strict and INCONCLUSIVE in outcomes:
        return 1
    return 0


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommands

def _load(path: str) -> Scenario:
    return load_scenario(path)


def cmd_gallery(_args) -> int:
    for op in gallery():
        fps = "; ".join(str(p.tolist()) for p in op.known_fixed_points)
        tags = ",".join(sorted(op.tags))
        kappa = f" kappa={op.strict_kappa:g}" if op.strict_kappa is not None else ""
        print(f"{op.name:<14} L={op.lipschitz_L:<6g} tags=[{tags}]{kappa} fixed=[{fps}]")
    return 0


def cmd_bounds(args) -> int:
    scenario = _load(args.scenario)
    table = compute_bounds(scenario)
    width = max(len(k) for k in table)
    for key in table:
        print(f"{key:<{width}}  {table[key]}")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(json.dumps({"bounds": table}, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.json}")
    return 0


def cmd_iterate(args) -> int:
    scenario = _load(args.scenario)
    steps = args.steps if args.steps is not None else scenario.steps
    traj = ishikawa(scenario.operator, scenario.x0, scenario.schedule, steps)
    dump_csv(traj, args.out)
    print(f"wrote {args.out} ({len(traj)} rows, final residual {traj.residuals[-1]:.3e})")
    return 0


def cmd_verify(args) -> int:
    scenario = _load(args.scenario)
    if args.suite:
        bad = set(args.suite) - set(ALL_SUITES)
        if bad:
            print(f"unknown suites: {sorted(bad)}", file=sys.stderr)
            return 2
        scenario = _replace_suites(scenario, tuple(s for s in ALL_SUITES if s in args.suite))
    started = time.monotonic()
    report = run(scenario)
    elapsed_ms = int((time.monotonic() - started) * 1000)
    payload = render_json(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    for rep in report["reports"]:
        print(f"{rep['outcome']:<12} {rep['name']}" + (f"  ({rep['detail']})" if rep["detail"] else ""))
    code = report_exit_code(report, strict=args.strict)
    print(f"verify: {len(report['reports'])} checks, exit {code}, runtime {elapsed_ms} ms")
    if args.out:
        print(f"wrote {args.out}")
    return code


def _replace_suites(scenario: Scenario, suites: tuple) -> Scenario:
    return dataclasses.replace(scenario, suites=suites)


def cmd_metastable(args) -> int:
    scenario = _load(args.scenario)
    try:
        g = parse_counterfunction(args.g)
    except CounterfunctionError as exc:
        print(f"bad counterfunction: {exc}", file=sys.stderr)
        return 2
    cap = args.cap if args.cap is not None else DEFAULT_CAP
    query = MetastabilityQuery(k=args.k, g=g, search_cap=cap)
    op, sched, tau = scenario.operator, scenario.schedule, scenario.tau
    b = scenario.ambient.diameter_bound
    gamma = total_boundedness_modulus(scenario.ambient)
    steps = max(scenario.steps, 2 * cap + 2)
    traj = ishikawa(op, scenario.x0, sched, steps)
    sigma = bnd.metastability_bound(
        b, sched.rate_theta, gamma, sched.rate_beta, op.lipschitz_L, args.k, g, tau
    )
    omega = bnd.combined_metastability_bound(
        b, sched.rate_theta, gamma, sched.rate_beta, op.lipschitz_L, args.k, g, tau
    )
    rep_sigma = check_metastability_bound(traj, query, sigma, tau)
    rep_omega = check_combined_metastability(traj, query, omega, tau)
    for rep in (rep_sigma, rep_omega):
        w = "-" if rep.witness is None else rep.witness
        print(f"{rep.outcome:<12} {rep.name}  witness={w} bound={rep.bound}")
    report = {"reports": [rep_sigma.to_dict(), rep_omega.to_dict()]}
    return report_exit_code(report, strict=args.strict)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metastab",
        description="Two-stage fixed-point iteration bounds and verification harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("gallery", help="list the operator gallery").set_defaults(fn=cmd_gallery)

    p = sub.add_parser("bounds", help="compute and print every modulus of a scenario")
    p.add_argument("scenario")
    p.add_argument("--json", help="also write the table as JSON")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("iterate", help="run the iteration and dump a CSV trajectory")
    p.add_argument("scenario")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_iterate)

    p = sub.add_parser("verify", help="run verification suites and write a JSON report")
    p.add_argument("scenario")
    p.add_argument("--suite", nargs="*", default=None, help="subset of suites to run")
    p.add_argument("--out", default=None, help="path for the JSON report")
    p.add_argument("--strict", action="store_true", help="inconclusive also fails the exit code")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("metastable", help="witness search plus bound comparison")
    p.add_argument("scenario")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--g", required=True, help="counterfunction, e.g. 'affine(1,1)'")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(fn=cmd_metastable)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as exc:
        print(f"scenario error [{exc.code}]: {exc}", file=sys.stderr)
        return SCENARIO_ERROR_EXIT.get(exc.code, 10)


if __name__ == "__main__":
    sys.exit(main())
