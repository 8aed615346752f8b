"""Scenario files: operator + start point + schedule + verification plan.

A scenario is a YAML mapping.  Minimal example:

    operator: cubic
    x0: [0.9]

Full form:

    operator: cubic            # gallery name
    set: {kind: box, lower: [-1.0], upper: [1.0]}   # must match the operator's domain
    x0: [0.9]
    schedule: canonical        # or {family: constant|reciprocal-sqrt|reciprocal-power, ...}
    steps: 200000              # recorded trajectory length
    seed: 2024
    queries:                   # metastability queries
      - {k: 0, g: "const(0)", cap: 100000}
    liminf_grid: {l_max: 10, k_max: 3}
    suites: [lemmas, fejer, closedness, liminf, metastability, combined]
    fejer_grid: {n: [0, 10], m: [0, 1, 3], r: [0, 2]}
    closedness: {k_max: 5, samples: 1000}
    tolerances: {tol_scale: 1.0e-9}
    saturation_tau_exponent: 4096
    selftest_fake_sigma: 0     # optional: inject a fake exact metastability
                               # bound to demonstrate the Fail exit path

Validation is eager: unknown operators, start points outside the set, and
schedules whose claimed witnesses fail their prefix check are rejected at
load time, each with a distinct error code.  The environment variable
METASTAB_TAU_EXP overrides the saturation exponent.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from .bignat import tau_from_exponent
from .checks import MetastabilityQuery
from .counterfn import CounterfunctionError, parse_counterfunction
from .geometry import AmbientSet, Ball, Box, point
from .operators import OperatorSpec, gallery_by_name
from .schedule import WeightSchedule, schedule_from_config, verify_schedule

ALL_SUITES = ("lemmas", "fejer", "closedness", "liminf", "metastability", "combined")

DEFAULT_STEPS = 200_000
DEFAULT_SEED = 2024
DEFAULT_SEARCH_CAP = 100_000


class ScenarioError(ValueError):
    """Scenario rejected at load time; `code` identifies the failure class."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Tolerances:
    tol_scale: float = 1e-9      # slack factor for step inequalities
    tol_dom: float = 1e-9        # domain-membership slack
    tol_fix: float = 1e-12       # residual defining a known fixed point
    tol_rec: float = 1e-12       # recurrence replay slack
    cert_slack: float = 1e-9     # operator certification slack
    monotone_tol: float = 1e-12  # monotone-distance slack

    @staticmethod
    def from_mapping(overrides: dict | None) -> "Tolerances":
        if not overrides:
            return Tolerances()
        known = set(Tolerances.__dataclass_fields__)
        bad = set(overrides) - known
        if bad:
            raise ScenarioError("parse-error", f"unknown tolerance keys: {sorted(bad)}")
        return Tolerances(**{k: float(v) for k, v in overrides.items()})


@dataclass(frozen=True)
class Scenario:
    operator: OperatorSpec
    ambient: AmbientSet
    x0: np.ndarray
    schedule: WeightSchedule
    steps: int
    seed: int
    queries: tuple
    liminf_grid: tuple      # (l_max, k_max)
    suites: tuple
    fejer_grid: tuple       # ((n values), (m values), (r values))
    closedness_k_max: int
    closedness_samples: int
    tolerances: Tolerances
    tau_exponent: int
    fake_sigma: int | None
    source: dict = field(repr=False, default_factory=dict)

    @property
    def tau(self) -> int:
        return tau_from_exponent(self.tau_exponent)

    def describe(self) -> dict:
        """Deterministic echo of the resolved configuration for reports."""
        return {
            "operator": self.operator.name,
            "set": self.ambient.describe(),
            "x0": [float(c) for c in self.x0],
            "schedule": self.schedule.label,
            "steps": self.steps,
            "seed": self.seed,
            "queries": [
                {"k": q.k, "g": str(q.g), "cap": q.search_cap} for q in self.queries
            ],
            "liminf_grid": {"l_max": self.liminf_grid[0], "k_max": self.liminf_grid[1]},
            "suites": list(self.suites),
            "fejer_grid": {
                "n": list(self.fejer_grid[0]),
                "m": list(self.fejer_grid[1]),
                "r": list(self.fejer_grid[2]),
            },
            "closedness": {"k_max": self.closedness_k_max, "samples": self.closedness_samples},
            "saturation_tau_exponent": self.tau_exponent,
            "selftest_fake_sigma": self.fake_sigma,
        }


def _ambient_from_config(cfg: dict) -> AmbientSet:
    kind = cfg.get("kind")
    if kind == "box":
        return Box(point(cfg["lower"]), point(cfg["upper"]))
    if kind == "ball":
        return Ball(point(cfg["center"]), float(cfg["radius"]))
    raise ScenarioError("parse-error", f"unknown set kind {kind!r}")


def _sets_agree(a: AmbientSet, b: AmbientSet, tol: float = 1e-9) -> bool:
    if type(a) is not type(b) or a.dim != b.dim:
        return False
    if isinstance(a, Box):
        return bool(
            np.allclose(a.lower, b.lower, atol=tol) and np.allclose(a.upper, b.upper, atol=tol)
        )
    return bool(np.allclose(a.center, b.center, atol=tol) and abs(a.radius - b.radius) <= tol)


def _parse_query(cfg, default_cap: int) -> MetastabilityQuery:
    try:
        g = parse_counterfunction(str(cfg["g"]))
    except CounterfunctionError as exc:
        raise ScenarioError("parse-error", f"bad counterfunction: {exc}") from exc
    k = int(cfg.get("k", 0))
    if k < 0:
        raise ScenarioError("parse-error", f"query k must be a natural, got {k}")
    return MetastabilityQuery(k=k, g=g, search_cap=int(cfg.get("cap", default_cap)))


def load_scenario(path, schedule_check=(7, 10)) -> Scenario:
    """Read, parse, and eagerly validate a scenario file."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ScenarioError("parse-error", f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ScenarioError("parse-error", f"cannot parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError("parse-error", "scenario file must be a mapping")
    return scenario_from_mapping(raw, schedule_check=schedule_check)


def scenario_from_mapping(raw: dict, schedule_check=(7, 10)) -> Scenario:
    if "operator" not in raw:
        raise ScenarioError("parse-error", "scenario needs an 'operator' key")
    ops = gallery_by_name()
    name = str(raw["operator"])
    if name not in ops:
        raise ScenarioError(
            "unknown-operator", f"operator {name!r} not in gallery {sorted(ops)}"
        )
    op = ops[name]

    ambient = op.domain
    if "set" in raw:
        declared = _ambient_from_config(raw["set"])
        if not _sets_agree(declared, op.domain):
            raise ScenarioError(
                "parse-error",
                f"declared set does not match the certified domain of {name!r}",
            )
        ambient = declared

    try:
        x0 = point(raw.get("x0", op.known_fixed_points[0] if op.known_fixed_points else None))
    except Exception as exc:
        raise ScenarioError("parse-error", f"bad x0: {exc}") from exc
    if x0.size != ambient.dim:
        raise ScenarioError("x0-not-in-domain", f"x0 has dimension {x0.size}, set has {ambient.dim}")
    if not ambient.contains(x0, 0.0):
        raise ScenarioError("x0-not-in-domain", f"x0 {x0.tolist()} lies outside the set")

    try:
        schedule = schedule_from_config(raw.get("schedule", "canonical"))
    except ValueError as exc:
        raise ScenarioError("parse-error", str(exc)) from exc
    sched_report = verify_schedule(schedule, *schedule_check)
    if not sched_report.passed:
        raise ScenarioError(
            "schedule-invalid", f"schedule {schedule.label!r}: {sched_report.detail}"
        )

    suites = tuple(raw.get("suites", list(ALL_SUITES)))
    bad_suites = set(suites) - set(ALL_SUITES)
    if bad_suites:
        raise ScenarioError("parse-error", f"unknown suites: {sorted(bad_suites)}")

    default_cap = int(raw.get("search_cap", DEFAULT_SEARCH_CAP))
    queries = tuple(_parse_query(q, default_cap) for q in raw.get("queries", []))

    grid = raw.get("liminf_grid", {})
    liminf_grid = (int(grid.get("l_max", 10)), int(grid.get("k_max", 3)))

    fejer = raw.get("fejer_grid", {})
    fejer_grid = (
        tuple(int(v) for v in fejer.get("n", (0, 10))),
        tuple(int(v) for v in fejer.get("m", (0, 1, 3))),
        tuple(int(v) for v in fejer.get("r", (0, 2))),
    )

    closed = raw.get("closedness", {})

    tau_exponent = int(raw.get("saturation_tau_exponent", 4096))
    env_exp = os.environ.get("METASTAB_TAU_EXP")
    if env_exp is not None:
        tau_exponent = int(env_exp)
    if tau_exponent < 1:
        raise ScenarioError("parse-error", "saturation exponent must be >= 1")

    fake_sigma = raw.get("selftest_fake_sigma")

    return Scenario(
        operator=op,
        ambient=ambient,
        x0=x0,
        schedule=schedule,
        steps=int(raw.get("steps", DEFAULT_STEPS)),
        seed=int(raw.get("seed", DEFAULT_SEED)),
        queries=queries,
        liminf_grid=liminf_grid,
        suites=suites,
        fejer_grid=fejer_grid,
        closedness_k_max=int(closed.get("k_max", 5)),
        closedness_samples=int(closed.get("samples", 1000)),
        tolerances=Tolerances.from_mapping(raw.get("tolerances")),
        tau_exponent=tau_exponent,
        fake_sigma=None if fake_sigma is None else int(fake_sigma),
        source=dict(raw),
    )
