"""Two-stage fixed-point iteration engine with recorded trajectories.

The scheme iterates, from a start point x_0 and weight sequences
(alpha_n), (beta_n) in [0, 1]:

    y_n     = beta_n * T(x_n) + (1 - beta_n) * x_n
    x_{n+1} = alpha_n * T(y_n) + (1 - alpha_n) * x_n

The one-stage special case beta_n = 0 is provided for comparison runs only
(it generally breaks the divergence condition on the weight products and is
excluded from bound verification).  Trajectories are fully materialized so
verification can take pairwise distances over arbitrary windows.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .geometry import ContractViolation
from .operators import DomainViolation, OperatorSpec, apply_batch
from .schedule import WeightSchedule, constant_zero_beta

DEFAULT_RECURRENCE_TOL = 1e-12


class InsufficientLength(ValueError):
    """A window or shift reaches past the recorded end of a trajectory."""


@dataclass(frozen=True)
class Trajectory:
    """A recorded run: points x_0..x_N, inner points y_0..y_{N-1}, residuals
    ||x_n - Tx_n||, and the shift applied to the raw iteration (0 if none)."""

    x: np.ndarray
    y: np.ndarray
    residuals: np.ndarray
    schedule_label: str
    operator_label: str
    shift_K: int = 0
    drift_events: int = 0

    def __post_init__(self):
        if len(self.y) != len(self.x) - 1 or len(self.residuals) != len(self.x):
            raise ContractViolation("trajectory arrays have inconsistent lengths")

    def __len__(self) -> int:
        return len(self.x)

    @property
    def dim(self) -> int:
        return self.x.shape[1]


def ishikawa(
    op: OperatorSpec, x0: np.ndarray, schedule: WeightSchedule, n_steps: int
) -> Trajectory:
    """Run the two-stage iteration for n_steps steps (n_steps+1 points)."""
    if n_steps < 0:
        raise ContractViolation("step count must be a natural number")
    x0 = np.asarray(x0, dtype=float)
    if not op.domain.contains(x0, op.domain_tol):
        raise DomainViolation(f"start point {x0.tolist()} is outside the domain of {op.name}")

    d = x0.size
    xs = np.empty((n_steps + 1, d))
    ys = np.empty((n_steps, d))
    res = np.empty(n_steps + 1)
    xs[0] = x0
    drift = 0
    xn = x0
    for n in range(n_steps):
        a, b = schedule.alpha(n), schedule.beta_seq(n)
        txn = np.asarray(op.map(xn), dtype=float)
        res[n] = float(np.linalg.norm(xn - txn))
        yn = b * txn + (1.0 - b) * xn
        xn1 = a * np.asarray(op.map(yn), dtype=float) + (1.0 - a) * xn
        if not np.all(np.isfinite(xn1)):
            raise DomainViolation(f"{op.name}: non-finite iterate at step {n + 1}")
        # the scheme is convex-combination closed, so any escape is rounding
        # drift: project back and count instead of failing
        if not op.domain.contains(xn1, op.domain_tol):
            xn1 = op.domain.project(xn1)
            drift += 1
        ys[n] = yn
        xs[n + 1] = xn1
        xn = xn1
    res[n_steps] = float(np.linalg.norm(xn - np.asarray(op.map(xn), dtype=float)))
    return Trajectory(
        x=xs, y=ys, residuals=res,
        schedule_label=schedule.label, operator_label=op.name,
        drift_events=drift,
    )


def mann(op: OperatorSpec, x0: np.ndarray, schedule: WeightSchedule, n_steps: int) -> Trajectory:
    """One-stage comparison run: the same engine with the inner weight forced to 0."""
    return ishikawa(op, x0, constant_zero_beta(schedule), n_steps)


def shifted_view(traj: Trajectory, shift_k: int) -> Trajectory:
    """The trajectory seen from index shift_k on (z_n = x_{n + shift_k})."""
    if shift_k < 0:
        raise ContractViolation("shift must be a natural number")
    if shift_k > len(traj.x) - 1:
        raise InsufficientLength(
            f"shift {shift_k} exceeds recorded length {len(traj.x) - 1}"
        )
    if shift_k == 0:
        return traj
    return Trajectory(
        x=traj.x[shift_k:],
        y=traj.y[shift_k:],
        residuals=traj.residuals[shift_k:],
        schedule_label=traj.schedule_label,
        operator_label=traj.operator_label,
        shift_K=traj.shift_K + shift_k,
        drift_events=traj.drift_events,
    )


def check_recurrence(
    traj: Trajectory, op: OperatorSpec, schedule: WeightSchedule,
    tol: float = DEFAULT_RECURRENCE_TOL,
) -> float:
    """Worst deviation of the recorded points from the defining recurrence.

    Evaluates both stages at every step (weights taken at the global index
    when the trajectory is shifted) and returns the largest error norm; a
    sound recording stays below tol.
    """
    if len(traj.x) < 2:
        return 0.0
    n = len(traj.y)
    idx = np.arange(n) + traj.shift_K
    a = np.array([schedule.alpha(int(i)) for i in idx])[:, None]
    b = np.array([schedule.beta_seq(int(i)) for i in idx])[:, None]
    tx = apply_batch(op, traj.x[:-1])
    ty = apply_batch(op, traj.y)
    err_y = np.linalg.norm(traj.y - (b * tx + (1 - b) * traj.x[:-1]), axis=1)
    err_x = np.linalg.norm(traj.x[1:] - (a * ty + (1 - a) * traj.x[:-1]), axis=1)
    worst = float(max(err_y.max(), err_x.max()))
    if traj.drift_events == 0 and worst > tol:
        raise ContractViolation(f"recurrence violated by {worst:.3e} > {tol:.1e}")
    return worst


def dump_csv(traj: Trajectory, path) -> None:
    """Write one row per iterate: n, coordinates, residual."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n"] + [f"x{i}" for i in range(traj.dim)] + ["residual"])
        for n, (pt, r) in enumerate(zip(traj.x, traj.residuals)):
            writer.writerow([n] + [repr(float(c)) for c in pt] + [repr(float(r))])
