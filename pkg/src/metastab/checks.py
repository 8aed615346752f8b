"""Empirical verification: witness searches and inequality suites.

Witness searches scan recorded trajectories for the indices whose existence
the quantitative statements assert (first small residual in a range, first
metastable window), then compare the found witness against the computed
bound.  A bound that saturated to ">= tau" can confirm but never refute, so
an exhausted search below a saturated bound is reported as inconclusive
rather than failed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .bignat import DEFAULT_TAU, BoundNat
from .bounds import shift_index, uniform_fejer_modulus
from .counterfn import Counterfunction
from .geometry import ContractViolation, norm
from .iteration import InsufficientLength, Trajectory, shifted_view
from .operators import OperatorSpec, apply_batch
from .report import (
    CertReport,
    failed_report,
    inconclusive_report,
    passed_report,
)
from .schedule import WeightSchedule

DEFAULT_SEARCH_CAP = 100_000
DEFAULT_TOL_SCALE = 1e-9
STRICTNESS_SLACK = 1e-12
FIXED_POINT_TOL = 1e-12


# ---------------------------------------------------------------------------
# liminf witnesses

def find_liminf_witness(traj: Trajectory, l: int, k: int) -> int | None:
    """Smallest N >= l in the recorded range with residual(N) <= 1/(k+1)."""
    if l > len(traj) - 1:
        raise InsufficientLength(f"start index {l} beyond recorded length {len(traj) - 1}")
    eps = 1.0 / (k + 1)
    hits = np.nonzero(traj.residuals[l:] <= eps)[0]
    return None if hits.size == 0 else int(l + hits[0])


def check_liminf_modulus(traj: Trajectory, bound_fn, l_max: int, k_max: int) -> CertReport:
    """Witness-vs-bound over the grid [0..l_max] x [0..k_max].

    bound_fn(l, k) must return the BoundNat modulus for the trajectory at
    hand.  A cell passes when a witness exists at or below the bound; it is
    inconclusive when the recorded range ends before an exact bound does.
    """
    name = f"liminf-modulus[{traj.operator_label}]"
    last = len(traj) - 1
    cells = 0
    first_inconclusive = None
    for l in range(l_max + 1):
        for k in range(k_max + 1):
            cells += 1
            bound: BoundNat = bound_fn(l, k)
            witness = find_liminf_witness(traj, l, k)
            if witness is not None and bound.at_least(witness):
                continue
            if witness is None and not bound.at_least(last):
                # the whole window [l, bound] was scanned without a witness
                return failed_report(
                    name, f"no witness in [{l}, {bound}] for k={k}", steps=cells,
                )
            if witness is not None and not bound.at_least(witness):
                return failed_report(
                    name,
                    f"smallest witness {witness} exceeds bound {bound} at (l={l}, k={k})",
                    steps=cells, witness=witness, bound=bound.token(),
                )
            if first_inconclusive is None:
                first_inconclusive = (l, k, bound)
    if first_inconclusive is not None:
        l, k, bound = first_inconclusive
        return inconclusive_report(
            name,
            f"recorded length {last} ends before bound {bound} at (l={l}, k={k})",
            steps=cells, bound=bound.token(),
        )
    return passed_report(name, steps=cells)


# ---------------------------------------------------------------------------
# metastability witnesses

@dataclass(frozen=True)
class MetastabilityQuery:
    """Precision index k, counterfunction g, and how far to scan for N."""

    k: int
    g: Counterfunction
    search_cap: int = DEFAULT_SEARCH_CAP

    def __post_init__(self):
        if self.search_cap < 1:
            raise ContractViolation("search cap must be >= 1")


def _window_length(query: MetastabilityQuery, n: int, recorded_last: int, tau: int) -> int:
    gval = query.g.evaluate(n, tau)
    if gval.is_huge or n + gval.value > recorded_last:
        raise InsufficientLength(
            f"window [{n}, {n}+g({n})] extends beyond recorded index {recorded_last}"
        )
    return gval.value


def find_metastable_witness(
    traj: Trajectory,
    query: MetastabilityQuery,
    require_residual: bool = False,
    scan_limit: int | None = None,
    tau: int = DEFAULT_TAU,
) -> int | None:
    """Smallest N <= cap with all pairs i, j in [N, N+g(N)] within 1/(k+1).

    With require_residual, every index in the window must additionally have
    residual <= 1/(k+1).  The pair condition says the window's point set has
    diameter <= eps, so the scan uses bounding-box extents for fast accept
    and reject, falling back to exact pairwise distances only when the box
    diagonal is indecisive; a violating pair, once seen, rejects every later
    window that still contains it.
    """
    eps = 1.0 / (query.k + 1)
    xs = traj.x
    last = len(xs) - 1
    limit = query.search_cap if scan_limit is None else min(query.search_cap, scan_limit)
    bad_residuals = np.cumsum(np.concatenate(([0], traj.residuals > eps)))
    blocking_pair = None

    for n in range(limit + 1):
        w = _window_length(query, n, last, tau)
        end = n + w
        if blocking_pair is not None:
            i, j = blocking_pair
            if n <= i and end >= j:
                continue
        if require_residual and bad_residuals[end + 1] - bad_residuals[n] > 0:
            continue
        window = xs[n : end + 1]
        mins, maxs = window.min(axis=0), window.max(axis=0)
        extents = maxs - mins
        worst_axis = int(np.argmax(extents))
        if extents[worst_axis] > eps:
            lo = n + int(np.argmin(window[:, worst_axis]))
            hi = n + int(np.argmax(window[:, worst_axis]))
            blocking_pair = (min(lo, hi), max(lo, hi))
            continue
        if float(np.sqrt(np.dot(extents, extents))) <= eps:
            return n
        if len(window) == 1 or float(pdist(window).max()) <= eps:
            return n
    return None


def _witness_vs_bound(
    name: str,
    traj: Trajectory,
    query: MetastabilityQuery,
    bound: BoundNat,
    require_residual: bool,
    tau: int,
) -> CertReport:
    scan_limit = None
    if not bound.is_huge and bound.value < query.search_cap:
        scan_limit = bound.value
    witness = find_metastable_witness(
        traj, query, require_residual=require_residual, scan_limit=scan_limit, tau=tau
    )
    if witness is not None:
        if bound.at_least(witness):
            return passed_report(
                name, steps=witness + 1, witness=witness, bound=bound.token()
            )
        return failed_report(
            name, f"smallest witness {witness} exceeds bound {bound}",
            steps=witness + 1, witness=witness, bound=bound.token(),
        )
    exhausted = query.search_cap if scan_limit is None else scan_limit
    if not bound.is_huge and bound.value <= exhausted:
        return failed_report(
            name, f"no witness in the fully scanned range [0, {bound}]",
            steps=exhausted + 1, bound=bound.token(),
        )
    return inconclusive_report(
        name, f"no witness up to cap {exhausted} below bound {bound}",
        steps=exhausted + 1, bound=bound.token(),
    )


def check_metastability_bound(
    traj: Trajectory, query: MetastabilityQuery, bound: BoundNat, tau: int = DEFAULT_TAU
) -> CertReport:
    """Pass iff the smallest metastable window start is <= the computed rate."""
    name = f"metastability[{traj.operator_label},k={query.k},g={query.g}]"
    return _witness_vs_bound(name, traj, query, bound, False, tau)


def check_combined_metastability(
    traj: Trajectory, query: MetastabilityQuery, bound: BoundNat, tau: int = DEFAULT_TAU
) -> CertReport:
    """As check_metastability_bound, with small residuals required on the window."""
    name = f"combined-metastability[{traj.operator_label},k={query.k},g={query.g}]"
    return _witness_vs_bound(name, traj, query, bound, True, tau)


# ---------------------------------------------------------------------------
# descent along the shifted trajectory

def _scale_tol(points: np.ndarray, tol_scale: float) -> np.ndarray:
    return tol_scale * (1.0 + np.einsum("ij,ij->i", points, points))


def _global_weights(traj: Trajectory, schedule: WeightSchedule, count: int):
    idx = np.arange(count) + traj.shift_K
    a = np.array([schedule.alpha(int(i)) for i in idx])
    b = np.array([schedule.beta_seq(int(i)) for i in idx])
    return a, b


def check_fejer_descent(
    traj_shifted: Trajectory,
    p: np.ndarray,
    schedule: WeightSchedule,
    tol_scale: float = DEFAULT_TOL_SCALE,
    monotone_tol: float = 1e-12,
) -> CertReport:
    """Quadratic descent toward a fixed point p along the shifted trajectory:

        ||z_{n+1}-p||^2 <= ||z_n-p||^2 - (1/2) a_n b_n ||z_n-Tz_n||^2

    with the weights taken at the global step index, plus monotonicity of
    ||z_n - p|| up to an absolute slack.
    """
    name = f"fejer-descent[{traj_shifted.operator_label}]"
    z = traj_shifted.x
    n = len(z) - 1
    if n < 1:
        return passed_report(name, steps=0)
    a, b = _global_weights(traj_shifted, schedule, n)
    dist_sq = np.einsum("ij,ij->i", z - p, z - p)
    res_sq = traj_shifted.residuals[:-1] ** 2
    margin = dist_sq[:-1] - 0.5 * a * b * res_sq - dist_sq[1:]
    tol = _scale_tol(z[:-1], tol_scale)
    worst = float(margin.min())
    if np.any(margin < -tol):
        at = int(np.argmin(margin + tol))
        return failed_report(name, f"descent violated at shifted step {at}", worst, n)
    dist = np.sqrt(dist_sq)
    inc = dist[1:] - dist[:-1]
    if np.any(inc > monotone_tol):
        at = int(np.argmax(inc))
        return failed_report(
            name, f"||z_n - p|| increased by {inc.max():.3e} at shifted step {at}",
            float(-inc.max()), n,
        )
    return passed_report(name, worst, n)


def near_fixed_point_probes(
    op: OperatorSpec, max_residual: float, count: int, seed: int = 0
) -> list[np.ndarray]:
    """Points p of the domain with ||p - Tp|| <= max_residual, found by local
    search around the known fixed points (radius halved until acceptance)."""
    if not op.known_fixed_points:
        return []
    rng = np.random.default_rng(seed)
    probes = []
    for i in range(count):
        anchor = op.known_fixed_points[i % len(op.known_fixed_points)]
        radius = max(max_residual / (1.0 + op.lipschitz_L), 1e-14)
        accepted = None
        for _ in range(80):
            direction = rng.normal(size=anchor.size)
            direction /= max(norm(direction), 1e-300)
            candidate = op.domain.project(anchor + radius * rng.uniform(0, 1) * direction)
            if norm(candidate - np.asarray(op.map(candidate), dtype=float)) <= max_residual:
                accepted = candidate
                break
            radius *= 0.5
        probes.append(anchor if accepted is None else accepted)
    return probes


def check_uniform_fejer(
    traj_shifted: Trajectory,
    op: OperatorSpec,
    diameter_bound: int,
    n: int,
    m: int,
    r: int,
    n_probe: int = 20,
    seed: int = 0,
    tol_scale: float = DEFAULT_TOL_SCALE,
) -> CertReport:
    """Uniform quadratic Fejer monotonicity over a window:

    for every p with ||p-Tp|| <= 1/(8*b*m*(r+1)+1) and every l <= m,
    ||z_{n+l}-p||^2 < ||z_n-p||^2 + 1/(r+1).  Strictness is tested as <=
    with a subtracted slack.
    """
    name = f"uniform-fejer[{traj_shifted.operator_label},n={n},m={m},r={r}]"
    if n + m > len(traj_shifted) - 1:
        raise InsufficientLength(f"window end {n + m} beyond recorded length")
    chi = uniform_fejer_modulus(diameter_bound, n, m, r)
    threshold = 1.0 / (chi + 1)
    probes = near_fixed_point_probes(op, threshold, n_probe, seed)
    if not probes:
        return inconclusive_report(name, "no probe points with small enough residual")
    z = traj_shifted.x
    worst = float("inf")
    checks = 0
    for p in probes:
        base = float(np.dot(z[n] - p, z[n] - p))
        tol = tol_scale * (1.0 + float(np.dot(z[n], z[n])))
        for l in range(m + 1):
            lhs = float(np.dot(z[n + l] - p, z[n + l] - p))
            margin = base + 1.0 / (r + 1) - STRICTNESS_SLACK - lhs
            worst = min(worst, margin)
            checks += 1
            if margin < -tol:
                return failed_report(
                    name, f"window descent violated at l={l} for probe {p.tolist()}",
                    worst, checks,
                )
    return passed_report(name, worst, checks)


def check_uniform_closedness(
    op: OperatorSpec,
    omega_fn,
    delta_fn,
    n_samples: int = 1000,
    k_max: int = 5,
    seed: int = 0,
    tol: float = 1e-9,
) -> CertReport:
    """Uniform closedness of the fixed-point set: a point q with residual
    <= 1/(delta(k)+1) and any p with ||p-q|| <= 1/(omega(k)+1) must satisfy
    ||p-Tp|| <= 1/(k+1).  Samples n_samples (q, p) pairs per k."""
    name = f"uniform-closedness[{op.name}]"
    rng = np.random.default_rng(seed)
    worst = float("inf")
    checks = 0
    for k in range(k_max + 1):
        q_threshold = 1.0 / (delta_fn(k) + 1)
        p_threshold = 1.0 / (omega_fn(k) + 1)
        qs = near_fixed_point_probes(op, q_threshold, n_samples, seed + 7 * k + 1)
        for q in qs:
            direction = rng.normal(size=q.size)
            direction /= max(norm(direction), 1e-300)
            p = op.domain.project(q + direction * p_threshold * rng.uniform(0, 1))
            if norm(p - q) > p_threshold:
                continue
            margin = 1.0 / (k + 1) + tol - norm(p - np.asarray(op.map(p), dtype=float))
            worst = min(worst, margin - tol)
            checks += 1
            if margin < 0:
                return failed_report(
                    name, f"closedness violated at k={k}", worst, checks,
                )
    return passed_report(name, worst, checks)


# ---------------------------------------------------------------------------
# the step-inequality suite

def _sq(v: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", v, v)


def check_lemma_suite(
    traj: Trajectory,
    op: OperatorSpec,
    schedule: WeightSchedule,
    p_list,
    diameter_bound: int,
    tol_scale: float = DEFAULT_TOL_SCALE,
) -> list[CertReport]:
    """Evaluate every step inequality and identity along a recorded run.

    Covers: the immediate step bounds ||x_n-x_{n+1}|| <= ||x_n-Ty_n|| and
    ||x_n-y_n|| <= ||x_n-Tx_n||; the Lipschitz step bound (1+L)||x_n-Tx_n||;
    the three convex-combination identities for squared distances; the
    image-distance expansion ||Tz-p||^2 <= ||z-p||^2 + ||z-Tz||^2 +
    2||p-Tp||sigma(z,p); the per-step residual descent estimate with the
    schedule factor (1 - 2b_n - L^2 b_n^2); the half-descent property of
    that factor from the shift index on; and the shifted-trajectory descent
    inequalities (approximate for arbitrary p, exact for fixed points),
    with the weights of the shifted steps taken at their global index.

    p_list should contain the known fixed points first, then sampled points
    of the domain.  All slacks scale as tol_scale*(1 + ||x_n||^2).
    """
    reports: list[CertReport] = []
    n = len(traj.y)
    xs, ys = traj.x, traj.y
    a, b = _global_weights(traj, schedule, n)
    tx = apply_batch(op, xs[:-1])
    ty = apply_batch(op, ys)
    res = traj.residuals[:n]
    tol = _scale_tol(xs[:-1], tol_scale)
    L = op.lipschitz_L
    steps = n

    def ineq(name: str, margin: np.ndarray):
        worst = float(margin.min()) if len(margin) else float("inf")
        if len(margin) and np.any(margin < -tol[: len(margin)]):
            at = int(np.argmin(margin + tol[: len(margin)]))
            reports.append(failed_report(name, f"violated at step {at}", worst, steps))
        else:
            reports.append(passed_report(name, worst, steps))

    def identity(name: str, diff: np.ndarray):
        gap = np.abs(diff) - tol[: len(diff)]
        worst = float(-gap.max()) if len(gap) else float("inf")
        if len(gap) and gap.max() > 0:
            at = int(np.argmax(gap))
            reports.append(failed_report(name, f"identity off at step {at}", worst, steps))
        else:
            reports.append(passed_report(name, worst, steps))

    step_gap = np.linalg.norm(xs[:-1] - xs[1:], axis=1)
    ineq("step-bound-inner-image", np.linalg.norm(xs[:-1] - ty, axis=1) - step_gap)
    ineq("inner-gap-bound-residual", res - np.linalg.norm(xs[:-1] - ys, axis=1))
    ineq("step-bound-lipschitz", (1.0 + L) * res - step_gap)

    sq_ty_x = _sq(ty - xs[:-1])
    sq_tx_x = _sq(tx - xs[:-1])
    res_y = np.linalg.norm(ys - ty, axis=1)
    identity(
        "combination-identity-inner-residual",
        res_y**2
        - (b * _sq(tx - ty) + (1 - b) * _sq(xs[:-1] - ty) - b * (1 - b) * sq_tx_x),
    )

    factor = 1.0 - 2.0 * b - (L * b) ** 2
    shift_k = shift_index(L, schedule.rate_beta)
    tail = np.arange(n) + traj.shift_K >= shift_k
    if tail.any():
        half_margin = factor[tail] - 0.5
        worst = float(half_margin.min())
        if np.any(half_margin < -tol_scale):
            reports.append(
                failed_report("half-descent-factor", "factor below 1/2 after shift", worst, steps)
            )
        else:
            reports.append(passed_report("half-descent-factor", worst, steps))

    fixed_mask = [
        norm(p - np.asarray(op.map(p), dtype=float)) <= FIXED_POINT_TOL for p in p_list
    ]
    try:
        z_view = shifted_view(traj, shift_k) if traj.shift_K == 0 else traj
    except InsufficientLength:
        z_view = None

    for pi, p in enumerate(p_list):
        tag = f"p{pi}"
        tp = np.asarray(op.map(p), dtype=float)
        p_res = norm(p - tp)
        identity(
            f"combination-identity-step[{tag}]",
            _sq(xs[1:] - p)
            - (a * _sq(ty - p) + (1 - a) * _sq(xs[:-1] - p) - a * (1 - a) * sq_ty_x),
        )
        identity(
            f"combination-identity-inner[{tag}]",
            _sq(ys - p)
            - (b * _sq(tx - p) + (1 - b) * _sq(xs[:-1] - p) - b * (1 - b) * sq_tx_x),
        )
        sigma_x = p_res + np.linalg.norm(xs[:-1] - tp, axis=1)
        sigma_y = p_res + np.linalg.norm(ys - tp, axis=1)
        ineq(
            f"image-expansion-step[{tag}]",
            _sq(xs[:-1] - p) + res**2 + 2 * p_res * sigma_x - _sq(tx - p),
        )
        ineq(
            f"image-expansion-inner[{tag}]",
            _sq(ys - p) + res_y**2 + 2 * p_res * sigma_y - _sq(ty - p),
        )
        ineq(
            f"residual-descent[{tag}]",
            _sq(xs[:-1] - p) - a * b * factor * res**2
            + 2 * p_res * (sigma_x + sigma_y) - _sq(xs[1:] - p),
        )
        if z_view is not None and len(z_view) > 1:
            zn = len(z_view) - 1
            za, zb = _global_weights(z_view, schedule, zn)
            zres = z_view.residuals[:-1]
            zd = _sq(z_view.x - p)
            ztol = _scale_tol(z_view.x[:-1], tol_scale)
            margin7 = (
                zd[:-1] - 0.5 * za * zb * zres**2 + 8 * diameter_bound * p_res - zd[1:]
            )
            worst7 = float(margin7.min())
            if np.any(margin7 < -ztol):
                reports.append(
                    failed_report(f"shifted-descent-approx[{tag}]", "violated", worst7, zn)
                )
            else:
                reports.append(passed_report(f"shifted-descent-approx[{tag}]", worst7, zn))
            if fixed_mask[pi]:
                reports.append(
                    check_fejer_descent(z_view, p, schedule, tol_scale)
                )
    return reports
