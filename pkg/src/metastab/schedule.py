"""Weight sequences with quantitative witnesses.

A schedule carries (alpha_n), (beta_n) in [0, 1] together with two claimed
witnesses: `rate_beta`, beyond which beta_n <= 1/(k+1), and `rate_theta`,
by which the partial sums of alpha_n*beta_n reach n.  Witnesses are claims;
`verify_schedule` validates them on a finite prefix and reports the first
violation.  Every honest divergence rate satisfies rate_theta(n) >= n - 1
because the summands are at most 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

from .counterfn import Affine, Compose, Counterfunction, Power
from .report import CertReport, failed_report, inconclusive_report, passed_report

DEFAULT_STEP_CAP = 10**6


@dataclass(frozen=True)
class WeightSchedule:
    alpha: Callable[[int], float]
    beta_seq: Callable[[int], float]
    rate_beta: Callable[[int], int]
    rate_theta: Counterfunction
    label: str

    def weight_product(self, n: int) -> float:
        return self.alpha(n) * self.beta_seq(n)


def canonical_schedule() -> WeightSchedule:
    """alpha_n = beta_n = 1/sqrt(n+1), with witnesses (k+1)^2 and 4^n."""

    def w(n: int) -> float:
        return 1.0 / math.sqrt(n + 1)

    return WeightSchedule(
        alpha=w,
        beta_seq=w,
        rate_beta=lambda k: (k + 1) ** 2,
        rate_theta=Power(4),
        label="canonical",
    )


def constant_schedule(value: float, label: str | None = None) -> WeightSchedule:
    """alpha_n = beta_n = value.

    Honest only for value = 0 (and then the weight products never diverge);
    for value > 0 the claimed witnesses let `verify_schedule` expose the
    violation of the convergence condition on (beta_n).
    """
    if not 0.0 <= value <= 1.0:
        raise ValueError("constant weight must lie in [0, 1]")
    if value > 0.0:
        per_step = Fraction(value).limit_denominator(10**9) ** 2
        theta = Affine(ceil_fraction_local(1 / per_step), 0)
    else:
        theta = Affine(1, 0)
    return WeightSchedule(
        alpha=lambda n: value,
        beta_seq=lambda n: value,
        rate_beta=lambda k: 0,
        rate_theta=theta,
        label=label or f"constant({value:g})",
    )


def reciprocal_power_schedule(p: float, label: str | None = None) -> WeightSchedule:
    """alpha_n = beta_n = 1/(n+1)**p for p > 0.

    rate_beta(k) = ceil((k+1)**(1/p)); the divergence witness for p < 1/2 is
    4**(cn) with c = ceil(1/(1-2p)), which dominates the tight witness
    ceil(n**(1/(1-2p))) pointwise.  For p = 1/2 the witness is 4**n.  For
    p > 1/2 the weight-product series converges, so no honest witness
    exists; the claimed one is then refutable on a finite prefix.
    """
    if p <= 0:
        raise ValueError("exponent must be positive")
    p_frac = Fraction(p).limit_denominator(10**6)

    def beta_fn(n: int) -> float:
        return float((n + 1) ** (-p))

    def rate_beta(k: int) -> int:
        # smallest integer way above (k+1)**(1/p): m >= (k+1)**(1/p) iff
        # m**num >= (k+1)**den for p = num/den
        num, den = p_frac.numerator, p_frac.denominator
        target = (k + 1) ** den
        m = max(1, int(round((k + 1) ** (1.0 / float(p_frac)))))
        while m**num < target:
            m += 1
        while m >= 1 and (m - 1) ** num >= target:
            m -= 1
        return m

    if p_frac == Fraction(1, 2):
        theta: Counterfunction = Power(4)
    elif p_frac < Fraction(1, 2):
        c = ceil_fraction_local(1 / (1 - 2 * p_frac))
        theta = Compose(Power(4), Affine(c, 0))
    else:
        theta = Power(4)  # deliberately unprovable: series converges
    return WeightSchedule(
        alpha=beta_fn,
        beta_seq=beta_fn,
        rate_beta=rate_beta,
        rate_theta=theta,
        label=label or f"reciprocal-power({p:g})",
    )


def constant_zero_beta(schedule: WeightSchedule) -> WeightSchedule:
    """The same outer weights with the inner weight forced to 0."""
    return replace(
        schedule,
        beta_seq=lambda n: 0.0,
        label=f"{schedule.label}+zero-beta",
    )


def ceil_fraction_local(fr: Fraction) -> int:
    return -((-fr.numerator) // fr.denominator)


def schedule_from_config(spec) -> WeightSchedule:
    """Build a schedule from a label or an inline mapping.

    Accepted forms: the string "canonical"; {family: reciprocal-sqrt};
    {family: constant, value: c}; {family: reciprocal-power, p: x}.
    """
    if isinstance(spec, str):
        if spec == "canonical":
            return canonical_schedule()
        raise ValueError(f"unknown schedule label {spec!r}")
    if isinstance(spec, dict):
        family = spec.get("family")
        if family in ("canonical", "reciprocal-sqrt"):
            return canonical_schedule()
        if family == "constant":
            return constant_schedule(float(spec["value"]))
        if family == "reciprocal-power":
            return reciprocal_power_schedule(float(spec["p"]))
        raise ValueError(f"unknown schedule family {family!r}")
    raise ValueError(f"bad schedule spec {spec!r}")


def verify_schedule(
    schedule: WeightSchedule,
    n_max: int,
    k_max: int,
    step_cap: int = DEFAULT_STEP_CAP,
    a1_window: int = 1000,
) -> CertReport:
    """Validate the schedule invariants on a finite prefix.

    Checks, in order: weights and their ordering lie in range; beta_n stays
    <= 1/(k+1) from rate_beta(k) on (within a scan window); the partial sums
    of alpha_n*beta_n reach n by rate_theta(n); and rate_theta(n) >= n-1.
    Sums longer than step_cap make the divergence check inconclusive rather
    than failed.
    """
    name = f"schedule[{schedule.label}]"

    # (A2) prerequisites: exact integer evaluation of the divergence witness
    theta_vals = []
    for n in range(n_max + 1):
        tv = schedule.rate_theta.evaluate(n)
        if tv.is_huge or tv.value > step_cap:
            return inconclusive_report(
                name, f"divergence witness at n={n} exceeds the step cap {step_cap}"
            )
        theta_vals.append(tv.value)

    for n, tv in enumerate(theta_vals):
        if tv < n - 1:
            return failed_report(
                name, f"divergence witness below n-1 at n={n} ({tv} < {n - 1})", float(tv - (n - 1))
            )

    scan_to = max(max(theta_vals, default=0), schedule.rate_beta(k_max) + a1_window)
    worst = float("inf")

    # (A1): beta_n <= 1/(k+1) for n >= rate_beta(k), scanned over a window
    for k in range(k_max + 1):
        start = schedule.rate_beta(k)
        limit = 1.0 / (k + 1)
        for n in range(start, scan_to + 1):
            margin = limit - schedule.beta_seq(n)
            worst = min(worst, margin)
            if margin < 0:
                return failed_report(
                    name, f"(A1) violated at k={k}: beta_{n} = "
                    f"{schedule.beta_seq(n):.6g} > 1/{k + 1}", margin, n,
                )

    # (A3) + range of the weights along the whole scanned prefix
    for n in range(scan_to + 1):
        a, b = schedule.alpha(n), schedule.beta_seq(n)
        if not (0.0 <= a <= b <= 1.0):
            return failed_report(
                name,
                f"weight ordering violated at n={n}: alpha={a:.6g}, beta={b:.6g}",
                steps=n,
            )

    # (A2): partial sums of the weight products reach n by the witness index
    max_theta = max(theta_vals, default=0)
    partial = 0.0
    sums = [0.0] * (max_theta + 2)
    for i in range(max_theta + 1):
        partial += schedule.weight_product(i)
        sums[i + 1] = partial
    for n, tv in enumerate(theta_vals):
        margin = sums[tv + 1] - n
        worst = min(worst, margin)
        if margin < 0:
            return failed_report(
                name, f"(A2) violated at n={n}: sum up to {tv} is {sums[tv + 1]:.6g} < {n}",
                margin, tv,
            )

    return passed_report(name, worst, scan_to)
