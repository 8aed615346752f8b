"""Effective moduli for the Ishikawa iteration, in exact saturating arithmetic.

Inputs are: an integer bound b on the diameter of the ambient set, a positive
rational Lipschitz constant L, a rate of convergence `rate_beta` for the
second weight sequence, a divergence-rate term `theta` for the series of
weight products, and a grid modulus of total boundedness `gamma`.  Outputs
are natural numbers (as `BoundNat`, so astronomically large values saturate
to a ">= tau" token instead of being materialized):

  * a modulus of liminf for the residuals ||x_n - Tx_n||, plus the shifted,
    square-root-schedule, and successive-difference variants and the
    approximate-fixed-point bounds derived from it;
  * uniform closedness moduli for the fixed-point set and the residual
    threshold modulus for uniform quadratic Fejer descent;
  * rates of metastability (plain and combined-with-residuals), computed by
    the finite recursions these rates are defined through, and the
    square-root-schedule specialization with an explicit 4**(...) step.

Square roots and ceilings of rationals are computed on exact integers; no
floating point enters any bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .bignat import DEFAULT_TAU, BoundNat, ceil_sqrt_int, sat_pow
from .counterfn import Counterfunction, majorant, shift


def lipschitz_fraction(L) -> Fraction:
    """Exact rational form of a Lipschitz constant (floats get denominator 10**6)."""
    if isinstance(L, Fraction):
        fr = L
    elif isinstance(L, int):
        fr = Fraction(L)
    elif isinstance(L, float):
        fr = Fraction(round(L * 10**6), 10**6)
    else:
        raise TypeError(f"Lipschitz constant must be rational, got {type(L).__name__}")
    if fr <= 0:
        raise ValueError(f"Lipschitz constant must be positive, got {fr}")
    return fr


def ceil_fraction(fr: Fraction) -> int:
    return -((-fr.numerator) // fr.denominator)


def half_descent_index(L) -> int:
    """ceil(1 + sqrt(2L^2 + 4)), exactly.

    Feeding this index to a rate of convergence for (beta_n) yields the step
    from which 1 - 2*beta_n - L^2*beta_n^2 >= 1/2.
    """
    fr = lipschitz_fraction(L)
    p, q = fr.numerator, fr.denominator
    # sqrt(2L^2+4) = sqrt(2p^2+4q^2)/q; smallest integer m with m*q >= sqrt(N)
    root = ceil_sqrt_int(2 * p * p + 4 * q * q)
    return 1 + -(-root // q)


def shift_index(L, rate_beta: Callable[[int], int]) -> int:
    """The trajectory shift K = rate_beta(ceil(1 + sqrt(2L^2 + 4)))."""
    return int(rate_beta(half_descent_index(L)))


def descent_budget(b: int, k: int) -> int:
    """M = 2(b^2+1)(k+1)^2, the weight-product mass that forces a residual <= 1/(k+1)."""
    return 2 * (b * b + 1) * (k + 1) ** 2


def liminf_modulus_shifted(
    b: int, theta: Counterfunction, l: int, k: int, tau: int = DEFAULT_TAU
) -> BoundNat:
    """theta(l + M): some N in [l, ...] on the shifted trajectory has residual <= 1/(k+1)."""
    return theta.evaluate(l + descent_budget(b, k), tau)


def liminf_modulus(
    b: int, theta: Counterfunction, l: int, k: int, shift_k: int, tau: int = DEFAULT_TAU
) -> BoundNat:
    """shift + theta(l + M), the liminf modulus for the unshifted trajectory."""
    return liminf_modulus_shifted(b, theta, l, k, tau) + shift_k


@dataclass(frozen=True)
class AfpBounds:
    """Approximate-fixed-point bounds: first index with residual <= 1/(k+1).

    `shifted` bounds the shifted trajectory, `original` the unshifted one,
    and `monotone` is the nondecreasing variant (through the majorant of
    theta) used inside the metastability recursions.
    """

    shifted: Callable[[int], BoundNat]
    original: Callable[[int], BoundNat]
    monotone: Callable[[int], BoundNat]


def afp_bounds(b: int, theta: Counterfunction, shift_k: int, tau: int = DEFAULT_TAU) -> AfpBounds:
    theta_m = majorant(theta)

    def shifted(k: int) -> BoundNat:
        return theta.evaluate(descent_budget(b, k), tau)

    def original(k: int) -> BoundNat:
        return shifted(k) + shift_k

    def monotone(k: int) -> BoundNat:
        return theta_m.evaluate(descent_budget(b, k), tau)

    return AfpBounds(shifted, original, monotone)


def liminf_modulus_sqrt_schedule(b: int, L, l: int, k: int, tau: int = DEFAULT_TAU) -> BoundNat:
    """Closed form for weights 1/sqrt(n+1): (ceil(1+sqrt(2L^2+4))+1)^2 + 4^(l+M)."""
    j = half_descent_index(L)
    return sat_pow(4, l + descent_budget(b, k), tau) + (j + 1) ** 2


def liminf_modulus_successive(
    b: int,
    L,
    rate_beta: Callable[[int], int],
    theta: Counterfunction,
    l: int,
    k: int,
    tau: int = DEFAULT_TAU,
) -> BoundNat:
    """Liminf modulus for the step gaps ||x_n - x_{n+1}||: the residual modulus
    at the inflated precision index k' = ceil((1+L)(1+k))."""
    k_prime = ceil_fraction((1 + lipschitz_fraction(L)) * (1 + k))
    return liminf_modulus(b, theta, l, k_prime, shift_index(L, rate_beta), tau)


@dataclass(frozen=True)
class ClosednessModuli:
    """Uniform closedness of the fixed-point set: residual threshold delta and
    proximity threshold omega such that ||q-Tq|| <= 1/(delta(k)+1) and
    ||p-q|| <= 1/(omega(k)+1) force ||p-Tp|| <= 1/(k+1)."""

    omega: Callable[[int], int]
    delta: Callable[[int], int]


def closedness_moduli(L) -> ClosednessModuli:
    ceil_l = ceil_fraction(lipschitz_fraction(L))
    return ClosednessModuli(
        omega=lambda k: ceil_l * (4 * k + 4),
        delta=lambda k: 2 * k + 1,
    )


def uniform_fejer_modulus(b: int, n: int, m: int, r: int) -> int:
    """8*b*m*(r+1): residual threshold index under which quadratic Fejer descent
    holds over a window of length m with error 1/(r+1).  Independent of n."""
    return 8 * b * m * (r + 1)


class SquareFejerProfile:
    """Gap functions G(a) = H(a) = a^2 with their moduli."""

    @staticmethod
    def apply(a: float) -> float:
        return a * a

    @staticmethod
    def g_modulus(k: int) -> int:
        # a <= 1/(ceil(sqrt(k))+1)  implies  a^2 <= 1/(k+1)
        return ceil_sqrt_int(k)

    @staticmethod
    def h_modulus(k: int) -> int:
        # a^2 <= 1/((k+1)^2+1)  implies  a <= 1/(k+1)
        return (k + 1) ** 2


# ---------------------------------------------------------------------------
# metastability rates

@dataclass(frozen=True)
class MetastabilityConstants:
    """Shared constants of the metastability recursions.

    shift: trajectory shift K;  rounds: iteration count of the plain
    recursion;  combined_index: the inflated precision index k0 used by the
    combined variant;  combined_rounds: its iteration count.
    """

    shift: int
    rounds: int
    combined_index: int
    combined_rounds: int


def metastability_constants(
    b: int, L, rate_beta: Callable[[int], int], gamma: Callable[[int], int], k: int
) -> MetastabilityConstants:
    ceil_l = ceil_fraction(lipschitz_fraction(L))
    k0 = -(-(ceil_l * (4 * k + 4) - 1) // 2)
    return MetastabilityConstants(
        shift=shift_index(L, rate_beta),
        rounds=int(gamma(ceil_sqrt_int(8 * k * k + 16 * k + 9))),
        combined_index=k0,
        combined_rounds=int(gamma(ceil_sqrt_int(8 * k0 * k0 + 16 * k0 + 9))),
    )


def _run_recursion(
    theta_m: Counterfunction,
    b: int,
    coef_index: int,
    g_m: Counterfunction,
    rounds: int,
    floor_term: int | None,
    tau: int,
) -> BoundNat:
    """Iterate s -> theta^M(2(b^2+1)(max{floor, 8b(8c^2+16c+10) g^M(s)} + 1)^2).

    With floor_term None the max is dropped (plain variant); c is coef_index.
    Starts from 0 and runs a fixed number of rounds.
    """
    coef = 8 * b * (8 * coef_index * coef_index + 16 * coef_index + 10)
    outer = 2 * (b * b + 1)
    s = BoundNat.exact(0, tau)
    for _ in range(rounds):
        inner = g_m.evaluate(s, tau) * coef
        if floor_term is not None:
            inner = inner.max_with(floor_term)
        s = theta_m.evaluate((inner + 1).squared() * outer, tau)
    return s


def metastability_bound(
    b: int,
    theta: Counterfunction,
    gamma: Callable[[int], int],
    rate_beta: Callable[[int], int],
    L,
    k: int,
    g: Counterfunction,
    tau: int = DEFAULT_TAU,
) -> BoundNat:
    """Rate of metastability: bound on the first N with all pairs of
    trajectory points in [N, N + g(N)] within 1/(k+1)."""
    consts = metastability_constants(b, L, rate_beta, gamma, k)
    h_m = majorant(shift(g, consts.shift))
    s = _run_recursion(majorant(theta), b, k, h_m, consts.rounds, None, tau)
    return s + consts.shift


def combined_metastability_bound(
    b: int,
    theta: Counterfunction,
    gamma: Callable[[int], int],
    rate_beta: Callable[[int], int],
    L,
    k: int,
    g: Counterfunction,
    tau: int = DEFAULT_TAU,
) -> BoundNat:
    """Bound on the first N whose window [N, N + g(N)] has all pairs within
    1/(k+1) and every residual <= 1/(k+1)."""
    consts = metastability_constants(b, L, rate_beta, gamma, k)
    h_m = majorant(shift(g, consts.shift))
    s = _run_recursion(
        majorant(theta), b, consts.combined_index, h_m,
        consts.combined_rounds, 2 * k + 1, tau,
    )
    return s + consts.shift


def combined_bound_sqrt_schedule(
    b: int,
    gamma: Callable[[int], int],
    L,
    k: int,
    g: Counterfunction,
    tau: int = DEFAULT_TAU,
    shift_override: int | None = None,
) -> BoundNat:
    """Combined metastability bound specialized to weights 1/sqrt(n+1).

    The recursion step is the explicit 4**(2(b^2+1)(max{2k+1, ...}+1)^2) and
    the additive constant is K0 = (ceil(1+sqrt(2L^2+4))+1)^2, which equals
    the shift produced by the square-schedule convergence rate (k+1)^2, so
    the counterfunction shift defaults to K0; `shift_override` evaluates the
    alternative reading.
    """
    k0_shift = (half_descent_index(L) + 1) ** 2
    used_shift = k0_shift if shift_override is None else shift_override
    consts = metastability_constants(b, L, lambda j: (j + 1) ** 2, gamma, k)
    h_m = majorant(shift(g, used_shift))
    coef = 8 * b * (
        8 * consts.combined_index**2 + 16 * consts.combined_index + 10
    )
    outer = 2 * (b * b + 1)
    s = BoundNat.exact(0, tau)
    for _ in range(consts.combined_rounds):
        inner = (h_m.evaluate(s, tau) * coef).max_with(2 * k + 1)
        s = sat_pow(4, (inner + 1).squared() * outer, tau)
    return s + k0_shift
