"""Gallery of Lipschitz pseudo-contractions and sampling-based certification.

An operator T: C -> C is a pseudo-contraction when

    ||Tx - Ty||^2 <= ||x - y||^2 + ||(x - Tx) - (y - Ty)||^2,

equivalently when Id - T is monotone.  A kappa-strict pseudo-contraction
(0 <= kappa < 1) puts the factor kappa on the second term and is Lipschitz
with constant (1 + kappa)/(1 - kappa); nonexpansive maps are the kappa = 0
case.  Certification here is empirical: inequalities are tested on sampled
pairs with an additive slack, and failure is a report outcome, not an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import AmbientSet, Ball, Box, ContractViolation, norm, point
from .report import CertReport, failed_report, passed_report

TAG_PSEUDO_CONTRACTION = "pseudo-contraction"
TAG_NONEXPANSIVE = "nonexpansive"
TAG_STRICT = "strict-pseudo-contraction"

DEFAULT_DOMAIN_TOL = 1e-9
DEFAULT_FIXED_POINT_TOL = 1e-12


class DomainViolation(ValueError):
    """A point handed to an operator lies outside its domain."""


@dataclass(frozen=True)
class OperatorSpec:
    """A self-map of an ambient set with certified metadata.

    `map` must accept both a single point of shape (d,) and a batch of shape
    (n, d), returning the same shape.  `lipschitz_L` is the constant the
    operator claims; `check_lipschitz` tests the claim.
    """

    name: str
    map: Callable[[np.ndarray], np.ndarray]
    domain: AmbientSet
    lipschitz_L: float
    tags: frozenset = frozenset()
    strict_kappa: float | None = None
    known_fixed_points: tuple = ()
    domain_tol: float = DEFAULT_DOMAIN_TOL

    def __post_init__(self):
        if self.lipschitz_L <= 0:
            raise ContractViolation("a Lipschitz constant must be positive")
        if self.strict_kappa is not None and not 0.0 <= self.strict_kappa < 1.0:
            raise ContractViolation("strictness constant must lie in [0, 1)")
        object.__setattr__(
            self, "known_fixed_points", tuple(point(p) for p in self.known_fixed_points)
        )


def apply(op: OperatorSpec, x: np.ndarray) -> np.ndarray:
    """Image Tx, with the domain membership of x checked first."""
    if not op.domain.contains(x, op.domain_tol):
        raise DomainViolation(f"{op.name}: point {x.tolist()} is outside the domain")
    return np.asarray(op.map(x), dtype=float)


def apply_batch(op: OperatorSpec, xs: np.ndarray) -> np.ndarray:
    """Vectorized image of an (n, d) batch; domain membership is not rechecked."""
    return np.asarray(op.map(xs), dtype=float)


def residual(op: OperatorSpec, x: np.ndarray) -> float:
    """Fixed-point residual ||x - Tx||."""
    return norm(x - apply(op, x))


def residual_sum(op: OperatorSpec, y: np.ndarray, w: np.ndarray) -> float:
    """The pairing ||w - Tw|| + ||y - Tw|| used in the approximate-descent slack terms."""
    tw = apply(op, w)
    return norm(w - tw) + norm(y - tw)


def strict_pc_lipschitz(kappa: float) -> float:
    """Lipschitz constant (1 + kappa)/(1 - kappa) valid for a kappa-strict pseudo-contraction."""
    if not 0.0 <= kappa < 1.0:
        raise ContractViolation(f"strictness constant must lie in [0, 1), got {kappa}")
    return (1.0 + kappa) / (1.0 - kappa)


def _sample_pairs(op: OperatorSpec, n_samples: int, seed: int):
    if n_samples < 1:
        raise ContractViolation("need at least one sample pair")
    rng = np.random.default_rng(seed)
    return op.domain.sample(rng, n_samples), op.domain.sample(rng, n_samples)


def _sq_norms(v: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", v, v)


def check_pseudocontraction(
    op: OperatorSpec, n_samples: int = 10_000, tol: float = 1e-9, seed: int = 0,
    kappa: float | None = None,
) -> CertReport:
    """Test ||Tx-Ty||^2 <= ||x-y||^2 + kappa*||(x-Tx)-(y-Ty)||^2 on sampled pairs.

    kappa defaults to 1 (plain pseudo-contraction); pass the operator's
    strictness constant to test the strict inequality instead.
    """
    kappa = 1.0 if kappa is None else kappa
    x, y = _sample_pairs(op, n_samples, seed)
    tx, ty = apply_batch(op, x), apply_batch(op, y)
    margin = _sq_norms(x - y) + kappa * _sq_norms((x - tx) - (y - ty)) - _sq_norms(tx - ty)
    worst = float(margin.min())
    name = f"pseudocontraction[{op.name},kappa={kappa:g}]"
    if worst >= -tol:
        return passed_report(name, worst, n_samples)
    return failed_report(name, f"violated by {-worst:.3e} on a sampled pair", worst, n_samples)


def check_lipschitz(
    op: OperatorSpec, n_samples: int = 10_000, tol: float = 1e-9, seed: int = 0,
    claimed_L: float | None = None,
) -> CertReport:
    """Test ||Tx-Ty|| <= L*||x-y|| + tol on sampled pairs and estimate sup ratio."""
    L = op.lipschitz_L if claimed_L is None else claimed_L
    x, y = _sample_pairs(op, n_samples, seed)
    d = np.linalg.norm(x - y, axis=1)
    dt = np.linalg.norm(apply_batch(op, x) - apply_batch(op, y), axis=1)
    worst = float((L * d - dt).min())
    mask = d > 1e-12
    l_est = float((dt[mask] / d[mask]).max()) if mask.any() else 0.0
    name = f"lipschitz[{op.name},L={L:g}]"
    detail = f"L_est={l_est:.6g}"
    if worst >= -tol:
        return passed_report(name, worst, n_samples, detail=detail)
    return failed_report(name, f"ratio up to {l_est:.6g} exceeds claimed {L:g}; {detail}", worst, n_samples)


def check_self_map(op: OperatorSpec, n_samples: int = 10_000, seed: int = 0) -> CertReport:
    """Test that T maps sampled points of the domain back into the domain."""
    rng = np.random.default_rng(seed)
    xs = op.domain.sample(rng, n_samples)
    images = apply_batch(op, xs)
    bad = sum(not op.domain.contains(img, op.domain_tol) for img in images)
    name = f"self-map[{op.name}]"
    if bad == 0:
        return passed_report(name, 0.0, n_samples)
    return failed_report(name, f"{bad} of {n_samples} images escaped the domain", float(-bad), n_samples)


# ---------------------------------------------------------------------------
# gallery

def _rotation_matrix(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def gallery() -> list[OperatorSpec]:
    """Concrete certified operators addressable by name."""
    rot = _rotation_matrix(math.pi / 3.0)
    pc = frozenset({TAG_PSEUDO_CONTRACTION})
    pc_ne = frozenset({TAG_PSEUDO_CONTRACTION, TAG_NONEXPANSIVE})
    pc_strict = frozenset({TAG_PSEUDO_CONTRACTION, TAG_STRICT})
    return [
        OperatorSpec(
            name="negation",
            map=lambda x: -x,
            domain=Ball(point(0.0, 0.0), 1.0),
            lipschitz_L=1.0,
            tags=pc_ne,
            known_fixed_points=(point(0.0, 0.0),),
        ),
        OperatorSpec(
            name="rotation-pi3",
            map=lambda x: x @ rot.T,
            domain=Ball(point(0.0, 0.0), 1.0),
            lipschitz_L=1.0,
            tags=pc_ne,
            known_fixed_points=(point(0.0, 0.0),),
        ),
        OperatorSpec(
            # Id - T is x -> x^3, monotone on [-1, 1]; sup |1 - 3x^2| = 2 there
            name="cubic",
            map=lambda x: x - x**3,
            domain=Box(point(-1.0), point(1.0)),
            lipschitz_L=2.0,
            tags=pc,
            known_fixed_points=(point(0.0),),
        ),
        OperatorSpec(
            # slopes of -(x + x^3)/2 on [-1, 1] fill [-2, -1/2] subset [-2, 1],
            # which is exactly the 1/3-strict slope condition (s+2)(s-1) <= 0
            name="strict-k13",
            map=lambda x: -(x + x**3) / 2.0,
            domain=Box(point(-1.0), point(1.0)),
            lipschitz_L=strict_pc_lipschitz(1.0 / 3.0),
            tags=pc_strict,
            strict_kappa=1.0 / 3.0,
            known_fixed_points=(point(0.0),),
        ),
        OperatorSpec(
            name="identity",
            map=lambda x: np.array(x, dtype=float, copy=True),
            domain=Box(point(0.0), point(1.0)),
            lipschitz_L=1.0,
            tags=pc_ne,
            known_fixed_points=(point(0.0), point(0.5), point(1.0)),
        ),
    ]


def gallery_by_name() -> dict[str, OperatorSpec]:
    return {op.name: op for op in gallery()}


def get_operator(name: str) -> OperatorSpec:
    ops = gallery_by_name()
    if name not in ops:
        raise KeyError(f"unknown operator {name!r}; available: {sorted(ops)}")
    return ops[name]
