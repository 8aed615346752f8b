"""Outcome records shared by every certification and verification routine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CertReport:
    """Result of one empirical check.

    `worst_margin` is the minimum of (rhs - lhs) over everything tested, so a
    passing check always has worst_margin >= -tolerance.  `witness` and
    `bound` (a decimal string or a saturation token) are filled in by the
    witness-vs-bound comparisons only.
    """

    name: str
    outcome: str
    detail: str = ""
    worst_margin: float = float("inf")
    samples_or_steps: int = 0
    witness: Optional[int] = None
    bound: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.outcome == PASS

    @property
    def failed(self) -> bool:
        return self.outcome == FAIL

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "outcome": self.outcome,
            "detail": self.detail,
            "worst_margin": None if self.worst_margin == float("inf") else float(self.worst_margin),
            "samples_or_steps": int(self.samples_or_steps),
            "witness": self.witness,
            "bound": self.bound,
        }


def passed_report(name, margin=float("inf"), steps=0, witness=None, bound=None, detail=""):
    return CertReport(name, PASS, detail, margin, steps, witness, bound)


def failed_report(name, detail, margin=float("inf"), steps=0, witness=None, bound=None):
    return CertReport(name, FAIL, detail, margin, steps, witness, bound)


def inconclusive_report(name, reason, steps=0, witness=None, bound=None):
    return CertReport(name, INCONCLUSIVE, reason, float("inf"), steps, witness, bound)
