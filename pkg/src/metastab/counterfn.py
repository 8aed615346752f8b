"""A small closed DSL of total functions ℕ -> ℕ.

These are the counterfunctions quantified over in metastability statements
and the divergence-rate witnesses of weight schedules.  Every term can be

  * evaluated at an exact or saturated argument, yielding a `BoundNat`
    (monotone nodes propagate saturation rigorously: an argument known to be
    >= tau maps to a result known to be >= tau, or to an exact value when
    the node is eventually constant);
  * majorized: `majorant(f)` is a term for a function that is pointwise >= f
    and nondecreasing, exact (= the running maximum of f) for every surface
    form, and a sound upper envelope for nested compositions.

Surface syntax: const(c), id, affine(a,b), pow(b), table(v1,...,vn),
shift(g,K).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .bignat import DEFAULT_TAU, BoundNat, sat_pow


class CounterfunctionError(ValueError):
    """Malformed DSL term or surface expression."""


def _as_bound(n, tau: int) -> BoundNat:
    if isinstance(n, BoundNat):
        if n.tau != tau:
            raise ValueError("mixing saturation thresholds")
        return n
    if isinstance(n, int):
        if n < 0:
            raise CounterfunctionError("counterfunction arguments are naturals")
        return BoundNat.exact(n, tau)
    raise TypeError(f"expected int or BoundNat, got {type(n).__name__}")


class Counterfunction:
    """Base class; concrete terms implement evaluate/majorant/is_monotone."""

    def evaluate(self, n, tau: int = DEFAULT_TAU) -> BoundNat:
        raise NotImplementedError

    def majorant(self) -> "Counterfunction":
        raise NotImplementedError

    def is_monotone(self) -> bool:
        raise NotImplementedError

    def __call__(self, n, tau: int = DEFAULT_TAU) -> BoundNat:
        return self.evaluate(n, tau)


@dataclass(frozen=True)
class Const(Counterfunction):
    c: int

    def __post_init__(self):
        if self.c < 0:
            raise CounterfunctionError("const value must be a natural")

    def evaluate(self, n, tau=DEFAULT_TAU):
        _as_bound(n, tau)
        return BoundNat.exact(self.c, tau)

    def majorant(self):
        return self

    def is_monotone(self):
        return True

    def __str__(self):
        return f"const({self.c})"


@dataclass(frozen=True)
class Identity(Counterfunction):
    def evaluate(self, n, tau=DEFAULT_TAU):
        return _as_bound(n, tau)

    def majorant(self):
        return self

    def is_monotone(self):
        return True

    def __str__(self):
        return "id"


@dataclass(frozen=True)
class Affine(Counterfunction):
    """n -> a*n + b with natural coefficients."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise CounterfunctionError("affine coefficients must be naturals")

    def evaluate(self, n, tau=DEFAULT_TAU):
        return _as_bound(n, tau) * self.a + self.b

    def majorant(self):
        return self

    def is_monotone(self):
        return True

    def __str__(self):
        return f"affine({self.a},{self.b})"


@dataclass(frozen=True)
class Power(Counterfunction):
    """n -> base**n."""

    base: int

    def __post_init__(self):
        if self.base < 0:
            raise CounterfunctionError("power base must be a natural")

    def evaluate(self, n, tau=DEFAULT_TAU):
        return sat_pow(self.base, _as_bound(n, tau), tau)

    def majorant(self):
        # base 0 gives 1, 0, 0, ... whose running maximum is constantly 1
        return self if self.base >= 1 else Const(1)

    def is_monotone(self):
        return self.base >= 1

    def __str__(self):
        return f"pow({self.base})"


@dataclass(frozen=True)
class Table(Counterfunction):
    """Finite lookup table; arguments past the end read the last entry."""

    values: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if not vals:
            raise CounterfunctionError("table needs at least one value")
        if any(v < 0 for v in vals):
            raise CounterfunctionError("table entries must be naturals")
        object.__setattr__(self, "values", vals)

    def evaluate(self, n, tau=DEFAULT_TAU):
        nb = _as_bound(n, tau)
        if nb.is_huge or nb.value >= len(self.values):
            return BoundNat.exact(self.values[-1], tau)
        return BoundNat.exact(self.values[nb.value], tau)

    def majorant(self):
        running, out = 0, []
        for v in self.values:
            running = max(running, v)
            out.append(running)
        return Table(tuple(out))

    def is_monotone(self):
        return all(a <= b for a, b in zip(self.values, self.values[1:]))

    def __str__(self):
        return f"table({','.join(map(str, self.values))})"


@dataclass(frozen=True)
class Shift(Counterfunction):
    """n -> inner(offset + n)."""

    inner: Counterfunction
    offset: int

    def __post_init__(self):
        if self.offset < 0:
            raise CounterfunctionError("shift offset must be a natural")

    def evaluate(self, n, tau=DEFAULT_TAU):
        return self.inner.evaluate(_as_bound(n, tau) + self.offset, tau)

    def majorant(self):
        # the running max of n -> g(K+n) scans only [K, K+n]; majorizing g
        # first gives the exact value for monotone g and a sound envelope
        # otherwise (non-monotone inner terms are normalized away by shift())
        return shift(self.inner.majorant(), self.offset)

    def is_monotone(self):
        return self.inner.is_monotone()

    def __str__(self):
        return f"shift({self.inner},{self.offset})"


@dataclass(frozen=True)
class Compose(Counterfunction):
    """n -> outer(inner(n))."""

    outer: Counterfunction
    inner: Counterfunction

    def evaluate(self, n, tau=DEFAULT_TAU):
        return self.outer.evaluate(self.inner.evaluate(_as_bound(n, tau), tau), tau)

    def majorant(self):
        return Compose(self.outer.majorant(), self.inner.majorant())

    def is_monotone(self):
        return self.outer.is_monotone() and self.inner.is_monotone()

    def __str__(self):
        return f"compose({self.outer},{self.inner})"


def shift(g: Counterfunction, offset: int) -> Counterfunction:
    """Shift constructor with exactness-preserving normalization."""
    if offset < 0:
        raise CounterfunctionError("shift offset must be a natural")
    if offset == 0 or isinstance(g, Const):
        return g
    if isinstance(g, Identity):
        return Affine(1, offset)
    if isinstance(g, Affine):
        return Affine(g.a, g.a * offset + g.b)
    if isinstance(g, Table):
        rest = g.values[offset:] if offset < len(g.values) else g.values[-1:]
        return Table(rest)
    if isinstance(g, Shift):
        return shift(g.inner, g.offset + offset)
    return Shift(g, offset)


def majorant(g: Counterfunction) -> Counterfunction:
    """Term computing the running maximum envelope of g (>= g, nondecreasing)."""
    return g.majorant()


# ---------------------------------------------------------------------------
# surface syntax

_TOKEN = re.compile(r"\s*([a-z]+|\d+|[(),])")


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise CounterfunctionError(f"bad counterfunction syntax near {text[pos:pos + 12]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_counterfunction(text: str) -> Counterfunction:
    """Parse the surface syntax: const(c) | id | affine(a,b) | pow(b) | table(...) | shift(g,K)."""
    tokens = _tokenize(text)
    pos = 0

    def expect(tok):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != tok:
            got = tokens[pos] if pos < len(tokens) else "end of input"
            raise CounterfunctionError(f"expected {tok!r}, got {got!r}")
        pos += 1

    def number() -> int:
        nonlocal pos
        if pos >= len(tokens) or not tokens[pos].isdigit():
            got = tokens[pos] if pos < len(tokens) else "end of input"
            raise CounterfunctionError(f"expected a natural number, got {got!r}")
        pos += 1
        return int(tokens[pos - 1])

    def expr() -> Counterfunction:
        nonlocal pos
        if pos >= len(tokens):
            raise CounterfunctionError("empty counterfunction expression")
        head = tokens[pos]
        pos += 1
        if head == "id":
            return Identity()
        if head == "const":
            expect("(")
            c = number()
            expect(")")
            return Const(c)
        if head == "affine":
            expect("(")
            a = number()
            expect(",")
            b = number()
            expect(")")
            return Affine(a, b)
        if head == "pow":
            expect("(")
            b = number()
            expect(")")
            return Power(b)
        if head == "table":
            expect("(")
            vals = [number()]
            while pos < len(tokens) and tokens[pos] == ",":
                pos += 1
                vals.append(number())
            expect(")")
            return Table(tuple(vals))
        if head == "shift":
            expect("(")
            g = expr()
            expect(",")
            k = number()
            expect(")")
            return shift(g, k)
        raise CounterfunctionError(f"unknown counterfunction form {head!r}")

    result = expr()
    if pos != len(tokens):
        raise CounterfunctionError(f"trailing input after expression: {' '.join(tokens[pos:])!r}")
    return result
