"""Arithmetic modes, state types and validation.

Two arithmetic modes are supported for a whole run: exact rationals
(:class:`fractions.Fraction`) and binary64 floats. A state never mixes the two.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float]

FLOAT_SUM_TOL = 1e-12
THETA_FLOOR = 1e-300


class GonosomalError(Exception):
    """Base class for all errors raised by this package."""


class NegativeComponent(GonosomalError, ValueError):
    pass


class SumOutOfTolerance(GonosomalError, ValueError):
    pass


class DegenerateSex(GonosomalError, ValueError):
    """The point lies in (or numerically on) the set where one sex has zero mass."""


class DomainViolation(GonosomalError, ValueError):
    pass


class ZeroDenominator(GonosomalError, ZeroDivisionError):
    pass


class MixedArithmetic(GonosomalError, TypeError):
    pass


class ExactIterationCapExceeded(GonosomalError, ArithmeticError):
    pass


class OperatorOverflow(GonosomalError, OverflowError):
    pass


class Arith(enum.Enum):
    EXACT = "exact"
    FLOAT = "f64"

    @classmethod
    def parse(cls, name: str) -> "Arith":
        name = name.lower()
        if name in ("exact", "rational", "q"):
            return cls.EXACT
        if name in ("f64", "float", "float64"):
            return cls.FLOAT
        raise ValueError(f"unknown arithmetic mode {name!r}")

    def convert(self, value) -> Scalar:
        """Coerce ``value`` (number or string) into this mode's scalar type.

        Strings may be fractions ``"p/q"`` or decimals. In exact mode decimals
        go through their binary64 value first, so ``"0.1"`` becomes the exact
        rational of the double nearest 0.1.
        """
        if self is Arith.EXACT:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            if isinstance(value, float):
                if not math.isfinite(value):
                    raise ValueError(f"non-finite value {value!r}")
                return Fraction(value)
            text = str(value).strip()
            if "/" in text:
                return Fraction(text)
            return Fraction(float(text))
        if isinstance(value, str):
            out = float(Fraction(value)) if "/" in value else float(value)
        else:
            out = float(value)
        if not math.isfinite(out):
            raise ValueError(f"non-finite value {value!r}")
        return out


def arith_of(*values) -> Arith:
    """Infer the arithmetic mode of a group of scalars; refuses mixtures."""
    kinds = {Arith.FLOAT if isinstance(v, float) else Arith.EXACT for v in values}
    if len(kinds) > 1:
        raise MixedArithmetic("exact and float scalars mixed in one state")
    return kinds.pop() if kinds else Arith.EXACT


def bit_size(value: Scalar) -> int:
    if isinstance(value, float):
        return 64
    return max(int(value.numerator).bit_length(), int(value.denominator).bit_length())


@dataclass(frozen=True)
class PopulationState:
    """Genotype frequencies of XX, XXh (females) and XY, XhY (males)."""

    x: Scalar
    y: Scalar
    u: Scalar
    v: Scalar

    def as_tuple(self) -> tuple:
        return (self.x, self.y, self.u, self.v)

    def __iter__(self):
        return iter(self.as_tuple())

    @property
    def arith(self) -> Arith:
        return arith_of(self.x, self.y, self.u, self.v)

    @property
    def females(self) -> Scalar:
        return self.x + self.y

    @property
    def males(self) -> Scalar:
        return self.u + self.v

    def to(self, arith: Arith) -> "PopulationState":
        if arith is self.arith:
            return self
        comps = [arith.convert(c) for c in self]
        if arith is Arith.EXACT:
            # binary64 components rarely sum to exactly one
            total = sum(comps)
            comps = [c / total for c in comps]
        return validate_population(*comps)

    def bits(self) -> int:
        return max(bit_size(c) for c in self)


@dataclass(frozen=True)
class ReducedState:
    """Ratios alpha = y/x and beta = v/u."""

    alpha: Scalar
    beta: Scalar

    def as_tuple(self) -> tuple:
        return (self.alpha, self.beta)

    def __iter__(self):
        return iter(self.as_tuple())

    def in_domain(self, slack: float = 0.0) -> bool:
        return -slack <= self.alpha <= 4 + slack and -slack <= self.beta <= 1 + slack

    def total(self) -> Scalar:
        return self.alpha + self.beta


@dataclass(frozen=True)
class RawState4:
    """An unconstrained point of the nonnegative orthant of R^4."""

    x: Scalar
    y: Scalar
    u: Scalar
    v: Scalar

    def __post_init__(self):
        for name, c in zip("xyuv", self.as_tuple()):
            if isinstance(c, float) and not math.isfinite(c):
                raise ValueError(f"coordinate {name} is not finite")
            if c < 0:
                raise NegativeComponent(f"coordinate {name} = {c} < 0")

    def as_tuple(self) -> tuple:
        return (self.x, self.y, self.u, self.v)

    def __iter__(self):
        return iter(self.as_tuple())

    def scaled(self, factor) -> "RawState4":
        return RawState4(*(factor * c for c in self))

    def norm(self) -> Scalar:
        return max(self.as_tuple())


S0_EXACT = PopulationState(Fraction(1, 2), Fraction(0), Fraction(1, 2), Fraction(0))
S0_FLOAT = PopulationState(0.5, 0.0, 0.5, 0.0)


def fixed_point(arith: Arith = Arith.EXACT) -> PopulationState:
    """The attracting state (1/2, 0, 1/2, 0)."""
    return S0_EXACT if arith is Arith.EXACT else S0_FLOAT


def validate_population(x, y, u, v, tol: float = FLOAT_SUM_TOL) -> PopulationState:
    """Check membership of S^{2,2} and return the state.

    In float mode a sum within ``tol`` of one is silently renormalised.
    Exact states must sum to one exactly.
    """
    comps = (x, y, u, v)
    arith = arith_of(*comps)
    for name, c in zip("xyuv", comps):
        if isinstance(c, float) and not math.isfinite(c):
            raise ValueError(f"component {name} is not finite: {c!r}")
        if c < 0:
            raise NegativeComponent(f"component {name} = {c} is negative")
    total = x + y + u + v
    if arith is Arith.EXACT:
        if total != 1:
            raise SumOutOfTolerance(f"components sum to {total}, not 1")
        if x + y == 0 or u + v == 0:
            raise DegenerateSex("state lies in Theta: one sex has zero total frequency")
        return PopulationState(x, y, u, v)
    if abs(total - 1.0) > tol:
        raise SumOutOfTolerance(f"components sum to {total!r}; |sum - 1| > {tol}")
    if x + y < THETA_FLOOR or u + v < THETA_FLOOR:
        raise DegenerateSex("state lies in Theta: one sex has zero total frequency")
    if total != 1.0:
        x, y, u, v = x / total, y / total, u / total, v / total
    return PopulationState(float(x), float(y), float(u), float(v))


def normalize(x, y, u, v, arith: Arith = Arith.EXACT) -> PopulationState:
    """Scale four nonnegative numbers onto the simplex and validate."""
    comps = [arith.convert(c) for c in (x, y, u, v)]
    total = sum(comps)
    if total <= 0:
        raise SumOutOfTolerance("cannot normalise a zero vector")
    return validate_population(*(c / total for c in comps))


def parse_state(text: str, arith: Arith) -> PopulationState:
    """Parse ``"x,y,u,v"`` (fractions or decimals) into a validated state.

    Decimal input in exact mode is renormalised by its exact sum, since e.g.
    0.1 + 0.2 + 0.3 + 0.4 is not exactly one after binary conversion.
    """
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 4:
        raise ValueError(f"expected four comma-separated components, got {len(parts)}")
    comps = [arith.convert(p) for p in parts]
    for name, c in zip("xyuv", comps):
        if c < 0:
            raise NegativeComponent(f"component {name} = {c} is negative")
    total = sum(comps)
    if arith is Arith.EXACT:
        if abs(float(total) - 1.0) > 1e-9:
            raise SumOutOfTolerance(f"components sum to {float(total)!r}, not 1")
        if total != 1:
            comps = [c / total for c in comps]
    return validate_population(*comps)


def l1_distance(a: PopulationState, b: PopulationState) -> Scalar:
    return sum(abs(p - q) for p, q in zip(a, b))


def format_scalar(value: Scalar) -> str:
    """Fractions as ``p/q``; floats as the shortest round-trip repr."""
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "denominator"):
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))
