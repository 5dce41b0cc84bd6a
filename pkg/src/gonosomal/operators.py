"""The hemophilia operator W, general cross-table operators and the reduced map F."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    DegenerateSex,
    DomainViolation,
    OperatorOverflow,
    PopulationState,
    RawState4,
    ReducedState,
    THETA_FLOOR,
    ZeroDenominator,
    format_scalar,
    validate_population,
)

OVERFLOW_LIMIT = 1e300
ROW_SUM_TOL = 1e-12

XX, XXH, XY, XHY = "XX", "XXh", "XY", "XhY"


class Mode(enum.Enum):
    NORMALIZED = "normalized"
    UNNORMALIZED = "unnormalized"


@dataclass(frozen=True)
class CrossTable:
    """Offspring distribution for every (female genotype, male genotype) cross.

    ``rows[(f, m)]`` maps offspring labels (drawn from ``female_types +
    male_types``) to probabilities. Missing labels mean probability zero.
    """

    female_types: tuple
    male_types: tuple
    rows: Mapping

    def __post_init__(self):
        object.__setattr__(self, "female_types", tuple(self.female_types))
        object.__setattr__(self, "male_types", tuple(self.male_types))
        labels = self.female_types + self.male_types
        if len(set(labels)) != len(labels):
            raise ValueError("genotype labels must be unique across both sexes")
        rows = {}
        for f in self.female_types:
            for m in self.male_types:
                if (f, m) not in self.rows:
                    raise ValueError(f"missing cross row ({f}, {m})")
                dist = dict(self.rows[(f, m)])
                for label, p in dist.items():
                    if label not in labels:
                        raise ValueError(f"unknown offspring genotype {label!r} in ({f}, {m})")
                    if p < 0:
                        raise ValueError(f"negative probability in ({f}, {m}) -> {label}")
                total = sum(dist.values())
                exact = all(isinstance(p, (int, Fraction)) for p in dist.values())
                if (total != 1) if exact else abs(total - 1) > ROW_SUM_TOL:
                    raise ValueError(f"row ({f}, {m}) sums to {total}, not 1")
                rows[(f, m)] = dist
        extra = set(self.rows) - set(rows)
        if extra:
            raise ValueError(f"rows for unknown crosses: {sorted(extra)}")
        object.__setattr__(self, "rows", rows)

    @property
    def labels(self) -> tuple:
        return self.female_types + self.male_types

    def coefficient(self, female: str, male: str, child: str):
        return self.rows[(female, male)].get(child, 0)

    def to_dict(self) -> dict:
        return {
            "female_types": list(self.female_types),
            "male_types": list(self.male_types),
            "crosses": [
                {
                    "female": f,
                    "male": m,
                    "offspring": {k: _prob_text(p) for k, p in self.rows[(f, m)].items()},
                }
                for f in self.female_types
                for m in self.male_types
            ],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "CrossTable":
        rows = {}
        for cross in doc["crosses"]:
            key = (cross["female"], cross["male"])
            if key in rows:
                raise ValueError(f"duplicate cross row {key}")
            rows[key] = {k: _parse_prob(p) for k, p in cross["offspring"].items()}
        return cls(doc["female_types"], doc["male_types"], rows)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "CrossTable":
        return cls.from_dict(json.loads(text))


def _prob_text(p) -> str:
    if isinstance(p, (int, Fraction)):
        return format_scalar(Fraction(p))
    return repr(float(p))


def _parse_prob(text) -> Fraction:
    # decimals are read as exact decimal fractions, so "0.25" is 1/4
    if isinstance(text, (int, float)):
        text = repr(text) if isinstance(text, float) else str(text)
    return Fraction(str(text).strip())


def hemophilia_cross_table() -> CrossTable:
    """The four crosses of X-linked hemophilia (XhXh is lethal)."""
    h = Fraction(1, 2)
    q = Fraction(1, 4)
    t = Fraction(1, 3)
    return CrossTable(
        (XX, XXH),
        (XY, XHY),
        {
            (XX, XY): {XX: h, XY: h},
            (XX, XHY): {XXH: h, XY: h},
            (XXH, XY): {XX: q, XXH: q, XY: q, XHY: q},
            (XXH, XHY): {XXH: t, XY: t, XHY: t},
        },
    )


@dataclass(frozen=True)
class GonosomalOperator:
    table: CrossTable
    mode: Mode = Mode.NORMALIZED
    _terms: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.table.female_types)
        index = {label: k for k, label in enumerate(self.table.labels)}
        terms = []
        for i, f in enumerate(self.table.female_types):
            for j, m in enumerate(self.table.male_types):
                for child, p in self.table.rows[(f, m)].items():
                    if p:
                        terms.append((i, n + j, index[child], Fraction(p)))
        object.__setattr__(self, "_terms", tuple(terms))

    @property
    def n_female(self) -> int:
        return len(self.table.female_types)

    @property
    def size(self) -> int:
        return len(self.table.labels)

    def numerators(self, coords: Sequence) -> list:
        """Offspring masses sum_{ij} gamma_ijk f_i m_j (no normalisation)."""
        floaty = any(isinstance(c, float) for c in coords)
        out = [0.0 if floaty else Fraction(0)] * self.size
        for i, j, k, p in self._terms:
            out[k] += (float(p) if floaty else p) * coords[i] * coords[j]
        return out

    def step_coords(self, coords: Sequence) -> list:
        """Normalised image of a raw coordinate vector (females first)."""
        n = self.n_female
        females = sum(coords[:n])
        males = sum(coords[n:])
        if isinstance(females, float):
            if females < THETA_FLOOR or males < THETA_FLOOR:
                raise DegenerateSex("state is numerically in Theta")
        elif females == 0 or males == 0:
            raise DegenerateSex("state lies in Theta")
        denom = females * males
        return [c / denom for c in self.numerators(coords)]

    @property
    def is_hemophilia(self) -> bool:
        return self.table == hemophilia_cross_table()

    def float_stepper(self):
        """A fast float map on raw 4-tuples, for long orbits."""
        _check_population_shape(self)
        if self.mode is Mode.NORMALIZED and self.is_hemophilia:
            return w_step
        if self.mode is Mode.NORMALIZED:
            return lambda *c: tuple(self.step_coords([float(v) for v in c]))
        return lambda *c: tuple(self.numerators([float(v) for v in c]))

    def __call__(self, s):
        if self.mode is Mode.UNNORMALIZED:
            return apply_unnormalized(self, s)
        return apply_general(self, s)


def hemophilia_operator(mode: Mode = Mode.NORMALIZED) -> GonosomalOperator:
    return GonosomalOperator(hemophilia_cross_table(), mode)


def _check_population_shape(op: GonosomalOperator):
    if op.n_female != 2 or op.size != 4:
        raise ValueError("PopulationState needs a table with two female and two male genotypes")


def apply_general(op: GonosomalOperator, s: PopulationState) -> PopulationState:
    """Normalised image of ``s`` under the operator built from ``op.table``."""
    if op.mode is not Mode.NORMALIZED:
        raise ValueError("apply_general needs a normalized operator")
    _check_population_shape(op)
    image = op.step_coords(s.as_tuple())
    return validate_population(*image)


def w_step(x, y, u, v) -> tuple:
    """Closed-form hemophilia map on raw coordinates (no validation)."""
    d = (x + y) * (u + v)
    yu = y * u
    yv = y * v
    xv = x * v
    tail = 3 * yu + 4 * yv
    d12 = 12 * d
    return (
        (2 * x * u + yu) / (4 * d),
        (6 * xv + tail) / d12,
        (6 * x * u + 6 * xv + tail) / d12,
        tail / d12,
    )


def apply_W(s: PopulationState) -> PopulationState:
    """One generation of the hemophilia operator."""
    x, y, u, v = s
    females = x + y
    males = u + v
    if isinstance(females, float):
        if females < THETA_FLOOR or males < THETA_FLOOR:
            raise DegenerateSex("state is numerically in Theta")
    elif females == 0 or males == 0:
        raise DegenerateSex("state lies in Theta")
    return validate_population(*w_step(x, y, u, v))


def apply_unnormalized(op: GonosomalOperator, s: RawState4) -> RawState4:
    """Quadratic numerators of the operator, without dividing by (sum f)(sum m)."""
    _check_population_shape(op)
    image = op.numerators(s.as_tuple())
    if any(isinstance(c, float) and (c > OVERFLOW_LIMIT or not math.isfinite(c)) for c in image):
        raise OperatorOverflow("unnormalized image exceeds 1e300")
    return RawState4(*image)


def _check_reduced(r: ReducedState, strict: bool):
    if strict:
        if not r.in_domain():
            raise DomainViolation(f"({r.alpha}, {r.beta}) is outside [0,4] x [0,1]")
    elif r.alpha < 0 or r.beta < 0:
        raise DomainViolation(f"({r.alpha}, {r.beta}) has a negative ratio")


def apply_F(r: ReducedState, strict: bool = True) -> ReducedState:
    """The reduced map on (alpha, beta).

    With ``strict=False`` any nonnegative pair is accepted; the recurrence is
    an identity of the ratio dynamics on the whole positive quadrant.
    """
    _check_reduced(r, strict)
    a, b = r
    ab4 = 4 * a * b
    num_b = 3 * a + ab4
    return ReducedState((6 * b + 3 * a + ab4) / (6 + 3 * a), num_b / (6 + 6 * b + num_b))


def reduce(s: PopulationState) -> ReducedState:
    """Ratios (y/x, v/u). Warm-start with two W steps to guarantee x, u > 0."""
    x, y, u, v = s
    if x == 0 or u == 0:
        raise ZeroDenominator("reduce needs x > 0 and u > 0; apply W twice first")
    return ReducedState(y / x, v / u)


def reconstruct_next(r: ReducedState, strict: bool = True) -> PopulationState:
    """W(s) for any s whose ratios are ``r``.

    The image depends on s only through its ratios, because W is invariant
    under separate rescaling of the female and male blocks.
    """
    _check_reduced(r, strict)
    a, b = r
    scale = (1 + a) * (1 + b)
    x_next = (2 + a) / (4 * scale)
    u_next = (6 + 6 * b + 3 * a + 4 * a * b) / (12 * scale)
    nxt = apply_F(r, strict=False)
    return validate_population(x_next, nxt.alpha * x_next, u_next, nxt.beta * u_next)
