"""Pydantic models for the JSON documents read and written by the CLI."""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path
from typing import Any, Literal, Union

import gmpy2
from pydantic import BaseModel, Field, field_validator, model_validator

from .nascalar import (
    DEFAULT_PRECISION,
    LaurentField,
    PadicField,
    Scalar,
    parse_q,
    parse_scalar,
    rational_str,
    scalar_from_json,
    to_rational,
)
from .nascalar import Field as ScalarField
from .qtorus import QSeries, TwistData


class FieldKind(str, Enum):
    """Coefficient fields."""

    LAURENT = "laurent"
    PADIC = "padic"


def build_field(kind: FieldKind | str, precision: int = DEFAULT_PRECISION, prime: int = 5) -> ScalarField:
    if FieldKind(kind) is FieldKind.LAURENT:
        return LaurentField(precision)
    return PadicField(prime)


def _check_rational(value: Any) -> str:
    try:
        return rational_str(value)
    except (TypeError, ValueError) as e:
        raise ValueError(f"'{value}' is not an exact rational (use \"num/den\")") from e


# -- scalars ------------------------------------------------------------------


class ScalarModel(BaseModel):
    """``{"kind": "laurent", "terms": [[e, "num/den"], ...], "precision": P}`` or
    ``{"kind": "padic", "p": p, "value": "num/den"}``."""

    kind: FieldKind
    terms: list[tuple[int, str]] | None = None
    precision: int | None = Field(default=None, ge=1)
    p: int | None = None
    value: str | None = None

    @model_validator(mode="after")
    def validate_kind(self) -> ScalarModel:
        if self.kind is FieldKind.LAURENT:
            if self.terms is None or self.precision is None:
                raise ValueError("Laurent scalars need 'terms' and 'precision'")
            for _, c in self.terms:
                _check_rational(c)
        else:
            if self.p is None or self.value is None:
                raise ValueError("p-adic scalars need 'p' and 'value'")
            if not gmpy2.is_prime(self.p):
                raise ValueError(f"p = {self.p} is not prime")
            _check_rational(self.value)
        return self

    def to_scalar(self, field: ScalarField | None = None) -> Scalar:
        return scalar_from_json(self.model_dump(mode="json", exclude_none=True), field)

    @classmethod
    def from_scalar(cls, x: Scalar) -> ScalarModel:
        return cls.model_validate(x.to_json())


# A scalar is either a JSON scalar object or a short text ("1+t", "3/2", 6).
ScalarSpec = Union[ScalarModel, str, int]


def read_scalar(spec: ScalarSpec, field: ScalarField) -> Scalar:
    if isinstance(spec, ScalarModel):
        return spec.to_scalar(field)
    return parse_scalar(spec if isinstance(spec, str) else str(spec), field)


# -- series (qna norm) ---------------------------------------------------------


class TwistModel(BaseModel):
    """``{"n": n, "c": [[i, j, c_ij], ...], "q": scalar}`` with 1-based ``i > j``."""

    n: int = Field(ge=1, description="Number of torus generators")
    c: list[tuple[int, int, int]] = Field(default_factory=list)
    q: ScalarSpec = Field(default="1", description="Twist parameter, |q| = 1")

    @field_validator("c")
    @classmethod
    def validate_pairs(cls, v: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
        for i, j, _ in v:
            if not i > j >= 1:
                raise ValueError(f"commutation entry ({i}, {j}) must have i > j >= 1")
        return v

    def to_twist(self, field: ScalarField) -> TwistData:
        q = read_scalar(self.q, field)
        return TwistData(self.n, {(i - 1, j - 1): c for i, j, c in self.c}, q)


class SeriesRequest(BaseModel):
    """Input of ``qna norm``."""

    field: FieldKind = FieldKind.LAURENT
    precision: int = Field(default=DEFAULT_PRECISION, ge=1)
    p: int = Field(default=5, description="Prime for the p-adic field")
    twist: TwistModel
    terms: list[tuple[list[int], ScalarSpec]] = Field(default_factory=list)
    radius: list[str] | None = Field(
        default=None, description="Log-radii, one per generator (default all 0)"
    )

    @field_validator("radius", mode="before")
    @classmethod
    def validate_radius(cls, v: Any) -> list[str] | None:
        if v is None:
            return None
        if isinstance(v, str):
            v = [part for part in v.split(",") if part.strip()]
        return [_check_rational(r) for r in v]

    @model_validator(mode="after")
    def validate_shapes(self) -> SeriesRequest:
        for exponent, _ in self.terms:
            if len(exponent) != self.twist.n:
                raise ValueError(
                    f"exponent {exponent} has length {len(exponent)}, twist rank is {self.twist.n}"
                )
        if self.radius is not None:
            if len(self.radius) != self.twist.n:
                raise ValueError(
                    f"radius has {len(self.radius)} entries, twist rank is {self.twist.n}"
                )
        return self

    def scalar_field(self) -> ScalarField:
        return build_field(self.field, self.precision, self.p)

    def to_series(self) -> QSeries:
        field = self.scalar_field()
        twist = self.twist.to_twist(field)
        return QSeries(twist, [(e, read_scalar(c, field)) for e, c in self.terms])


class NormResponse(BaseModel):
    log_norm: str = Field(description="Rational log-norm or \"-inf\"")
    radius: list[str]
    terms: int = Field(ge=0)


# -- wall diagrams (qna scatter) ---------------------------------------------------


class WallModel(BaseModel):
    """A wall function: a dilogarithm wall or explicit coefficients."""

    type: Literal["dilog", "coeffs"] = "coeffs"
    power: int = Field(default=1, ge=0)
    coeffs: list[tuple[int, int, ScalarSpec]] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_type(self) -> WallModel:
        if self.type == "coeffs" and not self.coeffs:
            raise ValueError("a 'coeffs' wall needs at least one coefficient")
        return self


class LineModel(BaseModel):
    """One line of a wall diagram; ``factor`` coefficients sit on ``z^(-k * covector)``."""

    ident: str | None = None
    base: tuple[str, str]
    covector: tuple[int, int]
    kind: Literal["initial", "composite"] = "initial"
    order: str = "1"
    parents: tuple[str, str] | None = None
    factor: WallModel | None = None

    @field_validator("base", mode="before")
    @classmethod
    def validate_base(cls, v: Any) -> tuple[str, str]:
        if not isinstance(v, (list, tuple)) or len(v) != 2:
            raise ValueError(f"base must be a point [x, y], got {v!r}")
        return (_check_rational(v[0]), _check_rational(v[1]))

    @field_validator("order", mode="before")
    @classmethod
    def validate_order(cls, v: Any) -> str:
        value = _check_rational(v)
        if to_rational(value) <= 0:
            raise ValueError(f"line order must be positive, got {value}")
        return value

    @field_validator("covector")
    @classmethod
    def validate_covector(cls, v: tuple[int, int]) -> tuple[int, int]:
        if math.gcd(*v) != 1:
            raise ValueError(f"covector {list(v)} must be primitive")
        return v

    @model_validator(mode="after")
    def validate_factor(self) -> LineModel:
        if self.kind == "composite" and not self.parents:
            raise ValueError(f"composite line '{self.ident}' needs 'parents'")
        if self.factor is None or self.factor.type != "coeffs":
            return self
        a, b = self.covector
        for e1, e2, _ in self.factor.coeffs:
            k = -e1 // a if a else -e2 // b
            if k < 1 or (e1, e2) != (-k * a, -k * b):
                raise ValueError(
                    f"coefficient exponent ({e1}, {e2}) is not a negative multiple of {list(self.covector)}"
                )
        return self


class DiagramModel(BaseModel):
    """Input and output of ``qna scatter``."""

    field: FieldKind = FieldKind.LAURENT
    precision: int = Field(default=DEFAULT_PRECISION, ge=1)
    p: int = 5
    q: ScalarSpec = "1+t"
    order: int = Field(default=8, ge=0)
    region: tuple[str, str, str, str] | None = None
    walls: WallModel | None = Field(
        default=None, description="Wall used by lines without their own factor"
    )
    lines: list[LineModel] = Field(min_length=1)

    @field_validator("region", mode="before")
    @classmethod
    def validate_region(cls, v: Any) -> tuple[str, str, str, str] | None:
        if v is None:
            return None
        if not isinstance(v, (list, tuple)) or len(v) != 4:
            raise ValueError("region must be [xmin, ymin, xmax, ymax]")
        xmin, ymin, xmax, ymax = (_check_rational(x) for x in v)
        if to_rational(xmin) > to_rational(xmax) or to_rational(ymin) > to_rational(ymax):
            raise ValueError("region must be [xmin, ymin, xmax, ymax] with min <= max")
        return (xmin, ymin, xmax, ymax)

    @model_validator(mode="after")
    def validate_lines(self) -> DiagramModel:
        seen: set[str] = set()
        for i, line in enumerate(self.lines):
            if line.ident is None:
                line.ident = f"L{i + 1}"
            if line.ident in seen:
                raise ValueError(f"duplicate line ident '{line.ident}'")
            seen.add(line.ident)
            if line.factor is None and self.walls is None:
                raise ValueError(f"line '{line.ident}' has no factor and no default 'walls'")
        return self


class DiagramResponse(BaseModel):
    q: ScalarModel
    order: int
    count: int
    lines: list[LineModel]


# -- spectrum (qna spectrum) ---------------------------------------------------


class SpectrumRowModel(BaseModel):
    source: Literal["gauss", "shift"]
    u: str | None = None
    v: str | None = None
    rho: str | None = None
    scale: list[str] | None = None
    stable: bool | None = None
    f: tuple[str, str, str]
    case: Literal["S-", "S0", "S+"] | None
    in_image: bool
    preimage: tuple[str, str] | None


class SpectrumResponse(BaseModel):
    q: ScalarModel
    rows: list[SpectrumRowModel]
    failures: int = Field(ge=0)


# -- quantum GL2 (qna gl2norm) -------------------------------------------------------


class SampleModel(BaseModel):
    c: str
    t: str

    @field_validator("c", "t", mode="before")
    @classmethod
    def validate_rational(cls, v: Any) -> str:
        return _check_rational(v)


class GL2NormRequest(BaseModel):
    """``{"p": 5, "q": "6", "element": [[a, b, c, d, "coef"], ...], "samples": [...], "window": 64}``."""

    p: int = 5
    q: str = "6"
    element: list[tuple[int, int, int, int, str]] = Field(min_length=1)
    samples: list[SampleModel] | None = None
    window: int = Field(default=64, ge=2)
    split: Literal["unit-upper", "unit-lower"] = "unit-upper"

    @field_validator("q", mode="before")
    @classmethod
    def validate_q_text(cls, v: Any) -> str:
        return _check_rational(v)

    @field_validator("element", mode="before")
    @classmethod
    def validate_coefficients(cls, v: Any) -> Any:
        if not isinstance(v, list):
            return v
        return [
            [*row[:-1], _check_rational(row[-1])] if isinstance(row, (list, tuple)) and row else row
            for row in v
        ]

    @field_validator("p")
    @classmethod
    def validate_p(cls, v: int) -> int:
        if v == 2 or not gmpy2.is_prime(v):
            raise ValueError(f"p must be an odd prime, got {v}")
        return v

    @model_validator(mode="after")
    def validate_q(self) -> GL2NormRequest:
        q = PadicField(self.p).coerce(self.q)
        v = (1 - q).valuation()
        if v is not None and v < 1:
            raise ValueError(f"q = {self.q} must satisfy |1 - q| < 1 in Q_{self.p}")
        for *exponent, coefficient in self.element:
            if min(exponent) < 0:
                raise ValueError(f"PBW exponent {exponent} has a negative entry")
            _check_rational(coefficient)
        return self


class SampleNormModel(BaseModel):
    c: str
    t: str
    log_norm: str
    stable: bool


class GL2NormResponse(BaseModel):
    log_norm: str
    per_sample: list[SampleNormModel]
    stable: bool


# -- run configuration --------------------------------------------------------------


class RunConfig(BaseModel):
    """Resolved options of one CLI invocation."""

    command: Literal["scatter", "norm", "spectrum", "gl2norm"]
    input_path: Path | None = Field(default=None, description="JSON or YAML input")
    inline_json: str | None = Field(default=None, description="Input document as a string")
    order: int | None = Field(default=None, ge=0, description="Filtration order N")
    precision: int = Field(default=DEFAULT_PRECISION, ge=1, description="Laurent precision P")
    prime: int = Field(default=5, description="Prime p for Q_p")
    q: str | None = Field(default=None, description="q specification, e.g. '1+t' or '6'")
    output: Path | None = Field(default=None, description="Output path (default stdout)")
    seed: int = Field(default=42, ge=0, description="Seed for random sampling")
    preset: str | None = None
    field_kind: FieldKind = FieldKind.LAURENT

    @field_validator("prime")
    @classmethod
    def validate_prime(cls, v: int) -> int:
        if not gmpy2.is_prime(v):
            raise ValueError(f"{v} is not prime")
        return v

    @model_validator(mode="after")
    def validate_sources(self) -> RunConfig:
        if self.input_path is not None and self.inline_json is not None:
            raise ValueError("give either an input file or inline JSON, not both")
        if self.preset is not None and self.input_path is not None:
            raise ValueError("--preset and --in are mutually exclusive")
        if self.q is not None:
            parse_q(self.q, self.scalar_field())
        return self

    def scalar_field(self) -> ScalarField:
        return build_field(self.field_kind, self.precision, self.prime)

    def q_scalar(self) -> Scalar:
        field = self.scalar_field()
        return parse_q(self.q, field) if self.q is not None else field.default_q()


__all__ = [
    "DiagramModel",
    "DiagramResponse",
    "FieldKind",
    "GL2NormRequest",
    "GL2NormResponse",
    "LineModel",
    "NormResponse",
    "RunConfig",
    "SampleModel",
    "SampleNormModel",
    "ScalarModel",
    "ScalarSpec",
    "SeriesRequest",
    "SpectrumResponse",
    "SpectrumRowModel",
    "TwistModel",
    "WallModel",
    "build_field",
    "read_scalar",
]
