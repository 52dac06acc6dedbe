"""
Pydantic models for the JSON documents invot reads and writes.

Measures and costs arrive as shorthand strings (``normal:0,1``,
``uniform:0,1``, ``power:2``, ``concave:0.5``), as inline JSON, as paths to
JSON files or as already-parsed mappings; all of them end up in one of the
models below before anything numerical happens.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from .exceptions import ConfigValidationError, ParseError
from .forward.costs import CostKind, CostSpec, cost_from_dict
from .measures.families import FamilyName, resolve_family
from .measures.measure1d import DEFAULT_GRID_N, Measure1D, cdf_and_quantile_from_density


class BaseInvotModel(BaseModel):
    """Base model with common configuration."""

    model_config = ConfigDict(
        validate_assignment=True,
        extra="forbid",
        use_enum_values=True,
    )


class GeneratorModel(BaseInvotModel):
    grid: List[float] = Field(..., min_length=2)
    density: List[float] = Field(..., min_length=2)

    @model_validator(mode="after")
    def check_lengths(self) -> "GeneratorModel":
        if len(self.grid) != len(self.density):
            raise ValueError("grid and density differ in length")
        return self


class GridMeasureModel(GeneratorModel):
    """A tabulated density."""

    def build(self, n: int = DEFAULT_GRID_N) -> Measure1D:
        return cdf_and_quantile_from_density(self.grid, self.density)


class FamilyMeasureModel(BaseInvotModel):
    """The member (a, b) of a location-scale family."""

    family: FamilyName
    a: float = 0.0
    b: float = 1.0
    generator: Optional[GeneratorModel] = None

    @model_validator(mode="after")
    def check_generator(self) -> "FamilyMeasureModel":
        custom = self.family == FamilyName.CUSTOM_GRID.value
        if custom and self.generator is None:
            raise ValueError("custom-grid family needs a generator")
        if not custom and self.generator is not None:
            raise ValueError(f"{self.family} family takes no generator")
        return self

    def build(self, n: int = DEFAULT_GRID_N) -> Measure1D:
        generator = self.generator.model_dump() if self.generator is not None else None
        return resolve_family(self.family, generator, n=n).member(self.a, self.b)


MeasureModel = Union[GridMeasureModel, FamilyMeasureModel]
_MEASURE_ADAPTER: TypeAdapter = TypeAdapter(MeasureModel)


class CostModel(BaseInvotModel):
    """Cost of the difference: a builtin power or a tabulated function."""

    kind: CostKind = CostKind.CONVEX
    builtin: Literal["power", "grid"] = "power"
    p: Optional[float] = None
    x: Optional[List[float]] = None
    h: Optional[List[float]] = None
    l: Optional[List[float]] = None  # noqa: E741
    growth_p: float = 2.0
    offset: float = 0.0

    @model_validator(mode="after")
    def check_fields(self) -> "CostModel":
        if self.builtin == "power" and self.p is None:
            raise ValueError("power cost needs p")
        if self.builtin == "grid" and (self.x is None or (self.h is None and self.l is None)):
            raise ValueError("grid cost needs x and h (or l)")
        return self

    def build(self) -> CostSpec:
        return cost_from_dict(self.model_dump(exclude_none=True))


class InputRecord(BaseInvotModel):
    name: str
    path: Optional[str] = None
    sha256: Optional[str] = None
    document: Optional[Any] = None


class ManifestModel(BaseInvotModel):
    """manifest.json of a pipeline run."""

    tool: str = "invot"
    version: str
    command: str
    config_hash: str
    config: Dict[str, Any]
    inputs: List[InputRecord] = Field(default_factory=list)
    tolerances: Dict[str, Optional[float]] = Field(default_factory=dict)
    artifacts: List[str] = Field(default_factory=list)


# -- document expansion ---------------------------------------------------------


def _numbers(text: str, count: int, what: str) -> List[float]:
    parts = [p.strip() for p in text.split(",")] if text.strip() else []
    if len(parts) != count:
        raise ConfigValidationError(f"{what} expects {count} comma-separated numbers, got {text!r}", operation="parse")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ConfigValidationError(f"{what} has a non-numeric entry: {text!r}", operation="parse") from None


def load_document(value: Any, what: str) -> Any:
    """Mapping, inline JSON or JSON file path to a parsed document; other strings pass through."""
    if not isinstance(value, str):
        return value
    text = value.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(
                f"invalid inline JSON for {what}: {e.msg}", line=e.lineno, column=e.colno, operation="parse"
            ) from e
    if text.endswith(".json"):
        path = Path(text)
        if not path.is_file():
            raise ParseError(f"{what} file not found: {path}", operation="parse")
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(
                f"invalid JSON in {path}: {e.msg}", line=e.lineno, column=e.colno, operation="parse"
            ) from e
    return text


def expand_measure(value: Any) -> Dict[str, Any]:
    """``normal:a,b`` style shorthands to the measure JSON schema."""
    document = load_document(value, "measure")
    if not isinstance(document, str):
        return document
    tag, _, args = document.partition(":")
    tag = tag.strip()
    if tag == FamilyName.UNIFORM.value:
        lo, hi = _numbers(args, 2, "uniform:lo,hi")
        return {"family": tag, "a": lo, "b": hi - lo}
    if tag in {f.value for f in FamilyName} and tag != FamilyName.CUSTOM_GRID.value:
        a, b = _numbers(args, 2, f"{tag}:a,b") if args else (0.0, 1.0)
        return {"family": tag, "a": a, "b": b}
    raise ConfigValidationError(f"unrecognized measure {document!r}", operation="parse")


def expand_cost(value: Any) -> Dict[str, Any]:
    """``power:p`` and ``concave:p`` shorthands to the cost JSON schema."""
    document = load_document(value, "cost")
    if not isinstance(document, str):
        return document
    tag, _, args = document.partition(":")
    if tag == "power":
        (p,) = _numbers(args, 1, "power:p")
        return {"kind": "convex", "builtin": "power", "p": p}
    if tag == "concave":
        (p,) = _numbers(args, 1, "concave:p")
        return {"kind": "concave", "builtin": "power", "p": p}
    raise ConfigValidationError(f"unrecognized cost {document!r}", operation="parse")


def _schema_error(e: ValidationError, what: str) -> ConfigValidationError:
    messages = [f"{'.'.join(str(p) for p in err['loc']) or what}: {err['msg']}" for err in e.errors()]
    return ConfigValidationError(f"invalid {what}: " + "; ".join(messages), operation="parse", problems=messages)


def parse_measure(value: Any) -> MeasureModel:
    try:
        return _MEASURE_ADAPTER.validate_python(expand_measure(value))
    except ValidationError as e:
        raise _schema_error(e, "measure") from None


def parse_cost(value: Any) -> CostModel:
    try:
        return CostModel.model_validate(expand_cost(value))
    except ValidationError as e:
        raise _schema_error(e, "cost") from None
