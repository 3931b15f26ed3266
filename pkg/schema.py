# schema.py
# -------------------------------
# Experiment config files: JSON documents validated by the pydantic models
# below before anything is computed. Loss tables are integer numerators over
# one shared denominator, so grid exactness survives the file format.
#
# load_config turns every failure into errors.ConfigError whose message names
# the JSON line/column (syntax) or the dotted field path (schema).
# -------------------------------

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from errors import ConfigError
from util.name_map import to_canonical

ALGORITHM_KINDS = ("erm", "gibbs", "noisy_erm", "independent", "kernel", "two_stage", "compose")
HYPOTHESIS_CLASSES = ("threshold", "interval", "full")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_matrix(rows: List[List[float]], what: str) -> None:
    if not rows or not rows[0]:
        raise ValueError(f"{what} matrix must be non-empty")
    if len({len(row) for row in rows}) != 1:
        raise ValueError(f"every {what} row needs the same number of columns")


class LossSpec(_Strict):
    numerators: List[List[int]]
    denominator: int = Field(1, ge=1)
    bounds: Tuple[float, float] = (0.0, 1.0)

    @field_validator("numerators")
    @classmethod
    def rectangular(cls, value: List[List[int]]) -> List[List[int]]:
        if not value or not value[0]:
            raise ValueError("loss table must be non-empty")
        if len({len(row) for row in value}) != 1:
            raise ValueError("every hypothesis row needs the same number of columns")
        return value


class ProblemSpec(_Strict):
    mu: List[float] = Field(min_length=1)
    loss: Optional[LossSpec] = None
    n: int = Field(1, ge=1)

    @field_validator("mu")
    @classmethod
    def nonnegative(cls, value: List[float]) -> List[float]:
        if any(p < 0 for p in value):
            raise ValueError("probabilities must be nonnegative")
        return value

    @model_validator(mode="after")
    def loss_matches_mu(self) -> "ProblemSpec":
        if self.loss is not None and len(self.loss.numerators[0]) != len(self.mu):
            raise ValueError(
                f"loss has {len(self.loss.numerators[0])} columns but mu has {len(self.mu)} points")
        return self


class SplitSpec(_Strict):
    n1: int = Field(ge=1)
    n2: int = Field(ge=1)


class AlgorithmSpec(_Strict):
    kind: str
    tie_rule: str = "lowest_index"
    beta: Optional[float] = Field(None, ge=0)
    # list of weights, or "uniform" / "zipf"
    q: Optional[Union[str, List[float]]] = None
    # list of means, or "harmonic"
    noise_means: Optional[Union[str, List[float]]] = None
    noise_mode: str = "exact"
    samples: int = Field(1_000_000, ge=1)
    rows: Optional[List[List[float]]] = None
    stages: Optional[List[List[List[float]]]] = None
    split: Optional[SplitSpec] = None
    hypothesis_class: str = "threshold"

    @field_validator("kind")
    @classmethod
    def known_kind(cls, value: str) -> str:
        kind = to_canonical(value)
        if kind not in ALGORITHM_KINDS:
            raise ValueError(f"unknown algorithm kind {value!r}; expected one of {', '.join(ALGORITHM_KINDS)}")
        return kind

    @field_validator("hypothesis_class")
    @classmethod
    def known_class(cls, value: str) -> str:
        name = to_canonical(value)
        if name not in HYPOTHESIS_CLASSES:
            raise ValueError(f"unknown hypothesis class {value!r}")
        return name

    @field_validator("rows")
    @classmethod
    def rectangular_rows(cls, value: Optional[List[List[float]]]) -> Optional[List[List[float]]]:
        if value is not None:
            _check_matrix(value, "kernel")
        return value

    @field_validator("stages")
    @classmethod
    def rectangular_stages(cls, value: Optional[List[List[List[float]]]]) -> Optional[List[List[List[float]]]]:
        if value is not None:
            if not value:
                raise ValueError("a composition needs at least one stage")
            for j, stage in enumerate(value, start=1):
                _check_matrix(stage, f"stage {j}")
        return value

    @model_validator(mode="after")
    def required_parameters(self) -> "AlgorithmSpec":
        needs = {
            "gibbs": ("beta",),
            "noisy_erm": ("noise_means",),
            "independent": ("rows",),
            "kernel": ("rows",),
            "two_stage": ("split",),
            "compose": ("stages",),
        }
        missing = [name for name in needs.get(self.kind, ()) if getattr(self, name) is None]
        if missing:
            raise ValueError(f"algorithm {self.kind!r} needs {', '.join(missing)}")
        return self


class BoundParamsSpec(_Strict):
    """Fields of models.ContinuousBoundParams plus the plain-formula inputs."""

    d: Optional[int] = None
    rho: Optional[float] = None
    B: Optional[float] = None
    a: Optional[float] = None
    b_width: Optional[float] = None
    w_o: Optional[List[float]] = None
    w_Q: Optional[List[float]] = None
    beta: Optional[float] = None
    n: Optional[int] = None
    epsilon: Optional[float] = None
    sigma: Optional[float] = None
    alpha: Optional[float] = None
    beta_conf: Optional[float] = None
    g_at_n: Optional[float] = None
    V: Optional[int] = None
    m: Optional[int] = None
    i_o: Optional[int] = None
    k: Optional[int] = None
    min_risk: float = 0.0
    a_grid: Optional[List[float]] = None
    n1: Optional[int] = None
    n2: Optional[int] = None
    population_risks: Optional[List[float]] = None
    noise_means: Optional[List[float]] = None


class AnalysisSpec(_Strict):
    bounds: List[str] = Field(default_factory=list)
    trials: int = Field(10_000, ge=1)
    seed: int = Field(0, ge=0)
    m: int = Field(1, ge=1)
    sigma: Optional[float] = Field(None, ge=0)
    alphas: List[float] = Field(default_factory=list)
    params: BoundParamsSpec = Field(default_factory=BoundParamsSpec)
    problems: int = Field(100, ge=1)

    @field_validator("bounds")
    @classmethod
    def canonical_names(cls, value: List[str]) -> List[str]:
        return [to_canonical(name) for name in value]


class OutputSpec(_Strict):
    format: str = "json"
    path: Optional[str] = None
    timestamp: bool = True

    @field_validator("format")
    @classmethod
    def known_format(cls, value: str) -> str:
        fmt = to_canonical(value)
        if fmt not in ("json", "csv"):
            raise ValueError(f"unknown output format {value!r}")
        return fmt


class ExperimentConfig(_Strict):
    problem: Optional[ProblemSpec] = None
    algorithm: Optional[AlgorithmSpec] = None
    analysis: AnalysisSpec = Field(default_factory=AnalysisSpec)
    output: OutputSpec = Field(default_factory=OutputSpec)


def _field_path(loc: Tuple[Any, ...]) -> str:
    parts: List[str] = []
    for item in loc:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        else:
            parts.append(("." if parts else "") + str(item))
    return "".join(parts) or "<root>"


def validation_message(exc: ValidationError) -> str:
    lines = [f"{_field_path(err['loc'])}: {err['msg']}" for err in exc.errors()]
    return "Invalid experiment config:\n  " + "\n  ".join(lines)


def parse_config(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(validation_message(exc)) from None


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"Malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must hold a JSON object.")
    return parse_config(data)
