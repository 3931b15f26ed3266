# models.py
# -------------------------------
# Domain types shared by every module.
# All of them are frozen after construction: tables are copied into
# read-only numpy arrays in __post_init__, so values can be handed to many
# threads without locking.
# -------------------------------

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from config import Config
from errors import ArgumentError, DimensionError, DomainError, GridError


def _frozen_array(values: Any, dtype: Any) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# ---------- Distributions ----------

@dataclass(frozen=True)
class FiniteDistribution:
    """Probability vector over a labeled finite space (mu, Q, marginals)."""

    labels: Tuple[str, ...]
    probs: Tuple[float, ...]

    def __post_init__(self) -> None:
        labels = tuple(str(x) for x in self.labels)
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", probs)

        if not probs:
            raise ArgumentError("A distribution needs at least one point.")
        if len(labels) != len(probs):
            raise ArgumentError(
                f"{len(labels)} labels for {len(probs)} probabilities.")
        if len(set(labels)) != len(labels):
            raise ArgumentError("Distribution labels must be distinct.")
        if any(not math.isfinite(p) or p < 0 for p in probs):
            raise DomainError("Probabilities must be finite and nonnegative.")
        total = math.fsum(probs)
        if abs(total - 1.0) > Config.DIST_TOL:
            raise DomainError(f"Probabilities sum to {total!r}, not 1.")

    @classmethod
    def from_probs(cls, probs: Sequence[float],
                   labels: Optional[Sequence[str]] = None,
                   renormalize: bool = False) -> "FiniteDistribution":
        """Build from a probability list; labels default to "0", "1", ..."""
        values = [float(p) for p in probs]
        if renormalize:
            total = math.fsum(values)
            if total <= 0:
                raise DomainError("Cannot renormalize a zero vector.")
            values = [p / total for p in values]
        if labels is None:
            labels = [str(i) for i in range(len(values))]
        return cls(tuple(labels), tuple(values))

    @classmethod
    def uniform(cls, k: int, labels: Optional[Sequence[str]] = None) -> "FiniteDistribution":
        if k < 1:
            raise ArgumentError("Uniform distribution needs k >= 1.")
        return cls.from_probs([1.0 / k] * k, labels, renormalize=True)

    @classmethod
    def point_mass(cls, k: int, index: int) -> "FiniteDistribution":
        if not 0 <= index < k:
            raise DomainError(f"Point-mass index {index} outside [0, {k}).")
        probs = [0.0] * k
        probs[index] = 1.0
        return cls.from_probs(probs)

    @property
    def size(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.probs) if p > 0)


@dataclass(frozen=True)
class DatasetIndex:
    """Mixed-radix code of S = (Z_1, ..., Z_n); Z_1 is the least-significant digit."""

    code: int
    n: int
    z_size: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.z_size < 1:
            raise ArgumentError("Datasets need n >= 1 and |Z| >= 1.")
        if not 0 <= self.code < self.z_size ** self.n:
            raise DomainError(
                f"Code {self.code} outside [0, {self.z_size}^{self.n}).")

    def digits(self) -> Tuple[int, ...]:
        out = []
        code = self.code
        for _ in range(self.n):
            code, digit = divmod(code, self.z_size)
            out.append(digit)
        return tuple(out)


@dataclass(frozen=True, eq=False)
class JointPMF:
    """Explicit joint probability table over two or three finite coordinates."""

    table: np.ndarray
    axis_labels: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        table = _frozen_array(self.table, float)
        if table.ndim not in (2, 3):
            raise DimensionError(f"JointPMF needs 2 or 3 axes, got {table.ndim}.")
        labels = tuple(self.axis_labels) or tuple("XYZ"[: table.ndim])
        if len(labels) != table.ndim:
            raise DimensionError("One axis label per table axis is required.")
        if not np.all(np.isfinite(table)) or np.any(table < 0):
            raise DomainError("Joint probabilities must be finite and nonnegative.")
        total = float(table.sum())
        if abs(total - 1.0) > Config.JOINT_TOL:
            raise DomainError(f"Joint table sums to {total!r}, not 1.")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "axis_labels", labels)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(self.table.shape)

    def marginal(self, axes: Sequence[int]) -> np.ndarray:
        """Marginal table over `axes` (kept in the given order)."""
        keep = tuple(axes)
        drop = tuple(a for a in range(self.table.ndim) if a not in keep)
        out = self.table.sum(axis=drop) if drop else self.table
        kept_sorted = sorted(keep)
        return np.transpose(out, [kept_sorted.index(a) for a in keep])

    def marginal_distribution(self, axis: int) -> FiniteDistribution:
        return FiniteDistribution.from_probs(
            self.marginal([axis]).tolist(), renormalize=True)


# ---------- Losses and kernels ----------

@dataclass(frozen=True, eq=False)
class LossTable:
    """l(w, z) = numerators[w][z] / denominator, on a shared rational grid."""

    numerators: np.ndarray
    denominator: int = 1
    bounds: Tuple[float, float] = (0.0, 1.0)

    def __post_init__(self) -> None:
        raw = np.asarray(self.numerators)
        if raw.ndim != 2 or raw.size == 0:
            raise DimensionError("Loss numerators must be a non-empty |W| x |Z| matrix.")
        if not np.issubdtype(raw.dtype, np.integer):
            if not np.all(np.isfinite(raw)) or np.any(raw != np.round(raw)):
                raise GridError("Loss numerators must be integers.")
        numerators = _frozen_array(raw, np.int64)
        if int(self.denominator) < 1:
            raise GridError("Loss denominator must be a positive integer.")
        a, b = (float(x) for x in self.bounds)
        if a < 0 or b < a:
            raise DomainError(f"Declared loss range ({a}, {b}) is invalid.")
        values = numerators / int(self.denominator)
        if values.min() < a - Config.GRID_TOL or values.max() > b + Config.GRID_TOL:
            raise DomainError(
                f"Loss values span [{values.min()}, {values.max()}], outside ({a}, {b}).")
        object.__setattr__(self, "numerators", numerators)
        object.__setattr__(self, "denominator", int(self.denominator))
        object.__setattr__(self, "bounds", (a, b))

    @classmethod
    def from_values(cls, values: Any, denominator: int,
                    bounds: Tuple[float, float] = (0.0, 1.0)) -> "LossTable":
        """Snap real-valued losses onto the grid, refusing values that are off it."""
        scaled = np.asarray(values, dtype=float) * int(denominator)
        snapped = np.round(scaled)
        if np.any(np.abs(scaled - snapped) > Config.GRID_TOL * max(1, int(denominator))):
            raise GridError(f"Loss values are not multiples of 1/{denominator}.")
        return cls(snapped.astype(np.int64), int(denominator), bounds)

    @property
    def n_hypotheses(self) -> int:
        return int(self.numerators.shape[0])

    @property
    def z_size(self) -> int:
        return int(self.numerators.shape[1])

    @property
    def values(self) -> np.ndarray:
        return self.numerators / self.denominator

    @property
    def sigma(self) -> float:
        """(b - a) / 2, the subgaussian constant every bounded loss enjoys."""
        a, b = self.bounds
        return (b - a) / 2.0


@dataclass(frozen=True, eq=False)
class StochasticKernel:
    """Row-stochastic matrix from enumerated inputs to hypotheses."""

    rows: np.ndarray
    input_arity: str = "dataset"

    def __post_init__(self) -> None:
        rows = _frozen_array(self.rows, float)
        if rows.ndim != 2 or rows.size == 0:
            raise DimensionError("Kernel rows must form a non-empty 2-D matrix.")
        if not np.all(np.isfinite(rows)) or np.any(rows < 0):
            raise DomainError("Kernel entries must be finite and nonnegative.")
        sums = rows.sum(axis=1)
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > Config.JOINT_TOL:
            raise DomainError(f"Kernel row sums deviate from 1 by {worst!r}.")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def constant(cls, n_inputs: int, row: Sequence[float],
                 input_arity: str = "dataset") -> "StochasticKernel":
        return cls(np.tile(np.asarray(row, dtype=float), (n_inputs, 1)), input_arity)

    @classmethod
    def deterministic(cls, choices: Sequence[int], n_outputs: int,
                      input_arity: str = "dataset") -> "StochasticKernel":
        rows = np.zeros((len(choices), n_outputs))
        rows[np.arange(len(choices)), np.asarray(choices, dtype=int)] = 1.0
        return cls(rows, input_arity)

    @property
    def n_inputs(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_outputs(self) -> int:
        return int(self.rows.shape[1])


@dataclass(frozen=True, eq=False)
class HypothesisClassTable:
    """Truth table of binary classifiers: truth[w][x] = w(x) in {0, 1}."""

    truth: np.ndarray

    def __post_init__(self) -> None:
        truth = _frozen_array(self.truth, np.int8)
        if truth.ndim != 2 or truth.size == 0:
            raise DimensionError("Class table must be a non-empty |W| x |X| matrix.")
        if np.any((truth != 0) & (truth != 1)):
            raise DomainError("Classifier outputs must be 0 or 1.")
        if len({row.tobytes() for row in truth}) != truth.shape[0]:
            raise ArgumentError("Class table rows must be pairwise distinct.")
        object.__setattr__(self, "truth", truth)

    @property
    def n_hypotheses(self) -> int:
        return int(self.truth.shape[0])

    @property
    def x_size(self) -> int:
        return int(self.truth.shape[1])


@dataclass(frozen=True, eq=False)
class CompositionPlan:
    """
    Ordered stages of an adaptive composition.

    Stage j (0-based) has one row per (dataset code, prior-output code) pair,
    row index = prior_code * n_datasets + dataset_code, where prior_code is the
    mixed-radix code of (w_1, ..., w_{j}) with w_1 least significant.
    """

    stages: Tuple[StochasticKernel, ...]

    def __post_init__(self) -> None:
        stages = tuple(self.stages)
        if not stages:
            raise ArgumentError("A composition plan needs at least one stage.")
        n_datasets = stages[0].n_inputs
        prior = 1
        for j, stage in enumerate(stages):
            expected = n_datasets * prior
            if stage.n_inputs != expected:
                raise DimensionError(
                    f"Stage {j + 1} has {stage.n_inputs} rows; expected {expected}.")
            prior *= stage.n_outputs
        object.__setattr__(self, "stages", stages)

    @property
    def n_datasets(self) -> int:
        return self.stages[0].n_inputs

    @property
    def output_sizes(self) -> Tuple[int, ...]:
        return tuple(stage.n_outputs for stage in self.stages)


# ---------- Results ----------

@dataclass(frozen=True)
class RiskSummary:
    expected_empirical: float
    expected_population: float
    gen_error: float
    abs_gen_error: float
    excess_risk: float


@dataclass(frozen=True)
class SubgaussianCertificate:
    sigma: float
    lambda_grid: Tuple[float, ...]
    max_violation: float


@dataclass(frozen=True)
class BoundReport:
    """A bound value, what it bounds, and (optionally) the measured quantity."""

    name: str
    anchor: str
    inputs: Mapping[str, float] = field(default_factory=dict)
    bound_value: float = 0.0
    measured_value: Optional[float] = None
    satisfied: Optional[bool] = None
    slack: Optional[float] = None

    @classmethod
    def build(cls, name: str, anchor: str, inputs: Mapping[str, Any],
              bound_value: float,
              measured_value: Optional[float] = None) -> "BoundReport":
        satisfied = slack = None
        if measured_value is not None:
            satisfied = bool(measured_value <= bound_value + Config.BOUND_TOL)
            slack = float(bound_value - measured_value)
            measured_value = float(measured_value)
        return cls(name, anchor, dict(inputs), float(bound_value),
                   measured_value, satisfied, slack)


@dataclass(frozen=True)
class ContinuousBoundParams:
    """
    Inputs for the closed-form evaluators. Only the fields a given formula
    needs have to be set. `beta` is the Gibbs inverse temperature and
    `beta_conf` the confidence level; they are unrelated.
    """

    d: Optional[int] = None
    rho: Optional[float] = None
    B: Optional[float] = None
    a: Optional[float] = None
    b_width: Optional[float] = None
    w_o: Optional[Tuple[float, ...]] = None
    w_Q: Optional[Tuple[float, ...]] = None
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
    a_grid: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        for name in ("d", "rho", "B", "a", "b_width", "beta", "n", "alpha", "m", "i_o", "k"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ArgumentError(f"{name} must be strictly positive, got {value!r}.")
        for name in ("epsilon", "sigma", "V"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ArgumentError(f"{name} must be nonnegative, got {value!r}.")
        if self.beta_conf is not None and not 0 < self.beta_conf <= 1:
            raise ArgumentError("beta_conf must lie in (0, 1].")
        for name in ("w_o", "w_Q", "a_grid"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, tuple(float(x) for x in value))

    def require(self, *names: str) -> Dict[str, Any]:
        """Return the named fields, raising ArgumentError for any that are missing."""
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise ArgumentError(f"Missing bound parameters: {', '.join(missing)}.")
        return {name: getattr(self, name) for name in names}


@dataclass(frozen=True)
class EstimateWithCI:
    mean: float
    std_error: float
    trials: int
    ci95: Tuple[float, float]

    @classmethod
    def from_samples(cls, values: Any) -> "EstimateWithCI":
        arr = np.asarray(values, dtype=float)
        trials = int(arr.size)
        if trials == 0:
            raise ArgumentError("An estimate needs at least one sample.")
        mean = float(arr.mean())
        std_error = float(arr.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        half = 1.96 * std_error
        return cls(mean, std_error, trials, (mean - half, mean + half))

    def contains(self, value: float, z: float = 1.96) -> bool:
        return abs(value - self.mean) <= z * self.std_error + Config.BOUND_TOL


@dataclass(frozen=True, eq=False)
class MonitorOutcome:
    """Per-trial monitor selections; T* is 1-based, R* is +1 or -1."""

    m: int
    selected_t: np.ndarray
    selected_r: np.ndarray
    selected_w: np.ndarray
    max_abs_gen_estimate: EstimateWithCI
    signed_gap_estimate: EstimateWithCI

    @property
    def selected(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.selected_t, self.selected_r, self.selected_w
