# algorithms/two_stage.py
# --------------------------------------------
# Two-stage binary classifier and VC statistics.
#
# Instances are pairs z = (x, y) with y in {0, 1}, encoded as z = 2*x + y.
# The dataset S = (Z_1, ..., Z_{n1+n2}) splits into S_1 (the n1 least
# significant digits) and S_2 (the rest), so code = s1 + |Z|^n1 * s2.
#
# Stage one keeps one hypothesis per distinct labeling pattern of
# X_1..X_{n1} (the lowest-index hypothesis realizing it): an empirical cover.
# Stage two runs ERM over that cover on S_2.
# --------------------------------------------

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from algorithms.erm import TieRule, argmin_rows
from config import Config
from errors import CapacityError, DimensionError
from info import entropy, io_mutual_information
from models import FiniteDistribution, HypothesisClassTable, LossTable, StochasticKernel
from risk import population_risks
from spaces import check_capacity, dataset_digits, dataset_probabilities

logger = logging.getLogger(__name__)


# ---------- Hypothesis classes ----------

def threshold_class(x_size: int) -> HypothesisClassTable:
    """w_t(x) = 1{x >= t} for t = 0..x_size (x indexed from 0)."""
    xs = np.arange(x_size)
    return HypothesisClassTable(np.array([(xs >= t) for t in range(x_size + 1)], dtype=np.int8))


def interval_class(x_size: int) -> HypothesisClassTable:
    """w_{a,b}(x) = 1{a <= x <= b} for every a <= b, plus the all-zero classifier."""
    xs = np.arange(x_size)
    rows = [np.zeros(x_size, dtype=np.int8)]
    rows += [((xs >= a) & (xs <= b)).astype(np.int8)
             for a in range(x_size) for b in range(a, x_size)]
    return HypothesisClassTable(np.array(rows))


def full_class(x_size: int) -> HypothesisClassTable:
    """Every labeling of X."""
    return HypothesisClassTable(np.array(list(itertools.product((0, 1), repeat=x_size)),
                                         dtype=np.int8))


def classification_loss(cls: HypothesisClassTable) -> LossTable:
    """0/1 loss l(w, (x, y)) = 1{w(x) != y} on Z = X x {0, 1}."""
    numerators = np.zeros((cls.n_hypotheses, 2 * cls.x_size), dtype=np.int64)
    for y in (0, 1):
        numerators[:, y::2] = (cls.truth != y)
    return LossTable(numerators, 1, (0.0, 1.0))


# ---------- Patterns and VC statistics ----------

def label_patterns(cls: HypothesisClassTable, xs: Sequence[int]) -> Dict[bytes, int]:
    """Distinct patterns (w(x_1), ..., w(x_k)) mapped to the lowest w realizing each."""
    columns = cls.truth[:, list(xs)]
    patterns: Dict[bytes, int] = {}
    for w, row in enumerate(columns):
        patterns.setdefault(row.tobytes(), w)
    return patterns


def empirical_cover(cls: HypothesisClassTable, xs: Sequence[int]) -> Tuple[int, ...]:
    return tuple(sorted(label_patterns(cls, xs).values()))


def pattern_count(cls: HypothesisClassTable, xs: Sequence[int]) -> int:
    return len(label_patterns(cls, xs))


@dataclass(frozen=True)
class VCStats:
    vc_dim: int
    shatter_n: int
    sauer_bound: float

    @property
    def consistent(self) -> bool:
        return self.shatter_n <= self.sauer_bound


def vc_stats(cls: HypothesisClassTable, n: int) -> VCStats:
    """Exhaustive VC dimension and n-th shatter coefficient."""
    if cls.x_size > Config.MAX_VC_INSTANCES:
        raise CapacityError(
            f"|X| = {cls.x_size} exceeds the exact VC limit of {Config.MAX_VC_INSTANCES}.")
    instances = range(cls.x_size)
    vc_dim = 0
    for d in range(1, cls.x_size + 1):
        if any(pattern_count(cls, subset) == 2 ** d
               for subset in itertools.combinations(instances, d)):
            vc_dim = d
        else:
            break
    # repeated points add no patterns, so the maximum sits on distinct points
    size = min(n, cls.x_size)
    shatter_n = max(pattern_count(cls, subset)
                    for subset in itertools.combinations(instances, size))
    stats = VCStats(vc_dim, shatter_n, float((n + 1) ** vc_dim))
    if not stats.consistent:
        logger.warning("shatter coefficient %d exceeds (n+1)^V = %g", shatter_n, stats.sauer_bound)
    return stats


# ---------- Two-stage kernel ----------

@dataclass(frozen=True, eq=False)
class TwoStageResult:
    kernel: StochasticKernel                     # over full datasets
    prefix_kernels: Tuple[StochasticKernel, ...]  # indexed by s1 code, rows = s2 codes
    covers: Tuple[Tuple[int, ...], ...]          # empirical cover per s1 code
    loss: LossTable
    n1: int
    n2: int


def two_stage_kernel(cls: HypothesisClassTable, mu: FiniteDistribution, n1: int, n2: int,
                     tie_rule: "str | TieRule" = TieRule.LOWEST_INDEX) -> TwoStageResult:
    z_size = 2 * cls.x_size
    if mu.size != z_size:
        raise DimensionError(f"mu has {mu.size} points; X x Y has {z_size}.")
    if n1 < 1 or n2 < 1:
        raise DimensionError("Both splits need at least one instance.")
    check_capacity(z_size, n1 + n2)

    loss = classification_loss(cls)
    digits1 = dataset_digits(z_size, n1)
    digits2 = dataset_digits(z_size, n2)
    keys2 = loss.numerators[:, digits2].sum(axis=2).T

    covers: List[Tuple[int, ...]] = []
    prefix_rows = np.zeros((digits1.shape[0], digits2.shape[0], cls.n_hypotheses))
    for s1, row in enumerate(digits1):
        cover = empirical_cover(cls, row // 2)
        covers.append(cover)
        prefix_rows[s1][:, list(cover)] = argmin_rows(keys2[:, list(cover)], tie_rule)

    prefix_kernels = tuple(StochasticKernel(rows, "s2") for rows in prefix_rows)
    # full code = s1 + N1 * s2
    full = prefix_rows.transpose(1, 0, 2).reshape(-1, cls.n_hypotheses)
    logger.debug("two-stage kernel: %d prefixes, largest cover %d",
                 len(covers), max(len(c) for c in covers))
    return TwoStageResult(StochasticKernel(full, "dataset"), prefix_kernels,
                          tuple(covers), loss, n1, n2)


@dataclass(frozen=True)
class PrefixCheck:
    s1_code: int
    pattern_count: int
    conditional_mi: float        # I(S_2; W | S_1 = s1)
    conditional_entropy: float   # H(W | S_1 = s1)

    @property
    def log_patterns(self) -> float:
        return math.log(self.pattern_count)


def prefix_checks(mu: FiniteDistribution, result: TwoStageResult) -> List[PrefixCheck]:
    """Per-prefix information quantities behind the two-stage analysis."""
    p_s2 = dataset_probabilities(mu, result.n2)
    checks = []
    for s1, kernel in enumerate(result.prefix_kernels):
        p_w = p_s2 @ kernel.rows
        checks.append(PrefixCheck(
            s1_code=s1,
            pattern_count=len(result.covers[s1]),
            conditional_mi=io_mutual_information(mu, result.n2, kernel),
            conditional_entropy=entropy(FiniteDistribution.from_probs(p_w.tolist(), renormalize=True)),
        ))
    return checks


def split_generalization(mu: FiniteDistribution, result: TwoStageResult) -> Tuple[float, float]:
    """(E[L_mu(W) - L_{S_2}(W)], E[L_{S_2}(W)]) by exact enumeration."""
    z_size = mu.size
    p_s = dataset_probabilities(mu, result.n1 + result.n2)
    digits2 = dataset_digits(z_size, result.n2)
    emp2 = result.loss.numerators[:, digits2].sum(axis=2).T / result.n2
    n1_count = z_size ** result.n1
    emp_full = np.repeat(emp2, n1_count, axis=0)
    pop = population_risks(result.loss, mu)
    weights = p_s[:, None] * result.kernel.rows
    expected_s2 = float(np.sum(weights * emp_full))
    expected_pop = float(np.sum(weights.sum(axis=0) * pop))
    return expected_pop - expected_s2, expected_s2
