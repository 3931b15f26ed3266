# risk.py
# -------------------------------
# Empirical and population risk, and the exact expected generalization
# error of a kernel by full enumeration over (s, w).
# Empirical risks are formed from integer numerator sums and divided by n*D
# only at the end, so equal risk vectors compare exactly.
# -------------------------------

from __future__ import annotations

import logging

import numpy as np

from errors import DimensionError, DomainError
from info import risk_vector_keys
from models import DatasetIndex, FiniteDistribution, LossTable, RiskSummary, StochasticKernel
from spaces import dataset_probabilities

logger = logging.getLogger(__name__)


def _check_hypothesis(loss: LossTable, w: int) -> None:
    if not 0 <= w < loss.n_hypotheses:
        raise DomainError(f"Hypothesis {w} outside [0, {loss.n_hypotheses}).")


def empirical_risk(loss: LossTable, w: int, s: DatasetIndex) -> float:
    """L_s(w) = (1/n) sum_i l(w, Z_i)."""
    _check_hypothesis(loss, w)
    if s.z_size != loss.z_size:
        raise DomainError("Dataset alphabet does not match the loss table.")
    total = sum(int(loss.numerators[w, z]) for z in s.digits())
    return total / (s.n * loss.denominator)


def population_risk(loss: LossTable, w: int, mu: FiniteDistribution) -> float:
    """L_mu(w) = sum_z mu(z) l(w, z)."""
    _check_hypothesis(loss, w)
    return float(population_risks(loss, mu)[w])


def population_risks(loss: LossTable, mu: FiniteDistribution) -> np.ndarray:
    if mu.size != loss.z_size:
        raise DimensionError("mu and the loss table disagree on |Z|.")
    return loss.values @ mu.as_array()


def empirical_risk_table(loss: LossTable, n: int) -> np.ndarray:
    """(|Z|^n, |W|) matrix of L_s(w)."""
    return risk_vector_keys(loss, n) / (n * loss.denominator)


def exact_risk_summary(mu: FiniteDistribution, n: int, kernel: StochasticKernel,
                       loss: LossTable) -> RiskSummary:
    """Every RiskSummary field by enumeration, weighted by mu^n(s) P(w|s)."""
    p_s = dataset_probabilities(mu, n)
    if kernel.n_inputs != p_s.size:
        raise DimensionError(f"Kernel has {kernel.n_inputs} rows; |Z|^n = {p_s.size}.")
    if kernel.n_outputs != loss.n_hypotheses:
        raise DimensionError("Kernel outputs and loss hypotheses differ.")

    weights = p_s[:, None] * kernel.rows
    emp = empirical_risk_table(loss, n)
    pop = population_risks(loss, mu)

    expected_empirical = float(np.sum(weights * emp))
    expected_population = float(np.sum(weights.sum(axis=0) * pop))
    abs_gen = float(np.sum(weights * np.abs(pop[None, :] - emp)))
    return RiskSummary(
        expected_empirical=expected_empirical,
        expected_population=expected_population,
        gen_error=expected_population - expected_empirical,
        abs_gen_error=abs_gen,
        excess_risk=max(0.0, expected_population - float(pop.min())),
    )
