# algorithms/gibbs.py
# --------------------------------------------
# Gibbs kernel: row(s)(w) proportional to exp(-beta L_s(w)) Q(w).
# It minimises E[L_S(W)] + (1/beta) D(P_{W|S} || Q | P_S) over all kernels;
# gibbs_objective evaluates that functional so the optimality can be checked.
# --------------------------------------------

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp, rel_entr

from errors import ArgumentError, DimensionError, SupportError
from models import FiniteDistribution, LossTable, StochasticKernel
from risk import empirical_risk_table
from spaces import dataset_probabilities


def gibbs_kernel(loss: LossTable, mu_size: int, n: int, beta: float,
                 q: FiniteDistribution) -> StochasticKernel:
    if beta < 0 or not math.isfinite(beta):
        raise ArgumentError(f"beta must be finite and nonnegative, got {beta!r}.")
    if mu_size != loss.z_size:
        raise DimensionError(f"|Z| = {mu_size} but the loss table has {loss.z_size} columns.")
    if q.size != loss.n_hypotheses:
        raise DimensionError(f"Q covers {q.size} hypotheses; the loss table has {loss.n_hypotheses}.")

    with np.errstate(divide="ignore"):
        log_q = np.log(q.as_array())
    logits = -beta * empirical_risk_table(loss, n) + log_q[None, :]
    # logsumexp subtracts the row max before exponentiating
    rows = np.exp(logits - logsumexp(logits, axis=1, keepdims=True))
    return StochasticKernel(rows, "dataset")


def gibbs_objective(mu: FiniteDistribution, n: int, kernel: StochasticKernel,
                    loss: LossTable, beta: float, q: FiniteDistribution) -> float:
    """E[L_S(W)] + (1/beta) sum_s P(s) D(P_{W|S=s} || Q)."""
    if beta <= 0:
        raise ArgumentError("The regularised objective needs beta > 0.")
    p_s = dataset_probabilities(mu, n)
    if kernel.n_inputs != p_s.size:
        raise DimensionError(f"Kernel has {kernel.n_inputs} rows; |Z|^n = {p_s.size}.")
    q_arr = q.as_array()
    if np.any((kernel.rows > 0) & (q_arr[None, :] <= 0)):
        raise SupportError("Kernel puts mass on hypotheses outside the support of Q.")
    fit = float(np.sum(p_s[:, None] * kernel.rows * empirical_risk_table(loss, n)))
    divergence = float(np.sum(p_s * rel_entr(kernel.rows, q_arr[None, :]).sum(axis=1)))
    return fit + divergence / beta


def zipf_prior(k: int) -> FiniteDistribution:
    """Q(w_i) proportional to 6/(pi^2 i^2), renormalised over k hypotheses."""
    if k < 1:
        raise ArgumentError("k must be at least 1.")
    weights = [6.0 / (math.pi ** 2 * i ** 2) for i in range(1, k + 1)]
    return FiniteDistribution.from_probs(weights, renormalize=True)
