# info.py
# -------------------------------
# Exact information measures over finite tables, all in nats.
# Conventions: 0 log 0 = 0; p log(p/0) with p > 0 raises SupportError.
# -------------------------------

from __future__ import annotations

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp, rel_entr, xlogy

from config import Config
from errors import ArgumentError, DimensionError, SupportError
from models import (FiniteDistribution, JointPMF, LossTable, StochasticKernel,
                    SubgaussianCertificate)
from spaces import dataset_digits, dataset_probabilities

logger = logging.getLogger(__name__)


def entropy(p: FiniteDistribution) -> float:
    """H(p) = -sum p log p."""
    return max(0.0, float(-np.sum(xlogy(p.as_array(), p.as_array()))))


def kl_divergence(p: FiniteDistribution, q: FiniteDistribution) -> float:
    """D(p || q); requires matching label sets and p << q."""
    if p.labels != q.labels:
        if set(p.labels) != set(q.labels):
            raise ArgumentError("KL divergence needs distributions on the same labels.")
        order = {label: i for i, label in enumerate(q.labels)}
        q_arr = np.asarray([q.probs[order[label]] for label in p.labels])
    else:
        q_arr = q.as_array()
    return _relative_entropy(p.as_array(), q_arr)


def _relative_entropy(p: np.ndarray, q: np.ndarray) -> float:
    if np.any((q <= 0) & (p > 0)):
        raise SupportError("p puts mass where q has none; D(p || q) is not finite.")
    return max(0.0, float(np.sum(rel_entr(p, q))))


def mutual_information(j: JointPMF) -> float:
    """I(X;Y) = D(P_XY || P_X (x) P_Y) for a 2-axis joint."""
    if j.table.ndim != 2:
        raise DimensionError("mutual_information needs a 2-axis JointPMF.")
    px = j.table.sum(axis=1)
    py = j.table.sum(axis=0)
    return _relative_entropy(j.table, np.outer(px, py))


def conditional_mi(j: JointPMF, given: int = 2) -> float:
    """I(X;Y|Z) for a 3-axis joint, conditioning on axis `given`."""
    if j.table.ndim != 3:
        raise DimensionError("conditional_mi needs a 3-axis JointPMF.")
    if given not in (0, 1, 2):
        raise ArgumentError(f"Conditioning axis {given} does not exist.")
    others = [a for a in range(3) if a != given]
    t = np.transpose(j.table, others + [given])
    pz = t.sum(axis=(0, 1))
    pxz = t.sum(axis=1)
    pyz = t.sum(axis=0)
    # p(x,y,z) p(z) / (p(x,z) p(y,z))
    numerator = t * pz[None, None, :]
    denominator = pxz[:, None, :] * pyz[None, :, :]
    mask = t > 0
    value = float(np.sum(t[mask] * (np.log(numerator[mask]) - np.log(denominator[mask]))))
    return max(0.0, value)


# ---------- Learning-algorithm joints ----------

def _check_kernel_rows(kernel: StochasticKernel, expected: int) -> None:
    if kernel.n_inputs != expected:
        raise DimensionError(
            f"Kernel has {kernel.n_inputs} rows; |Z|^n = {expected}.")


def io_joint(mu: FiniteDistribution, n: int, kernel: StochasticKernel) -> JointPMF:
    """P_{S,W} = mu^{(x)n} (x) P_{W|S}."""
    p_s = dataset_probabilities(mu, n)
    _check_kernel_rows(kernel, p_s.size)
    return JointPMF(p_s[:, None] * kernel.rows, ("S", "W"))


def io_mutual_information(mu: FiniteDistribution, n: int,
                          kernel: StochasticKernel) -> float:
    """I(S;W) under P_{S,W} = mu^{(x)n} (x) P_{W|S}."""
    return mutual_information(io_joint(mu, n, kernel))


def risk_vector_keys(loss: LossTable, n: int) -> np.ndarray:
    """
    Integer keys n*D*L_s(w) for every dataset code (rows) and hypothesis
    (columns). Two datasets share Lambda_W(S) iff their key rows are equal.
    """
    digits = dataset_digits(loss.z_size, n)
    return loss.numerators[:, digits].sum(axis=2).T


def lambda_joint(mu: FiniteDistribution, n: int, kernel: StochasticKernel,
                 loss: LossTable) -> JointPMF:
    """Joint of (Lambda_W(S), W), grouping datasets by exact risk-vector keys."""
    if loss.z_size != mu.size:
        raise DimensionError("Loss table and mu disagree on |Z|.")
    p_s = dataset_probabilities(mu, n)
    _check_kernel_rows(kernel, p_s.size)
    keys = risk_vector_keys(loss, n)
    _, group = np.unique(keys, axis=0, return_inverse=True)
    group = np.asarray(group).reshape(-1)
    table = np.zeros((int(group.max()) + 1, kernel.n_outputs))
    np.add.at(table, group, p_s[:, None] * kernel.rows)
    logger.debug("grouped %d datasets into %d risk vectors", p_s.size, table.shape[0])
    return JointPMF(table, ("Lambda", "W"))


def lambda_mutual_information(mu: FiniteDistribution, n: int,
                              kernel: StochasticKernel, loss: LossTable) -> float:
    """I(Lambda_W(S); W)."""
    return mutual_information(lambda_joint(mu, n, kernel, loss))


def parallel_product_joint(j: JointPMF, m: int) -> JointPMF:
    """Joint of (X^m, Y^m) for m independent copies of (X, Y)."""
    if j.table.ndim != 2:
        raise DimensionError("parallel_product_joint needs a 2-axis JointPMF.")
    if m < 1:
        raise ArgumentError("m must be at least 1.")
    rows, cols = j.table.shape
    table = np.ones((1, 1))
    for _ in range(m):
        # (x_prev, y_prev) x (x, y) -> (x_prev*x, y_prev*y) with kron ordering
        table = np.kron(table, j.table)
    return JointPMF(table.reshape(rows ** m, cols ** m), j.axis_labels)


def empirical_joint(inputs: np.ndarray, outputs: np.ndarray,
                    n_inputs: int, n_outputs: int) -> JointPMF:
    """Plug-in joint from paired samples."""
    counts = np.zeros((n_inputs, n_outputs))
    np.add.at(counts, (np.asarray(inputs, dtype=np.int64),
                       np.asarray(outputs, dtype=np.int64)), 1.0)
    return JointPMF(counts / counts.sum())


# ---------- Subgaussian diagnostics ----------

def default_lambda_grid(values: Sequence[float], points: int = 401) -> Tuple[float, ...]:
    """Symmetric grid reaching |lambda| = 20 / (max - min)."""
    arr = np.asarray(values, dtype=float)
    spread = float(arr.max() - arr.min()) if arr.size else 0.0
    reach = 20.0 / spread if spread > 0 else 20.0
    half = np.linspace(0.0, reach, points // 2 + 1)[1:]
    return tuple(np.concatenate([-half[::-1], [0.0], half]).tolist())


def _centered_log_mgf(values: np.ndarray, probs: np.ndarray,
                      lambdas: np.ndarray) -> np.ndarray:
    centered = values - float(np.dot(probs, values))
    with np.errstate(divide="ignore"):
        log_p = np.log(probs)
    return logsumexp(lambdas[:, None] * centered[None, :] + log_p[None, :], axis=1)


def subgaussian_sigma(values: Sequence[float], probs: FiniteDistribution,
                      lambda_grid: Optional[Sequence[float]] = None,
                      iterations: int = 200) -> SubgaussianCertificate:
    """
    Smallest sigma (found by bisection) such that
        log E[exp(lambda (U - EU))] <= lambda^2 sigma^2 / 2
    for every lambda in the grid. The result certifies the grid only.
    """
    vals = np.asarray(values, dtype=float)
    if vals.size != probs.size:
        raise ArgumentError(f"{vals.size} values for {probs.size} probabilities.")
    if not np.all(np.isfinite(vals)):
        raise ArgumentError("Values must be finite.")
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(vals)
    lambdas = np.asarray(list(lambda_grid), dtype=float)
    if lambdas.size == 0:
        raise ArgumentError("The lambda grid is empty.")
    if not np.allclose(np.sort(lambdas), np.sort(-lambdas)):
        raise ArgumentError("The lambda grid must be symmetric about 0.")

    p = probs.as_array()
    support = vals[p > 0]
    spread = float(support.max() - support.min())
    if spread > 0 and np.max(np.abs(lambdas)) < 20.0 / spread:
        logger.warning("lambda grid reaches %.4g, short of 20/range = %.4g",
                       np.max(np.abs(lambdas)), 20.0 / spread)

    # lambda = 0 holds with equality for every sigma
    active = lambdas[lambdas != 0]
    psi = _centered_log_mgf(vals, p, active)

    def violation(sigma: float) -> float:
        if active.size == 0:
            return 0.0
        return float(np.max(psi - active ** 2 * sigma ** 2 / 2.0))

    lo, hi = 0.0, spread / 2.0
    if spread == 0 or violation(lo) <= 0:
        return SubgaussianCertificate(0.0, tuple(lambdas.tolist()), min(0.0, violation(0.0)))
    for _ in range(64):
        if violation(hi) <= 0:
            break
        hi *= 2.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if violation(mid) <= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return SubgaussianCertificate(hi, tuple(lambdas.tolist()), violation(hi))


def dv_decoupling_check(j: JointPMF, f: np.ndarray, sigma: float) -> Tuple[float, float]:
    """
    Decoupling estimate behind the mutual-information bounds:
        |E f(X,Y) - E f(X',Y')| <= sqrt(2 sigma^2 I(X;Y))
    where (X', Y') ~ P_X (x) P_Y. Returns (lhs, rhs).
    """
    table = np.asarray(f, dtype=float)
    if table.shape != j.table.shape or j.table.ndim != 2:
        raise DimensionError("f must have the shape of the 2-axis joint.")
    if sigma < 0:
        raise ArgumentError("sigma must be nonnegative.")
    product = np.outer(j.table.sum(axis=1), j.table.sum(axis=0))
    lhs = abs(float(np.sum(j.table * table)) - float(np.sum(product * table)))
    rhs = math.sqrt(2.0 * sigma ** 2 * mutual_information(j))
    return lhs, rhs


def exp_channel_capacity_term(mean_risk: float, b: float) -> float:
    """log(1 + mean/b): capacity of the additive exponential-noise channel."""
    if b <= 0:
        raise ArgumentError(f"Noise mean b must be positive, got {b!r}.")
    if mean_risk < 0:
        raise ArgumentError(f"Mean risk must be nonnegative, got {mean_risk!r}.")
    return math.log1p(mean_risk / b)
