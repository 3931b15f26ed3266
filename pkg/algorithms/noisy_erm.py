# algorithms/noisy_erm.py
# --------------------------------------------
# Noisy ERM: W = argmin_i (L_s(w_i) + N_i), N_i ~ Exponential(mean b_i),
# independent across hypotheses.
#
# Exact mode integrates P(W = j | s) in closed form. With T_i = L_i + N_i,
#   P(W = j) = int_{L_j}^inf (1/b_j) e^{-(t-L_j)/b_j} prod_{i != j} P(T_i > t) dt.
# Between consecutive sorted breakpoints the set A = {i : L_i <= t} is fixed
# and the integrand is (1/b_j) exp(-sum_{i in A} (t - L_i)/b_i), so each
# segment contributes a closed-form term shared by every j in A.
# --------------------------------------------

from __future__ import annotations

import logging
from enum import Enum
from typing import Sequence

import numpy as np

from config import Config
from errors import ArgumentError, CapacityError, DimensionError
from info import risk_vector_keys
from models import LossTable, StochasticKernel
from util.name_map import to_canonical
from util.streams import block_stream, trial_blocks

logger = logging.getLogger(__name__)


class NoiseMode(str, Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"

    @classmethod
    def parse(cls, raw: "str | NoiseMode") -> "NoiseMode":
        if isinstance(raw, NoiseMode):
            return raw
        try:
            return cls(to_canonical(raw))
        except ValueError:
            raise ArgumentError(f"Unknown noisy ERM mode {raw!r}.") from None


def _check_noise_means(noise_means: Sequence[float], k: int) -> np.ndarray:
    b = np.asarray(noise_means, dtype=float)
    if b.shape != (k,):
        raise DimensionError(f"{b.size} noise means for {k} hypotheses.")
    if np.any(~np.isfinite(b)) or np.any(b <= 0):
        raise ArgumentError("Every noise mean b_i must be positive and finite.")
    return b


def argmin_probabilities(risks: Sequence[float], noise_means: Sequence[float]) -> np.ndarray:
    """Exact P(argmin_i (L_i + N_i) = j) for one risk vector."""
    L = np.asarray(risks, dtype=float)
    b = _check_noise_means(noise_means, L.size)
    rates = 1.0 / b

    breakpoints = np.unique(L)
    # A(u) for segment starting at breakpoint u: every i with L_i <= u
    active = L[None, :] <= breakpoints[:, None]
    lam = active @ rates
    decay = (active * (breakpoints[:, None] - L[None, :])) @ rates
    widths = np.append(np.diff(breakpoints), np.inf)
    # int_u^v exp(-sum_A (t - L_i)/b_i) dt
    mass = -np.expm1(-lam * widths)
    segment = np.exp(-decay) * mass / lam
    tail = np.cumsum(segment[::-1])[::-1]
    start = np.searchsorted(breakpoints, L)
    return rates * tail[start]


def harmonic_noise_means(k: int, n: int, exponent: float = 1.1) -> np.ndarray:
    """b_i = i^exponent / n^(1/3): stronger noise on less-preferred hypotheses."""
    if k < 1 or n < 1:
        raise ArgumentError("k and n must be at least 1.")
    return np.arange(1, k + 1, dtype=float) ** exponent / n ** (1.0 / 3.0)


def _monte_carlo_row(risks: np.ndarray, b: np.ndarray, samples: int,
                     seed: int, group: int) -> np.ndarray:
    counts = np.zeros(risks.size)
    for block, _, length in trial_blocks(samples, Config.MC_BLOCK_SIZE):
        rng = block_stream(seed, block, group)
        noisy = risks[None, :] + rng.exponential(b, size=(length, risks.size))
        counts += np.bincount(np.argmin(noisy, axis=1), minlength=risks.size)
    return counts / samples


def noisy_erm_kernel(loss: LossTable, mu_size: int, n: int,
                     noise_means: Sequence[float],
                     mode: "str | NoiseMode" = NoiseMode.EXACT,
                     samples: int = 1_000_000, seed: int = 0) -> StochasticKernel:
    if mu_size != loss.z_size:
        raise DimensionError(f"|Z| = {mu_size} but the loss table has {loss.z_size} columns.")
    b = _check_noise_means(noise_means, loss.n_hypotheses)
    mode = NoiseMode.parse(mode)
    if mode is NoiseMode.EXACT and loss.n_hypotheses > Config.MAX_NOISY_ERM_HYPOTHESES:
        raise CapacityError(
            f"Exact noisy ERM supports at most {Config.MAX_NOISY_ERM_HYPOTHESES} hypotheses.")
    if mode is NoiseMode.MONTE_CARLO and samples < 1:
        raise ArgumentError("Monte Carlo mode needs at least one sample.")

    keys = risk_vector_keys(loss, n)
    unique_keys, group = np.unique(keys, axis=0, return_inverse=True)
    group = np.asarray(group).reshape(-1)
    unique_risks = unique_keys / (n * loss.denominator)

    if mode is NoiseMode.EXACT:
        table = np.vstack([argmin_probabilities(r, b) for r in unique_risks])
    else:
        table = np.vstack([_monte_carlo_row(r, b, samples, seed, g)
                           for g, r in enumerate(unique_risks)])
    logger.debug("noisy erm (%s): %d distinct risk vectors", mode.value, unique_risks.shape[0])
    return StochasticKernel(table[group], "dataset")
