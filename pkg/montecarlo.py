# montecarlo.py
# -------------------------------
# Seeded sampling of (S, W) pairs and the estimators built on it:
#   - estimate_gen: L_mu(W) - L_S(W) per trial, its absolute value, tails
#   - monitor_experiment: m parallel copies, worst signed gap per trial
#
# Pairs are drawn in fixed-size blocks; pair block b uses
# util.streams.block_stream(seed, b). Workers only schedule blocks and
# results are concatenated in block order, so the worker count never changes
# a result. L_mu(W) is always exact (mu is known to the harness).
# -------------------------------

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from config import Config
from errors import ArgumentError, DimensionError
from models import (DatasetIndex, EstimateWithCI, FiniteDistribution, LossTable,
                    MonitorOutcome, StochasticKernel)
from risk import population_risks
from spaces import digits_to_codes
from util.streams import block_stream, trial_blocks

logger = logging.getLogger(__name__)

MIN_GEN_TRIALS = 100


def _check_inputs(mu: FiniteDistribution, n: int, kernel: StochasticKernel) -> None:
    if n < 1:
        raise ArgumentError("n must be at least 1.")
    expected = mu.size ** n
    if kernel.n_inputs != expected:
        raise DimensionError(f"Kernel has {kernel.n_inputs} rows; |Z|^n = {expected}.")


def _draw_block(mu_probs: np.ndarray, n: int, rows: np.ndarray,
                seed: int, block: int, length: int) -> Tuple[np.ndarray, np.ndarray]:
    """Digits (length, n) of S and hypothesis indices W for one block."""
    rng = block_stream(seed, block)
    digits = rng.choice(mu_probs.size, size=(length, n), p=mu_probs)
    codes = digits_to_codes(digits, mu_probs.size)
    cdf = np.cumsum(rows[codes], axis=1)
    cdf /= cdf[:, -1:]
    u = rng.random(length)
    # first w with cdf[w] > u; zero-mass entries are never chosen
    ws = (cdf <= u[:, None]).sum(axis=1)
    return digits, ws


def _draw(mu: FiniteDistribution, n: int, kernel: StochasticKernel, trials: int,
          seed: int, workers: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    if trials < 1:
        raise ArgumentError("trials must be at least 1.")
    _check_inputs(mu, n, kernel)
    mu_probs = mu.as_array()
    blocks = list(trial_blocks(trials, Config.MC_BLOCK_SIZE))
    workers = max(1, workers or Config.WORKERS)
    logger.debug("drawing %d pairs in %d blocks on %d workers", trials, len(blocks), workers)

    def run(spec: Tuple[int, int, int]) -> Tuple[np.ndarray, np.ndarray]:
        block, _, length = spec
        return _draw_block(mu_probs, n, kernel.rows, seed, block, length)

    if workers == 1 or len(blocks) == 1:
        parts = [run(spec) for spec in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    digits = np.concatenate([p[0] for p in parts], axis=0)
    ws = np.concatenate([p[1] for p in parts])
    return digits, ws


def sample_pair_arrays(mu: FiniteDistribution, n: int, kernel: StochasticKernel,
                       trials: int, seed: int,
                       workers: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(dataset codes, hypothesis indices), one entry per trial."""
    digits, ws = _draw(mu, n, kernel, trials, seed, workers)
    return digits_to_codes(digits, mu.size), ws


def sample_pairs(mu: FiniteDistribution, n: int, kernel: StochasticKernel,
                 trials: int, seed: int,
                 workers: Optional[int] = None) -> Iterator[Tuple[DatasetIndex, int]]:
    codes, ws = sample_pair_arrays(mu, n, kernel, trials, seed, workers)
    for code, w in zip(codes.tolist(), ws.tolist()):
        yield DatasetIndex(code, n, mu.size), w


def _gaps(mu: FiniteDistribution, n: int, kernel: StochasticKernel, loss: LossTable,
          trials: int, seed: int,
          workers: Optional[int]) -> Tuple[np.ndarray, np.ndarray]:
    """(L_mu(W) - L_S(W), W) for each sampled pair."""
    if kernel.n_outputs != loss.n_hypotheses:
        raise DimensionError("Kernel outputs and loss hypotheses differ.")
    pop = population_risks(loss, mu)
    digits, ws = _draw(mu, n, kernel, trials, seed, workers)
    empirical = loss.numerators[ws[:, None], digits].sum(axis=1) / (n * loss.denominator)
    return pop[ws] - empirical, ws


@dataclass(frozen=True, eq=False)
class GenEstimate:
    gen: EstimateWithCI
    abs_gen: EstimateWithCI
    gaps: np.ndarray

    def tail(self, alpha: float) -> EstimateWithCI:
        """Fraction of trials with |L_mu(W) - L_S(W)| > alpha."""
        return EstimateWithCI.from_samples(np.abs(self.gaps) > alpha)


def estimate_gen(mu: FiniteDistribution, n: int, kernel: StochasticKernel, loss: LossTable,
                 trials: int, seed: int, workers: Optional[int] = None) -> GenEstimate:
    if trials < MIN_GEN_TRIALS:
        raise ArgumentError(f"estimate_gen needs at least {MIN_GEN_TRIALS} trials.")
    gaps, _ = _gaps(mu, n, kernel, loss, trials, seed, workers)
    return GenEstimate(EstimateWithCI.from_samples(gaps),
                       EstimateWithCI.from_samples(np.abs(gaps)), gaps)


def monitor_experiment(mu: FiniteDistribution, n: int, kernel: StochasticKernel,
                       loss: LossTable, m: int, trials: int, seed: int,
                       workers: Optional[int] = None) -> MonitorOutcome:
    """
    Each trial runs m independent copies; copy c of trial t is pair t*m + c
    of the seeded stream, so m = 1 reproduces estimate_gen draw for draw.
    (T*, R*) maximises r (L_mu(W_t) - L_{S_t}(W_t)); ties go to the smallest
    t, then r = +1. The signed value R* (L_mu(W*) - L_S(W*)) therefore equals
    max_t |gap_t| trial by trial; it is kept as its own estimate for reports.
    """
    if m < 1:
        raise ArgumentError("m must be at least 1.")
    if trials < 1:
        raise ArgumentError("trials must be at least 1.")
    gaps, ws = _gaps(mu, n, kernel, loss, trials * m, seed, workers)
    gaps = gaps.reshape(trials, m)
    signed = np.stack([gaps, -gaps], axis=2).reshape(trials, 2 * m)
    choice = np.argmax(signed, axis=1)
    selected_t = choice // 2 + 1
    selected_r = np.where(choice % 2 == 0, 1, -1)

    selected_w = ws.reshape(trials, m)[np.arange(trials), selected_t - 1]

    chosen = signed[np.arange(trials), choice]
    max_abs = np.abs(gaps).max(axis=1)
    logger.debug("monitor: m=%d trials=%d mean max|gap|=%g", m, trials, float(max_abs.mean()))
    return MonitorOutcome(
        m=m,
        selected_t=selected_t,
        selected_r=selected_r,
        selected_w=selected_w,
        max_abs_gen_estimate=EstimateWithCI.from_samples(max_abs),
        signed_gap_estimate=EstimateWithCI.from_samples(chosen),
    )
