# seed_problems.py
# -------------------------------
# Purpose:
#   Reproducible random problems for the certification sweeps, the `sweep`
#   subcommand and the test suite.
#
# What this module provides:
#   - random_problem: (mu, loss, n, kernel) with |Z|, n, |W| drawn under caps
#     and losses on the grid {0, 1/D, ..., 1}.
#   - random_plan: a k-stage adaptive composition plan over a problem.
#   - random_chain: two chainable kernels for data-processing checks.
#
# Every generator takes a numpy Generator, so a seed fixes the whole problem.
# -------------------------------

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from algorithms.erm import erm_kernel
from algorithms.gibbs import gibbs_kernel
from errors import ArgumentError
from models import CompositionPlan, FiniteDistribution, LossTable, StochasticKernel

KERNEL_KINDS = ("random", "erm", "gibbs", "independent")


@dataclass(frozen=True, eq=False)
class Problem:
    mu: FiniteDistribution
    loss: LossTable
    n: int
    kernel: StochasticKernel
    kind: str

    @property
    def n_datasets(self) -> int:
        return self.mu.size ** self.n


def random_distribution(rng: np.random.Generator, k: int,
                        allow_zeros: bool = True) -> FiniteDistribution:
    probs = rng.dirichlet(np.ones(k))
    if allow_zeros and k > 1 and rng.random() < 0.2:
        probs[rng.integers(k)] = 0.0
    return FiniteDistribution.from_probs(probs.tolist(), renormalize=True)


def random_rows(rng: np.random.Generator, n_inputs: int, n_outputs: int) -> np.ndarray:
    """Dirichlet rows, some of them sharpened to near-deterministic choices."""
    rows = rng.dirichlet(np.full(n_outputs, 0.5), size=n_inputs)
    sharp = rng.random(n_inputs) < 0.3
    if sharp.any():
        picks = rng.integers(n_outputs, size=int(sharp.sum()))
        rows[sharp] = np.eye(n_outputs)[picks]
    return rows


def random_loss(rng: np.random.Generator, n_hypotheses: int, z_size: int,
                denominator: int = 1000) -> LossTable:
    numerators = rng.integers(0, denominator + 1, size=(n_hypotheses, z_size))
    return LossTable(numerators.astype(np.int64), denominator, (0.0, 1.0))


def random_problem(rng: np.random.Generator, max_z: int = 3, max_n: int = 4,
                   max_w: int = 5, denominator: int = 1000,
                   kind: Optional[str] = None) -> Problem:
    if min(max_z, max_n, max_w) < 1:
        raise ArgumentError("Problem caps must be at least 1.")
    z_size = int(rng.integers(1, max_z + 1))
    n = int(rng.integers(1, max_n + 1))
    n_hypotheses = int(rng.integers(1, max_w + 1))
    kind = kind or KERNEL_KINDS[int(rng.integers(len(KERNEL_KINDS)))]
    if kind not in KERNEL_KINDS:
        raise ArgumentError(f"Unknown kernel kind {kind!r}.")

    mu = random_distribution(rng, z_size)
    loss = random_loss(rng, n_hypotheses, z_size, denominator)
    n_datasets = z_size ** n
    if kind == "erm":
        kernel = erm_kernel(loss, z_size, n, "uniform" if rng.random() < 0.5 else "lowest_index")
    elif kind == "gibbs":
        beta = float(rng.choice([0.5, 1.0, 2.0, 5.0, 10.0]))
        kernel = gibbs_kernel(loss, z_size, n, beta, random_distribution(rng, n_hypotheses, False))
    elif kind == "independent":
        kernel = StochasticKernel.constant(n_datasets, rng.dirichlet(np.ones(n_hypotheses)))
    else:
        kernel = StochasticKernel(random_rows(rng, n_datasets, n_hypotheses))
    return Problem(mu, loss, n, kernel, kind)


def random_plan(rng: np.random.Generator, n_datasets: int, stages: int = 2,
                max_outputs: int = 3) -> CompositionPlan:
    """Stage j reads (S, W^{j-1}); its rows follow CompositionPlan's layout."""
    kernels = []
    prior_size = 1
    for _ in range(stages):
        k = int(rng.integers(2, max_outputs + 1))
        kernels.append(StochasticKernel(random_rows(rng, prior_size * n_datasets, k), "adaptive"))
        prior_size *= k
    return CompositionPlan(tuple(kernels))


def random_chain(rng: np.random.Generator, n_inputs: int,
                 max_mid: int = 4, max_out: int = 4) -> Tuple[StochasticKernel, StochasticKernel]:
    mid = int(rng.integers(1, max_mid + 1))
    out = int(rng.integers(1, max_out + 1))
    first = StochasticKernel(random_rows(rng, n_inputs, mid), "x")
    second = StochasticKernel(random_rows(rng, mid, out), "y")
    return first, second
