# algorithms/composition.py
# --------------------------------------------
# Chaining kernels (pre/post-processing) and k-fold adaptive composition.
# Outputs of an adaptive plan are coded mixed-radix with W_1 least
# significant, matching the row layout documented on CompositionPlan.
# --------------------------------------------

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from errors import DimensionError
from info import conditional_mi, mutual_information
from models import CompositionPlan, FiniteDistribution, JointPMF, StochasticKernel
from spaces import check_capacity, dataset_probabilities

logger = logging.getLogger(__name__)


def chain_kernel(first: StochasticKernel, second: StochasticKernel) -> StochasticKernel:
    """X -> Y~ -> Y: the composite kernel is the matrix product."""
    if first.n_outputs != second.n_inputs:
        raise DimensionError(
            f"First kernel emits {first.n_outputs} values; second expects {second.n_inputs}.")
    return StochasticKernel(first.rows @ second.rows, first.input_arity)


@dataclass(frozen=True)
class ChainInformation:
    first_mi: float      # I(X; Y~)
    second_mi: float     # I(Y~; Y)
    end_to_end_mi: float  # I(X; Y)

    @property
    def data_processing_holds(self) -> bool:
        return self.end_to_end_mi <= min(self.first_mi, self.second_mi) + 1e-10


def data_processing_mis(p_in: FiniteDistribution, first: StochasticKernel,
                        second: StochasticKernel) -> ChainInformation:
    """
    Mutual informations along X -> Y~ -> Y. With X = S this covers both
    preprocessing (first = S -> S~) and postprocessing (first = S -> W~).
    """
    if first.n_inputs != p_in.size:
        raise DimensionError("Input distribution and first kernel disagree on size.")
    p_x = p_in.as_array()
    first_joint = p_x[:, None] * first.rows
    p_mid = first_joint.sum(axis=0)
    composite = chain_kernel(first, second)
    return ChainInformation(
        first_mi=mutual_information(JointPMF(first_joint)),
        second_mi=mutual_information(JointPMF(p_mid[:, None] * second.rows)),
        end_to_end_mi=mutual_information(JointPMF(p_x[:, None] * composite.rows)),
    )


@dataclass(frozen=True, eq=False)
class AdaptiveResult:
    joint_kernel: StochasticKernel        # P(W^k | S), columns coded W_1 least significant
    stage_terms: Tuple[float, ...]        # I(S; W_j | W^{j-1})
    total_mi: float                       # I(S; W^k)
    last_mi: float                        # I(S; W_k)

    @property
    def chain_sum(self) -> float:
        return float(sum(self.stage_terms))


def compose_adaptive(plan: CompositionPlan, mu: FiniteDistribution, n: int) -> AdaptiveResult:
    p_s = dataset_probabilities(mu, n)
    n_datasets = p_s.size
    if plan.n_datasets != n_datasets:
        raise DimensionError(f"Plan expects {plan.n_datasets} datasets; |Z|^n = {n_datasets}.")
    total_outputs = int(np.prod(plan.output_sizes))
    check_capacity(total_outputs, 1)

    prior = np.ones((n_datasets, 1))    # P(w^{j-1} | s)
    terms = []
    for stage in plan.stages:
        prior_size = prior.shape[1]
        k = stage.n_outputs
        # row index = prior_code * n_datasets + s  ->  (s, prior_code, w_j)
        conditional = stage.rows.reshape(prior_size, n_datasets, k).transpose(1, 0, 2)
        step = prior[:, :, None] * conditional
        # axes (S, W_j, W^{j-1}) for I(S; W_j | W^{j-1})
        three_way = p_s[:, None, None] * step.transpose(0, 2, 1)
        terms.append(conditional_mi(JointPMF(three_way, ("S", "W_j", "W_prev")), given=2))
        # new code = prior_code + prior_size * w_j
        prior = step.transpose(0, 2, 1).reshape(n_datasets, prior_size * k)

    joint_kernel = StochasticKernel(prior, "dataset")
    total_mi = mutual_information(JointPMF(p_s[:, None] * prior, ("S", "W^k")))
    last_size = plan.output_sizes[-1]
    last = prior.reshape(n_datasets, last_size, -1).sum(axis=2)
    last_mi = mutual_information(JointPMF(p_s[:, None] * last, ("S", "W_k")))
    logger.debug("adaptive composition: %d stages, %d joint outputs", len(plan.stages), total_outputs)
    return AdaptiveResult(joint_kernel, tuple(terms), total_mi, last_mi)
