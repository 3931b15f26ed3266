# algorithms/erm.py
# --------------------------------------------
# Empirical risk minimization over a finite class.
# Ties are detected on the integer risk keys n*D*L_s(w), never on floats,
# so rows with equal risk vectors come out identical and the kernel
# factors through Lambda_W(S).
# --------------------------------------------

from __future__ import annotations

import logging
from enum import Enum

import numpy as np

from errors import ArgumentError, DimensionError
from info import risk_vector_keys
from models import LossTable, StochasticKernel
from util.name_map import to_canonical

logger = logging.getLogger(__name__)


class TieRule(str, Enum):
    LOWEST_INDEX = "lowest_index"
    UNIFORM = "uniform"

    @classmethod
    def parse(cls, raw: "str | TieRule") -> "TieRule":
        if isinstance(raw, TieRule):
            return raw
        try:
            return cls(to_canonical(raw))
        except ValueError:
            raise ArgumentError(f"Unknown tie rule {raw!r}.") from None


def argmin_rows(keys: np.ndarray, tie_rule: "str | TieRule" = TieRule.LOWEST_INDEX) -> np.ndarray:
    """Row-stochastic matrix placing mass on the argmin of each integer key row."""
    rule = TieRule.parse(tie_rule)
    minimal = keys == keys.min(axis=1, keepdims=True)
    if rule is TieRule.LOWEST_INDEX:
        rows = np.zeros(keys.shape)
        rows[np.arange(keys.shape[0]), np.argmax(minimal, axis=1)] = 1.0
        return rows
    return minimal / minimal.sum(axis=1, keepdims=True)


def erm_kernel(loss: LossTable, mu_size: int, n: int,
               tie_rule: "str | TieRule" = TieRule.LOWEST_INDEX) -> StochasticKernel:
    """Kernel whose row s is the ERM choice on dataset s."""
    if mu_size != loss.z_size:
        raise DimensionError(f"|Z| = {mu_size} but the loss table has {loss.z_size} columns.")
    keys = risk_vector_keys(loss, n)
    rows = argmin_rows(keys, tie_rule)
    logger.debug("erm kernel: %d datasets, %d hypotheses, ties=%s",
                 keys.shape[0], keys.shape[1], TieRule.parse(tie_rule).value)
    return StochasticKernel(rows, "dataset")
