# spaces.py
# -------------------------------
# Finite probability spaces, exact product distributions and mixed-radix
# enumeration of datasets S in Z^n.
# Digit convention: Z_1 is the least-significant digit, so
#   code = sum_i index(Z_i) * |Z|^(i-1).
# -------------------------------

from __future__ import annotations

import logging
from typing import Iterator, Sequence

import numpy as np

from config import Config
from errors import ArgumentError, CapacityError, DomainError
from models import DatasetIndex, FiniteDistribution

logger = logging.getLogger(__name__)

_UINT64_MAX = 2**64 - 1


def encode_dataset(digits: Sequence[int], z_size: int) -> DatasetIndex:
    """Encode an n-tuple of instance indices as its mixed-radix code."""
    if not digits:
        raise ArgumentError("A dataset needs at least one instance.")
    if z_size < 1:
        raise ArgumentError("|Z| must be at least 1.")
    if z_size ** len(digits) - 1 > _UINT64_MAX:
        raise CapacityError(
            f"|Z|^n = {z_size}^{len(digits)} does not fit in 64 bits.")
    code = 0
    for position, digit in enumerate(digits):
        if not 0 <= int(digit) < z_size:
            raise DomainError(
                f"Instance index {digit} at position {position} outside [0, {z_size}).")
        code += int(digit) * z_size ** position
    return DatasetIndex(code, len(digits), z_size)


def decode_dataset(index: DatasetIndex) -> tuple:
    return index.digits()


def check_capacity(z_size: int, n: int) -> int:
    """Return |Z|^n, or raise CapacityError when exact enumeration is refused."""
    count = z_size ** n
    if count > Config.MAX_ENUMERATION:
        raise CapacityError(
            f"|Z|^n = {count} exceeds the enumeration guard "
            f"({Config.MAX_ENUMERATION}); use the Monte Carlo path instead.")
    return count


def enumerate_datasets(z_size: int, n: int) -> Iterator[DatasetIndex]:
    for code in range(check_capacity(z_size, n)):
        yield DatasetIndex(code, n, z_size)


def dataset_digits(z_size: int, n: int) -> np.ndarray:
    """(|Z|^n, n) matrix whose row c holds the digits of dataset code c."""
    count = check_capacity(z_size, n)
    codes = np.arange(count, dtype=np.int64)
    powers = np.asarray(z_size, dtype=np.int64) ** np.arange(n, dtype=np.int64)
    return (codes[:, None] // powers[None, :]) % z_size


def digits_to_codes(digits: np.ndarray, z_size: int) -> np.ndarray:
    """Vectorised encode for a (rows, n) digit matrix."""
    n = digits.shape[1]
    powers = np.asarray(z_size, dtype=np.int64) ** np.arange(n, dtype=np.int64)
    return digits.astype(np.int64) @ powers


def product_probability(mu: FiniteDistribution, s: DatasetIndex) -> float:
    """mu^{(x)n}(s) = prod_i mu(Z_i)."""
    if s.z_size != mu.size:
        raise DomainError(
            f"Dataset alphabet has {s.z_size} symbols, distribution has {mu.size}.")
    prob = 1.0
    for digit in s.digits():
        prob *= mu.probs[digit]
    return prob


def dataset_probabilities(mu: FiniteDistribution, n: int) -> np.ndarray:
    """Vector of mu^{(x)n}(s) over every dataset code."""
    digits = dataset_digits(mu.size, n)
    probs = np.prod(mu.as_array()[digits], axis=1)
    logger.debug("enumerated %d datasets (|Z|=%d, n=%d)", probs.size, mu.size, n)
    return probs


def dataset_distribution(mu: FiniteDistribution, n: int) -> FiniteDistribution:
    """P_S as a FiniteDistribution labeled by dataset code."""
    return FiniteDistribution.from_probs(
        dataset_probabilities(mu, n).tolist(), renormalize=True)
