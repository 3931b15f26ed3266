# tests/test_noisy_erm.py
# -------------------------------
# Exponential-noise ERM: exact argmin probabilities, agreement with
# sampling, and the population-risk / information bounds it satisfies.
# -------------------------------

import math

import numpy as np
import pytest

from algorithms.noisy_erm import (NoiseMode, argmin_probabilities, harmonic_noise_means,
                                  noisy_erm_kernel)
from bounds import noisy_erm_bound, noisy_erm_channel_bound
from config import Config
from errors import ArgumentError, CapacityError, DimensionError
from info import io_mutual_information
from models import FiniteDistribution, LossTable
from risk import exact_risk_summary, population_risks
from seed_problems import random_distribution, random_loss


@pytest.fixture
def rng():
    return np.random.default_rng(314)


def test_symmetric_risks_give_uniform_choice():
    assert argmin_probabilities([0.3, 0.3, 0.3], [1.0, 1.0, 1.0]) == pytest.approx([1 / 3] * 3)


def test_two_hypothesis_closed_form():
    probs = argmin_probabilities([0.0, 0.5], [1.0, 1.0])
    assert probs[1] == pytest.approx(math.exp(-0.5) / 2, abs=1e-12)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_unequal_noise_single_breakpoint():
    # equal risks: P(j) is the share of rate 1/b_j among all rates
    probs = argmin_probabilities([0.2, 0.2], [1.0, 3.0])
    assert probs == pytest.approx([0.75, 0.25])


def test_rows_are_distributions(rng):
    for _ in range(50):
        k = int(rng.integers(1, 7))
        risks = rng.random(k)
        b = rng.uniform(0.05, 2.0, size=k)
        probs = argmin_probabilities(risks, b)
        assert np.all(probs >= 0)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_lower_risk_is_preferred_under_equal_noise():
    probs = argmin_probabilities([0.1, 0.4, 0.9], [0.5, 0.5, 0.5])
    assert probs[0] > probs[1] > probs[2]


def test_noise_means_must_be_positive():
    with pytest.raises(ArgumentError):
        argmin_probabilities([0.0, 0.5], [1.0, 0.0])
    with pytest.raises(DimensionError):
        argmin_probabilities([0.0, 0.5], [1.0])


def test_harmonic_schedule():
    b = harmonic_noise_means(3, 8)
    assert b == pytest.approx([1 / 2, 2 ** 1.1 / 2, 3 ** 1.1 / 2])


def test_exact_capacity_guard(monkeypatch):
    monkeypatch.setattr(Config, "MAX_NOISY_ERM_HYPOTHESES", 2)
    loss = LossTable(np.array([[0], [1], [1]]), 1)
    with pytest.raises(CapacityError):
        noisy_erm_kernel(loss, 1, 1, [1.0, 1.0, 1.0])


def test_unknown_mode():
    with pytest.raises(ArgumentError):
        NoiseMode.parse("importance sampling")


def test_kernel_rows_shared_by_equal_risk_vectors():
    loss = LossTable(np.array([[0, 1], [1, 0]]), 1)
    kernel = noisy_erm_kernel(loss, 2, 2, [0.5, 0.5])
    # codes 1 and 2 both have risk vector (1/2, 1/2)
    assert np.array_equal(kernel.rows[1], kernel.rows[2])
    assert kernel.rows[1] == pytest.approx([0.5, 0.5])


@pytest.mark.slow
def test_monte_carlo_rows_match_exact(rng):
    loss = random_loss(rng, 3, 2, 10)
    b = [0.3, 0.5, 0.8]
    exact = noisy_erm_kernel(loss, 2, 2, b)
    samples = 1_000_000
    sampled = noisy_erm_kernel(loss, 2, 2, b, mode="monte carlo", samples=samples, seed=5)
    se = np.sqrt(exact.rows * (1 - exact.rows) / samples)
    assert np.all(np.abs(sampled.rows - exact.rows) <= 3 * se + 1e-12)


def test_population_risk_within_bounds(rng):
    for _ in range(30):
        z_size, n, k = int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(1, 5))
        mu = random_distribution(rng, z_size)
        loss = random_loss(rng, k, z_size, 100)
        b = rng.uniform(0.05, 1.0, size=k)
        kernel = noisy_erm_kernel(loss, z_size, n, b)
        pop = population_risks(loss, mu)
        expected_pop = exact_risk_summary(mu, n, kernel, loss).expected_population
        assert expected_pop <= noisy_erm_bound(pop, b, n) + 1e-9
        assert expected_pop <= noisy_erm_bound(pop, b, n, variant="eq24_log") + 1e-9
        assert io_mutual_information(mu, n, kernel) <= noisy_erm_channel_bound(pop, b) + 1e-9


def test_bound_compares_against_the_chosen_hypothesis():
    # w_1 is the worse hypothesis but carries almost no noise, so noisy ERM
    # picks it often; the bound must start from L_mu(w_1), not min L_mu
    loss = LossTable(np.array([[1], [0]]), 2)
    mu = FiniteDistribution.uniform(1)
    b, n = [0.01, 5.0], 1000
    kernel = noisy_erm_kernel(loss, 1, n, b)
    pop = population_risks(loss, mu)
    expected_pop = exact_risk_summary(mu, n, kernel, loss).expected_population
    assert expected_pop > 0.4
    for variant in ("eq24", "eq24_log"):
        value = noisy_erm_bound(pop, b, n, i_o=1, variant=variant)
        assert value >= 0.5
        assert expected_pop <= value + 1e-9


def test_log_form_is_never_looser():
    pop, b = [0.2, 0.6, 0.9], [0.1, 0.3, 0.4]
    assert noisy_erm_bound(pop, b, 10, variant="eq24_log") <= noisy_erm_bound(pop, b, 10)
