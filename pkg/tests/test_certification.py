# tests/test_certification.py
# -------------------------------
# Property sweeps over seeded random problems (|Z| <= 3, n <= 4, |W| <= 5,
# losses on the grid D = 1000, sigma = 1/2). Every case is exact
# enumeration; nothing here samples.
# Deselect with: pytest -m "not slow"
# -------------------------------

import math

import numpy as np
import pytest

from algorithms.gibbs import gibbs_kernel, gibbs_objective
from bounds import abs_gen_bounds, gibbs_bounds, mi_gen_bound
from info import io_mutual_information, lambda_mutual_information
from models import ContinuousBoundParams, StochasticKernel
from risk import exact_risk_summary, population_risks
from seed_problems import random_distribution, random_loss, random_problem

SIGMA = 0.5
TOL = 1e-9

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def sweep():
    rng = np.random.default_rng(2024)
    cases = []
    for _ in range(1000):
        p = random_problem(rng)
        cases.append((
            p,
            exact_risk_summary(p.mu, p.n, p.kernel, p.loss),
            io_mutual_information(p.mu, p.n, p.kernel),
            lambda_mutual_information(p.mu, p.n, p.kernel, p.loss),
        ))
    return cases


def test_gen_within_mutual_information_bound(sweep):
    for p, summary, io_mi, _ in sweep:
        assert abs(summary.gen_error) <= mi_gen_bound(SIGMA, p.n, io_mi) + TOL


def test_lambda_information_is_tighter_and_still_bounds(sweep):
    for p, summary, io_mi, lam_mi in sweep:
        assert lam_mi <= io_mi + 1e-10
        assert abs(summary.gen_error) <= mi_gen_bound(SIGMA, p.n, lam_mi) + TOL


def test_absolute_gap_bound_and_comparison(sweep):
    for p, summary, _, lam_mi in sweep:
        ours, comparison = abs_gen_bounds(SIGMA, p.n, lam_mi)
        assert summary.abs_gen_error <= ours + TOL
        if lam_mi >= 0.01:
            assert ours < comparison


def test_every_kernel_kind_is_covered(sweep):
    assert {p.kind for p, *_ in sweep} == {"random", "erm", "gibbs", "independent"}


def test_gibbs_grid():
    rng = np.random.default_rng(77)
    for beta in (0.5, 1.0, 2.0, 5.0, 10.0):
        for n in (1, 2, 3, 4):
            for _ in range(5):
                z_size, k = int(rng.integers(1, 4)), int(rng.integers(1, 6))
                mu = random_distribution(rng, z_size)
                loss = random_loss(rng, k, z_size)
                q = random_distribution(rng, k, allow_zeros=False)
                kernel = gibbs_kernel(loss, z_size, n, beta, q)
                summary = exact_risk_summary(mu, n, kernel, loss)
                pop = population_risks(loss, mu)
                i_o = int(np.argmin(pop)) + 1
                params = ContinuousBoundParams(beta=beta, n=n, i_o=i_o, min_risk=float(pop.min()))

                assert abs(summary.gen_error) <= beta / (2 * n) + TOL
                assert io_mutual_information(mu, n, kernel) <= 2 * beta + TOL
                cor2 = gibbs_bounds(params, q, "risk_cor2").bound_value
                assert summary.expected_population <= cor2 + TOL


def test_gibbs_optimality_against_perturbations():
    rng = np.random.default_rng(5)
    for _ in range(100):
        z_size, n, k = int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(2, 6))
        mu = random_distribution(rng, z_size)
        loss = random_loss(rng, k, z_size)
        q = random_distribution(rng, k, allow_zeros=False)
        beta = float(rng.choice([0.5, 1.0, 2.0, 5.0, 10.0]))
        best = gibbs_kernel(loss, z_size, n, beta, q)
        optimum = gibbs_objective(mu, n, best, loss, beta, q)
        for _ in range(100):
            noise = rng.dirichlet(np.ones(k), size=best.n_inputs)
            weight = float(rng.uniform(0.01, 1.0))
            mixed = (1 - weight) * best.rows + weight * noise
            other = StochasticKernel(mixed / mixed.sum(axis=1, keepdims=True))
            assert optimum <= gibbs_objective(mu, n, other, loss, beta, q) + TOL


def test_uniform_prior_excess_is_below_its_unsimplified_form():
    for n in (10, 100, 1000):
        for k in (2, 5, 50):
            report = gibbs_bounds(ContinuousBoundParams(n=n, k=k), variant="risk_cor2_uniform")
            assert report.bound_value == pytest.approx(math.sqrt(math.log(k) / n), abs=1e-12)
            assert report.bound_value <= report.inputs["unsimplified_excess"]
