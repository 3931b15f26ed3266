# tests/test_bounds.py
# -------------------------------
# Closed-form bound evaluators: worked numeric examples, edge cases and
# argument errors.
# -------------------------------

import math

import pytest

from bounds import (ANCHORS, abs_gen_bounds, cor1_check, covering_bound, default_a_grid,
                    erm_excess_bound, gaussian_kl, gibbs_bounds, mi_gen_bound, monitor_bound,
                    noisy_erm_bound, noisy_erm_channel_bound, report, sample_complexity)
from errors import ArgumentError, SupportError
from models import ContinuousBoundParams, FiniteDistribution


# ---------- mutual-information bounds ----------

def test_mi_gen_examples():
    assert mi_gen_bound(0.5, 10, 0.0) == 0.0
    assert mi_gen_bound(0.5, 2, math.log(2)) == pytest.approx(0.41628, abs=1e-5)


def test_entropy_form_for_uniform_output():
    k, n, sigma = 5, 7, 0.5
    assert mi_gen_bound(sigma, n, math.log(k)) == pytest.approx(math.sqrt(2 * sigma ** 2 * math.log(k) / n))


def test_negative_information_rejected():
    with pytest.raises(ArgumentError):
        mi_gen_bound(0.5, 2, -0.1)


# ---------- sample complexity ----------

def test_independent_sample_complexity_unit_log():
    assert sample_complexity("independent", 1.0, 1.0, 2 / math.e) == 2


def test_thm3_at_zero_epsilon_is_four_times_independent():
    base = 2 * 0.25 / 0.01 * math.log(20)
    assert sample_complexity("thm3", 0.5, 0.1, 0.1, epsilon=0.0) == math.ceil(4 * base)


def test_thm3_example():
    assert sample_complexity("thm3", 0.5, 0.1, 0.1, epsilon=0.05) == 700


def test_markov_and_sqrt_g_forms():
    assert sample_complexity("markov", 1.0, 1.0, 1.0, epsilon=1 - math.log(2)) == 2
    assert sample_complexity("sqrt g", 0.5, 1.0, 2 / math.e) == 4


def test_missing_epsilon_is_argument_error():
    with pytest.raises(ArgumentError):
        sample_complexity("thm3", 0.5, 0.1, 0.1)
    with pytest.raises(ArgumentError):
        sample_complexity("independent", 0.5, 0.1, 0.0)


def test_cor1_check_examples():
    beta = 0.1
    log_term = math.log(2 / beta)
    threshold = 16 * 0.25 / 0.01 * log_term
    assert cor1_check(2, math.ceil(threshold), 0.0, beta, 0.5, 0.1)[1]
    assert not cor1_check(2, math.floor(threshold), 0.0, beta, 0.5, 0.1)[1]
    assert cor1_check(1, 10, 0.0, beta, 0.5, 0.1)[0]
    assert not cor1_check(1, 10, 1e-6, beta, 0.5, 0.1)[0]
    assert cor1_check(8, 64, 7 * beta * log_term - 1e-9, beta, 0.5, 0.1)[0]
    assert not cor1_check(8, 64, 7 * beta * log_term + 1e-9, beta, 0.5, 0.1)[0]


# ---------- absolute gap, covering, two-stage, monitor ----------

def test_abs_gen_examples():
    ours, comparison = abs_gen_bounds(0.5, 100, 1.0)
    assert ours == pytest.approx(math.sqrt(0.005 * (1 + math.log(2))), abs=1e-12)
    assert ours == pytest.approx(0.09203, abs=1e-5)
    assert comparison == pytest.approx(0.05 + 36 * math.sqrt(0.005), abs=1e-12)
    assert ours < comparison
    assert abs_gen_bounds(0.5, 8, 0.0)[0] == pytest.approx(math.sqrt(0.5 * math.log(2) / 8))


def test_covering_examples():
    assert covering_bound(0.5, 100, 2, 1.0) == pytest.approx(
        math.sqrt(0.01 * math.log(2 * math.sqrt(200))), abs=1e-12)
    # 2 B sqrt(d n) = e
    assert covering_bound(0.5, math.e ** 2, 1, 0.5) == pytest.approx(math.sqrt(0.5 / math.e ** 2))
    assert covering_bound(0.5, 100, 3, 1.0) > covering_bound(0.5, 100, 2, 1.0)


def test_covering_clamps_negative_log():
    assert covering_bound(0.5, 1, 1, 0.1) == 0.0


def test_monitor_example():
    assert monitor_bound(0.5, 25, 4, 0.1) == pytest.approx(
        math.sqrt(0.02 * (0.4 + math.log(8))), abs=1e-12)
    assert monitor_bound(0.5, 25, 1, 0.0) == pytest.approx(math.sqrt(0.02 * math.log(2)))


def test_erm_excess():
    assert erm_excess_bound(1, 10) == 0.0
    assert erm_excess_bound(4, 8) == pytest.approx(math.sqrt(math.log(4) / 16))


# ---------- Gibbs ----------

def test_gibbs_gen_and_information_variants():
    params = ContinuousBoundParams(beta=2.0, n=2)
    assert gibbs_bounds(params, variant="gen_eq20").bound_value == 0.5
    assert gibbs_bounds(params, variant="mi_2beta").bound_value == 4.0
    assert gibbs_bounds(params, variant="gen_mi").bound_value == pytest.approx(1.0)


def test_gibbs_risk_with_prior():
    params = ContinuousBoundParams(beta=4.0, n=8, i_o=2, min_risk=0.1)
    q = FiniteDistribution.uniform(4)
    result = gibbs_bounds(params, q, "risk_cor2")
    assert result.bound_value == pytest.approx(0.1 + math.log(4) / 4 + 0.25)
    assert result.anchor == ANCHORS["gibbs_risk_cor2"]


def test_gibbs_risk_anchors_on_the_comparison_hypothesis():
    params = ContinuousBoundParams(beta=4.0, n=8, i_o=3, min_risk=0.1)
    q = FiniteDistribution.uniform(4)
    pop = [0.1, 0.2, 0.6, 0.9]
    result = gibbs_bounds(params, q, "risk_cor2", pop)
    assert result.inputs["risk_o"] == 0.6
    assert result.bound_value == pytest.approx(0.6 + math.log(4) / 4 + 0.25)
    zipf = gibbs_bounds(ContinuousBoundParams(n=100, i_o=2), variant="risk_cor2_zipf",
                        population_risks=pop)
    assert zipf.bound_value == pytest.approx(0.2 + (2 * math.log(2) + 1) / 10)
    with pytest.raises(ArgumentError):
        gibbs_bounds(ContinuousBoundParams(beta=1.0, n=1, i_o=5), q, "risk_cor2", pop)


def test_gibbs_risk_requires_prior_mass_on_best():
    params = ContinuousBoundParams(beta=1.0, n=1, i_o=1)
    with pytest.raises(SupportError):
        gibbs_bounds(params, FiniteDistribution.from_probs([0.0, 1.0]), "risk_cor2")
    with pytest.raises(ArgumentError):
        gibbs_bounds(params, None, "risk_cor2")


def test_zipf_worked_example():
    result = gibbs_bounds(ContinuousBoundParams(n=100, i_o=1), variant="risk_cor2_zipf")
    assert result.bound_value == pytest.approx(0.1, abs=1e-12)
    assert result.inputs["beta"] == pytest.approx(10.0)


def test_uniform_prior_worked_example():
    result = gibbs_bounds(ContinuousBoundParams(n=50, k=8), variant="risk-cor2-uniform")
    assert result.bound_value == pytest.approx(math.sqrt(math.log(8) / 50), abs=1e-12)
    assert result.inputs["unsimplified_excess"] >= result.bound_value
    assert "unsimplified_excess" in result.inputs["note"]


def test_missing_variant_fields():
    with pytest.raises(ArgumentError):
        gibbs_bounds(ContinuousBoundParams(beta=1.0), variant="gen_eq20")
    with pytest.raises(ArgumentError):
        gibbs_bounds(ContinuousBoundParams(beta=1.0, n=1), variant="risk_cor9")


def test_gaussian_kl():
    assert gaussian_kl(3, 0.7, 0.7, (1.0, 2.0, 3.0), (1.0, 2.0, 3.0)) == 0.0
    assert gaussian_kl(1, 1.0, 1.0, (0.0,), (2.0,)) == pytest.approx(2.0)
    with pytest.raises(ArgumentError):
        gaussian_kl(2, 1.0, 1.0, (0.0,), (0.0, 0.0))


def test_lipschitz_grid_minimum_beats_gaussian_closed_form():
    d, rho, n = 2, 0.5, 64
    w_o, w_q = (0.3, -0.1), (0.0, 0.2)
    b = (n * d) ** -0.25 / math.sqrt(rho)
    beta = n ** 0.75 * d ** 0.25 * math.sqrt(rho)
    grid = default_a_grid() + (b,)
    params = ContinuousBoundParams(d=d, rho=rho, n=n, beta=beta, b_width=b,
                                   w_o=w_o, w_Q=w_q, a_grid=grid)
    gauss = gibbs_bounds(params, variant="risk_cor3_gauss")
    lipschitz = gibbs_bounds(params, variant="risk_cor3")
    assert lipschitz.bound_value <= gauss.bound_value + 1e-12

    at_b = gibbs_bounds(ContinuousBoundParams(d=d, rho=rho, n=n, beta=beta, b_width=b,
                                              w_o=w_o, w_Q=w_q, a_grid=(b,)), variant="risk_cor3")
    assert at_b.bound_value == pytest.approx(gauss.bound_value, abs=1e-12)


def test_params_reject_nonpositive_fields():
    with pytest.raises(ArgumentError):
        ContinuousBoundParams(n=0)
    with pytest.raises(ArgumentError):
        ContinuousBoundParams(beta_conf=1.5)


# ---------- noisy ERM ----------

def test_eq25_worked_example():
    assert noisy_erm_bound(i_o=1, n=1000, variant="eq25") == pytest.approx(0.4, abs=1e-12)


def test_eq24_direct_evaluation():
    pop, b = [0.1, 0.5], [0.2, 0.4]
    expected = 0.1 + 0.2 + math.sqrt((0.5 + 1.25) / 20) - 1 / (5 + 2.5)
    assert noisy_erm_bound(pop, b, 10) == pytest.approx(expected, abs=1e-12)


def test_eq24_uses_risk_of_the_comparison_hypothesis():
    pop, b = [0.1, 0.5], [0.2, 0.4]
    expected = 0.5 + 0.4 + math.sqrt((0.5 + 1.25) / 20) - 1 / (5 + 2.5)
    assert noisy_erm_bound(pop, b, 10, i_o=2) == pytest.approx(expected, abs=1e-12)
    assert noisy_erm_bound(pop, b, 10, i_o=2) > noisy_erm_bound(pop, b, 10, i_o=1)


def test_noisy_erm_bound_errors():
    with pytest.raises(ArgumentError):
        noisy_erm_bound([0.1, 0.2], [1.0, 0.0], 10)
    with pytest.raises(ArgumentError):
        noisy_erm_bound([0.1], [1.0, 1.0], 10)
    with pytest.raises(ArgumentError):
        noisy_erm_bound(variant="eq25", n=10)


def test_channel_bound():
    assert noisy_erm_channel_bound([0.0, 0.5], [1.0, 0.25]) == pytest.approx(math.log(3))


def test_report_carries_anchor_and_check():
    result = report("mi_gen", {"sigma": 0.5}, 0.3, 0.2)
    assert result.satisfied and result.slack == pytest.approx(0.1)
    assert report("mi_gen", {}, 0.3, 0.3 + 1e-12).satisfied
    assert not report("mi_gen", {}, 0.3, 0.31).satisfied
    with pytest.raises(ArgumentError):
        report("no_such_bound", {}, 1.0)
