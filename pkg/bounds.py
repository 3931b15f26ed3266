# bounds.py
# -------------------------------
# Closed-form evaluators for the generalization, excess-risk and
# sample-complexity bounds. Plain formulas return floats; `report` wraps a
# value together with its anchor formula and an optional measured quantity.
# All logarithms are natural (nats).
# -------------------------------

from __future__ import annotations

import logging
import math
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from errors import ArgumentError, SupportError
from info import exp_channel_capacity_term
from models import BoundReport, ContinuousBoundParams, FiniteDistribution
from util.name_map import to_canonical

logger = logging.getLogger(__name__)


ANCHORS: Dict[str, str] = {
    "mi_gen": "|gen| <= sqrt(2 sigma^2 I(S;W) / n)",
    "lambda_gen": "|gen| <= sqrt(2 sigma^2 I(Lambda_W(S);W) / n)",
    "entropy_gen": "|gen| <= sqrt(2 sigma^2 H(W) / n)",
    "sample_independent": "n = (2 sigma^2 / alpha^2) log(2/beta)",
    "sample_thm3": "n = (8 sigma^2 / alpha^2) (eps/beta + log(2/beta))",
    "sample_markov": "n = 2 sigma^2 (eps + log 2) / (alpha^2 beta^2)",
    "sample_sqrt_g": "n = (64 sigma^4 / alpha^4) log(2/beta)^2",
    "cor1": "eps <= (g(n)-1) beta log(2/beta) and n/g(n) >= (8 sigma^2/alpha^2) log(2/beta)",
    "abs_gen": "E|L_mu(W) - L_S(W)| <= sqrt((2 sigma^2 / n)(eps + log 2))",
    "abs_gen_comparison": "E|L_S(W) - L_mu(W)| <= sigma/sqrt(n) + 36 sqrt(2 sigma^2 eps / n)",
    "covering": "|gen| <= sqrt((2 sigma^2 d / n) log(2 B sqrt(d n)))",
    "two_stage": "E[L_mu(W) - L_S2(W)] <= sqrt(V log(n1+1) / (2 n2))",
    "gibbs_gen_eq20": "|gen| <= beta / (2n)",
    "gibbs_mi_2beta": "I(S;W) <= 2 beta",
    "gibbs_gen_mi": "|gen| <= sqrt(beta / n)",
    "gibbs_risk_cor2": "E[L_mu(W)] <= L_mu(w_o) + (1/beta) log(1/Q(w_o)) + beta/(2n)",
    "gibbs_risk_cor2_zipf": "E[L_mu(W)] <= L_mu(w_io) + (2 log i_o + 1)/sqrt(n)",
    "gibbs_risk_cor2_uniform": "E[L_mu(W)] <= min L_mu + sqrt(log k / n)",
    "gibbs_risk_cor3": "E[L_mu(W)] <= min L_mu + beta/(2n) + inf_a (a rho sqrt(d) + D(N(w_o,a^2 I)||Q)/beta)",
    "gibbs_risk_cor3_gauss": "E[L_mu(W)] <= min L_mu + (d^(1/4) rho^(1/2) / (2 n^(1/4))) (|w_Q - w_o|^2 + 3)",
    "noisy_erm_eq24": "E[L_mu(W)] <= L_mu(w_io) + b_io + sqrt((1/2n) sum L_mu(w_i)/b_i) - (sum 1/b_i)^-1",
    "noisy_erm_eq24_log": "E[L_mu(W)] <= L_mu(w_io) + b_io + sqrt((1/2n) sum log(1 + L_mu(w_i)/b_i)) - (sum 1/b_i)^-1",
    "noisy_erm_eq25": "E[L_mu(W)] <= min L_mu + (i_o^1.1 + 3) / n^(1/3)",
    "noisy_erm_channel": "I(S;W) <= sum log(1 + L_mu(w_i)/b_i)",
    "monitor": "E[max_t |gen_t|] <= sqrt((2 sigma^2 / n)(m eps + log(2m)))",
    "erm_excess": "E[L_mu(W_ERM)] <= min L_mu + sqrt(log k / (2n))",
    # structural checks: bound_value is the right-hand side, measured the left
    "mi_ordering": "I(Lambda_W(S);W) <= I(S;W)",
    "prefix_mi": "max_s1 [I(S2;W|S1=s1) - log |patterns(s1)|] <= 0",
    "prefix_entropy": "max_s1 [H(W|S1=s1) - log |patterns(s1)|] <= 0",
    "prefix_patterns": "max_s1 log |patterns(s1)| <= V log(n1+1)",
    "chain_rule": "|sum_j I(S;W_j|W^{j-1}) - I(S;W^k)| = 0",
    "composition_last": "I(S;W_k) <= I(S;W^k)",
    "monitor_additivity": "|I(Lambda^m;W^m) - m I(Lambda;W)| = 0",
    "sweep_mi_gen": "max over problems of |gen| - sqrt(2 sigma^2 I(S;W)/n) <= 0",
    "sweep_lambda_gen": "max over problems of |gen| - sqrt(2 sigma^2 I(Lambda;W)/n) <= 0",
    "sweep_mi_ordering": "max over problems of I(Lambda;W) - I(S;W) <= 0",
    "sweep_abs_gen": "max over problems of E|gen| - sqrt((2 sigma^2/n)(I(Lambda;W) + log 2)) <= 0",
}


def report(name: str, inputs: Mapping[str, Any], bound_value: float,
           measured_value: Optional[float] = None) -> BoundReport:
    """Wrap a bound value with its anchor formula."""
    if name not in ANCHORS:
        raise ArgumentError(f"Unknown bound {name!r}.")
    return BoundReport.build(name, ANCHORS[name], inputs, bound_value, measured_value)


def _positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ArgumentError(f"{name} must be strictly positive, got {value!r}.")


def _nonnegative(**values: float) -> None:
    for name, value in values.items():
        if value < 0:
            raise ArgumentError(f"{name} must be nonnegative, got {value!r}.")


def _confidence(beta_conf: float) -> None:
    if not 0 < beta_conf <= 1:
        raise ArgumentError("beta_conf must lie in (0, 1].")


# -------------------------------
# Mutual-information bounds
# -------------------------------

def mi_gen_bound(sigma: float, n: int, mi: float) -> float:
    """sqrt(2 sigma^2 mi / n); mi may be I(S;W), I(Lambda;W) or H(W)."""
    _nonnegative(sigma=sigma, mi=mi)
    _positive(n=n)
    return math.sqrt(2.0 * sigma ** 2 * mi / n)


def sample_complexity(kind: str, sigma: float, alpha: float, beta_conf: float,
                      epsilon: Optional[float] = None) -> int:
    _positive(alpha=alpha)
    _nonnegative(sigma=sigma)
    _confidence(beta_conf)
    kind = to_canonical(kind)
    log_term = math.log(2.0 / beta_conf)

    if kind == "independent":
        value = 2.0 * sigma ** 2 / alpha ** 2 * log_term
    elif kind == "sqrt_g":
        value = 64.0 * sigma ** 4 / alpha ** 4 * log_term ** 2
    elif kind in ("thm3", "markov"):
        if epsilon is None:
            raise ArgumentError(f"Sample complexity {kind!r} needs epsilon.")
        _nonnegative(epsilon=epsilon)
        if kind == "thm3":
            value = 8.0 * sigma ** 2 / alpha ** 2 * (epsilon / beta_conf + log_term)
        else:
            value = 2.0 * sigma ** 2 * (epsilon + math.log(2.0)) / (alpha ** 2 * beta_conf ** 2)
    else:
        raise ArgumentError(f"Unknown sample complexity kind {kind!r}.")
    # float noise must not push an exact integer up by one
    return max(1, math.ceil(value - 1e-9))


def cor1_check(g_at_n: float, n: int, epsilon: float, beta_conf: float,
               sigma: float, alpha: float) -> Tuple[bool, bool]:
    """(eps_ok, n_ok) for the growth-function sample-size condition."""
    if g_at_n < 1:
        raise ArgumentError("g(n) must be at least 1.")
    _positive(n=n, alpha=alpha)
    _confidence(beta_conf)
    log_term = math.log(2.0 / beta_conf)
    eps_ok = epsilon <= (g_at_n - 1.0) * beta_conf * log_term
    n_ok = n / g_at_n >= 8.0 * sigma ** 2 / alpha ** 2 * log_term
    return eps_ok, n_ok


def abs_gen_bounds(sigma: float, n: int, epsilon: float) -> Tuple[float, float]:
    """(absolute-gap bound, the earlier sigma/sqrt(n) + 36 sqrt(2 sigma^2 eps / n) bound)."""
    _nonnegative(sigma=sigma, epsilon=epsilon)
    _positive(n=n)
    ours = math.sqrt(2.0 * sigma ** 2 / n * (epsilon + math.log(2.0)))
    comparison = sigma / math.sqrt(n) + 36.0 * math.sqrt(2.0 * sigma ** 2 * epsilon / n)
    return ours, comparison


def covering_bound(sigma: float, n: int, d: int, B: float) -> float:
    """Quantised-output bound at resolution r = 1/sqrt(n)."""
    _positive(n=n, d=d, B=B)
    _nonnegative(sigma=sigma)
    log_cover = math.log(2.0 * B * math.sqrt(d * n))
    if log_cover < 0:
        logger.warning("covering log term %g is negative; bound clamped to 0", log_cover)
        return 0.0
    return math.sqrt(2.0 * sigma ** 2 * d / n * log_cover)


def two_stage_bound(V: int, n1: int, n2: int) -> float:
    _positive(n1=n1, n2=n2)
    _nonnegative(V=V)
    return math.sqrt(V * math.log(n1 + 1) / (2.0 * n2))


def monitor_bound(sigma: float, n: int, m: int, epsilon: float) -> float:
    _positive(n=n, m=m)
    _nonnegative(sigma=sigma, epsilon=epsilon)
    return math.sqrt(2.0 * sigma ** 2 / n * (m * epsilon + math.log(2.0 * m)))


def erm_excess_bound(k: int, n: int) -> float:
    """Noiseless ERM over k hypotheses with loss in [0, 1]."""
    _positive(k=k, n=n)
    return math.sqrt(math.log(k) / (2.0 * n))


# -------------------------------
# Gibbs algorithm
# -------------------------------

def default_a_grid(points: int = 64) -> Tuple[float, ...]:
    return tuple(np.geomspace(1e-4, 1e2, points).tolist())


def gaussian_kl(d: int, a: float, b_width: float,
                w_o: Sequence[float], w_q: Sequence[float]) -> float:
    """D(N(w_o, a^2 I_d) || N(w_q, b^2 I_d))."""
    _positive(d=d, a=a, b_width=b_width)
    w_o_arr = np.asarray(w_o, dtype=float)
    w_q_arr = np.asarray(w_q, dtype=float)
    if w_o_arr.shape != (d,) or w_q_arr.shape != (d,):
        raise ArgumentError(f"w_o and w_Q must both have {d} coordinates.")
    ratio = a ** 2 / b_width ** 2
    shift = float(np.sum((w_o_arr - w_q_arr) ** 2))
    return 0.5 * d * (ratio - 1.0 - math.log(ratio)) + shift / (2.0 * b_width ** 2)


def _comparison_risk(params: ContinuousBoundParams,
                     population_risks: Optional[Sequence[float]]) -> float:
    """L_mu(w_io) when the risk vector is known, else the caller's min_risk."""
    if population_risks is None:
        return params.min_risk
    risks = np.asarray(population_risks, dtype=float)
    i_o = params.require("i_o")["i_o"]
    if not 1 <= i_o <= risks.size:
        raise ArgumentError(f"i_o = {i_o} outside 1..{risks.size}.")
    return float(risks[i_o - 1])


def gibbs_bounds(params: ContinuousBoundParams, q: Optional[FiniteDistribution] = None,
                 variant: str = "gen_eq20",
                 population_risks: Optional[Sequence[float]] = None) -> BoundReport:
    """
    Gibbs generalization, information and excess-risk bounds. The risk_cor2
    family compares against a fixed hypothesis w_io: pass `population_risks`
    to anchor on L_mu(w_io); otherwise `params.min_risk` is taken as that risk.
    """
    variant = to_canonical(variant)
    name = f"gibbs_{variant}"
    if name not in ANCHORS:
        raise ArgumentError(f"Unknown Gibbs bound variant {variant!r}.")
    min_risk = params.min_risk

    if variant == "gen_eq20":
        p = params.require("beta", "n")
        return report(name, p, p["beta"] / (2.0 * p["n"]))

    if variant == "mi_2beta":
        p = params.require("beta")
        return report(name, p, 2.0 * p["beta"])

    if variant == "gen_mi":
        p = params.require("beta", "n")
        return report(name, p, math.sqrt(p["beta"] / p["n"]))

    if variant == "risk_cor2":
        p = params.require("beta", "n", "i_o")
        if q is None:
            raise ArgumentError("risk_cor2 needs the prior Q.")
        if not 1 <= p["i_o"] <= q.size:
            raise ArgumentError(f"i_o = {p['i_o']} outside 1..{q.size}.")
        q_o = q.probs[p["i_o"] - 1]
        if q_o <= 0:
            raise SupportError("Q puts no mass on w_o; the bound is infinite.")
        excess = -math.log(q_o) / p["beta"] + p["beta"] / (2.0 * p["n"])
        risk_o = _comparison_risk(params, population_risks)
        return report(name, {**p, "risk_o": risk_o, "excess": excess}, risk_o + excess)

    if variant == "risk_cor2_zipf":
        p = params.require("n", "i_o")
        beta = math.sqrt(p["n"])
        closed = (2.0 * math.log(p["i_o"]) + 1.0) / math.sqrt(p["n"])
        unsimplified = math.log(math.pi ** 2 * p["i_o"] ** 2 / 6.0) / beta + beta / (2.0 * p["n"])
        risk_o = _comparison_risk(params, population_risks)
        inputs = {**p, "beta": beta, "risk_o": risk_o,
                  "excess": closed, "unsimplified_excess": unsimplified}
        return report(name, inputs, risk_o + closed)

    if variant == "risk_cor2_uniform":
        p = params.require("n", "k")
        beta = 2.0 * math.sqrt(p["n"] * math.log(p["k"]))
        closed = math.sqrt(math.log(p["k"]) / p["n"])
        inputs = {**p, "beta": beta, "min_risk": min_risk, "excess": closed}
        if p["k"] > 1:
            inputs["unsimplified_excess"] = math.log(p["k"]) / beta + beta / (2.0 * p["n"])
            inputs["note"] = ("bound_value is the simplified closed form; "
                              "unsimplified_excess is what the risk bound certifies at this beta")
        return report(name, inputs, min_risk + closed)

    if variant == "risk_cor3":
        p = params.require("d", "rho", "beta", "n", "b_width", "w_o", "w_Q")
        grid = params.a_grid or default_a_grid()
        if not grid:
            raise ArgumentError("The a-grid is empty.")
        inner = [a * p["rho"] * math.sqrt(p["d"])
                 + gaussian_kl(p["d"], a, p["b_width"], p["w_o"], p["w_Q"]) / p["beta"]
                 for a in grid]
        best = int(np.argmin(inner))
        excess = p["beta"] / (2.0 * p["n"]) + inner[best]
        inputs = {"d": p["d"], "rho": p["rho"], "beta": p["beta"], "n": p["n"],
                  "b_width": p["b_width"], "best_a": grid[best], "min_risk": min_risk,
                  "excess": excess}
        return report(name, inputs, min_risk + excess)

    # risk_cor3_gauss
    p = params.require("d", "rho", "n", "w_o", "w_Q")
    shift = float(np.sum((np.asarray(p["w_Q"]) - np.asarray(p["w_o"])) ** 2))
    excess = p["d"] ** 0.25 * math.sqrt(p["rho"]) / (2.0 * p["n"] ** 0.25) * (shift + 3.0)
    inputs = {"d": p["d"], "rho": p["rho"], "n": p["n"], "shift_sq": shift,
              "min_risk": min_risk, "excess": excess,
              "b_width": (p["n"] * p["d"]) ** -0.25 / math.sqrt(p["rho"]),
              "beta": p["n"] ** 0.75 * p["d"] ** 0.25 * math.sqrt(p["rho"])}
    return report(name, inputs, min_risk + excess)


# -------------------------------
# Noisy ERM
# -------------------------------

def noisy_erm_bound(population_risks: Optional[Sequence[float]] = None,
                    b: Optional[Sequence[float]] = None, n: int = 1,
                    i_o: Optional[int] = None, variant: str = "eq24") -> float:
    """
    Population-risk bound for exponential-noise ERM, measured against the
    comparison hypothesis w_io: the first term is L_mu(w_io), not min L_mu.
    `i_o` is 1-based and defaults to the first hypothesis of minimum
    population risk. eq25 only needs (i_o, n) and returns the excess over
    the risk of w_io.
    """
    variant = to_canonical(variant)
    _positive(n=n)
    if variant == "eq25":
        if i_o is None:
            raise ArgumentError("eq25 needs i_o.")
        _positive(i_o=i_o)
        return (i_o ** 1.1 + 3.0) / n ** (1.0 / 3.0)
    if variant not in ("eq24", "eq24_log"):
        raise ArgumentError(f"Unknown noisy ERM bound variant {variant!r}.")
    if population_risks is None or b is None:
        raise ArgumentError(f"{variant} needs population risks and noise means.")

    risks = np.asarray(population_risks, dtype=float)
    means = np.asarray(b, dtype=float)
    if risks.shape != means.shape or risks.ndim != 1 or risks.size == 0:
        raise ArgumentError("Population risks and noise means must be equal-length lists.")
    if np.any(means <= 0) or np.any(~np.isfinite(means)):
        raise ArgumentError("Every noise mean b_i must be positive and finite.")
    if i_o is None:
        i_o = int(np.argmin(risks)) + 1
    if not 1 <= i_o <= risks.size:
        raise ArgumentError(f"i_o = {i_o} outside 1..{risks.size}.")

    if variant == "eq24":
        information = float(np.sum(risks / means))
    else:
        information = float(np.sum(np.log1p(risks / means)))
    min_noise = 1.0 / float(np.sum(1.0 / means))
    return (float(risks[i_o - 1]) + float(means[i_o - 1])
            + math.sqrt(information / (2.0 * n)) - min_noise)


def noisy_erm_channel_bound(population_risks: Sequence[float], b: Sequence[float]) -> float:
    """sum_i log(1 + L_mu(w_i)/b_i), an upper bound on I(S;W)."""
    if len(population_risks) != len(b):
        raise ArgumentError("Population risks and noise means must be equal-length lists.")
    return float(sum(exp_channel_capacity_term(float(r), float(bi))
                     for r, bi in zip(population_risks, b)))
