# util/name_map.py
# Purpose: normalize user-facing spellings (config files, CLI flags) of
# algorithm kinds, tie rules and bound names to the canonical identifiers
# the library uses.

import re

# LEFT: normalized raw spelling; RIGHT: canonical identifier.
CANONICAL_MAP = {
    # Tie rules
    "lowest index": "lowest_index",
    "lowest": "lowest_index",
    "first": "lowest_index",
    "uniform": "uniform",
    "uniform over argmin": "uniform",

    # Algorithm kinds
    "erm": "erm",
    "gibbs": "gibbs",
    "noisy erm": "noisy_erm",
    "noisyerm": "noisy_erm",
    "independent": "independent",
    "constant": "independent",
    "kernel": "kernel",
    "explicit": "kernel",
    "two stage": "two_stage",
    "twostage": "two_stage",
    "compose": "compose",
    "adaptive": "compose",

    # Noisy ERM modes
    "exact": "exact",
    "monte carlo": "monte_carlo",
    "mc": "monte_carlo",

    # Bound aliases
    "thm1": "mi_gen",
    "thm2": "lambda_gen",
    "thm4": "abs_gen",
    "russo zou": "abs_gen_comparison",

    # Output formats
    "json": "json",
    "csv": "csv",
}


def normalize_key(s: str) -> str:
    """Lowercase, collapse separators (-, _, spaces, punctuation) to one space."""
    s = s or ""
    s = re.sub(r"[^a-z0-9]+", " ", s.lower())
    return re.sub(r"\s+", " ", s).strip()


def to_canonical(raw_name: str) -> str:
    """Map a raw spelling to its canonical identifier.

    Unknown names come back normalized with underscores, so bound names such
    as "risk-cor2-zipf" still resolve to "risk_cor2_zipf".
    """
    if not raw_name:
        return raw_name
    key = normalize_key(raw_name)
    canonical = CANONICAL_MAP.get(key)
    if canonical:
        return canonical
    return key.replace(" ", "_")
