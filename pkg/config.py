# config.py
# -------------------------------
# Centralized configuration.
# Every knob is read from an environment variable (a local .env file is
# honoured) so runs can be tuned without touching code.
# -------------------------------

import os

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


class Config:
    # Worker count for Monte Carlo blocks. GENBOUND_WORKERS overrides the
    # hardware default.
    WORKERS = max(1, _env_int("GENBOUND_WORKERS", os.cpu_count() or 1))

    # Exact enumeration refuses |Z|^n above this; bigger problems go through
    # the Monte Carlo path.
    MAX_ENUMERATION = _env_int("GENBOUND_MAX_ENUMERATION", 2**31)

    # Exact-mode noisy ERM integrates over every hypothesis pair.
    MAX_NOISY_ERM_HYPOTHESES = 64

    # VC statistics enumerate every subset of X.
    MAX_VC_INSTANCES = 16

    # Trials drawn from one random stream block.
    MC_BLOCK_SIZE = max(1, _env_int("GENBOUND_MC_BLOCK", 4096))

    LOG_LEVEL = os.environ.get("GENBOUND_LOG_LEVEL", "WARNING").upper()

    # -------------------------------
    # Tolerances
    # -------------------------------
    DIST_TOL = 1e-12      # FiniteDistribution normalization
    JOINT_TOL = 1e-10     # JointPMF totals and kernel rows
    BOUND_TOL = 1e-9      # measured <= bound + BOUND_TOL
    GRID_TOL = 1e-9       # value * D must be this close to an integer

    # Reports
    SCHEMA_VERSION = "1"
    SIGNIFICANT_DIGITS = 12
