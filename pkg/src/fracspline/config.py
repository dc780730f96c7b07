"""Numerical defaults, tolerances, and output directory resolution."""

from __future__ import annotations

import logging
import os
from pathlib import Path

logger = logging.getLogger("fracspline.config")

# ---------------------------------------------------------------------------
# Numerical constants
# ---------------------------------------------------------------------------

# Distance to a nonpositive integer below which a Gamma argument counts as a pole.
NEAR_POLE = 1e-9

# Condition number above which a solve is flagged as ill-conditioned.
ILL_CONDITIONED = 1e8

DEFAULT_REGULARIZATION = 1e-12
DEFAULT_HALF_WIDTH = 200
DEFAULT_TERMS = 16
DEFAULT_TOLERANCE = 1e-8
DEFAULT_SYMMETRIC_TOLERANCE = 2e-2
DEFAULT_CHECK_ALPHAS = (0.2, 0.5, 1.0, 1.5, 2.5)
SPECTRAL_PAD_FACTOR = 4
INTERIOR_FRACTION = 0.1

# Default (x0, x1, step) per command when the caller omits the grid flags.
DEFAULT_EVAL_RANGE = (-1.0, 4.0, 0.05)
DEFAULT_SYMMETRIC_RANGE = (-4.0, 4.0, 0.05)
DEFAULT_REPRODUCE_RANGE = (0.0, 4.0, 0.05)
DEFAULT_PROBE_RANGE = (0.0, 4.0, 0.25)

# Tolerance per identity used by ``check`` when none is given.
CHECK_TOLERANCES: dict[str, float] = {
    "delta": 1e-10,
    "det_condition": 1e-10,
    "convolution_identity": 1e-12,
    "derivative_relation": 1e-3,
    "derivative_relation_rough": 1e-2,
}

# Term count for the delta check, and the derivative check's β and grid.
CHECK_DELTA_TERMS = 64
CHECK_DERIVATIVE_BETA = 0.5
CHECK_DERIVATIVE_RANGE = (0.0, 12.0, 1.0 / 64)
# Below this order the x^α cusps at the knots limit the spectral side: β drops to α/2
# and the rough tolerance applies.
CHECK_DERIVATIVE_SMOOTH_ALPHA = 1.0


# ---------------------------------------------------------------------------
# Environment overrides
# ---------------------------------------------------------------------------


def resolve_output_dir(cli_value: str | Path | None = None) -> Path:
    """Resolve the directory ``figures`` writes into.

    Priority:
    1. The explicit ``--out`` flag
    2. FRACSPLINE_OUTPUT_DIR environment variable
    3. ./figures under the current working directory
    """
    if cli_value:
        return Path(cli_value).expanduser()
    env_path = os.environ.get("FRACSPLINE_OUTPUT_DIR")
    if env_path:
        return Path(env_path).expanduser()
    return Path.cwd() / "figures"


def resolve_tolerance(cli_value: float | None, default: float) -> float:
    """Resolve a check tolerance.

    Priority:
    1. The explicit ``--tol`` flag
    2. FRACSPLINE_TOL environment variable
    3. *default*
    """
    if cli_value is not None:
        return cli_value
    env_tol = os.environ.get("FRACSPLINE_TOL")
    if env_tol:
        try:
            return float(env_tol)
        except ValueError:
            logger.warning("Ignoring non-numeric FRACSPLINE_TOL=%r", env_tol)
    return default
