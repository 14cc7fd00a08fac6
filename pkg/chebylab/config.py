"""Configuration constants for chebylab."""

from __future__ import annotations

import os

# Environment overrides (flags beat env, env beats these defaults).
ENV_LOG_LEVEL = "CHEBYLAB_LOG_LEVEL"  # e.g. DEBUG, INFO, WARNING
ENV_JOBS = "CHEBYLAB_JOBS"  # default parallelism for degree sweeps

# Boundary discretization. Below 8 nodes per component no solver downstream
# resolves anything useful.
DEFAULT_NODES_PER_COMPONENT = 512
MIN_NODES_PER_COMPONENT = 8

# LP minimax: number of directions θ_ℓ = 2πℓ/m polygonalizing |·|. The
# relaxation underestimates the modulus by at most a factor cos(π/m).
DEFAULT_DIRECTIONS = 64
MIN_DIRECTIONS = 32

# Max-modulus is re-evaluated on a grid this many times finer than the nodes.
REFINEMENT_FACTOR = 4

# Semi-infinite exchange rounds after the first LP, and Lawson polish steps.
EXCHANGE_ROUNDS = 3
LAWSON_ITERATIONS = 60

# Remez exchange on real sets. The grid phase hands over to the continuous
# phase at REMEZ_GRID_TOLERANCE (or on a repeated reference); the final
# levelling gap is judged against REMEZ_TOLERANCE.
REMEZ_MAX_ITERATIONS = 200
REMEZ_GRID_TOLERANCE = 1e-9
REMEZ_TOLERANCE = 1e-12
REMEZ_GRID_PER_INTERVAL = 2000
REMEZ_CONTINUOUS_ROUNDS = 20

# Degrees supported by the conditioned bases.
MAX_DEGREE = 80

# Theta series terms are dropped once h^{m²} falls below this.
THETA_TRUNCATION = 1e-16

# Phases within this distance of an integer are flagged as near-wrap.
NEAR_WRAP_BAND = 1e-12

# First degree of the asymptotic tail used by the acceptance statistics.
DEFAULT_TAIL_START = 20

# Default degree range for sweeps.
DEFAULT_DEGREE_MIN = 1
DEFAULT_DEGREE_MAX = 10


def default_jobs() -> int:
    """Get the default sweep parallelism.

    Returns:
        The CHEBYLAB_JOBS value when it is a positive integer, otherwise 1.
    """
    raw = os.environ.get(ENV_JOBS, "").strip()
    try:
        jobs = int(raw)
    except ValueError:
        return 1
    return jobs if jobs > 0 else 1
