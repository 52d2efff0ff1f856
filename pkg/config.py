"""
Configuration for the Grassnet exact-geometry engine
All adjustable parameters for sampling, propagation and verification runs
"""

import os


def _env_int(name, default):
    raw = os.getenv(name)
    if raw is None or not str(raw).strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


# ============================================================================
# SAMPLING
# ============================================================================

# Integer entries of random basis rows are drawn from [-bound, bound]
SAMPLE_ENTRY_BOUND = _env_int("GRASSNET_BOUND", 10)

# Coefficients combining a span basis when a subspace is drawn inside it
SPAN_COEFFICIENT_BOUND = 5

# Redraw budget before a sampler gives up
MAX_SAMPLE_REDRAWS = 200

# Default seed when the CLI is run without --seed
DEFAULT_SEED = 1

# ============================================================================
# PROPAGATION
# ============================================================================

# Threads used for the cubes of one layer (1 = sequential)
PROPAGATION_WORKERS = max(1, _env_int("GRASSNET_WORKERS", 1))

# Cube order inside a layer: 'lexicographic' or 'reverse'
PROPAGATION_ORDER = 'lexicographic'

# Axes chosen for a vertex with more than three nonzero offsets: 'first' or 'last'
PROPAGATION_AXIS_CHOICE = 'first'

# Cross-check the triple meet against all pairwise-then-third orders
CROSS_CHECK_TRIPLE_MEET = True

# ============================================================================
# DARBOUX EVOLUTION
# ============================================================================

# Random rotation coefficients: numerators in [-5, 5] over 10, entries in [-1/2, 1/2]
DARBOUX_NUMERATOR_BOUND = 5
DARBOUX_DENOMINATOR = 10

# Redraws allowed when a sampled state hits a singular denominator
DARBOUX_MAX_REDRAWS = 50

# ============================================================================
# FILE FORMATS
# ============================================================================

NET_FORMAT_VERSION = 1

# ============================================================================
# MESH EXPORT
# ============================================================================

# Decimal places written for OBJ vertex coordinates
MESH_FLOAT_PRECISION = 12

# ============================================================================
# ACCEPTANCE SWEEPS
# ============================================================================

ACCEPTANCE_RANKS = (0, 1, 2)
ACCEPTANCE_SEEDS = {
    'cube_dimensions': 100,
    'four_d_consistency': 50,
    'closedness': 50,
    'potential_round_trip': 10,
    'commuting_diagram': 25,
    'map_consistency': 100,
    'slicing': 25,
    'degeneracies': 1,
}

# ============================================================================
# DATABASE / RUNTIME PATHS
# ============================================================================

# Resolve runtime paths relative to this package so the ledger location does not
# depend on the process working directory (CLI vs scripts vs tests).
GRASSNET_ROOT = os.path.dirname(os.path.abspath(__file__))
GRASSNET_DATA_DIR = os.getenv("GRASSNET_DATA_DIR", os.path.join(GRASSNET_ROOT, "data"))
try:
    os.makedirs(GRASSNET_DATA_DIR, exist_ok=True)
except Exception:
    # If the directory can't be created (e.g., permissions), fall back to root.
    GRASSNET_DATA_DIR = GRASSNET_ROOT

_DB_OVERRIDE = os.getenv("GRASSNET_DB_PATH")

if _DB_OVERRIDE and str(_DB_OVERRIDE).strip():
    DATABASE_PATH = os.path.abspath(_DB_OVERRIDE)
else:
    DATABASE_PATH = os.path.abspath(os.path.join(GRASSNET_DATA_DIR, "grassnet.db"))

# Set to False to run without touching the ledger (library use)
LEDGER_ENABLED = True

# ============================================================================
# LOGGING
# ============================================================================

LOG_LEVEL = os.getenv("GRASSNET_LOG_LEVEL", 'INFO').upper()  # DEBUG, INFO, WARNING, ERROR
LOG_TO_FILE = True
LOG_FILE_PATH = os.path.abspath(
    os.getenv("GRASSNET_LOG_PATH", os.path.join(GRASSNET_DATA_DIR, "grassnet.log"))
)
