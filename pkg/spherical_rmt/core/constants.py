# Schema
SCHEMA_VERSION = 1

# Environment
ENV_PREFIX = "SPHERICAL_RMT_"
SEED_ENV_VAR = "SPHERICAL_RMT_SEED"

# Density grids
DEFAULT_BINS = 200
MIN_BINS = 10
MASS_TOLERANCE = 1e-3  # relative
CLIP_LIMIT = 1e-3  # fraction of eigenvalues allowed outside the histogram support
GUE_SUPPORT_FACTOR = 1.2
GUE_SUPPORT_MARGIN = 3.0

# Radial kernel
RADIAL_HALF_WIDTH = 8.0  # window around r* used by the forward operator
FORWARD_MASS_DRIFT = 1e-2
PREFACTOR_LOG_TOLERANCE = 1e-10

# Sampling
CHUNK_SIZE = 1024
MAX_EIGEN_RETRIES = 3
ENTRY_VARIANCE_CONVENTION = (
    "density exp(-tr M^2): diagonal N(0,1/2), off-diagonal real/imag parts N(0,1/4)"
)
MAX_MOMENT_TUPLES = 20000

# Semicircle report
RHO_WINDOW = 1.1
BULK_WINDOW = 0.9

# Output file names
MANIFEST_FILE = "manifest.json"
GNUPLOT_RECIPE = "semicircle.gp"
