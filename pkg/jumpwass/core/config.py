import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Logging
LOG_LEVEL = os.getenv("JUMPWASS_LOG_LEVEL", "INFO").upper()
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Enumeration oracle: hard cap on m^k mixture components
ENUMERATION_COMPONENT_CAP = int(os.getenv("JUMPWASS_COMPONENT_CAP", str(2 ** 20)))

# Monte Carlo worker threads (results do not depend on this)
MC_WORKERS = int(os.getenv("JUMPWASS_MC_WORKERS", "1"))

# Trajectories per RNG block. Part of the reproducibility contract: changing
# it changes every sampled trajectory for a given seed.
MC_BLOCK_SIZE = 1024

# Numeric contracts
PROBABILITY_TOLERANCE = 1e-9
SYMMETRY_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-10
# Floor on |W^2 - mean_sq| relative to max(1, W^2), for stderr = 0 runs
ROUNDOFF_TOLERANCE = 1e-12

# Analysis defaults
CONFIG_SCHEMA_VERSION = 1
DEFAULT_EPSILON = 1e-2
DEFAULT_WINDOW = 5
DEFAULT_SIGMA_MULT = 4.0
