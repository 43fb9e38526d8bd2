# Equality branch of the AF best response: |C_i| <= CENTER_TOLERANCE * max(1, Z_i)
CENTER_TOLERANCE = 1e-12

DEFAULT_ZETA = 1e-8
DEFAULT_FIXED_POINT_TOLERANCE = 1e-9
DEFAULT_MAX_ITERATIONS = 10000
DEFAULT_ABS_FLOOR = 1e-12

ORACLE_RESOLUTION = 1e-4
CENTRALIZED_RESOLUTION = 1e-3
COARSE_RESOLUTION = 1e-2
MAX_CENTRALIZED_LINKS = 3

DEFAULT_TRIALS = 2000
FULL_TRIALS = 10000

DEFAULT_TAU = 3.0
DEFAULT_ETA = 0.5
DEFAULT_SIGMA2 = 1.0
TOTAL_LINK_LENGTH = 1.0

CONFIDENCE_LEVEL = 0.95
CSV_DIGITS = 12
