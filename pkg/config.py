import os


def _env_int(name, default):
    return int(os.environ.get(f"PERMTEST_{name}", default))


def _env_float(name, default):
    return float(os.environ.get(f"PERMTEST_{name}", default))


# Largest |Sym(n)|^k that enumerate_solutions will scan (6!^2).
ENUMERATION_CEILING = _env_int("ENUMERATION_CEILING", 518_400)
INJECTION_SEARCH_LIMIT = _env_int("INJECTION_SEARCH_LIMIT", 8)

DEFAULT_ALPHABET = os.environ.get("PERMTEST_ALPHABET", "xyzuvw")

COMPLETENESS_TARGET = _env_float("COMPLETENESS_TARGET", 0.99)
SOUNDNESS_TARGET = _env_float("SOUNDNESS_TARGET", 0.99)
CONFIDENCE_LEVEL = _env_float("CONFIDENCE_LEVEL", 0.95)

DEFAULT_DELTA = os.environ.get("PERMTEST_DELTA", "1/20")
DEFAULT_TRIALS = _env_int("TRIALS", 1000)
DEFAULT_FAR_EPS = os.environ.get("PERMTEST_FAR_EPS", "1/3")
LSM_CONCENTRATION_THRESHOLD = _env_int("LSM_CONCENTRATION_THRESHOLD", 10_000)
FAR_SAMPLING_ATTEMPTS = _env_int("FAR_SAMPLING_ATTEMPTS", 1000)
# (relator, point) draws held in memory at once by the batched SAS estimator
SAS_BATCH_CELLS = _env_int("SAS_BATCH_CELLS", 2_000_000)

SWEEP_WORKERS = _env_int("SWEEP_WORKERS", 1)

LOG_LEVEL = os.environ.get("PERMTEST_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_CONTRACT = 4
