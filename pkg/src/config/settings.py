from dotenv import load_dotenv
import os

load_dotenv()


def _env_flag(name: str, default: str = "0") -> bool:
    return os.getenv(name, default).strip().lower() in {"1", "true", "yes", "on"}


OUTPUT_DIR = os.getenv("QSENSE_OUTPUT_DIR", "runs")

GRID_NODES = int(os.getenv("QSENSE_GRID_NODES", "1025"))

WORKERS = int(os.getenv("QSENSE_WORKERS", "1"))

LOG_LEVEL = os.getenv("QSENSE_LOG_LEVEL", "INFO")

WRITE_PLOTS = _env_flag("QSENSE_WRITE_PLOTS")

# numerical tolerances shared across modules
HERMITIAN_ATOL = 1e-10
EIGEN_CLUSTER_GAP = 1e-10
LYAPUNOV_SINGULAR_SUM = 1e-12
LYAPUNOV_RHS_ATOL = 1e-10
LYAPUNOV_RESIDUAL_ATOL = 1e-9
POVM_MERGE_ATOL = 1e-9
NORMALIZATION_ATOL = 1e-8
FISHER_PROBABILITY_FLOOR = 1e-15
