from src.routes.commands import build_parser, dispatch
from src.routes.experiments import RunArtifacts, execute, run, sweep
from src.routes.verify import CheckResult, run_checks

__all__ = [
    "CheckResult",
    "RunArtifacts",
    "build_parser",
    "dispatch",
    "execute",
    "run",
    "run_checks",
    "sweep",
]
