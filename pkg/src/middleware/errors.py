from __future__ import annotations

import functools
import logging
import traceback
from pathlib import Path
from typing import Callable

from pydantic import ValidationError

logger = logging.getLogger(__name__)


class QSenseError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code: int = 1


class ConfigError(QSenseError, ValueError):
    """Invalid experiment configuration or command-line request."""

    exit_code = 2


class NumericalError(QSenseError):
    """A numerical routine could not produce a trustworthy result."""

    exit_code = 3


class DomainError(NumericalError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NonHermitianError(NumericalError, ValueError):
    pass


class GridMismatchError(NumericalError, ValueError):
    """Arrays or tabulated functions live on different grids."""


class NonMonotoneError(NumericalError, ValueError):
    pass


class LyapunovInconsistencyError(NumericalError):
    """The right-hand side has weight where the left-hand operator is singular."""


class ContradictionError(NumericalError):
    """Observed data has zero probability under the model on the whole grid."""


class ModelError(NumericalError, ValueError):
    """A likelihood or state model violates its own invariants."""


def format_validation_error(exc: ValidationError) -> list[str]:
    """Field-level diagnostics for a pydantic validation failure."""
    lines = []
    for err in exc.errors():
        location = ".".join(str(part) for part in err.get("loc", ())) or "<config>"
        lines.append(f"{location}: {err.get('msg', 'invalid value')}")
    return lines


def handle_command_errors(command: Callable[..., int]) -> Callable[..., int]:
    """Run a CLI command, turning toolkit errors into exit codes with diagnostics."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs) -> int:
        try:
            return command(*args, **kwargs)
        except ValidationError as e:
            for line in format_validation_error(e):
                logger.error("config error: %s", line)
            return ConfigError.exit_code
        except ConfigError as e:
            logger.error("config error: %s", e)
            return e.exit_code
        except NumericalError as e:
            origin = traceback.extract_tb(e.__traceback__)[-1]
            logger.error("numerical error in %s:%d (%s): %s", Path(origin.filename).name, origin.lineno, origin.name, e)
            return e.exit_code

    return wrapper
