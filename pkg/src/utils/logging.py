from __future__ import annotations

import logging

from src.config.settings import LOG_LEVEL
from src.utils.run_context import get_repetition, get_run_id

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s [run=%(run_id)s rep=%(repetition)s] %(message)s"


class RunContextFilter(logging.Filter):
    """Stamp every record with the active run id and repetition index."""

    def filter(self, record: logging.LogRecord) -> bool:
        run_id = get_run_id()
        repetition = get_repetition()
        record.run_id = run_id if run_id is not None else "-"
        record.repetition = repetition if repetition is not None else "-"
        return True


def configure_logging(level: str | int | None = None) -> None:
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler.addFilter(RunContextFilter())
    root = logging.getLogger()
    for existing in list(root.handlers):
        if getattr(existing, "_qsense", False):
            root.removeHandler(existing)
    handler._qsense = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.setLevel(level if level is not None else LOG_LEVEL.upper())
