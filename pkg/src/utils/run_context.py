from __future__ import annotations

from contextvars import ContextVar, Token
from typing import Optional

_run_id_var: ContextVar[Optional[str]] = ContextVar("run_id", default=None)
_repetition_var: ContextVar[Optional[int]] = ContextVar("repetition", default=None)


def set_run_id(run_id: Optional[str]) -> Optional[Token]:
    if run_id is None:
        return None
    return _run_id_var.set(run_id)


def reset_run_id(token: Optional[Token]) -> None:
    if token is not None:
        _run_id_var.reset(token)


def get_run_id() -> Optional[str]:
    return _run_id_var.get()


def set_repetition(repetition: Optional[int]) -> Optional[Token]:
    if repetition is None:
        return None
    return _repetition_var.set(repetition)


def reset_repetition(token: Optional[Token]) -> None:
    if token is not None:
        _repetition_var.reset(token)


def get_repetition() -> Optional[int]:
    return _repetition_var.get()
