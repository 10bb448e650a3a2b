# services/tasks/common.py
from __future__ import annotations

import functools
import logging
from collections.abc import Callable
from typing import Any

from services.errors import ConfigError, FieldbootError

log = logging.getLogger(__name__)

EXIT_RUNTIME = 1
EXIT_USAGE = 2

TaskFn = Callable[[str, dict[str, Any]], dict[str, Any]]


def failure(task: str, exc: BaseException) -> dict[str, Any]:
    """Result dict for a failed task; validation problems map to the usage exit code."""
    usage = isinstance(exc, ConfigError)
    return {
        "task": task,
        "ok": False,
        "error": str(exc),
        "error_type": type(exc).__name__,
        "exit_code": EXIT_USAGE if usage else EXIT_RUNTIME,
    }


def guarded(fn: TaskFn) -> TaskFn:
    """Turn domain and I/O errors raised by a handler into an `ok: False` result."""

    @functools.wraps(fn)
    def wrapper(task: str, payload: dict[str, Any]) -> dict[str, Any]:
        try:
            return fn(task, payload)
        except (FieldbootError, OSError) as e:
            log.debug("task %s failed", task, exc_info=True)
            return failure(task, e)

    return wrapper


def require(payload: dict[str, Any], key: str) -> Any:
    value = payload.get(key)
    if value is None:
        raise ConfigError(f"missing required parameter: {key}")
    return value


def int_list(value: Any, key: str) -> list[int] | None:
    if value is None:
        return None
    if isinstance(value, str):
        value = [v for v in value.replace(",", " ").split() if v]
    try:
        out = [int(v) for v in value]
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key} must be a list of integers, got {value!r}") from e
    if not out or min(out) < 1:
        raise ConfigError(f"{key} must hold positive integers, got {out}")
    return out
