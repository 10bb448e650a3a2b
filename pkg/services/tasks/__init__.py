# services/tasks/__init__.py
from __future__ import annotations

from collections.abc import Callable
from typing import Any

from . import lab, sweep, synthesize

Handler = Callable[[str, dict[str, Any]], dict[str, Any]]

HANDLERS: dict[str, Handler] = {
    "synthesize": synthesize.handle,
    "consistency": lab.handle_consistency,
    "conditional": lab.handle_conditional,
    "counterexample": lab.handle_counterexample,
    "sweep": sweep.handle,
}


def register(name: str, handler: Handler) -> None:
    HANDLERS[name] = handler


def get_handler(name: str) -> Handler:
    try:
        return HANDLERS[name]
    except KeyError as e:
        raise KeyError(f"unknown task: {name}") from e
