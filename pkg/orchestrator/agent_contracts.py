# orchestrator/agent_contracts.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Protocol


class Handler(Protocol):
    def __call__(self, task: str, payload: dict[str, Any]) -> dict[str, Any]: ...


@dataclass
class TaskResult:
    status: str  # 'ok' | 'error'
    data: dict[str, Any] = field(default_factory=dict)
    message: str = ""
    exit_code: int = 0

    @classmethod
    def from_dict(cls, result: dict[str, Any]) -> TaskResult:
        if result.get("ok"):
            return cls("ok", result)
        return cls("error", result, str(result.get("error", "")), int(result.get("exit_code", 1)))
