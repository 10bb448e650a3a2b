# orchestrator/state_manager.py
# Append-only JSONL run records.
from __future__ import annotations

import json
import os
import time
from typing import Any

from services.settings import get_settings


def _log_path() -> str:
    return get_settings().runtime.log_path


def record(event: dict[str, Any]) -> None:
    log = _log_path()
    parent = os.path.dirname(log)
    if parent:
        os.makedirs(parent, exist_ok=True)
    rec = {"ts": time.time(), **event}
    with open(log, "a", encoding="utf-8") as f:
        f.write(json.dumps(rec, ensure_ascii=False, default=str) + "\n")


def read_records(path: str | None = None) -> list[dict[str, Any]]:
    path = path or _log_path()
    if not os.path.exists(path):
        return []
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]
