# orchestrator/router_client.py
from __future__ import annotations

import logging
import time
from typing import Any

from orchestrator.state_manager import record
from services.tasks import get_handler

log = logging.getLogger(__name__)

# summary keys copied into the run record
_RECORDED = ("summary", "report", "written", "output", "error", "error_type")


def route(arg: Any, payload: dict | None = None) -> dict:
    # allow both: route("task", payload) and route({"task":..., "payload":...})
    if isinstance(arg, dict):
        name = str(arg.get("task", ""))
        pl = arg.get("payload") or {}
    else:
        name = str(arg or "")
        pl = payload or {}

    try:
        handler = get_handler(name)
    except KeyError:
        result: dict[str, Any] = {
            "task": name,
            "ok": False,
            "error": f"unknown task: {name}",
            "exit_code": 2,
        }
        record({"task": name, "status": "error", "error": result["error"]})
        return result

    started = time.perf_counter()
    result = handler(name, pl)
    elapsed = time.perf_counter() - started
    status = "ok" if result.get("ok") else "error"
    log.info("task %s finished with %s in %.3fs", name, status, elapsed)
    record(
        {
            "task": name,
            "status": status,
            "elapsed": round(elapsed, 6),
            **{k: result[k] for k in _RECORDED if k in result},
        }
    )
    return result
