# services/tasks/sweep.py
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from services.errors import ConfigError
from services.pgm import load_pgm, to_field
from services.resampler import bandwidth_sweep
from services.settings import get_settings
from services.tasks.common import guarded, require
from services.tasks.synthesize import synthesis_config


@guarded
def handle(task: str, payload: dict[str, Any]) -> dict[str, Any]:
    img = load_pgm(require(payload, "input"))
    config = synthesis_config({**payload, "weights": "kernel"}, img.height, img.width)
    bandwidths = payload.get("bandwidths") or get_settings().synthesis.sweep_bandwidths
    if min(float(b) for b in bandwidths) <= 0:
        raise ConfigError(f"bandwidths must be > 0, got {list(bandwidths)}")
    rows = bandwidth_sweep(to_field(img), config, [float(b) for b in bandwidths])
    if payload.get("json"):
        p = Path(payload["json"])
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return {"task": task, "ok": True, "sweep": rows}
