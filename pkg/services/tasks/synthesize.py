# services/tasks/synthesize.py
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from services.errors import ConfigError
from services.pgm import from_field, load_pgm, save_pgm, to_field
from services.resampler import SynthesisConfig, build_config, synthesize_with_report
from services.settings import get_settings
from services.tasks.common import guarded, require


def synthesis_config(payload: dict[str, Any], height: int, width: int) -> SynthesisConfig:
    """SynthesisConfig from a CLI-style payload; unset values come from settings."""
    defaults = get_settings().synthesis
    weights = str(payload.get("weights") or "kernel")
    if weights == "kernel":
        b = payload.get("b")
        mode: dict[str, Any] = {"kind": "kernel", "b": defaults.bandwidth if b is None else b}
    elif weights == "uniform":
        eps = payload.get("epsilon")
        mode = {
            "kind": "uniform",
            "epsilon": defaults.epsilon if eps is None else eps,
            "spatial_sigma": payload.get("spatial_sigma"),
        }
    else:
        raise ConfigError(f"weights must be 'kernel' or 'uniform', got {weights!r}")
    poor = payload.get("poor_match_distance", defaults.poor_match_distance)
    return build_config(
        scheme=payload.get("scheme") or "spiral",
        w=require(payload, "w"),
        mode=mode,
        out_height=payload.get("out_height") or height,
        out_width=payload.get("out_width") or width,
        rng_seed=payload.get("rng_seed") or 0,
        seed_side=payload.get("seed_side"),
        poor_match_distance=poor,
    )


@guarded
def handle(task: str, payload: dict[str, Any]) -> dict[str, Any]:
    img = load_pgm(require(payload, "input"))
    output = Path(require(payload, "output"))
    config = synthesis_config(payload, img.height, img.width)
    maxval = int(payload.get("maxval") or img.maxval)

    out, report = synthesize_with_report(to_field(img), config)
    save_pgm(from_field(out, maxval), output, binary=not payload.get("ascii"))

    summary = report.to_dict()
    if payload.get("report"):
        stable = {k: v for k, v in summary.items() if k != "elapsed"}
        doc = {"config": config.model_dump(mode="json"), "report": stable}
        rp = Path(payload["report"])
        rp.parent.mkdir(parents=True, exist_ok=True)
        rp.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return {"task": task, "ok": True, "output": str(output), "report": summary}
