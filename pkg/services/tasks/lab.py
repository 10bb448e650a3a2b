# services/tasks/lab.py
# Handlers for the consistency lab: consistency, conditional, counterexample.
from __future__ import annotations

from typing import Any

from services.errors import ConfigError
from services.field_core import Scheme
from services.lab import (
    CounterexampleConfig,
    ExperimentConfig,
    Report,
    conditional_experiment,
    consistency_experiment,
    counterexample_experiment,
    resolve_spec,
)
from services.lab.reports import write_report
from services.settings import get_settings
from services.tasks.common import guarded, int_list


def _experiment_overrides(payload: dict[str, Any]) -> dict[str, Any]:
    return {
        "rng_seed": payload.get("rng_seed"),
        "replicates": payload.get("replicates"),
        "out_side": payload.get("out_side"),
        "n_jobs": payload.get("jobs"),
    }


def _sizes(payload: dict[str, Any]) -> list[int]:
    return int_list(payload.get("sizes"), "sizes") or list(get_settings().lab.sizes)


def _finish(task: str, report: Report, payload: dict[str, Any]) -> dict[str, Any]:
    written = write_report(report, payload.get("csv"), payload.get("json"))
    return {"task": task, "ok": True, "summary": report.summary, "written": written}


@guarded
def handle_consistency(task: str, payload: dict[str, Any]) -> dict[str, Any]:
    spec = resolve_spec(str(payload.get("spec") or "copy-left"))
    try:
        scheme = Scheme(str(payload.get("scheme") or "corner"))
    except ValueError as e:
        raise ConfigError(f"unknown scheme: {payload.get('scheme')!r}") from e
    config = ExperimentConfig.from_settings(**_experiment_overrides(payload))
    report = consistency_experiment(spec, scheme, _sizes(payload), config=config)
    return _finish(task, report, payload)


@guarded
def handle_conditional(task: str, payload: dict[str, Any]) -> dict[str, Any]:
    spec = resolve_spec(str(payload.get("spec") or "copy-left"))
    config = ExperimentConfig.from_settings(**_experiment_overrides(payload))
    report = conditional_experiment(spec, _sizes(payload), config=config)
    return _finish(task, report, payload)


@guarded
def handle_counterexample(task: str, payload: dict[str, Any]) -> dict[str, Any]:
    spec = resolve_spec(str(payload.get("spec") or "diagonal-switch"))
    config = CounterexampleConfig.from_settings(
        **_experiment_overrides(payload),
        size=payload.get("size"),
        window_replicates=payload.get("window_replicates"),
        draws=payload.get("draws"),
    )
    report = counterexample_experiment(spec, config)
    return _finish(task, report, payload)
