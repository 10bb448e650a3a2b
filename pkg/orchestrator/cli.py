# orchestrator/cli.py
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any

from orchestrator.agent_contracts import TaskResult
from orchestrator.router_client import route
from services.errors import ConfigError
from services.settings import get_settings

log = logging.getLogger("fieldboot")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _window(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError(f"window parameter w must be >= 2, got {v}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _nonnegative_float(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"rng seed must be in [0, 2^64), got {v}")
    return v


def _add_synthesis_args(p: argparse.ArgumentParser, output: bool = True) -> None:
    p.add_argument("--input", required=True, help="observed image (PGM P2/P5)")
    if output:
        p.add_argument("--output", required=True, help="synthesized image path")
    p.add_argument("--w", type=_window, required=True, help="window parameter (>= 2)")
    p.add_argument("--scheme", choices=["corner", "rectangular", "spiral"], default="spiral")
    p.add_argument("--rng-seed", type=_seed, default=0)
    p.add_argument("--out-width", type=_positive_int, default=None)
    p.add_argument("--out-height", type=_positive_int, default=None)
    p.add_argument("--seed-side", type=_positive_int, default=None)


def _add_lab_args(p: argparse.ArgumentParser, spec: str) -> None:
    p.add_argument("--spec", default=spec, help="preset name or path to a JSON MMM spec")
    p.add_argument("--replicates", type=_positive_int, default=None)
    p.add_argument("--out-side", type=_positive_int, default=None)
    p.add_argument("--rng-seed", type=_seed, default=0)
    p.add_argument("--jobs", type=int, default=None, help="replicate workers (joblib n_jobs)")
    p.add_argument("--csv", default=None, help="per-replicate CSV report path")
    p.add_argument("--json", default=None, help="summary JSON report path")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fieldboot", description="Nonparametric texture resampling and consistency lab"
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synthesize", help="synthesize a texture from an observed image")
    _add_synthesis_args(s)
    s.add_argument("--weights", choices=["kernel", "uniform"], default="kernel")
    s.add_argument("--b", type=_positive_float, default=None, help="kernel bandwidth")
    s.add_argument("--epsilon", type=_nonnegative_float, default=None, help="match tolerance")
    s.add_argument("--spatial-sigma", type=_positive_float, default=None)
    s.add_argument("--poor-match-distance", type=_positive_float, default=None)
    s.add_argument("--maxval", type=int, default=None, help="output maxval (default: input's)")
    s.add_argument("--ascii", action="store_true", help="write P2 instead of P5")
    s.add_argument("--report", default=None, help="synthesis report JSON path")

    c = sub.add_parser("consistency", help="window CDF distance along a size ladder")
    _add_lab_args(c, "copy-left")
    c.add_argument("--scheme", choices=["corner", "rectangular", "spiral"], default="corner")
    c.add_argument("--sizes", type=_positive_int, nargs="+", default=None)

    d = sub.add_parser("conditional", help="kernel conditional CDF against the exact conditional")
    _add_lab_args(d, "copy-left")
    d.add_argument("--sizes", type=_positive_int, nargs="+", default=None)

    x = sub.add_parser("counterexample", help="spiral conditional-independence defect")
    _add_lab_args(x, "diagonal-switch")
    x.add_argument("--size", type=_positive_int, default=None, help="observed side T")
    x.add_argument("--window-replicates", type=_positive_int, default=None)
    x.add_argument("--draws", type=_positive_int, default=None)

    w = sub.add_parser("sweep", help="entropy and diversity across a bandwidth ladder")
    _add_synthesis_args(w, output=False)
    w.add_argument("--bandwidths", type=_positive_float, nargs="+", default=None)
    w.add_argument("--json", default=None, help="sweep JSON path")
    return p


def _payload(args: argparse.Namespace) -> dict[str, Any]:
    payload = {k: v for k, v in vars(args).items() if k != "command" and v is not None}
    if args.command == "synthesize" and args.maxval is not None and not 1 <= args.maxval <= 65535:
        raise ConfigError(f"maxval must be in 1..65535, got {args.maxval}")
    return payload


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = get_settings()
    except ConfigError as e:
        print(f"fieldboot: {e}", file=sys.stderr)
        return 2
    logging.basicConfig(
        format="%(levelname)s:%(name)s:%(message)s",
        stream=sys.stderr,
        level=getattr(logging, settings.runtime.log_level, logging.WARNING),
    )

    try:
        payload = _payload(args)
    except ConfigError as e:
        print(f"fieldboot {args.command}: {e}", file=sys.stderr)
        return 2

    result = TaskResult.from_dict(route({"task": args.command, "payload": payload}))
    if result.status != "ok":
        print(f"fieldboot {args.command}: {result.message}", file=sys.stderr)
        return result.exit_code or 1
    shown = {k: v for k, v in result.data.items() if k != "payload"}
    print(json.dumps(shown, ensure_ascii=False, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
