# services/lab/mmm.py
"""
Markov mesh models on a finite alphabet.

A pixel (i, j) depends only on its corner window: offsets (-a, -b) with
0 <= a, b <= w-1, minus (0, 0), truncated at the top and left borders.
Tables are keyed by that (possibly truncated) offset tuple; each table is an
array of shape (k,)*p + (k,) whose last axis is the conditional pmf given the
neighbour symbols in canonical offset order.
"""

from __future__ import annotations

import itertools
import json
import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from services.errors import SpecError
from services.field_core.field import Field

log = logging.getLogger(__name__)

ShapeKey = tuple[tuple[int, int], ...]
Rule = Callable[[Mapping[tuple[int, int], int]], Sequence[float]]


def corner_offsets(w: int, i: int, j: int) -> ShapeKey:
    """Corner window of pixel (i, j), truncated at the top/left borders."""
    ra = min(i, w - 1)
    rb = min(j, w - 1)
    offs = [(-a, -b) for a in range(ra + 1) for b in range(rb + 1) if (a, b) != (0, 0)]
    return tuple(sorted(offs))


def shape_classes(w: int) -> list[ShapeKey]:
    return [corner_offsets(w, a, b) for a in range(w) for b in range(w)]


def shape_key_str(key: ShapeKey) -> str:
    return ",".join(f"{a}:{b}" for a, b in key)


def parse_shape_key(text: str) -> ShapeKey:
    if not text.strip():
        return ()
    out = []
    for part in text.split(","):
        a, _, b = part.partition(":")
        out.append((int(a), int(b)))
    return tuple(sorted(out))


@dataclass(frozen=True, eq=False)
class MmmSpec:
    alphabet: tuple[float, ...]
    w: int
    tables: Mapping[ShapeKey, np.ndarray]

    def __post_init__(self) -> None:
        if not self.alphabet:
            raise SpecError("alphabet must be non-empty")
        if any(not 0.0 <= a <= 1.0 for a in self.alphabet):
            raise SpecError("alphabet values must lie in [0, 1]")
        if any(b <= a for a, b in itertools.pairwise(self.alphabet)):
            raise SpecError("alphabet must be strictly increasing")
        if self.w < 2:
            raise SpecError(f"w must be >= 2, got {self.w}")
        k = self.k
        for key, table in self.tables.items():
            expected = (k,) * (len(key) + 1)
            if table.shape != expected:
                raise SpecError(
                    f"table {shape_key_str(key)!r} has shape {table.shape}, expected {expected}"
                )
            if (table < 0).any():
                raise SpecError(f"table {shape_key_str(key)!r} has negative probabilities")
            if not np.allclose(table.sum(axis=-1), 1.0, atol=1e-9):
                raise SpecError(f"table {shape_key_str(key)!r} rows do not sum to 1")

    @property
    def k(self) -> int:
        return len(self.alphabet)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.alphabet, dtype=np.float64)

    @property
    def is_complete(self) -> bool:
        return all(key in self.tables for key in shape_classes(self.w))

    def table_for(self, i: int, j: int) -> tuple[ShapeKey, np.ndarray]:
        key = corner_offsets(self.w, i, j)
        table = self.tables.get(key)
        if table is None:
            raise SpecError(f"no table for shape {shape_key_str(key)!r} at ({i}, {j})")
        return key, table

    @classmethod
    def from_rule(cls, alphabet: Sequence[float], w: int, rule: Rule) -> MmmSpec:
        """
        Tables from a rule over the full corner window. Truncated shapes get
        the rule averaged over uniformly distributed missing neighbours.
        """
        k = len(alphabet)
        full = corner_offsets(w, w - 1, w - 1)
        tables: dict[ShapeKey, np.ndarray] = {}
        full_table = np.zeros((k,) * (len(full) + 1))
        for config in itertools.product(range(k), repeat=len(full)):
            pmf = np.asarray(rule(dict(zip(full, config, strict=True))), dtype=np.float64)
            if pmf.shape != (k,):
                raise SpecError(f"rule returned {pmf.shape}, expected ({k},)")
            full_table[config] = pmf
        for key in shape_classes(w):
            missing = tuple(i for i, o in enumerate(full) if o not in key)
            tables[key] = full_table.mean(axis=missing) if missing else full_table
        return cls(tuple(float(a) for a in alphabet), w, tables)

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, dict[str, list[float]]] = {}
        for key, table in self.tables.items():
            rows: dict[str, list[float]] = {}
            for config in itertools.product(range(self.k), repeat=len(key)):
                rows[",".join(str(c) for c in config)] = [float(x) for x in table[config]]
            doc[shape_key_str(key)] = rows
        return {"alphabet": list(self.alphabet), "w": self.w, "tables": doc}

    @classmethod
    def from_document(cls, doc: Mapping[str, Any]) -> MmmSpec:
        try:
            alphabet = tuple(float(a) for a in doc["alphabet"])
            w = int(doc["w"])
            raw_tables = doc["tables"]
        except (KeyError, TypeError, ValueError) as e:
            raise SpecError(f"malformed spec document: {e}") from e
        k = len(alphabet)
        tables: dict[ShapeKey, np.ndarray] = {}
        for key_text, rows in raw_tables.items():
            key = parse_shape_key(key_text)
            table = np.full((k,) * (len(key) + 1), np.nan)
            for config_text, pmf in rows.items():
                config = tuple(int(c) for c in config_text.split(",")) if config_text else ()
                if len(config) != len(key) or any(not 0 <= c < k for c in config):
                    raise SpecError(f"bad configuration {config_text!r} for shape {key_text!r}")
                table[config] = pmf
            if np.isnan(table).any():
                raise SpecError(f"shape {key_text!r} is missing configurations")
            tables[key] = table
        return cls(alphabet, w, tables)


def load_spec(path: str | Path) -> MmmSpec:
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise SpecError(f"spec file not found: {p}") from e
    except json.JSONDecodeError as e:
        raise SpecError(f"spec file {p} is not valid JSON: {e}") from e
    return MmmSpec.from_document(doc)


def dump_spec(spec: MmmSpec, path: str | Path | None = None) -> str:
    text = json.dumps(spec.to_document(), indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


# --- presets ---


def iid_spec(
    pmf: Sequence[float] = (0.5, 0.5), alphabet: Sequence[float] | None = None, w: int = 2
) -> MmmSpec:
    k = len(pmf)
    if alphabet is None:
        alphabet = [i / (k - 1) for i in range(k)] if k > 1 else [0.5]
    probs = list(pmf)
    return MmmSpec.from_rule(alphabet, w, lambda _: probs)


def constant_spec(value: float = 0.5, w: int = 2) -> MmmSpec:
    return MmmSpec.from_rule([value], w, lambda _: [1.0])


def copy_left_spec(stay: float = 0.9, k: int = 2) -> MmmSpec:
    """Copy the left neighbour with probability `stay`, otherwise another symbol uniformly."""
    alphabet = [i / (k - 1) for i in range(k)]
    other = (1.0 - stay) / (k - 1)

    def rule(nb: Mapping[tuple[int, int], int]) -> list[float]:
        pmf = [other] * k
        pmf[nb[(0, -1)]] = stay
        return pmf

    return MmmSpec.from_rule(alphabet, 2, rule)


def diagonal_switch_spec(noise: float = 0.2, k: int = 2) -> MmmSpec:
    """
    Copy up-left, except across a falling edge in the row above (up-left at
    the top symbol, up at the bottom one) where the left neighbour is copied;
    mixed with `noise` uniform over the alphabet.
    """
    alphabet = [i / (k - 1) for i in range(k)]

    def rule(nb: Mapping[tuple[int, int], int]) -> list[float]:
        up, upleft, left = nb[(-1, 0)], nb[(-1, -1)], nb[(0, -1)]
        src = left if (up, upleft) == (0, k - 1) else upleft
        pmf = [noise / k] * k
        pmf[src] += 1.0 - noise
        return pmf

    return MmmSpec.from_rule(alphabet, 2, rule)


PRESETS: dict[str, Callable[[], MmmSpec]] = {
    "iid": iid_spec,
    "constant": constant_spec,
    "copy-left": copy_left_spec,
    "diagonal-switch": diagonal_switch_spec,
}


def resolve_spec(name_or_path: str) -> MmmSpec:
    """Preset name or path to a JSON spec document."""
    factory = PRESETS.get(name_or_path)
    if factory is not None:
        return factory()
    return load_spec(name_or_path)


# --- sampling ---


def gen_mmm_symbols(
    spec: MmmSpec, height: int, width: int, rng: np.random.Generator, burn_in: int = 0
) -> np.ndarray:
    """
    Symbol indices of an exact MMM draw. Pixels on one anti-diagonal do not
    depend on each other, so each diagonal is sampled in one vectorised step.
    With burn_in > 0 a larger field is drawn and its top/left margin dropped.
    """
    if height < 1 or width < 1:
        raise SpecError("field dimensions must be >= 1")
    H, W = height + burn_in, width + burn_in
    w = spec.w
    sym = np.zeros((H, W), dtype=np.int64)
    u = rng.random((H, W))
    cum: dict[ShapeKey, np.ndarray] = {}
    for d in range(H + W - 1):
        ii = np.arange(max(0, d - W + 1), min(H, d + 1))
        jj = d - ii
        cls = np.minimum(ii, w - 1) * w + np.minimum(jj, w - 1)
        for c in np.unique(cls):
            sel = cls == c
            ri, rj = ii[sel], jj[sel]
            key, table = spec.table_for(int(ri[0]), int(rj[0]))
            cdf = cum.get(key)
            if cdf is None:
                cdf = np.cumsum(table, axis=-1)
                cum[key] = cdf
            idx = tuple(sym[ri + a, rj + b] for a, b in key)
            rows = cdf[idx] if idx else np.broadcast_to(cdf, (ri.size, spec.k))
            drawn = (u[ri, rj][:, None] >= rows).sum(axis=1)
            sym[ri, rj] = np.minimum(drawn, spec.k - 1)
    return sym[burn_in:, burn_in:]


def gen_mmm_field(
    spec: MmmSpec, height: int, width: int, rng: np.random.Generator, burn_in: int = 0
) -> Field:
    sym = gen_mmm_symbols(spec, height, width, rng, burn_in)
    return Field.filled(spec.values[sym])


def symbols_of(spec: MmmSpec, values: np.ndarray) -> np.ndarray:
    """Map alphabet intensities back to symbol indices."""
    idx = np.searchsorted(spec.values, values)
    idx = np.clip(idx, 0, spec.k - 1)
    if not np.array_equal(spec.values[idx], values):
        raise SpecError("values outside the spec alphabet")
    return idx
