# services/pgm/codec.py
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from services.errors import PgmParseError, PreconditionError
from services.field_core import Field

MAX_MAXVAL = 65535
_WHITESPACE = b" \t\n\r\v\f"


@dataclass(frozen=True, eq=False)
class PgmImage:
    """Grayscale raster; `levels` has shape (height, width) with 0 <= level <= maxval."""

    width: int
    height: int
    maxval: int
    levels: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise PreconditionError("pgm dimensions must be positive")
        if not 1 <= self.maxval <= MAX_MAXVAL:
            raise PreconditionError(f"maxval {self.maxval} outside 1..{MAX_MAXVAL}")
        if self.levels.shape != (self.height, self.width):
            raise PreconditionError(
                f"raster shape {self.levels.shape} != ({self.height}, {self.width})"
            )
        if self.levels.size and (self.levels.min() < 0 or self.levels.max() > self.maxval):
            raise PreconditionError("gray levels must lie in [0, maxval]")

    @property
    def bytes_per_sample(self) -> int:
        return 1 if self.maxval < 256 else 2


class _Header:
    """Token reader over the header: whitespace separated, `#` comments to end of line."""

    def __init__(self, data: bytes, pos: int) -> None:
        self.data = data
        self.pos = pos

    def skip(self) -> None:
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            else:
                return

    def integer(self, what: str) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1].isdigit():
            self.pos += 1
        if self.pos == start:
            if start >= len(self.data):
                raise PgmParseError(start, f"unexpected end of data, expected {what}")
            raise PgmParseError(start, f"expected {what}")
        if self.pos < len(self.data) and self.data[self.pos : self.pos + 1] not in _WHITESPACE:
            if self.data[self.pos : self.pos + 1] != b"#":
                raise PgmParseError(self.pos, f"malformed {what}")
        return int(self.data[start : self.pos])


def read_pgm(data: bytes) -> PgmImage:
    """Parse a P2 (ASCII) or P5 (binary) PGM document."""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmParseError(0, f"bad magic {magic!r}, expected P2 or P5")
    if len(data) > 2 and data[2:3] not in _WHITESPACE and data[2:3] != b"#":
        raise PgmParseError(2, "magic must be followed by whitespace")
    hdr = _Header(data, 2)
    width = hdr.integer("width")
    height = hdr.integer("height")
    if width < 1 or height < 1:
        raise PgmParseError(hdr.pos, f"dimensions must be positive, got {width}x{height}")
    hdr.skip()
    at = hdr.pos
    maxval = hdr.integer("maxval")
    if not 1 <= maxval <= MAX_MAXVAL:
        raise PgmParseError(at, f"maxval {maxval} outside 1..{MAX_MAXVAL}")
    n = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        if hdr.pos >= len(data):
            raise PgmParseError(hdr.pos, "truncated raster: no data after maxval")
        if data[hdr.pos : hdr.pos + 1] not in _WHITESPACE:
            raise PgmParseError(hdr.pos, "maxval must be followed by one whitespace byte")
        start = hdr.pos + 1
        dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
        need = n * dtype.itemsize
        if len(data) - start < need:
            raise PgmParseError(
                len(data), f"truncated raster: need {need} bytes, got {len(data) - start}"
            )
        levels = np.frombuffer(data, dtype=dtype, count=n, offset=start).astype(np.int64)
        tail = data[start + need :]
        if tail.strip(_WHITESPACE):
            raise PgmParseError(start + need, "trailing data after raster")
    else:
        values: list[int] = []
        offsets: list[int] = []
        for _ in range(n):
            hdr.skip()
            if hdr.pos >= len(data):
                raise PgmParseError(
                    hdr.pos, f"truncated raster: got {len(values)} of {n} samples"
                )
            offsets.append(hdr.pos)
            values.append(hdr.integer("sample"))
        hdr.skip()
        if hdr.pos < len(data):
            raise PgmParseError(hdr.pos, "trailing data after raster")
        levels = np.array(values, dtype=np.int64)

    bad = np.flatnonzero(levels > maxval)
    if bad.size:
        i = int(bad[0])
        where = start + i * dtype.itemsize if magic == b"P5" else offsets[i]
        raise PgmParseError(
            where, f"sample {i} has level {int(levels[i])} above maxval {maxval}"
        )
    return PgmImage(width, height, maxval, levels.reshape(height, width))


def write_pgm(img: PgmImage, binary: bool = True) -> bytes:
    """Serialize as P5 (binary, 16-bit samples big-endian) or P2."""
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n{img.maxval}\n"
    if binary:
        dtype = np.uint8 if img.bytes_per_sample == 1 else np.dtype(">u2")
        return header.encode("ascii") + img.levels.astype(dtype).tobytes()
    rows = "\n".join(" ".join(str(int(v)) for v in row) for row in img.levels)
    return (header + rows + "\n").encode("ascii")


def to_field(img: PgmImage) -> Field:
    return Field.filled(img.levels.astype(np.float64) / float(img.maxval))


def from_field(field_: Field, maxval: int = 255) -> PgmImage:
    """Quantize with round-half-up, then clamp to [0, maxval]."""
    if not field_.is_complete:
        raise PreconditionError("field has unfilled pixels")
    if not 1 <= maxval <= MAX_MAXVAL:
        raise PreconditionError(f"maxval {maxval} outside 1..{MAX_MAXVAL}")
    levels = np.floor(field_.values * maxval + 0.5).astype(np.int64)
    levels = np.clip(levels, 0, maxval)
    return PgmImage(field_.width, field_.height, maxval, levels)


def load_pgm(path: str | Path) -> PgmImage:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as e:
        raise OSError(f"cannot read {p}: {e.strerror or e}") from e
    try:
        return read_pgm(data)
    except PgmParseError as e:
        raise PgmParseError(e.offset, f"{p}: {e.reason}") from e


def save_pgm(img: PgmImage, path: str | Path, binary: bool = True) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_bytes(write_pgm(img, binary=binary))
    return p
