from services.pgm.codec import (
    PgmImage,
    from_field,
    load_pgm,
    read_pgm,
    save_pgm,
    to_field,
    write_pgm,
)

__all__ = [
    "PgmImage",
    "from_field",
    "load_pgm",
    "read_pgm",
    "save_pgm",
    "to_field",
    "write_pgm",
]
