"""Atomic file output and the commented-header CSV layout shared by all exports."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a sibling temp file, then rename over ``path``."""
    path = Path(path)
    mask = os.umask(0)
    os.umask(mask)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o666 & ~mask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(columns: list[str], rows, meta: dict | None = None) -> str:
    """CSV with ``# key=value`` header lines; floats written with repr for round trips."""
    buf = io.StringIO()
    for key in sorted(meta or {}):
        buf.write(f"# {key}={meta[key]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) or hasattr(v, "dtype") else v for v in row])
    return buf.getvalue()


def write_csv(path, columns, rows, meta=None) -> None:
    atomic_write(path, csv_text(columns, rows, meta))
