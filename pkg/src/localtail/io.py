"""File formats: QCUBE tables and atomic report writes."""
from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .cube import TabulatedFunction
from .exceptions import ArgumentError

QCUBE_MAGIC = "QCUBE"
QCUBE_VERSION = "1"


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_qcube(f: TabulatedFunction):
    body = "\n".join(repr(float(v)) for v in f.values)
    return f"{QCUBE_MAGIC} {QCUBE_VERSION} {f.r} {f.n}\n{body}\n"


def parse_qcube(text):
    """Parse ``QCUBE 1 r n`` followed by ``r**n`` values in index order."""
    lines = text.split("\n", 1)
    header = lines[0].split()
    if len(header) != 4 or header[0] != QCUBE_MAGIC or header[1] != QCUBE_VERSION:
        raise ArgumentError(f"not a QCUBE v1 header: {lines[0]!r}")
    try:
        r, n = int(header[2]), int(header[3])
    except ValueError:
        raise ArgumentError(f"bad QCUBE dimensions: {lines[0]!r}") from None
    tokens = lines[1].split() if len(lines) > 1 else []
    if len(tokens) != r**n:
        raise ArgumentError(f"QCUBE {r} {n} needs {r**n} values, found {len(tokens)}")
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise ArgumentError(f"bad QCUBE value: {exc}") from None
    return TabulatedFunction(r, n, values)


def write_qcube(path, f: TabulatedFunction):
    atomic_write(path, format_qcube(f))


def read_qcube(path):
    return parse_qcube(Path(path).read_text(encoding="utf-8"))
