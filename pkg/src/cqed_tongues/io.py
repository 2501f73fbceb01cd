"""Deterministic CSV and PGM writers.

Floats are written with ``%.17g`` so that files round-trip exactly and two
runs producing the same numbers produce the same bytes.
"""

import math
from pathlib import Path

import numpy as np

__all__ = ["format_value", "write_csv", "write_pgm", "read_pgm"]


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return "%.17g" % value


def write_csv(path, header, rows):
    """Write ``rows`` (iterables of numbers or strings) under a header line."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def write_pgm(path, image):
    """Binary 8-bit greyscale (P5) image; ``image[0]`` is the top row."""
    image = np.ascontiguousarray(image, dtype=np.uint8)
    if image.ndim != 2:
        raise ValueError("image must be two-dimensional")
    rows, cols = image.shape
    header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.tobytes())


def read_pgm(path):
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    cols, rows = (int(s) for s in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(rows, cols)
