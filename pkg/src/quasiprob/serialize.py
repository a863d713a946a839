"""Text dumps of masks and fields.

Run-length format: one line per row ``i`` (first coordinate), each line a
space-separated list of ``count:bit`` runs along ``j``.  PGM dumps are
oriented for viewing: ``y`` increases upwards, ``x`` to the right.
"""
from __future__ import annotations

import numpy as np

from .grid import GridDomain, RegionMask
from .observables import ScalarField


def mask_to_rle(mask: RegionMask) -> str:
    lines = []
    for row in mask.bits:
        runs = []
        start = 0
        edges = np.flatnonzero(np.diff(row.astype(np.int8))) + 1
        for end in list(edges) + [row.size]:
            runs.append(f"{end - start}:{int(row[start])}")
            start = end
        lines.append(" ".join(runs))
    return "\n".join(lines) + "\n"


def mask_from_rle(text: str, domain: GridDomain | None = None) -> RegionMask:
    rows = []
    for lineno, line in enumerate(text.strip().splitlines(), 1):
        row = []
        for run in line.split():
            try:
                count, bit = run.split(":")
                count, bit = int(count), int(bit)
            except ValueError:
                raise ValueError(f"line {lineno}: malformed run {run!r}") from None
            if bit not in (0, 1) or count < 1:
                raise ValueError(f"line {lineno}: bad run {run!r}")
            row.extend([bool(bit)] * count)
        rows.append(row)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("run-length rows must all have length equal to the row count")
    if domain is None:
        domain = GridDomain(n)
    elif domain.n != n:
        raise ValueError(f"dump has {n} rows, domain has {domain.n}")
    return RegionMask(domain, np.array(rows, dtype=bool))


def _view(a: np.ndarray) -> np.ndarray:
    return np.flipud(a.T)


def mask_to_pgm(mask: RegionMask) -> bytes:
    img = np.where(_view(mask.bits), 255, 0).astype(np.uint8)
    n = mask.domain.n
    return f"P5\n{n} {n}\n255\n".encode() + img.tobytes()


def field_to_pgm(field: ScalarField) -> bytes:
    span = field.max - field.min
    scaled = (field.values - field.min) / span if span > 0 else np.zeros(field.domain.shape)
    img = np.round(255 * _view(scaled)).astype(np.uint8)
    n = field.domain.n
    return f"P5\n{n} {n}\n255\n".encode() + img.tobytes()


def field_to_csv(field: ScalarField) -> str:
    """Row-major values, one grid row ``i`` per line."""
    return "\n".join(",".join(repr(float(v)) for v in row) for row in field.values) + "\n"
