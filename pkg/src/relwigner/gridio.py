"""Deterministic file formats: WIGGRID1 binary snapshots and CSV tables.

WIGGRID1 layout (all little-endian):

    8 bytes   magic  b"WIGGRID1"
    3 x u32   nx, ntheta, components
    5 x f64   dx, dtheta, kappa, k0, x0
    data      nx * ntheta * components complex values as interleaved f64
              (re, im), X-major, Theta-minor, component-innermost

Phase-space snapshots reuse the container with components = 1 and the
(X, P) grid mapped onto the (X, Theta) header fields; kappa and k0 are 0
and x0 carries the time stamp.

CSV output is byte-deterministic: fixed header, '%.17g' floats, '\n'
newlines.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clifford import ArrayC

MAGIC = b"WIGGRID1"
_HEADER = struct.Struct("<3I5d")


@dataclass(frozen=True)
class GridSnapshot:
    """Decoded WIGGRID1 payload."""

    nx: int
    ntheta: int
    components: int
    dx: float
    dtheta: float
    kappa: float
    k0: float
    x0: float
    values: ArrayC  # shape (components, nx, ntheta)


def write_wiggrid(
    path: Path | str,
    values: ArrayC,
    dx: float,
    dtheta: float,
    kappa: float = 0.0,
    k0: float = 0.0,
    x0: float = 0.0,
) -> None:
    """Write a (components, nx, ntheta) complex array as WIGGRID1."""
    values = np.asarray(values, dtype=complex)
    if values.ndim == 2:
        values = values[None, :, :]
    if values.ndim != 3:
        raise ValueError(f"expected 2D or 3D array, got shape {values.shape}")
    components, nx, ntheta = values.shape
    # X-major, Theta-minor, component-innermost
    interleaved = np.empty((nx, ntheta, components, 2), dtype="<f8")
    moved = np.moveaxis(values, 0, -1)  # (nx, ntheta, components)
    interleaved[..., 0] = moved.real
    interleaved[..., 1] = moved.imag
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(nx, ntheta, components, dx, dtheta, kappa, k0, x0))
        fh.write(interleaved.tobytes())


def read_wiggrid(path: Path | str) -> GridSnapshot:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        nx, ntheta, components, dx, dtheta, kappa, k0, x0 = _HEADER.unpack(
            fh.read(_HEADER.size)
        )
        count = nx * ntheta * components * 2
        flat = np.frombuffer(fh.read(count * 8), dtype="<f8", count=count)
    data = flat.reshape(nx, ntheta, components, 2)
    values = np.moveaxis(data[..., 0] + 1j * data[..., 1], -1, 0)
    return GridSnapshot(nx, ntheta, components, dx, dtheta, kappa, k0, x0, values.copy())


def format_float(x: float) -> str:
    return "%.17g" % float(x)


def write_csv(path: Path | str, header: list[str], rows) -> None:
    """Deterministic CSV: fixed float formatting, '\n' newlines."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else format_float(cell) for cell in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
