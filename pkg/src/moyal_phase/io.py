"""Versioned CSV files for states, phase-space functions and density matrices.

Every file starts with one sentinel line ``# moyal-phase <kind> v1`` followed
by comma-separated data rows with no column-name line.  Numbers are written
with 17 significant digits so a write/read round trip reproduces doubles
exactly.  Grids are not stored separately; readers rebuild them from the
coordinate columns.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .core import GridSpec1D, PhaseGridSpec, Wavefunction
from .errors import MoyalPhaseError
from .transforms import CharacteristicFunction, DensityMatrix, WignerFunction

VERSION = "v1"
KINDS = ("wavefunction", "wigner", "characteristic", "density", "marginal")
COLUMNS = {"wavefunction": 3, "wigner": 3, "characteristic": 4, "density": 4, "marginal": 4}
PathLike = Union[str, Path]


class InputFormatError(MoyalPhaseError):
    """A data file is missing, malformed, or has an unknown header."""


def header(kind: str) -> str:
    return f"# moyal-phase {kind} {VERSION}"


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write(path: PathLike, kind: str, columns: Iterable[np.ndarray]) -> None:
    cols = [np.ravel(np.asarray(c, dtype=float)) for c in columns]
    lines = [header(kind)]
    lines.extend(",".join(_fmt(v) for v in row) for row in zip(*cols))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def write_wavefunction(path: PathLike, psi: Wavefunction) -> None:
    v = psi.values
    _write(path, "wavefunction", (psi.grid.points, v.real, v.imag))


def write_wigner(path: PathLike, F: WignerFunction) -> None:
    X, P = np.meshgrid(F.phase_grid.x_grid.points, F.phase_grid.p_grid.points, indexing="ij")
    _write(path, "wigner", (X, P, F.values))


def write_characteristic(path: PathLike, M: CharacteristicFunction) -> None:
    T, H = np.meshgrid(M.tau_grid.points, M.theta_grid.points, indexing="ij")
    _write(path, "characteristic", (T, H, M.values.real, M.values.imag))


def write_density(path: PathLike, rho: DensityMatrix) -> None:
    x = rho.grid.points
    A, B = np.meshgrid(x, x, indexing="ij")
    _write(path, "density", (A, B, rho.values.real, rho.values.imag))


def write_marginals(path: PathLike, F: WignerFunction, position: np.ndarray, momentum: np.ndarray) -> None:
    """Columns: x, position density, P, momentum density."""
    _write(path, "marginal", (F.phase_grid.x_grid.points, position, F.phase_grid.p_grid.points, momentum))


# ------------------------------------------------------------------ reading


def _read_rows(path: PathLike, want: str) -> np.ndarray:
    """Data rows of a ``want`` file; the header is validated before any row is parsed."""
    p = Path(path)
    try:
        text = p.read_text(encoding="ascii")
    except FileNotFoundError:
        raise InputFormatError(f"{p}: file not found") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise InputFormatError(f"{p}: cannot read ({exc})") from None
    lines = text.splitlines()
    if not lines:
        raise InputFormatError(f"{p}: line 1: empty file, expected a '# moyal-phase' header")
    first = lines[0].strip()
    parts = first.split()
    if len(parts) != 4 or parts[:2] != ["#", "moyal-phase"]:
        raise InputFormatError(f"{p}: line 1: missing '# moyal-phase <kind> v1' header")
    kind, version = parts[2], parts[3]
    if kind not in KINDS:
        raise InputFormatError(f"{p}: line 1: unknown file kind {kind!r}")
    if version != VERSION:
        raise InputFormatError(f"{p}: line 1: unsupported version {version!r}")
    if kind != want:
        raise InputFormatError(f"{p}: line 1: expected a {want} file, found {kind}")
    ncols = COLUMNS[kind]
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != ncols:
            raise InputFormatError(f"{p}: line {lineno}: expected {ncols} fields, found {len(fields)}")
        try:
            vals = [float(f) for f in fields]
        except ValueError:
            raise InputFormatError(f"{p}: line {lineno}: non-numeric field in {line.strip()!r}") from None
        if not all(math.isfinite(v) for v in vals):
            raise InputFormatError(f"{p}: line {lineno}: non-finite value")
        rows.append(vals)
    if not rows:
        raise InputFormatError(f"{p}: line 2: no data rows")
    return np.array(rows)


def _grid_from_points(path: PathLike, x: np.ndarray) -> GridSpec1D:
    n = x.size
    if n < 2:
        raise InputFormatError(f"{path}: too few grid points ({n})")
    dx = (x[-1] - x[0]) / (n - 1)
    if dx <= 0 or np.max(np.abs(np.diff(x) - dx)) > 1e-9 * max(1.0, abs(dx)):
        raise InputFormatError(f"{path}: coordinate column is not a uniform increasing grid")
    try:
        grid = GridSpec1D(n, float(x[0]), float(x[0] + n * dx))
    except ValueError as exc:
        raise InputFormatError(f"{path}: coordinates do not form a valid grid ({exc})") from None
    if np.max(np.abs(grid.points - x)) > 1e-9 * max(1.0, float(np.max(np.abs(x)))):
        raise InputFormatError(f"{path}: coordinate column is not a uniform grid")
    return grid


def read_wavefunction(path: PathLike) -> Wavefunction:
    rows = _read_rows(path, "wavefunction")
    grid = _grid_from_points(path, rows[:, 0])
    return Wavefunction(grid, rows[:, 1] + 1j * rows[:, 2])


def _square(path: PathLike, rows: np.ndarray) -> tuple[int, np.ndarray, np.ndarray]:
    m = rows.shape[0]
    n = int(round(math.sqrt(m)))
    if n * n != m:
        raise InputFormatError(f"{path}: {m} rows do not form a square table")
    a = rows[::n, 0]
    b = rows[:n, 1]
    if not (np.array_equal(rows[:, 0], np.repeat(a, n)) and np.array_equal(rows[:, 1], np.tile(b, n))):
        raise InputFormatError(f"{path}: rows are not in row-major (first, second) coordinate order")
    return n, a, b


def read_density(path: PathLike) -> DensityMatrix:
    rows = _read_rows(path, "density")
    n, x, xp = _square(path, rows)
    grid = _grid_from_points(path, x)
    if not np.array_equal(x, xp):
        raise InputFormatError(f"{path}: x and x' columns use different grids")
    return DensityMatrix(grid, (rows[:, 2] + 1j * rows[:, 3]).reshape(n, n))


def read_wigner(path: PathLike) -> WignerFunction:
    rows = _read_rows(path, "wigner")
    n, X, P = _square(path, rows)
    xg = _grid_from_points(path, X)
    dP = (P[-1] - P[0]) / (n - 1)
    pg = GridSpec1D(n, float(P[0]), float(P[0] + n * dP))
    return WignerFunction(PhaseGridSpec(xg, pg), rows[:, 2].reshape(n, n))


def sniff_kind(path: PathLike) -> str:
    """Header kind without parsing the data rows."""
    p = Path(path)
    try:
        with p.open(encoding="ascii") as fh:
            first = fh.readline()
    except FileNotFoundError:
        raise InputFormatError(f"{p}: file not found") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise InputFormatError(f"{p}: cannot read ({exc})") from None
    parts = first.split()
    if len(parts) != 4 or parts[:2] != ["#", "moyal-phase"]:
        raise InputFormatError(f"{p}: line 1: missing '# moyal-phase <kind> v1' header")
    if parts[3] != VERSION:
        raise InputFormatError(f"{p}: line 1: unsupported version {parts[3]!r}")
    if parts[2] not in KINDS:
        raise InputFormatError(f"{p}: line 1: unknown file kind {parts[2]!r}")
    return parts[2]
