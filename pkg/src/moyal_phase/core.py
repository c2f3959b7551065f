"""Grids, potentials, state factories and phase-space moments.

Units throughout: hbar = 1, default mass m = 1.  Grids are uniform and
periodic for spectral work; states built here are kept compactly supported
so that periodic images never overlap at the tolerances used elsewhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import GridMismatch, GridTooSmall, InvalidParameter

BOUNDARY_TOL = 1e-10
# fraction of the momentum band that must be empty for a state to count as resolved
SPECTRAL_EDGE_FRACTION = 0.125
MAX_FOCK_LEVEL = 20


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec1D:
    """Uniform periodic grid ``x_i = x_min + i*dx`` for ``i = 0..n_points-1``.

    ``x_max`` is the periodic image of ``x_min`` and is not itself a sample.
    """

    n_points: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if not isinstance(self.n_points, (int, np.integer)) or isinstance(self.n_points, bool):
            raise InvalidParameter(f"n_points must be an integer, got {self.n_points!r}")
        if self.n_points < 8 or not _is_power_of_two(int(self.n_points)):
            raise InvalidParameter(f"n_points must be a power of two >= 8, got {self.n_points}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise InvalidParameter("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise InvalidParameter(f"x_max must exceed x_min ({self.x_min}, {self.x_max})")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    def lattice(self, index) -> np.ndarray:
        """Positions of (possibly out-of-box) integer lattice indices."""
        return self.x_min + self.dx * np.asarray(index, dtype=float)

    def index_of(self, x: float, tol: float = 1e-9) -> int:
        """Integer lattice index of ``x``; raises if ``x`` is not on the lattice."""
        return lattice_steps(x - self.x_min, self.dx, tol)

    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    # dual grids used by the transforms
    def tau_grid(self) -> "GridSpec1D":
        """Separation lattice tau = 2k*dx, k = -n/2..n/2-1 (spans the full box width)."""
        return GridSpec1D(self.n_points, -self.length, self.length)

    def theta_grid(self) -> "GridSpec1D":
        """Fourier dual of the position grid: spacing 2*pi/L, Nyquist pi/dx."""
        return GridSpec1D(self.n_points, -math.pi / self.dx, math.pi / self.dx)

    def momentum_band(self) -> "GridSpec1D":
        """Phase-space momentum grid: Fourier dual of :meth:`tau_grid`."""
        half = math.pi / (2 * self.dx)
        return GridSpec1D(self.n_points, -half, half)

    def same_as(self, other: "GridSpec1D", rtol: float = 1e-12) -> bool:
        scale = max(abs(self.x_min), abs(self.x_max), 1.0)
        return (
            self.n_points == other.n_points
            and abs(self.x_min - other.x_min) <= rtol * scale
            and abs(self.x_max - other.x_max) <= rtol * scale
        )

    @classmethod
    def parse(cls, text: str) -> "GridSpec1D":
        """Parse the command-line spelling ``N:min:max``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidParameter(f"grid must be N:min:max, got {text!r}")
        try:
            n = int(parts[0])
            lo, hi = float(parts[1]), float(parts[2])
        except ValueError as exc:
            raise InvalidParameter(f"grid must be N:min:max, got {text!r}") from exc
        return cls(n, lo, hi)

    def __str__(self) -> str:
        return f"{self.n_points}:{self.x_min!r}:{self.x_max!r}"


def lattice_steps(distance: float, step: float, tol: float = 1e-9) -> int:
    """Return ``distance/step`` as an integer, or raise GridMismatch."""
    q = distance / step
    k = int(round(q))
    if abs(q - k) > tol * max(1.0, abs(q)):
        raise GridMismatch(f"{distance!r} is not an integer multiple of the grid step {step!r}")
    return k


DEFAULT_GRID = GridSpec1D(256, -10.0, 10.0)


@dataclass(frozen=True)
class PhaseGridSpec:
    """(X, P) grid of a Wigner function.

    The P axis is the Fourier dual of the separation lattice tau = 2k*dx, so
    ``dP * (2*dx) = 2*pi/n``.
    """

    x_grid: GridSpec1D
    p_grid: GridSpec1D

    @classmethod
    def for_position(cls, grid: GridSpec1D) -> "PhaseGridSpec":
        return cls(grid, grid.momentum_band())

    def is_canonical(self) -> bool:
        return self.p_grid.same_as(self.x_grid.momentum_band())

    @property
    def cell(self) -> float:
        return self.x_grid.dx * self.p_grid.dx

    def same_as(self, other: "PhaseGridSpec") -> bool:
        return self.x_grid.same_as(other.x_grid) and self.p_grid.same_as(other.p_grid)


def _frozen(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Wavefunction:
    grid: GridSpec1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n_points,):
            raise GridMismatch(
                f"wavefunction has {vals.shape} samples, grid has {self.grid.n_points}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidParameter("wavefunction samples must be finite")
        object.__setattr__(self, "values", _frozen(vals))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.dx))

    def boundary_amplitude(self) -> float:
        return float(max(abs(self.values[0]), abs(self.values[-1])))

    def inner(self, other: "Wavefunction") -> complex:
        if not self.grid.same_as(other.grid):
            raise GridMismatch("inner product of wavefunctions on different grids")
        return complex(np.vdot(self.values, other.values) * self.grid.dx)

    def expectation_x(self) -> float:
        return float(np.sum(self.grid.points * np.abs(self.values) ** 2) * self.grid.dx)

    def variance_x(self) -> float:
        rho = np.abs(self.values) ** 2 * self.grid.dx
        mean = np.sum(self.grid.points * rho)
        return float(np.sum((self.grid.points - mean) ** 2 * rho))

    def momentum_distribution(self) -> tuple[np.ndarray, np.ndarray]:
        """(p, |phi(p)|^2) on the FFT momentum grid, sorted by p, unit-normalized."""
        g = self.grid
        phi = np.fft.fftshift(np.fft.fft(self.values)) * g.dx / np.sqrt(2 * np.pi)
        p = np.fft.fftshift(g.wavenumbers())
        return p, np.abs(phi) ** 2

    def variance_p(self) -> float:
        p, w = self.momentum_distribution()
        dp = 2 * np.pi / self.grid.length
        w = w * dp
        mean = np.sum(p * w)
        return float(np.sum((p - mean) ** 2 * w))

    def with_values(self, values: np.ndarray, time: Optional[float] = None) -> "Wavefunction":
        return Wavefunction(self.grid, values, self.time if time is None else time)


def check_compact(psi: Wavefunction, tol: float = BOUNDARY_TOL) -> None:
    """Raise GridTooSmall unless the state is negligible at the box edges."""
    amp = psi.boundary_amplitude()
    if amp >= tol:
        raise GridTooSmall(f"boundary amplitude {amp:.3e} exceeds {tol:.0e}; enlarge the box")


def check_resolved(values: np.ndarray, grid: GridSpec1D, tol: float = BOUNDARY_TOL) -> None:
    """Raise InvalidParameter if the outer momentum band carries amplitude above ``tol``."""
    phi = np.fft.fft(values) * grid.dx / np.sqrt(2 * np.pi)
    k = np.abs(grid.wavenumbers())
    edge = k >= (1 - SPECTRAL_EDGE_FRACTION) * np.pi / grid.dx
    worst = float(np.max(np.abs(phi[edge]))) if np.any(edge) else 0.0
    if worst >= tol:
        raise InvalidParameter(
            f"state is under-resolved: momentum amplitude {worst:.3e} near the Nyquist limit"
        )


def _normalized(values: np.ndarray, grid: GridSpec1D) -> np.ndarray:
    norm = np.sqrt(np.sum(np.abs(values) ** 2) * grid.dx)
    return values / norm


def _gaussian_profile(grid: GridSpec1D, center_x: float, width_a: float) -> np.ndarray:
    x = grid.points
    return np.exp(-0.5 * (width_a * (x - center_x)) ** 2)


def _require_inside(grid: GridSpec1D, lo: float, hi: float) -> None:
    if lo < grid.x_min or hi > grid.x_min + (grid.n_points - 1) * grid.dx:
        raise GridTooSmall(
            f"state support [{lo:g}, {hi:g}] does not fit in the box [{grid.x_min:g}, {grid.x_max:g})"
        )


def make_gaussian(
    grid: GridSpec1D, center_x: float, center_p: float, width_a: float = 1.0
) -> Wavefunction:
    """Normalized packet ``exp(-a^2 (x-x0)^2 / 2) exp(i p0 x)``."""
    for name, v in (("center_x", center_x), ("center_p", center_p), ("width_a", width_a)):
        if not math.isfinite(v):
            raise InvalidParameter(f"{name} must be finite")
    if width_a <= 0:
        raise InvalidParameter(f"width_a must be positive, got {width_a}")
    _require_inside(grid, center_x - 5 / width_a, center_x + 5 / width_a)
    vals = _gaussian_profile(grid, center_x, width_a) * np.exp(1j * center_p * grid.points)
    psi = Wavefunction(grid, _normalized(vals, grid))
    check_compact(psi)
    check_resolved(psi.values, grid)
    return psi


def _hermite_functions(x: np.ndarray, n_max: int) -> np.ndarray:
    """Rows 0..n_max of the orthonormal Hermite functions, by stable recurrence."""
    out = np.empty((n_max + 1, x.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(2, n_max + 1):
        out[k] = np.sqrt(2.0 / k) * x * out[k - 1] - np.sqrt((k - 1) / k) * out[k - 2]
    return out


def make_fock(grid: GridSpec1D, n: int) -> Wavefunction:
    """n-th oscillator eigenstate (Hermite function, unit width)."""
    if isinstance(n, bool) or int(n) != n:
        raise InvalidParameter(f"Fock level n must be an integer, got {n!r}")
    n = int(n)
    if n < 0:
        raise InvalidParameter(f"Fock level n must be non-negative, got {n}")
    if n > MAX_FOCK_LEVEL:
        raise InvalidParameter(f"Fock level n={n} exceeds the supported maximum {MAX_FOCK_LEVEL}")
    vals = _hermite_functions(grid.points, n)[n].astype(complex)
    psi = Wavefunction(grid, _normalized(vals, grid))
    try:
        check_compact(psi)
    except GridTooSmall as exc:
        raise GridTooSmall(f"Fock level n={n}: {exc}") from None
    try:
        check_resolved(psi.values, grid)
    except InvalidParameter:
        raise InvalidParameter(f"Fock level n={n} is too large for the grid resolution") from None
    return psi


def make_cat(grid: GridSpec1D, separation: float, width_a: float = 1.0) -> Wavefunction:
    """Even superposition of two Gaussians centred at +-separation/2."""
    if not (math.isfinite(separation) and math.isfinite(width_a)):
        raise InvalidParameter("cat parameters must be finite")
    if separation < 0:
        raise InvalidParameter(f"separation must be non-negative, got {separation}")
    if width_a <= 0:
        raise InvalidParameter(f"width_a must be positive, got {width_a}")
    half = separation / 2
    _require_inside(grid, -half - 5 / width_a, half + 5 / width_a)
    vals = _gaussian_profile(grid, -half, width_a) + _gaussian_profile(grid, half, width_a)
    psi = Wavefunction(grid, _normalized(vals.astype(complex), grid))
    check_compact(psi)
    check_resolved(psi.values, grid)
    return psi


class Moments(NamedTuple):
    norm: float
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float


def moments_from_wigner(F) -> Moments:
    """Riemann-sum norm, means and variances of a Wigner function."""
    pg = F.phase_grid
    X = pg.x_grid.points[:, None]
    P = pg.p_grid.points[None, :]
    w = F.values * pg.cell
    norm = float(np.sum(w))
    if norm == 0.0:
        return Moments(0.0, 0.0, 0.0, 0.0, 0.0)
    mx = float(np.sum(X * w) / norm)
    mp = float(np.sum(P * w) / norm)
    vx = float(np.sum((X - mx) ** 2 * w) / norm)
    vp = float(np.sum((P - mp) ** 2 * w) / norm)
    return Moments(norm, mx, mp, vx, vp)


# ---------------------------------------------------------------- potentials

_POTENTIAL_ARITY = {
    "free": 0,
    "linear": 1,
    "harmonic": 1,
    "quartic": 1,
    "double_well": 2,
}


@dataclass(frozen=True)
class PotentialSpec:
    """Real potential V(x).

    Kinds: ``free``; ``linear(s)``: s*x; ``harmonic(omega)``: omega^2 x^2/2;
    ``quartic(lam)``: lam*x^4; ``double_well(a, b)``: a*(x^2 - b^2)^2;
    ``tabulated``: samples on ``grid``, continued by their boundary values
    outside the box.
    """

    kind: str
    params: tuple = ()
    table: Optional[np.ndarray] = field(default=None, compare=False)
    grid: Optional[GridSpec1D] = None

    def __post_init__(self):
        if self.kind == "tabulated":
            if self.table is None or self.grid is None:
                raise InvalidParameter("tabulated potential needs values and a grid")
            tab = np.asarray(self.table, dtype=float)
            if tab.shape != (self.grid.n_points,):
                raise GridMismatch(
                    f"tabulated potential has {tab.size} values, grid has {self.grid.n_points}"
                )
            if not np.all(np.isfinite(tab)):
                raise InvalidParameter("tabulated potential contains non-finite values")
            object.__setattr__(self, "table", _frozen(tab))
            return
        if self.kind not in _POTENTIAL_ARITY:
            raise InvalidParameter(f"unknown potential kind {self.kind!r}")
        params = tuple(float(p) for p in self.params)
        if len(params) != _POTENTIAL_ARITY[self.kind]:
            raise InvalidParameter(
                f"potential {self.kind!r} takes {_POTENTIAL_ARITY[self.kind]} parameter(s), got {len(params)}"
            )
        if not all(math.isfinite(p) for p in params):
            raise InvalidParameter("potential parameters must be finite")
        object.__setattr__(self, "params", params)

    @classmethod
    def free(cls) -> "PotentialSpec":
        return cls("free")

    @classmethod
    def linear(cls, s: float) -> "PotentialSpec":
        return cls("linear", (s,))

    @classmethod
    def harmonic(cls, omega: float = 1.0) -> "PotentialSpec":
        return cls("harmonic", (omega,))

    @classmethod
    def quartic(cls, lam: float) -> "PotentialSpec":
        return cls("quartic", (lam,))

    @classmethod
    def double_well(cls, a: float, b: float) -> "PotentialSpec":
        return cls("double_well", (a, b))

    @classmethod
    def tabulated(cls, values, grid: GridSpec1D) -> "PotentialSpec":
        return cls("tabulated", (), np.asarray(values, dtype=float), grid)

    @classmethod
    def parse(cls, text: str, grid: Optional[GridSpec1D] = None) -> "PotentialSpec":
        """Parse ``kind[:p1[:p2]]``; ``tabulated:PATH`` reads one value per line."""
        kind, _, rest = text.partition(":")
        if kind == "tabulated":
            if grid is None:
                raise InvalidParameter("tabulated potential needs the state grid")
            try:
                values = np.loadtxt(rest, comments="#", delimiter=",", ndmin=1)
            except (OSError, ValueError) as exc:
                raise InvalidParameter(f"cannot read tabulated potential {rest!r}: {exc}") from exc
            if values.ndim == 2:
                values = values[:, -1]
            return cls.tabulated(values, grid)
        try:
            params = tuple(float(p) for p in rest.split(":")) if rest else ()
        except ValueError as exc:
            raise InvalidParameter(f"bad potential parameters in {text!r}") from exc
        return cls(kind, params)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k, p = self.kind, self.params
        if k == "free":
            return np.zeros_like(x)
        if k == "linear":
            return p[0] * x
        if k == "harmonic":
            return 0.5 * p[0] ** 2 * x * x
        if k == "quartic":
            return p[0] * x ** 4
        if k == "double_well":
            return p[0] * (x * x - p[1] ** 2) ** 2
        g = self.grid
        idx = np.clip(np.rint((x - g.x_min) / g.dx).astype(int), 0, g.n_points - 1)
        return self.table[idx]

    def on_lattice(self, grid: GridSpec1D, index) -> np.ndarray:
        """V at integer lattice indices of ``grid``, including indices outside the box."""
        if self.kind == "tabulated":
            if not self.grid.same_as(grid):
                raise GridMismatch("tabulated potential was sampled on a different grid")
            idx = np.clip(np.asarray(index), 0, grid.n_points - 1)
            return self.table[idx]
        return self(grid.lattice(index))

    def max_force(self, grid: GridSpec1D) -> float:
        """Largest |V'(x)| over the box (finite differences on the lattice)."""
        if self.kind == "free":
            return 0.0
        v = self.on_lattice(grid, np.arange(-1, grid.n_points + 1))
        return float(np.max(np.abs(np.diff(v))) / grid.dx)

    def __str__(self) -> str:
        if self.kind == "tabulated":
            return "tabulated"
        return ":".join([self.kind, *(repr(p) for p in self.params)])
