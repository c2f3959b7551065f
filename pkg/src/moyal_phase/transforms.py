"""Conversions between wavefunctions, density matrices, Wigner functions and
Moyal characteristic functions.

Conventions (hbar = 1)::

    M(tau, theta) = int psi*(x - tau/2) exp(i theta x) psi(x + tau/2) dx
    F(X, P)       = (2 pi)^-2 int int M(tau, theta) exp(-i (tau P + theta X)) dtau dtheta
                  = (2 pi)^-1 int psi*(X - tau/2) psi(X + tau/2) exp(-i P tau) dtau
    rho(x, x')    = psi(x) psi*(x'),   X = (x + x')/2,  tau = x' - x
    F(X, P)       = (2 pi)^-1 int rho(X, tau) exp(+i tau P) dtau

With these signs P is the physical momentum (a packet exp(i p0 x) has
<P> = p0) and int F dX dP = 1.

Discretization: X runs over the position grid and tau over the even lattice
tau_k = 2 k dx, so psi(X +- tau/2) is always a grid sample and no
interpolation is needed.  The P grid is the Fourier dual of that tau lattice
(see :meth:`GridSpec1D.momentum_band`).  States are treated as zero outside
the box.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._fourier import lattice_dft, spectral_shift
from .core import (
    BOUNDARY_TOL,
    GridSpec1D,
    PhaseGridSpec,
    Wavefunction,
    _frozen,
    lattice_steps,
)
from .errors import GridMismatch, NonHermitianInput, SupportOverflow

REAL_TOL = 1e-10
HERMITIAN_TOL = 1e-9


# ------------------------------------------------------------------ types


@dataclass(frozen=True)
class WignerFunction:
    phase_grid: PhaseGridSpec
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values)
        if np.iscomplexobj(vals):
            raise TypeError("WignerFunction values must be real; check and drop the imaginary part first")
        shape = (self.phase_grid.x_grid.n_points, self.phase_grid.p_grid.n_points)
        if vals.shape != shape:
            raise GridMismatch(f"Wigner values have shape {vals.shape}, grid expects {shape}")
        object.__setattr__(self, "values", _frozen(vals.astype(float)))

    def integral(self) -> float:
        return float(np.sum(self.values) * self.phase_grid.cell)


@dataclass(frozen=True)
class CharacteristicFunction:
    """M sampled on ``tau_grid x theta_grid`` (axis 0 = tau).

    ``x_grid`` records the position grid the samples came from; it is needed
    to transform back to (X, P).
    """

    tau_grid: GridSpec1D
    theta_grid: GridSpec1D
    values: np.ndarray
    time: float = 0.0
    x_grid: Optional[GridSpec1D] = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        shape = (self.tau_grid.n_points, self.theta_grid.n_points)
        if vals.shape != shape:
            raise GridMismatch(f"characteristic values have shape {vals.shape}, grid expects {shape}")
        object.__setattr__(self, "values", _frozen(vals))

    def hermiticity_defect(self) -> float:
        """max |M(-tau,-theta) - conj M(tau,theta)| over mirror pairs present on the grid."""
        return _mirror_defect(self.values, self.tau_grid, self.theta_grid)


@dataclass(frozen=True)
class DensityMatrix:
    """Two-point function; ``values[i, j] = rho(x_i, x_j)``.

    Construction does not enforce the density-matrix invariants because
    idempotent-built two-point functions are legitimately non-Hermitian;
    call :meth:`check` when a physical density matrix is required.
    """

    grid: GridSpec1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        n = self.grid.n_points
        if vals.shape != (n, n):
            raise GridMismatch(f"density values have shape {vals.shape}, grid expects {(n, n)}")
        object.__setattr__(self, "values", _frozen(vals))

    def trace(self) -> complex:
        return complex(np.trace(self.values) * self.grid.dx)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.values - self.values.conj().T), initial=0.0))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the operator (kernel times dx), descending."""
        h = 0.5 * (self.values + self.values.conj().T) * self.grid.dx
        return np.linalg.eigvalsh(h)[::-1]

    def check(self, herm_tol: float = 1e-10, trace_tol: float = 1e-9, psd_tol: float = 1e-9) -> None:
        """Raise NonHermitianInput / ValueError if not a physical density matrix."""
        scale = max(float(np.max(np.abs(self.values), initial=0.0)), 1.0)
        if self.hermiticity_defect() > herm_tol * scale:
            raise NonHermitianInput(f"density matrix not Hermitian (defect {self.hermiticity_defect():.2e})")
        if abs(self.trace() - 1) > trace_tol:
            raise ValueError(f"density matrix trace {self.trace():.12g} differs from 1")
        lam = self.eigenvalues()
        if lam[-1] < -psd_tol:
            raise ValueError(f"density matrix has negative eigenvalue {lam[-1]:.2e}")


@dataclass(frozen=True)
class MidpointDensity:
    """rho re-indexed by midpoint and separation.

    ``values[s, d + n - 1] = rho(x_i, x_j)`` with ``s = i + j`` and
    ``d = j - i``, i.e. X = x_min + s*dx/2 and tau = d*dx.  Entries with
    ``s`` and ``d`` of different parity, or outside the box, are not images
    of the (x, x') lattice; ``mask`` marks the valid ones.
    """

    grid: GridSpec1D
    values: np.ndarray
    mask: np.ndarray

    @property
    def X(self) -> np.ndarray:
        return self.grid.x_min + 0.5 * self.grid.dx * np.arange(2 * self.grid.n_points - 1)

    @property
    def tau(self) -> np.ndarray:
        n = self.grid.n_points
        return self.grid.dx * np.arange(-(n - 1), n)


def _mirror_defect(values: np.ndarray, g0: GridSpec1D, g1: GridSpec1D) -> float:
    """Hermitian-symmetry defect over samples whose negated coordinates are also samples."""
    out = 0.0
    idx = []
    for g in (g0, g1):
        try:
            centre = g.index_of(0.0)
        except GridMismatch:
            return float("nan")
        lo = max(0, 2 * centre - (g.n_points - 1))
        hi = min(g.n_points - 1, 2 * centre)
        idx.append((centre, lo, hi))
    (c0, lo0, hi0), (c1, lo1, hi1) = idx
    block = values[lo0 : hi0 + 1, lo1 : hi1 + 1]
    mirror = values[2 * c0 - np.arange(lo0, hi0 + 1)][:, 2 * c1 - np.arange(lo1, hi1 + 1)]
    if block.size:
        out = float(np.max(np.abs(mirror - block.conj())))
    return out


# ------------------------------------------------------------ shifted products


def _pair_indices(n: int):
    """Index arrays (i - k, i + k) for X index i and tau index k = -n/2..n/2-1."""
    k = np.arange(n) - n // 2
    i = np.arange(n)[:, None]
    lo = i - k[None, :]
    hi = i + k[None, :]
    ok = (lo >= 0) & (lo < n) & (hi >= 0) & (hi < n)
    return lo, hi, ok


def shifted_product(psi: Wavefunction) -> np.ndarray:
    """G[i, k] = psi*(X_i - tau_k/2) psi(X_i + tau_k/2) on the canonical (X, tau) lattice."""
    n = psi.grid.n_points
    lo, hi, ok = _pair_indices(n)
    out = np.zeros((n, n), dtype=complex)
    out[ok] = np.conj(psi.values[lo[ok]]) * psi.values[hi[ok]]
    return out


def _require_compact(psi: Wavefunction) -> None:
    amp = psi.boundary_amplitude()
    if amp >= BOUNDARY_TOL:
        raise SupportOverflow(
            f"state reaches the box edge (|psi| = {amp:.2e}); shifted products would be truncated"
        )


def _discard_imag(z: np.ndarray, scale: float, what: str) -> np.ndarray:
    resid = float(np.max(np.abs(z.imag), initial=0.0))
    if resid > REAL_TOL * max(scale, 1.0):
        raise NonHermitianInput(f"{what}: imaginary residue {resid:.2e} (input lacks Hermitian symmetry)")
    return z.real.copy()


# ------------------------------------------------------------- wavefunction side


def characteristic_value(psi: Wavefunction, tau: float, theta: float) -> complex:
    """M(tau, theta) for one point; ``tau`` must be an integer multiple of dx.

    The sum runs over u = x - tau/2 on the grid, so x = u + tau/2 may sit on
    the half-step lattice without any interpolation.
    """
    _require_compact(psi)
    g = psi.grid
    j = lattice_steps(tau, g.dx)
    n = g.n_points
    if abs(j) >= n:
        return 0j
    a = np.arange(max(0, -j), min(n, n - j))
    u = g.points[a]
    terms = np.conj(psi.values[a]) * psi.values[a + j] * np.exp(1j * theta * (u + 0.5 * tau))
    return complex(np.sum(terms) * g.dx)


def characteristic_from_wavefunction(
    psi: Wavefunction,
    tau_grid: Optional[GridSpec1D] = None,
    theta_grid: Optional[GridSpec1D] = None,
) -> CharacteristicFunction:
    """Moyal characteristic function of a pure state.

    Default grids are ``psi.grid.tau_grid()`` and ``psi.grid.theta_grid()``,
    for which the theta sum is done by FFT; other grids need every tau to be
    an integer multiple of dx and are summed directly.
    """
    _require_compact(psi)
    g = psi.grid
    tau_grid = tau_grid or g.tau_grid()
    theta_grid = theta_grid or g.theta_grid()
    if tau_grid.same_as(g.tau_grid()) and theta_grid.same_as(g.theta_grid()):
        G = shifted_product(psi)  # (X, tau)
        M = lattice_dft(G, g.x_min, g.dx, theta_grid.x_min, +1, axis=0) * g.dx
        return CharacteristicFunction(tau_grid, theta_grid, M.T, psi.time, g)
    thetas = theta_grid.points
    vals = np.empty((tau_grid.n_points, theta_grid.n_points), dtype=complex)
    n = g.n_points
    for r, tau in enumerate(tau_grid.points):
        j = lattice_steps(tau, g.dx)
        if abs(j) >= n:
            vals[r] = 0
            continue
        a = np.arange(max(0, -j), min(n, n - j))
        mid = g.points[a] + 0.5 * tau
        prod = np.conj(psi.values[a]) * psi.values[a + j]
        vals[r] = np.exp(1j * np.outer(thetas, mid)) @ prod * g.dx
    return CharacteristicFunction(tau_grid, theta_grid, vals, psi.time, g)


def wigner_from_wavefunction(psi: Wavefunction, phase_grid: Optional[PhaseGridSpec] = None) -> WignerFunction:
    """Direct Wigner transform, one FFT over tau per X row."""
    _require_compact(psi)
    g = psi.grid
    phase_grid = phase_grid or PhaseGridSpec.for_position(g)
    if not phase_grid.x_grid.same_as(g):
        raise GridMismatch("Wigner X grid must equal the wavefunction grid")
    G = shifted_product(psi)
    tg = g.tau_grid()
    pref = tg.dx / (2 * np.pi)
    if phase_grid.is_canonical():
        F = lattice_dft(G, tg.x_min, tg.dx, phase_grid.p_grid.x_min, -1, axis=1) * pref
    else:
        F = G @ np.exp(-1j * np.outer(tg.points, phase_grid.p_grid.points)) * pref
    scale = float(np.max(np.abs(F), initial=0.0))
    return WignerFunction(phase_grid, _discard_imag(F, scale, "wigner_from_wavefunction"), psi.time)


def momentum_amplitude(psi: Wavefunction, p) -> np.ndarray:
    """phi(p) = (2 pi)^-1/2 int psi(x) exp(-i p x) dx at arbitrary momenta."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    x = psi.grid.points
    return np.exp(-1j * np.outer(p, x)) @ psi.values * psi.grid.dx / np.sqrt(2 * np.pi)


# ------------------------------------------------------------- Fourier pairs


def _require_canonical_char(M: CharacteristicFunction) -> GridSpec1D:
    g = M.x_grid
    if g is None or not (M.tau_grid.same_as(g.tau_grid()) and M.theta_grid.same_as(g.theta_grid())):
        raise GridMismatch("characteristic function is not on the spectral dual of a position grid")
    return g


def wigner_from_characteristic(M: CharacteristicFunction) -> WignerFunction:
    """F(X,P) = (2 pi)^-2 sum M exp(-i(tau P + theta X)) dtau dtheta."""
    g = _require_canonical_char(M)
    scale = float(np.max(np.abs(M.values), initial=0.0))
    defect = M.hermiticity_defect()
    if defect > HERMITIAN_TOL * max(scale, 1.0):
        raise NonHermitianInput(f"characteristic function violates M(-t,-s) = conj M(t,s) by {defect:.2e}")
    tg, sg = M.tau_grid, M.theta_grid
    pg = g.momentum_band()
    A = lattice_dft(M.values, sg.x_min, sg.dx, g.x_min, -1, axis=1)  # (tau, X)
    A = lattice_dft(A, tg.x_min, tg.dx, pg.x_min, -1, axis=0)  # (P, X)
    F = A.T * (tg.dx * sg.dx / (2 * np.pi) ** 2)
    return WignerFunction(PhaseGridSpec(g, pg), _discard_imag(F, scale, "wigner_from_characteristic"), M.time)


def characteristic_from_wigner(F: WignerFunction) -> CharacteristicFunction:
    """M(tau,theta) = sum F exp(i(tau P + theta X)) dX dP on the canonical dual grids."""
    pgs = F.phase_grid
    if not pgs.is_canonical():
        raise GridMismatch("Wigner function is not on the canonical phase grid")
    g, pg = pgs.x_grid, pgs.p_grid
    tg, sg = g.tau_grid(), g.theta_grid()
    A = lattice_dft(F.values, pg.x_min, pg.dx, tg.x_min, +1, axis=1)  # (X, tau)
    A = lattice_dft(A, g.x_min, g.dx, sg.x_min, +1, axis=0)  # (theta, tau)
    return CharacteristicFunction(tg, sg, A.T * pgs.cell, F.time, g)


# ------------------------------------------------------------- density side


def density_from_wavefunction(psi: Wavefunction) -> DensityMatrix:
    return DensityMatrix(psi.grid, np.outer(psi.values, psi.values.conj()), psi.time)


def midpoint_coords(rho: DensityMatrix) -> MidpointDensity:
    n = rho.grid.n_points
    i, j = np.indices((n, n))
    s = i + j
    d = j - i + n - 1
    vals = np.zeros((2 * n - 1, 2 * n - 1), dtype=complex)
    mask = np.zeros_like(vals, dtype=bool)
    vals[s, d] = rho.values
    mask[s, d] = True
    return MidpointDensity(rho.grid, _frozen(vals), _frozen(mask))


def cartesian_coords(mid: MidpointDensity) -> DensityMatrix:
    n = mid.grid.n_points
    i, j = np.indices((n, n))
    return DensityMatrix(mid.grid, mid.values[i + j, j - i + n - 1])


def _rho_X_tau(rho: DensityMatrix) -> np.ndarray:
    """rho(X_i, tau_k) = rho[i - k, i + k] on the canonical lattice (zero off the box)."""
    n = rho.grid.n_points
    lo, hi, ok = _pair_indices(n)
    out = np.zeros((n, n), dtype=complex)
    out[ok] = rho.values[lo[ok], hi[ok]]
    return out


def wigner_from_density(rho: DensityMatrix, phase_grid: Optional[PhaseGridSpec] = None) -> WignerFunction:
    """F(X,P) = (2 pi)^-1 sum_tau rho(X, tau) exp(+i tau P) dtau."""
    g = rho.grid
    phase_grid = phase_grid or PhaseGridSpec.for_position(g)
    if not phase_grid.x_grid.same_as(g):
        raise GridMismatch("Wigner X grid must equal the density-matrix grid")
    scale = float(np.max(np.abs(rho.values), initial=0.0))
    if rho.hermiticity_defect() > 1e-10 * max(scale, 1.0):
        raise NonHermitianInput(f"density matrix not Hermitian (defect {rho.hermiticity_defect():.2e})")
    R = _rho_X_tau(rho)
    tg = g.tau_grid()
    pref = tg.dx / (2 * np.pi)
    if phase_grid.is_canonical():
        F = lattice_dft(R, tg.x_min, tg.dx, phase_grid.p_grid.x_min, +1, axis=1) * pref
    else:
        F = R @ np.exp(1j * np.outer(tg.points, phase_grid.p_grid.points)) * pref
    fscale = float(np.max(np.abs(F), initial=0.0))
    return WignerFunction(phase_grid, _discard_imag(F, fscale, "wigner_from_density"), rho.time)


def rho_X_tau_from_wigner(F: WignerFunction) -> np.ndarray:
    """rho(X_i, tau_k) = sum_m F(X_i, P_m) exp(-i tau_k P_m) dP on the canonical lattice."""
    pgs = F.phase_grid
    if not pgs.is_canonical():
        raise GridMismatch("Wigner function is not on the canonical phase grid")
    tg = pgs.x_grid.tau_grid()
    return lattice_dft(F.values, pgs.p_grid.x_min, pgs.p_grid.dx, tg.x_min, -1, axis=1) * pgs.p_grid.dx


def wigner_from_rho_X_tau(R: np.ndarray, phase_grid: PhaseGridSpec) -> np.ndarray:
    """Inverse of :func:`rho_X_tau_from_wigner`; returns the complex array before the realness check."""
    tg = phase_grid.x_grid.tau_grid()
    return lattice_dft(R, tg.x_min, tg.dx, phase_grid.p_grid.x_min, +1, axis=1) * (tg.dx / (2 * np.pi))


def rho_from_wigner(F: WignerFunction) -> DensityMatrix:
    """Density matrix from a Wigner function.

    Entries rho(x_a, x_b) with a + b even sit on the (X, tau) lattice and are
    exact Fourier sums.  The odd-parity entries live at half-step midpoints
    and odd separations; they are filled by band-limited interpolation of
    rho(X, tau) by (dx/2, dx).
    """
    g = F.phase_grid.x_grid
    n = g.n_points
    R = rho_X_tau_from_wigner(F)
    lo, hi, ok = _pair_indices(n)
    vals = np.zeros((n, n), dtype=complex)
    vals[lo[ok], hi[ok]] = R[ok]
    Rodd = spectral_shift(R, (0.5 * g.dx, g.dx), (g.dx, 2 * g.dx))
    hi_odd = hi + 1
    ok_odd = (lo >= 0) & (lo < n) & (hi_odd >= 0) & (hi_odd < n)
    vals[lo[ok_odd], hi_odd[ok_odd]] = Rodd[ok_odd]
    vals = 0.5 * (vals + vals.conj().T)
    return DensityMatrix(g, vals, F.time)


# ------------------------------------------------------------- marginals


def position_marginal(F: WignerFunction) -> np.ndarray:
    """int F dP as a function of X (samples on ``F.phase_grid.x_grid``)."""
    return F.values.sum(axis=1) * F.phase_grid.p_grid.dx


def momentum_marginal(F: WignerFunction) -> np.ndarray:
    """int F dX as a function of P."""
    return F.values.sum(axis=0) * F.phase_grid.x_grid.dx
