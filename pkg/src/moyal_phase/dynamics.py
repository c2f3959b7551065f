"""Three time-evolution engines and their comparator.

* ``evolve_moyal`` propagates the Wigner function F(X, P) directly.
* ``evolve_density`` propagates rho(x, x') under the Liouville equation.
* ``schrodinger_oracle`` propagates psi and serves as ground truth.

All three use second-order Strang splitting with exact sub-flows.  The
phase-space and density engines use kinetic/2 - potential - kinetic/2; the
oracle uses the textbook potential/2 - kinetic - potential/2 ordering, so
its O(dt^2) splitting error differs from the other two and the comparison
exposes it.

Collision term.  In the (X, tau) representation the potential acts
diagonally,

    d rho(X, tau)/dt = -i [V(X - tau/2) - V(X + tau/2)] rho(X, tau),

which, with F = (2 pi)^-1 int rho exp(i tau P) dtau, is the integral
operator

    dF/dt|coll (X, P) = int J(X, P - P') F(X, P') dP',
    J(X, k) = (-i / 2 pi) int [V(X - y/2) - V(X + y/2)] exp(+i k y) dy.

J is real and odd in k.  The engine applies the exponentiated diagonal
form; :func:`build_moyal_kernel` and :func:`apply_moyal_kernel` expose the
generator itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._fourier import lattice_dft
from .core import GridSpec1D, PhaseGridSpec, PotentialSpec, Wavefunction
from .errors import InvalidParameter, NonHermitianInput, UnstableStep
from .transforms import (
    DensityMatrix,
    WignerFunction,
    _discard_imag,
    _pair_indices,
    density_from_wavefunction,
    rho_X_tau_from_wigner,
    wigner_from_density,
    wigner_from_rho_X_tau,
    wigner_from_wavefunction,
)

METHODS = ("moyal", "density_liouville", "schrodinger_oracle")
GROWTH_TOL = 1e-6
# outer fraction of the momentum band watched for aliasing
EDGE_BAND = 0.25
# fraction of the momentum band a single potential kick may use
KICK_FRACTION = 0.75


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float = 1e-3
    n_steps: int = 1000
    mass: float = 1.0
    method: str = "moyal"

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidParameter(f"dt must be positive, got {self.dt}")
        if isinstance(self.n_steps, bool) or int(self.n_steps) != self.n_steps or self.n_steps < 0:
            raise InvalidParameter(f"n_steps must be a non-negative integer, got {self.n_steps}")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise InvalidParameter(f"mass must be positive, got {self.mass}")
        if self.method not in METHODS:
            raise InvalidParameter(f"method must be one of {METHODS}, got {self.method!r}")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def total_time(self) -> float:
        return self.dt * self.n_steps

    def with_method(self, method: str) -> "EvolutionConfig":
        return EvolutionConfig(self.dt, self.n_steps, self.mass, method)


def momentum_limit(grid: GridSpec1D, method: str) -> float:
    """Largest momentum each engine represents: pi/dx for psi and rho, pi/(2 dx) for F."""
    return math.pi / (2 * grid.dx) if method == "moyal" else math.pi / grid.dx


def stability_bound(grid: GridSpec1D, V: PotentialSpec, method: str) -> float:
    """Largest dt whose potential kick max|V'| dt stays inside the momentum band."""
    force = V.max_force(grid)
    if force == 0.0:
        return math.inf
    return KICK_FRACTION * momentum_limit(grid, method) / force


def _check_stable_dt(grid: GridSpec1D, V: PotentialSpec, cfg: EvolutionConfig) -> None:
    if cfg.n_steps == 0:
        return
    bound = stability_bound(grid, V, cfg.method)
    if cfg.dt > bound:
        raise UnstableStep(
            1,
            f"dt={cfg.dt:g} exceeds the stability bound {bound:.3g} for {cfg.method} on this grid "
            f"(potential kick would alias past the momentum cutoff)",
        )


class _Monitor:
    """Per-step L2-growth and spectral-edge watchdog."""

    def __init__(self, norm0: float):
        self.norm = norm0

    def check(self, step: int, norm: float, edge_fraction: float) -> None:
        if not math.isfinite(norm):
            raise UnstableStep(step, "state became non-finite")
        if self.norm > 0 and norm > self.norm * (1 + GROWTH_TOL):
            raise UnstableStep(step, f"L2 norm grew by {norm / self.norm - 1:.2e} in one step")
        if edge_fraction > GROWTH_TOL:
            raise UnstableStep(step, f"{edge_fraction:.2e} of the weight reached the momentum cutoff")
        self.norm = norm


def _edge_mask(k: np.ndarray, limit: float) -> np.ndarray:
    return np.abs(k) >= (1 - EDGE_BAND) * limit


# ------------------------------------------------------------------ kernel


@dataclass(frozen=True)
class MoyalKernel:
    """J(X_i, k_q) on the periodic difference-momentum grid.

    ``k`` runs over ``q * dP`` for ``q = -n/2..n/2-1`` (the circular
    convolution offsets of the P grid).
    """

    potential: PotentialSpec
    phase_grid: PhaseGridSpec
    values: np.ndarray = field(repr=False)

    @property
    def k(self) -> np.ndarray:
        n = self.phase_grid.p_grid.n_points
        return (np.arange(n) - n // 2) * self.phase_grid.p_grid.dx

    def antisymmetry_defect(self) -> float:
        """max |J(X, -k) + conj J(X, k)| over mirror pairs."""
        n = self.values.shape[1]
        c = n // 2
        q = np.arange(1, c)
        return float(np.max(np.abs(self.values[:, c - q] + np.conj(self.values[:, c + q])), initial=0.0))


def potential_difference(V: PotentialSpec, grid: GridSpec1D) -> np.ndarray:
    """V(X_i - tau_k/2) - V(X_i + tau_k/2) on the canonical (X, tau) lattice."""
    n = grid.n_points
    i = np.arange(n)[:, None]
    k = (np.arange(n) - n // 2)[None, :]
    return V.on_lattice(grid, i - k) - V.on_lattice(grid, i + k)


def build_moyal_kernel(V: PotentialSpec, phase_grid: PhaseGridSpec) -> MoyalKernel:
    if not phase_grid.is_canonical():
        raise InvalidParameter("Moyal kernel needs the canonical phase grid")
    g = phase_grid.x_grid
    dV = potential_difference(V, g)
    if not np.all(np.isfinite(dV)):
        raise InvalidParameter("potential is not finite on the extended lattice")
    tg = g.tau_grid()
    n = g.n_points
    k0 = -(n // 2) * phase_grid.p_grid.dx
    J = lattice_dft(dV, tg.x_min, tg.dx, k0, +1, axis=1) * (-1j * tg.dx / (2 * np.pi))
    return MoyalKernel(V, phase_grid, J)


def apply_moyal_kernel(kernel: MoyalKernel, F: WignerFunction) -> np.ndarray:
    """sum_{P'} J(X, P - P') F(X, P') dP' by direct circular convolution."""
    n = F.values.shape[1]
    m = np.arange(n)
    # offset q = m - m' wrapped into -n/2..n/2-1, then shifted to a column of ``values``
    q = (m[:, None] - m[None, :] + n // 2) % n
    out = np.einsum("xmj,xj->xm", kernel.values[:, q], F.values.astype(complex))
    out *= F.phase_grid.p_grid.dx
    return _discard_imag(out, float(np.max(np.abs(out), initial=0.0)), "apply_moyal_kernel")


# ------------------------------------------------------------------ engines


def evolve_moyal(F0: WignerFunction, V: PotentialSpec, cfg: EvolutionConfig) -> WignerFunction:
    """Strang-split phase-space evolution: stream dt/2, collide dt, stream dt/2."""
    pgs = F0.phase_grid
    if not pgs.is_canonical():
        raise InvalidParameter("evolve_moyal needs the canonical phase grid")
    cfg = cfg.with_method("moyal")
    g, pg = pgs.x_grid, pgs.p_grid
    _check_stable_dt(g, V, cfg)
    kx = g.wavenumbers()[:, None]
    P = pg.points[None, :]
    stream_half = np.exp(-1j * kx * P * (0.5 * cfg.dt / cfg.mass))
    # pairs (X - tau/2, X + tau/2) with an endpoint outside the box carry no physical
    # content; zeroing them stops round-off there from being scrambled and fed back
    _, _, inside = _pair_indices(g.n_points)
    collide = np.where(inside, np.exp(-1j * potential_difference(V, g) * cfg.dt), 0.0)
    edge = _edge_mask(pg.points, -pg.x_min)

    def stream(f):
        return np.fft.ifft(np.fft.fft(f, axis=0) * stream_half, axis=0)

    F = np.array(F0.values, dtype=float)
    mon = _Monitor(float(np.linalg.norm(F)))
    for step in range(1, cfg.n_steps + 1):
        F = stream(F)
        F = F.real
        R = rho_X_tau_from_wigner(WignerFunction(pgs, F))
        F = wigner_from_rho_X_tau(R * collide, pgs)
        F = stream(F)
        scale = float(np.max(np.abs(F)))
        resid = float(np.max(np.abs(F.imag)))
        if resid > 1e-9 * max(scale, 1.0):
            raise UnstableStep(step, f"Wigner function lost realness (imaginary residue {resid:.2e})")
        F = F.real
        total = float(np.sum(F * F))
        mon.check(step, math.sqrt(total), float(np.sum(F[:, edge] ** 2)) / total if total else 0.0)
    return WignerFunction(pgs, F, F0.time + cfg.total_time)


def evolve_density(rho0: DensityMatrix, V: PotentialSpec, cfg: EvolutionConfig) -> DensityMatrix:
    """Strang-split Liouville evolution: kinetic dt/2 on both indices, potential phase, kinetic dt/2."""
    g = rho0.grid
    scale = max(float(np.max(np.abs(rho0.values), initial=0.0)), 1.0)
    if rho0.hermiticity_defect() > 1e-10 * scale:
        raise NonHermitianInput(f"initial density matrix not Hermitian (defect {rho0.hermiticity_defect():.2e})")
    cfg = cfg.with_method("density_liouville")
    _check_stable_dt(g, V, cfg)
    k = g.wavenumbers()
    kin = np.exp(-1j * k * k * (0.25 * cfg.dt / cfg.mass))
    kin_half = kin[:, None] * kin.conj()[None, :]
    v = V.on_lattice(g, np.arange(g.n_points))
    pot = np.exp(-1j * (v[:, None] - v[None, :]) * cfg.dt)
    edge = _edge_mask(k, math.pi / g.dx)

    r = np.array(rho0.values, dtype=complex)
    mon = _Monitor(float(np.linalg.norm(r)))
    for step in range(1, cfg.n_steps + 1):
        # rho~(p, p') up to constants: fft on the ket index, inverse fft on the bra index
        rt = np.fft.ifft(np.fft.fft(r, axis=0), axis=1) * kin_half
        r = np.fft.fft(np.fft.ifft(rt, axis=0), axis=1)
        r *= pot
        rt = np.fft.ifft(np.fft.fft(r, axis=0), axis=1)
        w = np.abs(rt) ** 2
        total = float(np.sum(w))
        edge_frac = float(np.sum(w[edge, :]) + np.sum(w[:, edge])) / total if total else 0.0
        rt *= kin_half
        r = np.fft.fft(np.fft.ifft(rt, axis=0), axis=1)
        mon.check(step, float(np.linalg.norm(r)), edge_frac)
    return DensityMatrix(g, r, rho0.time + cfg.total_time)


def schrodinger_oracle(psi0: Wavefunction, V: PotentialSpec, cfg: EvolutionConfig) -> Wavefunction:
    """Split-step Fourier propagation: potential dt/2, kinetic dt, potential dt/2."""
    g = psi0.grid
    cfg = cfg.with_method("schrodinger_oracle")
    _check_stable_dt(g, V, cfg)
    k = g.wavenumbers()
    kin = np.exp(-1j * k * k * (0.5 * cfg.dt / cfg.mass))
    v = V.on_lattice(g, np.arange(g.n_points))
    pot_half = np.exp(-0.5j * v * cfg.dt)
    edge = _edge_mask(k, math.pi / g.dx)

    psi = np.array(psi0.values, dtype=complex)
    mon = _Monitor(float(np.linalg.norm(psi)))
    for step in range(1, cfg.n_steps + 1):
        psi *= pot_half
        phi = np.fft.fft(psi)
        w = np.abs(phi) ** 2
        total = float(np.sum(w))
        phi *= kin
        psi = np.fft.ifft(phi)
        psi *= pot_half
        mon.check(step, float(np.linalg.norm(psi)), float(np.sum(w[edge])) / total if total else 0.0)
    return Wavefunction(g, psi, psi0.time + cfg.total_time)


# ------------------------------------------------------------------ comparator

PAIRS = (
    ("moyal", "density_liouville"),
    ("moyal", "schrodinger_oracle"),
    ("density_liouville", "schrodinger_oracle"),
)


@dataclass(frozen=True)
class ComparisonReport:
    time: float
    dt: float
    wigner: dict
    discrepancies: dict  # "a_vs_b" -> {"L_inf": float, "L2": float}

    def max_linf(self) -> float:
        return max(d["L_inf"] for d in self.discrepancies.values())

    def to_dict(self) -> dict:
        """``{pair: {"L_inf": ..., "L2": ...}}`` for the three route pairs."""
        return {k: dict(v) for k, v in self.discrepancies.items()}


def compare_evolutions(psi0: Wavefunction, V: PotentialSpec, cfg: EvolutionConfig) -> ComparisonReport:
    """Run all three engines from ``psi0`` and report pairwise Wigner discrepancies."""
    pgs = PhaseGridSpec.for_position(psi0.grid)
    F0 = wigner_from_wavefunction(psi0, pgs)
    finals = {
        "moyal": evolve_moyal(F0, V, cfg),
        "density_liouville": wigner_from_density(evolve_density(density_from_wavefunction(psi0), V, cfg), pgs),
        "schrodinger_oracle": wigner_from_wavefunction(schrodinger_oracle(psi0, V, cfg), pgs),
    }
    out = {}
    for a, b in PAIRS:
        diff = finals[a].values - finals[b].values
        out[f"{a}_vs_{b}"] = {
            "L_inf": float(np.max(np.abs(diff))),
            "L2": float(np.sqrt(np.sum(diff * diff) * pgs.cell)),
        }
    return ComparisonReport(cfg.total_time, cfg.dt, finals, out)
