"""Truncated-Fock realization of the Weyl algebra and von Neumann's idempotent.

Operators live on the first ``D`` oscillator levels with the standard ladder
matrices, ``x = (a + a^dag)/sqrt(2)`` and ``p = (a - a^dag)/(i sqrt(2))``, so
``[x, p] = i`` away from the cutoff.  The Weyl generators are

    U(alpha) = exp(i alpha p),   V(beta) = exp(i beta x),
    S(alpha, beta) = exp(-i alpha beta / 2) U(alpha) V(beta).

Exponentials are taken through the eigendecomposition of the (Hermitian)
truncated generator, which makes every U and V exactly unitary and the
one-parameter group laws exact inside the truncated space.  The Weyl relation
only holds on a leading block: levels close to the cutoff are polluted, and
the default margin drops the upper half of the levels.

Integrals over (alpha, beta), such as the von Neumann operator

    A = int int exp(-alpha^2/4 - beta^2/4) S(alpha, beta) dalpha dbeta,

are evaluated with a tensor-product trapezoid rule in a padded working space
(``work_dim`` levels) and then restricted to the first ``D`` levels.  The
padding matters: S(alpha, beta) for |alpha| ~ 8 sends low levels far up the
ladder, and truncating before integrating destroys the cancellations that make
A proportional to the vacuum projector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .core import GridSpec1D, Wavefunction, lattice_steps
from .errors import InvalidParameter, TruncationRange
from .transforms import DensityMatrix, _require_compact, characteristic_value

MAX_DIM = 512
CALIBRATION_TOL = 1e-10
CALIBRATION_STEP = 0.05
CALIBRATION_LIMIT = 20.0
MIN_BOX_HALF_WIDTH = 6.0
MAX_NODE_SPACING = 0.25
MIN_NODES = 16
# the reference Gaussian weight at half-width 8 is exp(-16) ~ 1.1e-7
COEFF_EDGE_TOL = 1e-6


def _ladder(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def _quadratures(dim: int) -> tuple[np.ndarray, np.ndarray]:
    a = _ladder(dim)
    ad = a.conj().T
    return (a + ad) / math.sqrt(2.0), (a - ad) / (1j * math.sqrt(2.0))


@dataclass(frozen=True)
class _Spectral:
    """Eigendecomposition of a Hermitian generator, for exact exponentials."""

    vals: np.ndarray
    vecs: np.ndarray

    @classmethod
    def of(cls, h: np.ndarray) -> "_Spectral":
        w, v = np.linalg.eigh(h)
        return cls(w, v)

    def expi(self, t: float) -> np.ndarray:
        """exp(i t H)."""
        return (self.vecs * np.exp(1j * t * self.vals)) @ self.vecs.conj().T

    def apply_diag(self, d: np.ndarray) -> np.ndarray:
        """sum_j d_j |v_j><v_j| for a vector of spectral weights ``d``."""
        return (self.vecs * d) @ self.vecs.conj().T


@dataclass(frozen=True, eq=False)
class FockRep:
    """Ladder and quadrature matrices on the first ``dim`` levels.

    ``margin`` is the number of top levels excluded from block-restricted
    checks (default ``ceil(dim/2)``).  ``work_dim`` is the padded space used
    for quadratures over (alpha, beta) (default ``2*dim + 64``).
    """

    dim: int
    a_op: np.ndarray
    adag_op: np.ndarray
    x_op: np.ndarray
    p_op: np.ndarray
    margin: int
    work_dim: int

    @property
    def block(self) -> int:
        """Size of the leading block used by truncation-sensitive checks."""
        return max(self.dim - self.margin, 1)

    @cached_property
    def _x(self) -> _Spectral:
        return _Spectral.of(self.x_op)

    @cached_property
    def _p(self) -> _Spectral:
        return _Spectral.of(self.p_op)

    @cached_property
    def _work(self) -> tuple[_Spectral, _Spectral]:
        x, p = _quadratures(self.work_dim)
        return _Spectral.of(x), _Spectral.of(p)

    @cached_property
    def calibrated_range(self) -> float:
        """Largest |argument| for which U and V match the padded reference on the leading block.

        The comparison is ``||(exp(i t p_D) - exp(i t p_W)[:D, :D])[:b, :b]||_2``
        with ``b`` the leading block, scanned outward in steps of
        ``CALIBRATION_STEP`` until it first exceeds ``CALIBRATION_TOL``.  The
        value applies to V as well because x and p are unitarily equivalent
        through the Fourier phase ``i^n`` on the ladder.
        """
        b = self.block
        wp = self._work[1]
        t = 0.0
        while t + CALIBRATION_STEP <= CALIBRATION_LIMIT + 1e-12:
            s = t + CALIBRATION_STEP
            diff = self._p.expi(s)[:b, :b] - wp.expi(s)[:b, :b]
            if np.linalg.norm(diff, 2) > CALIBRATION_TOL:
                break
            t = s
        return round(t, 10)

    def commutator_defect(self) -> float:
        """``||[x, p] - i I||_2`` on the leading (dim-1) block."""
        c = self.x_op @ self.p_op - self.p_op @ self.x_op - 1j * np.eye(self.dim)
        m = self.dim - 1
        return float(np.linalg.norm(c[:m, :m], 2)) if m else 0.0


def build_fock_rep(dim: int, margin: int | None = None, work_dim: int | None = None) -> FockRep:
    if isinstance(dim, bool) or int(dim) != dim or not 2 <= int(dim) <= MAX_DIM:
        raise InvalidParameter(f"Fock dimension must be an integer in [2, {MAX_DIM}], got {dim!r}")
    dim = int(dim)
    margin = math.ceil(dim / 2) if margin is None else int(margin)
    if not 0 <= margin < dim:
        raise InvalidParameter(f"truncation margin must be in [0, {dim - 1}], got {margin}")
    work_dim = 2 * dim + 64 if work_dim is None else int(work_dim)
    if work_dim < dim:
        raise InvalidParameter(f"work_dim {work_dim} is smaller than dim {dim}")
    a = _ladder(dim)
    x, p = _quadratures(dim)
    for m in (a, x, p):
        m.setflags(write=False)
    ad = a.conj().T.copy()
    ad.setflags(write=False)
    return FockRep(dim, a, ad, x, p, margin, work_dim)


@dataclass(frozen=True, eq=False)
class FockOperator:
    rep: FockRep
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.rep.dim, self.rep.dim):
            raise InvalidParameter(f"operator shape {vals.shape} does not match dim {self.rep.dim}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.rep, self.values @ other.values, f"{self.label}{other.label}")


def _block_norm(rep: FockRep, m: np.ndarray) -> float:
    b = rep.block
    return float(np.linalg.norm(m[:b, :b], 2))


def _check_range(rep: FockRep, *args: float) -> None:
    r = rep.calibrated_range
    for v in args:
        if not math.isfinite(v):
            raise InvalidParameter(f"operator argument must be finite, got {v!r}")
        if abs(v) > r + 1e-12:
            raise TruncationRange(
                f"argument {v} exceeds the calibrated range |t| <= {r} for dim {rep.dim}"
            )


def _identity(rep: FockRep, label: str) -> FockOperator:
    return FockOperator(rep, np.eye(rep.dim, dtype=complex), label)


def weyl_U(rep: FockRep, alpha: float) -> FockOperator:
    """U(alpha) = exp(i alpha p)."""
    _check_range(rep, alpha)
    if alpha == 0:
        return _identity(rep, "U(0)")
    return FockOperator(rep, rep._p.expi(alpha), f"U({alpha:g})")


def weyl_V(rep: FockRep, beta: float) -> FockOperator:
    """V(beta) = exp(i beta x)."""
    _check_range(rep, beta)
    if beta == 0:
        return _identity(rep, "V(0)")
    return FockOperator(rep, rep._x.expi(beta), f"V({beta:g})")


def check_weyl_relation(rep: FockRep, alpha: float, beta: float) -> float:
    """``||U V - exp(i alpha beta) V U||_2`` on the leading block.

    No range check is applied, so tiny dimensions report their (large)
    truncation residual instead of raising.
    """
    U = rep._p.expi(alpha)
    V = rep._x.expi(beta)
    return _block_norm(rep, U @ V - np.exp(1j * alpha * beta) * (V @ U))


def weyl_S(rep: FockRep, alpha: float, beta: float) -> FockOperator:
    """S(alpha, beta) = exp(-i alpha beta/2) U(alpha) V(beta)."""
    if alpha == 0 and beta == 0:
        return _identity(rep, "S(0,0)")
    U = weyl_U(rep, alpha).values
    V = weyl_V(rep, beta).values
    return FockOperator(rep, np.exp(-0.5j * alpha * beta) * (U @ V), f"S({alpha:g},{beta:g})")


def weyl_S_symmetric_defect(rep: FockRep, alpha: float, beta: float) -> float:
    """Block-restricted gap between the two defining forms of S(alpha, beta)."""
    U = rep._p.expi(alpha)
    V = rep._x.expi(beta)
    return _block_norm(rep, np.exp(-0.5j * alpha * beta) * (U @ V) - np.exp(0.5j * alpha * beta) * (V @ U))


def group_law_defect(rep: FockRep, generator: str, t1: float, t2: float) -> float:
    """``||G(t1) G(t2) - G(t1 + t2)||_2`` on the leading block, G = U or V."""
    if generator not in ("U", "V"):
        raise InvalidParameter(f"generator must be 'U' or 'V', got {generator!r}")
    sp = rep._p if generator == "U" else rep._x
    return _block_norm(rep, sp.expi(t1) @ sp.expi(t2) - sp.expi(t1 + t2))


def vacuum_projector(rep: FockRep) -> FockOperator:
    om = np.zeros((rep.dim, rep.dim), dtype=complex)
    om[0, 0] = 1.0
    return FockOperator(rep, om, "Omega")


def build_N(rep: FockRep, alpha: float, beta: float) -> FockOperator:
    """N(alpha, beta) = V(beta) |0><0| U(alpha), formed as an outer product."""
    if alpha == 0 and beta == 0:
        return FockOperator(rep, vacuum_projector(rep).values, "N(0,0)")
    ket = weyl_V(rep, beta).values[:, 0]
    bra = weyl_U(rep, alpha).values[0, :]
    return FockOperator(rep, np.outer(ket, bra), f"N({alpha:g},{beta:g})")


@dataclass(frozen=True)
class NIdempotentReport:
    scalar_measured: complex
    scalar_gamma_form: complex
    scalar_standard: complex
    residual: float


def check_N_idempotent(rep: FockRep, alpha: float, beta: float) -> NIdempotentReport:
    """Measure c in N^2 = c N and compare with two closed forms.

    ``scalar_measured`` is <0|U(alpha) V(beta)|0>.  ``scalar_gamma_form`` is
    exp(i alpha beta/2) exp(-|gamma|^2/2) with gamma = (alpha + i beta)/2, and
    ``scalar_standard`` is exp(i alpha beta/2) exp(-(alpha^2 + beta^2)/4), the
    value for [x, p] = i and the ground state of a.  The residual is
    ``||N^2 - c N||_2``.
    """
    N = build_N(rep, alpha, beta).values
    if alpha == 0 and beta == 0:
        c = 1.0 + 0j
    else:
        c = complex(weyl_U(rep, alpha).values[0, :] @ weyl_V(rep, beta).values[:, 0])
    gamma2 = (alpha * alpha + beta * beta) / 4.0
    phase = np.exp(0.5j * alpha * beta)
    return NIdempotentReport(
        scalar_measured=c,
        scalar_gamma_form=complex(phase * math.exp(-gamma2 / 2.0)),
        scalar_standard=complex(phase * math.exp(-gamma2)),
        residual=float(np.linalg.norm(N @ N - c * N, 2)),
    )


# ------------------------------------------------------------------ quadrature


@dataclass(frozen=True)
class QuadratureBox:
    """Trapezoid nodes on [-alpha_range, alpha_range] x [-beta_range, beta_range]."""

    alpha_range: float
    beta_range: float
    n_alpha: int
    n_beta: int

    def __post_init__(self):
        for name in ("alpha_range", "beta_range"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidParameter(f"{name} must be positive, got {v!r}")
        for name in ("n_alpha", "n_beta"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < MIN_NODES:
                raise InvalidParameter(f"{name} must be an integer >= {MIN_NODES}, got {v!r}")

    @classmethod
    def from_spacing(cls, half_width: float, spacing: float) -> "QuadratureBox":
        if not (math.isfinite(spacing) and spacing > 0):
            raise InvalidParameter(f"node spacing must be positive, got {spacing!r}")
        n = int(round(2 * half_width / spacing)) + 1
        return cls(half_width, half_width, n, n)

    @property
    def alpha_nodes(self) -> np.ndarray:
        return np.linspace(-self.alpha_range, self.alpha_range, self.n_alpha)

    @property
    def beta_nodes(self) -> np.ndarray:
        return np.linspace(-self.beta_range, self.beta_range, self.n_beta)

    @property
    def alpha_spacing(self) -> float:
        return 2 * self.alpha_range / (self.n_alpha - 1)

    @property
    def beta_spacing(self) -> float:
        return 2 * self.beta_range / (self.n_beta - 1)

    def weights(self) -> tuple[np.ndarray, np.ndarray]:
        wa = np.full(self.n_alpha, self.alpha_spacing)
        wb = np.full(self.n_beta, self.beta_spacing)
        wa[[0, -1]] *= 0.5
        wb[[0, -1]] *= 0.5
        return wa, wb

    def refined(self) -> "QuadratureBox":
        """One refinement step: half-widths grow by 1 and node spacings halve.

        Both limits of the quadrature error (box truncation and node
        spacing) shrink together, so residuals decrease at every step.
        """
        ra, rb = self.alpha_range + 1, self.beta_range + 1
        na = int(round(2 * ra / (self.alpha_spacing / 2))) + 1
        nb = int(round(2 * rb / (self.beta_spacing / 2))) + 1
        return QuadratureBox(ra, rb, na, nb)


REFERENCE_BOX = QuadratureBox.from_spacing(8.0, 0.1)


def _gaussian_weight(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return np.exp(-0.25 * alpha[:, None] ** 2 - 0.25 * beta[None, :] ** 2)


def _coefficient_samples(box: QuadratureBox, coeff) -> np.ndarray:
    al, be = box.alpha_nodes, box.beta_nodes
    if callable(coeff):
        c = np.asarray(coeff(al[:, None], be[None, :]), dtype=complex)
        c = np.broadcast_to(c, (al.size, be.size))
    else:
        c = np.asarray(coeff, dtype=complex)
    if c.shape != (al.size, be.size):
        raise InvalidParameter(f"coefficient shape {c.shape} does not match box nodes {(al.size, be.size)}")
    if not np.all(np.isfinite(c)):
        raise InvalidParameter("coefficient samples must be finite")
    return c


def _quantize(rep: FockRep, box: QuadratureBox, c: np.ndarray) -> np.ndarray:
    # sum_b a(alpha, b) exp(-i alpha b/2) V(b) = W_x diag(g_alpha) W_x^dag, so each
    # alpha node costs two matrix products in the working space
    al, be = box.alpha_nodes, box.beta_nodes
    wa, wb = box.weights()
    sx, sp = rep._work
    E = np.exp(1j * np.outer(be, sx.vals))
    acc = np.zeros((rep.work_dim, rep.work_dim), dtype=complex)
    for m in range(al.size):
        row = c[m] * wb
        if not np.any(row):
            continue
        g = (row * np.exp(-0.5j * al[m] * be)) @ E
        acc += wa[m] * (sp.expi(al[m]) @ sx.apply_diag(g))
    return acc[: rep.dim, : rep.dim]


def weyl_quantize(rep: FockRep, box: QuadratureBox, coeff, edge_tol: float = COEFF_EDGE_TOL) -> FockOperator:
    """int int a(alpha, beta) S(alpha, beta) dalpha dbeta on the first ``dim`` levels.

    ``coeff`` is either an array of shape (n_alpha, n_beta) sampled on the
    box nodes or a callable evaluated on the node mesh.  Samples on the box
    boundary must be below ``edge_tol`` times the peak magnitude.
    """
    c = _coefficient_samples(box, coeff)
    scale = float(np.max(np.abs(c), initial=0.0))
    edge = max(
        float(np.max(np.abs(c[[0, -1], :]), initial=0.0)),
        float(np.max(np.abs(c[:, [0, -1]]), initial=0.0)),
    )
    if scale > 0 and edge > edge_tol * scale:
        raise InvalidParameter(
            f"coefficient does not decay at the box edge (|a| = {edge:.2e} relative to peak {scale:.2e})"
        )
    return FockOperator(rep, _quantize(rep, box, c), "quantized")


def build_vonneumann_A(rep: FockRep, box: QuadratureBox = REFERENCE_BOX) -> FockOperator:
    """von Neumann's Gaussian-weighted operator A on the given quadrature box."""
    if min(box.alpha_range, box.beta_range) < MIN_BOX_HALF_WIDTH:
        raise InvalidParameter(
            f"box half-width must be >= {MIN_BOX_HALF_WIDTH} (Gaussian weight at the edge too large)"
        )
    if max(box.alpha_spacing, box.beta_spacing) > MAX_NODE_SPACING + 1e-12:
        raise InvalidParameter(f"node spacing must be <= {MAX_NODE_SPACING}")
    A = _quantize(rep, box, _gaussian_weight(box.alpha_nodes, box.beta_nodes).astype(complex))
    return FockOperator(rep, A, "A")


def _rel(m: np.ndarray, ref: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2) / np.linalg.norm(ref, 2))


def check_A_idempotent(A: FockOperator) -> float:
    """``||A^2 - 2 pi A|| / ||A||`` in the spectral norm."""
    a = A.values
    return _rel(a @ a - 2 * np.pi * a, a)


def _work_S(rep: FockRep, alpha: float, beta: float) -> np.ndarray:
    sx, sp = rep._work
    S = np.exp(-0.5j * alpha * beta) * (sp.expi(alpha) @ sx.expi(beta))
    return S[: rep.dim, : rep.dim]


def check_primitivity(rep: FockRep, A: FockOperator, alpha: float, beta: float) -> float:
    """``||A S A - 2 pi exp(-(alpha^2 + beta^2)/4) A|| / ||A||``.

    S is built in the padded working space and then restricted, matching the
    construction of A.
    """
    _check_range(rep, alpha, beta)
    a = A.values
    S = _work_S(rep, alpha, beta)
    target = 2 * np.pi * math.exp(-0.25 * (alpha * alpha + beta * beta)) * a
    return _rel(a @ S @ a - target, a)


def singular_ratio(A: FockOperator) -> float:
    """Second singular value over the first (rank-1 dominance)."""
    s = np.linalg.svd(A.values, compute_uv=False)
    return float(s[1] / s[0]) if s.size > 1 else 0.0


# ------------------------------------------------------------------ position side


def n_coefficient(alpha: float, beta: float, a: float = 1.0, b: float = 1.0) -> float:
    """n(alpha, beta) = a b exp(-beta^2/(4 a^2) - alpha^2/(4 b^2))."""
    if not (a > 0 and b > 0):
        raise InvalidParameter(f"a and b must be positive, got a={a!r}, b={b!r}")
    return a * b * math.exp(-beta * beta / (4 * a * a) - alpha * alpha / (4 * b * b))


def N_matrix_element_xp(
    grid: GridSpec1D, alpha: float, beta: float, a: float = 1.0, b: float = 1.0
) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Unnormalized <x|N(alpha, beta)|p> as a function of (x, p).

    The value is exp(-a^2 x^2/2) exp(-b^2 p^2/2) exp(i (alpha p + beta x)).
    ``grid`` is the sampling grid used by :func:`N_xp_integral`; it is
    checked to resolve both Gaussian factors.
    """
    if not (a > 0 and b > 0):
        raise InvalidParameter(f"a and b must be positive, got a={a!r}, b={b!r}")
    edge = min(abs(grid.x_min), abs(grid.x_max))
    if math.exp(-0.5 * min(a, b) ** 2 * edge * edge) > 1e-12:
        raise InvalidParameter("grid is too small to contain the Gaussian factors")

    def element(x, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        return np.exp(-0.5 * a * a * x * x - 0.5 * b * b * p * p + 1j * (alpha * p + beta * x))

    return element


def N_xp_integral(grid: GridSpec1D, alpha: float, beta: float, a: float = 1.0, b: float = 1.0) -> complex:
    """int int <x|N|p> dx dp by the grid rule, using the grid for both x and p."""
    f = N_matrix_element_xp(grid, alpha, beta, a, b)
    x = grid.points
    return complex(np.sum(f(x[:, None], x[None, :])) * grid.dx * grid.dx)


def N_xp_integral_exact(alpha: float, beta: float, a: float = 1.0, b: float = 1.0) -> float:
    """Closed form (2 pi/(a b)) exp(-beta^2/(2 a^2) - alpha^2/(2 b^2))."""
    return 2 * np.pi / (a * b) * math.exp(-beta * beta / (2 * a * a) - alpha * alpha / (2 * b * b))


def _shift_steps(grid: GridSpec1D, alpha: float) -> int:
    return lattice_steps(alpha, grid.dx)


def _shifted(values: np.ndarray, s: int) -> np.ndarray:
    """out[j] = values[j - s], zero where j - s leaves the box."""
    n = values.shape[0]
    out = np.zeros_like(values)
    if abs(s) >= n:
        return out
    if s >= 0:
        out[s:] = values[: n - s]
    else:
        out[: n + s] = values[-s:]
    return out


def density_from_idempotent(
    states: Sequence[Wavefunction], C, alpha: float, beta: float, tol: float = 1e-10
) -> DensityMatrix:
    """Two-point function sum_{n n'} C[n, n'] e^{i beta x'} psi_n(x') psi*_n'(x - alpha).

    Rows index x' and columns index x.  ``alpha`` must be a whole number of
    grid steps.  For alpha = beta = 0 this is the mixture sum C psi psi^*;
    otherwise the result is not Hermitian.
    """
    if not states:
        raise InvalidParameter("at least one state is required")
    grid = states[0].grid
    for s in states[1:]:
        if not s.grid.same_as(grid):
            raise InvalidParameter("all states must share one grid")
    C = np.atleast_2d(np.asarray(C, dtype=complex))
    k = len(states)
    if C.shape != (k, k):
        raise InvalidParameter(f"coefficient matrix must be {k}x{k}, got {C.shape}")
    if np.max(np.abs(C - C.conj().T)) > tol:
        raise InvalidParameter("coefficient matrix is not Hermitian")
    if abs(np.trace(C) - 1) > tol:
        raise InvalidParameter(f"coefficient matrix trace {np.trace(C).real:.12g} is not 1")
    if np.linalg.eigvalsh(0.5 * (C + C.conj().T))[0] < -tol:
        raise InvalidParameter("coefficient matrix is not positive semidefinite")
    Psi = np.array([s.values for s in states])
    gram = Psi.conj() @ Psi.T * grid.dx
    if np.max(np.abs(gram - np.eye(k))) > 1e-8:
        raise InvalidParameter("states are not orthonormal on the grid")
    shift = _shift_steps(grid, alpha)
    ket = Psi * np.exp(1j * beta * grid.points)[None, :]
    bra = np.array([_shifted(p, shift) for p in Psi]).conj()
    return DensityMatrix(grid, ket.T @ C @ bra)


def trace_N_position(psi: Wavefunction, alpha: float, beta: float) -> complex:
    """int psi*(x - alpha) e^{i beta x} psi(x) dx on the grid."""
    _require_compact(psi)
    g = psi.grid
    shifted = _shifted(psi.values, _shift_steps(g, alpha))
    return complex(np.sum(np.conj(shifted) * np.exp(1j * beta * g.points) * psi.values) * g.dx)


@dataclass(frozen=True)
class BridgeResult:
    lhs: complex
    rhs: complex
    abs_diff: float


def bridge_check(psi: Wavefunction, alpha: float, beta: float) -> BridgeResult:
    """Position-space trace of N against exp(i alpha beta/2) M(alpha, beta)."""
    lhs = trace_N_position(psi, alpha, beta)
    rhs = np.exp(0.5j * alpha * beta) * characteristic_value(psi, alpha, beta)
    return BridgeResult(lhs, complex(rhs), float(abs(lhs - rhs)))


# ------------------------------------------------------------------ mean operators
#
# The quadratures are sampled on the Gauss-Hermite grid: the nodes are the
# eigenvalues of the truncated x, x is diagonal there, and p is the truncated
# ladder momentum carried into the node basis (the Hermite-spectral
# derivative).  In any finite dimension tr [x, p] = 0, so [x, p] = i must fail
# somewhere; on this grid the whole defect sits on the top Hermite level, and
# test states built from lower levels see the exact relation.  A uniform
# periodic grid with the Fourier derivative instead spreads the defect over the
# wrap-around boundary and stalls near 1e-9 at 32 points.

MAX_COMMUTATOR_NODES = 32
TEST_LEVELS = 4


@dataclass(frozen=True)
class HermiteGrid:
    """Gauss-Hermite nodes with the matching position and momentum matrices."""

    nodes: np.ndarray
    x: np.ndarray
    p: np.ndarray
    to_nodes: np.ndarray  # columns map Fock level m to its node-basis vector

    @classmethod
    def build(cls, n_nodes: int = MAX_COMMUTATOR_NODES) -> "HermiteGrid":
        if isinstance(n_nodes, bool) or int(n_nodes) != n_nodes or not 2 <= n_nodes <= MAX_COMMUTATOR_NODES:
            raise InvalidParameter(f"commutator grid must have 2..{MAX_COMMUTATOR_NODES} nodes, got {n_nodes!r}")
        xf, pf = _quadratures(int(n_nodes))
        nodes, W = np.linalg.eigh(xf)
        return cls(nodes, np.diag(nodes).astype(complex), W.conj().T @ pf @ W, W.conj().T)


def _test_densities(grid: HermiteGrid, levels: int) -> list[np.ndarray]:
    """Pure Hermite-level states and their pairwise real and imaginary superpositions."""
    if not 1 <= levels <= grid.nodes.size - 1:
        raise InvalidParameter(f"test levels must be in [1, {grid.nodes.size - 1}], got {levels}")
    h = [grid.to_nodes[:, m] for m in range(levels)]
    vecs = list(h)
    for m in range(levels):
        for q in range(m + 1, levels):
            vecs.append((h[m] + h[q]) / math.sqrt(2))
            vecs.append((h[m] + 1j * h[q]) / math.sqrt(2))
    return [np.outer(v, v.conj()) for v in vecs]


def mean_quadrature_commutator(n_nodes: int = MAX_COMMUTATOR_NODES, levels: int = TEST_LEVELS) -> float:
    """max over test states of ||(X P - P X) rho|| / ||rho|| for the mean superoperators.

    X rho = (x rho + rho x)/2 and P rho = (p rho + rho p)/2.  The left
    actions satisfy [x, p] = i and the right actions the opposite sign, so
    the two contributions cancel.
    """
    g = HermiteGrid.build(n_nodes)
    x, p = g.x, g.p

    def X(r):
        return 0.5 * (x @ r + r @ x)

    def P(r):
        return 0.5 * (p @ r + r @ p)

    return max(
        float(np.linalg.norm(X(P(r)) - P(X(r))) / np.linalg.norm(r)) for r in _test_densities(g, levels)
    )


def single_sided_commutators(n_nodes: int = MAX_COMMUTATOR_NODES, levels: int = TEST_LEVELS) -> tuple[float, float]:
    """Residuals of the left action ([x, p] rho = i rho) and the right action (-i rho)."""
    g = HermiteGrid.build(n_nodes)
    x, p = g.x, g.p
    left = right = 0.0
    for r in _test_densities(g, levels):
        nr = np.linalg.norm(r)
        left = max(left, float(np.linalg.norm(x @ p @ r - p @ x @ r - 1j * r) / nr))
        # right action: R_x R_p rho - R_p R_x rho = rho p x - rho x p
        right = max(right, float(np.linalg.norm(r @ p @ x - r @ x @ p + 1j * r) / nr))
    return left, right
