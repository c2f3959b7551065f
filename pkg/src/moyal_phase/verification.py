"""Verification suites behind ``moyal-phase verify``.

Each suite returns a list of :class:`Check` records.  A check passes when its
residual is strictly below its tolerance; tolerances come from the shipped
``defaults.json`` unless overridden.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from typing import Optional

import numpy as np

from . import __version__
from .core import GridSpec1D, make_fock
from .weyl import (
    QuadratureBox,
    bridge_check,
    build_fock_rep,
    build_vonneumann_A,
    check_A_idempotent,
    check_N_idempotent,
    check_primitivity,
    check_weyl_relation,
    group_law_defect,
    mean_quadrature_commutator,
    single_sided_commutators,
    singular_ratio,
    vacuum_projector,
    weyl_S_symmetric_defect,
)

SUITES = ("weyl", "idempotent", "bridge", "all")

EQUATIONS = {
    "canonical_commutator": "[x, p] = i",
    "weyl_relation": "U(a) V(b) = exp(i a b) V(b) U(a)",
    "group_law_U": "U(a1) U(a2) = U(a1 + a2)",
    "group_law_V": "V(b1) V(b2) = V(b1 + b2)",
    "S_forms": "S(a, b) = exp(-i a b/2) U(a) V(b) = exp(i a b/2) V(b) U(a)",
    "N_idempotent": "N(a, b)^2 = <0|U(a) V(b)|0> N(a, b),  N = V(b) |0><0| U(a)",
    "A_idempotent": "A^2 = 2 pi A",
    "A_primitivity": "A S(a, b) A = 2 pi exp(-(a^2 + b^2)/4) A",
    "A_vacuum": "A = 2 pi |0><0|",
    "A_trace": "tr A = 2 pi",
    "A_rank_one": "A = 2 pi |0><0| (rank one)",
    "A_refinement": "A^2 = 2 pi A (residual shrinks under quadrature refinement)",
    "bridge": "int <x|N(a, b)|x> dx = exp(i a b/2) M(a, b)",
    "mean_commutator": "[X, P] = 0 for X = (x. + .x)/2, P = (p. + .p)/2",
    "single_sided_left": "[x, p] rho = i rho (left action)",
    "single_sided_right": "rho [p, x] = -i rho (right action)",
}


def load_defaults() -> dict:
    text = resources.files(__package__).joinpath("defaults.json").read_text(encoding="utf-8")
    return json.loads(text)


@dataclass
class Check:
    name: str
    equation: str
    residual: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.residual) and self.residual < self.tolerance)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "equation": self.equation,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def _c(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _label(v: float) -> str:
    return format(float(v), "g")


def weyl_suite(dim: int, tol: dict) -> list[Check]:
    rep = build_fock_rep(dim)
    checks = [
        Check("canonical_commutator", EQUATIONS["canonical_commutator"], rep.commutator_defect(),
              tol["canonical_commutator"], {"block": rep.dim - 1}),
    ]
    args = (-1.0, -0.5, 0.5, 1.0)
    for a in args:
        for b in args:
            checks.append(Check(f"weyl_relation(a={_label(a)},b={_label(b)})", EQUATIONS["weyl_relation"],
                                check_weyl_relation(rep, a, b), tol["weyl_relation"], {"block": rep.block}))
    for g in ("U", "V"):
        for t1, t2 in ((0.5, 0.5), (-1.0, 0.3), (1.0, 1.0)):
            checks.append(Check(f"group_law_{g}({_label(t1)},{_label(t2)})", EQUATIONS[f"group_law_{g}"],
                                group_law_defect(rep, g, t1, t2), tol["group_law"]))
    for a, b in ((0.7, 0.7), (-0.5, 1.0)):
        checks.append(Check(f"S_forms(a={_label(a)},b={_label(b)})", EQUATIONS["S_forms"],
                            weyl_S_symmetric_defect(rep, a, b), tol["S_forms"]))
    return checks


def idempotent_suite(dim: int, box: float, step: float, tol: dict) -> list[Check]:
    rep = build_fock_rep(dim)
    checks = []
    for a, b in ((0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (-0.8, 0.6)):
        r = check_N_idempotent(rep, a, b)
        checks.append(Check(
            f"N_idempotent(a={_label(a)},b={_label(b)})", EQUATIONS["N_idempotent"], r.residual, tol["N_idempotent"],
            {"c_measured": _c(r.scalar_measured), "c_gamma_form": _c(r.scalar_gamma_form),
             "c_standard": _c(r.scalar_standard)},
        ))
    qbox = QuadratureBox.from_spacing(box, step)
    A = build_vonneumann_A(rep, qbox)
    idem = check_A_idempotent(A)
    prim = check_primitivity(rep, A, 1.0, 1.0)
    checks.append(Check("A_idempotent", EQUATIONS["A_idempotent"], idem, tol["A_idempotent"]))
    checks.append(Check("A_primitivity(a=1,b=1)", EQUATIONS["A_primitivity"], prim, tol["A_primitivity"]))
    checks.append(Check("A_primitivity(a=0.5,b=-0.5)", EQUATIONS["A_primitivity"],
                        check_primitivity(rep, A, 0.5, -0.5), tol["A_primitivity"]))
    vac = float(np.max(np.abs(A.values / (2 * np.pi) - vacuum_projector(rep).values)))
    checks.append(Check("A_vacuum", EQUATIONS["A_vacuum"], vac, tol["A_vacuum"]))
    tr = abs(complex(np.trace(A.values)) / (2 * np.pi) - 1)
    checks.append(Check("A_trace", EQUATIONS["A_trace"], tr, tol["A_trace"]))
    checks.append(Check("A_rank_one", EQUATIONS["A_rank_one"], singular_ratio(A), tol["A_rank_one"]))
    fine = qbox.refined()
    A2 = build_vonneumann_A(rep, fine)
    ref = {"reference_box": [qbox.alpha_range, qbox.alpha_spacing], "refined_box": [fine.alpha_range, fine.alpha_spacing]}
    idem2 = check_A_idempotent(A2)
    prim2 = check_primitivity(rep, A2, 1.0, 1.0)
    checks.append(Check("A_refinement_idempotent", EQUATIONS["A_refinement"], idem2 / idem, tol["A_refinement"],
                        dict(ref, reference=idem, refined=idem2)))
    checks.append(Check("A_refinement_primitivity", EQUATIONS["A_refinement"], prim2 / prim, tol["A_refinement"],
                        dict(ref, reference=prim, refined=prim2)))
    return checks


def bridge_suite(grid: GridSpec1D, levels: int, points: int, half_width: float, tol: dict) -> list[Check]:
    lattice = np.linspace(-half_width, half_width, points)
    checks = []
    for n in range(levels):
        psi = make_fock(grid, n)
        for a in lattice:
            for b in lattice:
                r = bridge_check(psi, float(a), float(b))
                checks.append(Check(f"bridge(n={n},a={_label(a)},b={_label(b)})", EQUATIONS["bridge"],
                                    r.abs_diff, tol["bridge"], {"lhs": _c(r.lhs), "rhs": _c(r.rhs)}))
    return checks


def commutator_suite(tol: dict) -> list[Check]:
    left, right = single_sided_commutators()
    return [
        Check("mean_commutator", EQUATIONS["mean_commutator"], mean_quadrature_commutator(), tol["mean_commutator"]),
        Check("single_sided_left", EQUATIONS["single_sided_left"], left, tol["single_sided_commutator"]),
        Check("single_sided_right", EQUATIONS["single_sided_right"], right, tol["single_sided_commutator"]),
    ]


def timestamp() -> str:
    """UTC time from SOURCE_DATE_EPOCH (default 0) so reports are reproducible."""
    raw = os.environ.get("SOURCE_DATE_EPOCH", "0")
    try:
        epoch = int(raw)
    except ValueError:
        epoch = 0
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def run_suite(
    suite: str,
    dim: Optional[int] = None,
    box: Optional[float] = None,
    step: Optional[float] = None,
    grid: Optional[GridSpec1D] = None,
    tolerances: Optional[dict] = None,
) -> dict:
    """Run ``suite`` and return the JSON-ready report."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    defaults = load_defaults()
    tol = dict(defaults["tolerances"])
    unknown = set(tolerances or {}) - set(tol)
    if unknown:
        raise ValueError(f"unknown tolerance name(s): {', '.join(sorted(unknown))}")
    tol.update(tolerances or {})
    b = defaults["bridge"]
    weyl_dim = dim if dim is not None else defaults["weyl"]["dim"]
    idem_dim = dim if dim is not None else defaults["idempotent"]["dim"]
    box = box if box is not None else defaults["idempotent"]["box"]
    step = step if step is not None else defaults["idempotent"]["step"]
    grid = grid if grid is not None else GridSpec1D.parse(b["grid"])

    checks: list[Check] = []
    config: dict = {"suite": suite}
    if suite in ("weyl", "all"):
        checks += weyl_suite(weyl_dim, tol)
        config["weyl_dim"] = weyl_dim
    if suite in ("idempotent", "all"):
        checks += idempotent_suite(idem_dim, box, step, tol)
        config.update(idempotent_dim=idem_dim, box=box, step=step)
    if suite in ("bridge", "all"):
        checks += bridge_suite(grid, b["fock_levels"], b["lattice_points"], b["lattice_half_width"], tol)
        config["bridge_grid"] = str(grid)
    if suite == "all":
        checks += commutator_suite(tol)
    config["tolerances"] = tol
    return {
        "version": __version__,
        "timestamp": timestamp(),
        "config": config,
        "checks": [c.to_dict() for c in checks],
    }
