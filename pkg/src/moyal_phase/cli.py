"""Command-line front end: ``moyal-phase {state,transform,evolve,verify}``.

Exit codes: 0 success, 2 parameter validation, 3 input parse, 4 numerical
instability, 5 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, io
from .core import DEFAULT_GRID, GridSpec1D, PotentialSpec, make_cat, make_fock, make_gaussian
from .dynamics import METHODS, EvolutionConfig, compare_evolutions, evolve_density, evolve_moyal, schrodinger_oracle
from .errors import MoyalPhaseError, UnstableStep
from .transforms import (
    DensityMatrix,
    characteristic_from_wavefunction,
    characteristic_from_wigner,
    density_from_wavefunction,
    momentum_marginal,
    position_marginal,
    wigner_from_density,
    wigner_from_wavefunction,
)
from .verification import SUITES, run_suite

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PARSE = 3
EXIT_UNSTABLE = 4
EXIT_VERIFY = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _grid(text: str) -> GridSpec1D:
    try:
        return GridSpec1D.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    try:
        if not sep:
            raise ValueError
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance override must be NAME=VALUE, got {text!r}") from None


# ------------------------------------------------------------------ commands


def cmd_state(args: argparse.Namespace) -> int:
    if args.kind == "gaussian":
        psi = make_gaussian(args.grid, args.x0, args.p0, args.a)
    elif args.kind == "fock":
        psi = make_fock(args.grid, args.n)
    else:
        psi = make_cat(args.grid, args.sep, args.a)
    io.write_wavefunction(args.out, psi)
    return EXIT_OK


def _load_state(path: str):
    kind = io.sniff_kind(path)
    if kind == "wavefunction":
        return io.read_wavefunction(path)
    if kind == "density":
        return io.read_density(path)
    raise io.InputFormatError(f"{path}: line 1: expected a wavefunction or density file, found {kind}")


def cmd_transform(args: argparse.Namespace) -> int:
    state = _load_state(args.input)
    is_rho = isinstance(state, DensityMatrix)
    which = args.which
    if which == "density":
        io.write_density(args.out, state if is_rho else density_from_wavefunction(state))
        return EXIT_OK
    F = wigner_from_density(state) if is_rho else wigner_from_wavefunction(state)
    if which == "wigner":
        io.write_wigner(args.out, F)
    elif which == "characteristic":
        M = characteristic_from_wigner(F) if is_rho else characteristic_from_wavefunction(state)
        io.write_characteristic(args.out, M)
    else:
        io.write_marginals(args.out, F, position_marginal(F), momentum_marginal(F))
    return EXIT_OK


def cmd_evolve(args: argparse.Namespace) -> int:
    state = _load_state(args.input)
    V = PotentialSpec.parse(args.potential, state.grid)
    cfg = EvolutionConfig(dt=args.dt, n_steps=args.steps, mass=args.mass, method=args.method)
    is_rho = isinstance(state, DensityMatrix)
    if is_rho and (args.method == "schrodinger_oracle" or args.compare):
        raise CliError(EXIT_VALIDATION, "the Schroedinger oracle and --compare need a wavefunction input")
    try:
        report = compare_evolutions(state, V, cfg) if args.compare else None
        if args.method == "moyal":
            if report is not None:
                F = report.wigner["moyal"]
            else:
                F0 = wigner_from_density(state) if is_rho else wigner_from_wavefunction(state)
                F = evolve_moyal(F0, V, cfg)
            io.write_wigner(args.out, F)
        elif args.method == "density_liouville":
            rho0 = state if is_rho else density_from_wavefunction(state)
            io.write_density(args.out, evolve_density(rho0, V, cfg))
        else:
            io.write_wavefunction(args.out, schrodinger_oracle(state, V, cfg))
        if report is not None:
            path = args.report or str(Path(args.out).with_suffix(".compare.json"))
            Path(path).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    except UnstableStep as exc:
        raise CliError(EXIT_UNSTABLE, f"unstable evolution at {exc}") from None
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_suite(
        args.suite, dim=args.dim, box=args.box, step=args.step, grid=args.grid,
        tolerances=dict(args.tol or []),
    )
    Path(args.out).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    failed = [c["name"] for c in report["checks"] if not c["pass"]]
    if failed:
        print(f"verify: {len(failed)} of {len(report['checks'])} checks failed (first: {failed[0]})", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moyal-phase",
        description="Phase-space quantum mechanics: Wigner functions, Moyal dynamics and Weyl-algebra checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    st = sub.add_parser("state", help="write a wavefunction CSV")
    st.add_argument("kind", choices=("gaussian", "fock", "cat"))
    st.add_argument("--grid", type=_grid, default=DEFAULT_GRID, help="N:min:max (default %(default)s)")
    st.add_argument("--x0", type=float, default=0.0, help="gaussian centre")
    st.add_argument("--p0", type=float, default=0.0, help="gaussian mean momentum")
    st.add_argument("--a", type=float, default=1.0, help="inverse width for gaussian and cat")
    st.add_argument("--n", type=int, default=0, help="Fock level")
    st.add_argument("--sep", type=float, default=6.0, help="cat separation")
    st.add_argument("--out", required=True)
    st.set_defaults(func=cmd_state)

    tr = sub.add_parser("transform", help="convert a wavefunction or density CSV")
    tr.add_argument("which", choices=("wigner", "characteristic", "density", "marginal"))
    tr.add_argument("--input", required=True)
    tr.add_argument("--out", required=True)
    tr.set_defaults(func=cmd_transform)

    ev = sub.add_parser("evolve", help="time evolution with one engine, optionally comparing all three")
    ev.add_argument("--input", required=True)
    ev.add_argument("--potential", required=True,
                    help="free | linear:s | harmonic:omega | quartic:lambda | double_well:a:b | tabulated:PATH")
    ev.add_argument("--method", choices=METHODS, default="moyal")
    ev.add_argument("--dt", type=float, default=1e-3)
    ev.add_argument("--steps", type=int, default=1000)
    ev.add_argument("--mass", type=float, default=1.0)
    ev.add_argument("--out", required=True)
    ev.add_argument("--compare", action="store_true", help="run all engines and write a discrepancy report")
    ev.add_argument("--report", help="report path for --compare (default: OUT with .compare.json suffix)")
    ev.set_defaults(func=cmd_evolve)

    ve = sub.add_parser("verify", help="run a verification suite and write a JSON report")
    ve.add_argument("suite", choices=SUITES)
    ve.add_argument("--dim", type=int, help="Fock dimension (default from defaults.json)")
    ve.add_argument("--box", type=float, help="quadrature half-width")
    ve.add_argument("--step", type=float, help="quadrature node spacing")
    ve.add_argument("--grid", type=_grid, help="grid for the bridge sweep")
    ve.add_argument("--tol", type=_tolerance, action="append", metavar="NAME=VALUE",
                    help="override a tolerance from defaults.json (repeatable)")
    ve.add_argument("--out", required=True)
    ve.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except io.InputFormatError as exc:
        code, msg = EXIT_PARSE, str(exc)
    except UnstableStep as exc:
        code, msg = EXIT_UNSTABLE, f"unstable evolution at {exc}"
    except (MoyalPhaseError, ValueError) as exc:
        code, msg = EXIT_VALIDATION, str(exc)
    print(f"moyal-phase {args.command}: {msg}".replace("\n", " "), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
