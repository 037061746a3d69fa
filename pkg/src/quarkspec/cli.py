"""Command-line entry point: ``quarkspec {validate,spectrum,compare,expansion-error,fit}``.

Exit codes: 0 success, 1 failed check, 2 no bound states, 64 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .analysis import compare_spectra, emit_report
from .approximation import DEFAULT_DELTA, expansion_error_table, expansion_table_csv
from .closed_form import KratzerCoefficients, coulomb_levels, kratzer_energy, oscillator_levels
from .fitting import BACKENDS, FitConfig, FitInputError, InfeasibleStartError, fit, load_observations
from .model import (
    Coulomb, CornellSpin, DomainError, KratzerEffective, Oscillator, QuarkoniumParams,
    TruncatedOEA, boundedness_check,
)
from .numerov import (
    SolverConfig, SolverError, SpectrumEntry, find_eigenvalue, solve_spectrum, spectrum_to_csv,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_NO_BOUND_STATES, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- oracle suite -------------------------------------------------------------

KRATZER_A = (0.0, 2.0, 6.922)
KRATZER_B = (2.0, 4.0, 14.074)


def oracle_cases():
    """(label, spec, l, n_r, exact energy) for the closed-form validation suite."""
    ctx = QuarkoniumParams.for_reduced_mass(1.0)
    cases = []
    for N in range(1, 5):
        for l in range(N):
            n_r = N - l - 1
            cases.append((f"coulomb n_r={n_r} l={l}", Coulomb(1.0), l, n_r,
                          coulomb_levels(1.0, 1.0, 1.0, n_r, l)))
    for l in range(6):
        for n_r in range((5 - l) // 2 + 1):
            cases.append((f"oscillator n_r={n_r} l={l}", Oscillator(1.0), l, n_r,
                          oscillator_levels(1.0, 1.0, n_r, l)))
    for A in KRATZER_A:
        for B in KRATZER_B:
            for n_r in range(4):
                exact = kratzer_energy(KratzerCoefficients(A, B), ctx.mu, ctx.hbar, n_r)
                cases.append((f"kratzer A={A:g} B={B:g} n_r={n_r}", KratzerEffective(A, B), 0, n_r, exact))
    return ctx, cases


def run_validation(tolerance: float = 1e-6, inject_fault: bool = False, config: SolverConfig | None = None):
    ctx, cases = oracle_cases()
    results = []
    for i, (label, spec, l, n_r, exact) in enumerate(cases):
        if inject_fault and i == 0:
            exact *= 1.0 + 1e-3
        try:
            E = find_eigenvalue(spec, ctx, l, n_r, config).energy
            rel = abs(E - exact) / abs(exact)
        except SolverError as exc:
            E, rel = math.nan, math.inf
            label = f"{label} ({exc})"
        results.append((label, exact, E, rel, rel <= tolerance))
    return results


def cmd_validate(args) -> int:
    results = run_validation(args.tolerance, args.inject_fault)
    width = max(len(r[0]) for r in results)
    print(f"kernel backend: {_kernels.BACKEND}")
    print(f"{'case':<{width}}  {'exact':>18}  {'numerov':>18}  {'rel.err':>9}  status")
    for label, exact, E, rel, ok in results:
        print(f"{label:<{width}}  {exact:>18.12g}  {E:>18.12g}  {rel:>9.2e}  {'PASS' if ok else 'FAIL'}")
    failed = [r[0] for r in results if not r[4]]
    print(f"{len(results) - len(failed)}/{len(results)} oracle comparisons within {args.tolerance:g}")
    if failed:
        print("failing: " + ", ".join(failed), file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


# -- file helpers ----------------------------------------------------------------


def _read_params(path: str) -> QuarkoniumParams:
    try:
        return QuarkoniumParams.from_json(Path(path).read_text())
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"cannot read params file {path}: {exc}") from exc


def _write(out: str | None, text: str):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _solver_config(args) -> SolverConfig:
    try:
        return SolverConfig(grid_points=args.grid_points)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


# -- subcommands -------------------------------------------------------------------


def _oea_entries(params, delta, l_max, n_max):
    from .approximation import assemble_kratzer, q_transform
    from .closed_form import oea_gammas, oea_spectrum

    entries = []
    for l in range(l_max + 1):
        try:
            g = oea_gammas(assemble_kratzer(q_transform(params, l), delta), params.c_s, params.mu, params.hbar)
        except SolverError as exc:
            entries += [SpectrumEntry(n, l, params.s, math.nan, -1, False, str(exc)) for n in range(n_max + 1)]
            continue
        entries += [SpectrumEntry(n, l, params.s, oea_spectrum(g, params.mu, params.hbar, n), n, True)
                    for n in range(n_max + 1)]
    return entries


def cmd_spectrum(args) -> int:
    params = _read_params(args.params)
    if args.backend == "oea-closed-form":
        entries = _oea_entries(params, args.delta, args.l_max, args.n_max)
    else:
        spec = CornellSpin(params) if args.backend == "cornell-numerov" else TruncatedOEA(params)
        feas = boundedness_check(spec)
        if not feas.bounded_below:
            print(f"no bound states: {feas.reason}", file=sys.stderr)
            return EXIT_NO_BOUND_STATES
        entries = solve_spectrum(spec, params, args.l_max, args.n_max, _solver_config(args),
                                 workers=args.workers)
    failed = list(getattr(entries, "diagnostics", [])) + [e for e in entries if e.error]
    good = [e for e in entries if not e.error]
    for e in failed:
        print(f"n_r={e.n_r} l={e.l}: {e.error}", file=sys.stderr)
    if not good:
        print("no bound states found in any requested channel", file=sys.stderr)
        return EXIT_NO_BOUND_STATES
    _write(args.out, spectrum_to_csv(entries))
    return EXIT_OK


def cmd_compare(args) -> int:
    params = _read_params(args.params)
    comparison = compare_spectra(params, args.delta, args.l_max, args.n_max, _solver_config(args),
                                 extend=not args.no_extend, workers=args.workers)
    _write(args.out, emit_report(comparison, args.format))
    a = comparison.audit
    print(
        f"oea_below_gamma0={a.oea_below_gamma0} cornell_exceeds_gamma0_at={a.cornell_exceeds_gamma0_at} "
        f"cornell_increasing={a.cornell_increasing} spacing_persistent={a.cornell_spacing_persistent} "
        f"oea_gap_saturates={a.oea_gap_saturates} truncated_unbound={a.truncated_unbound}",
        file=sys.stderr,
    )
    return EXIT_OK if a.claims_hold else EXIT_CHECK_FAILED


def cmd_expansion_error(args) -> int:
    if not (args.delta > 0 and 0 < args.q_min < args.q_max and args.points >= 2):
        raise UsageError("need delta > 0, 0 < q-min < q-max and points >= 2")
    rows = expansion_error_table(args.delta, np.linspace(args.q_min, args.q_max, args.points))
    _write(args.out, expansion_table_csv(rows))
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        observations = load_observations(Path(args.observations).read_text())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read observations: {exc}") from exc
    if not observations:
        raise UsageError("observations file is empty")
    params = _read_params(args.params)
    free = tuple(x.strip() for x in args.free.split(",") if x.strip())
    cfg = FitConfig(backend=args.backend, delta=args.delta, solver=_solver_config(args))
    try:
        result = fit(observations, params, free, cfg)
    except (FitInputError, InfeasibleStartError) as exc:
        raise UsageError(str(exc)) from exc
    _write(args.out, result.to_json())
    print(f"objective={result.objective:.6g} iterations={result.iterations} converged={result.converged}",
          file=sys.stderr)
    return EXIT_OK if result.converged else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quarkspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solver_flags(p):
        p.add_argument("--grid-points", type=int, default=20000)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("validate", help="closed-form oracle suite")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--inject-fault", action="store_true", help="corrupt one reference level (self-test)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("spectrum", help="spectrum CSV for one backend")
    p.add_argument("--params", required=True)
    p.add_argument("--backend", choices=BACKENDS, default="cornell-numerov")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--l-max", type=int, default=0)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--out")
    solver_flags(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("compare", help="audit full vs truncated vs OEA spectra")
    p.add_argument("--params", required=True)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--l-max", type=int, default=0)
    p.add_argument("--no-extend", action="store_true", help="do not scan past n-max for the Gamma0 crossing")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    solver_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("expansion-error", help="plot data for the quadratic expansions of 1/q and 1/q^2")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--q-min", type=float, default=0.05)
    p.add_argument("--q-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_expansion_error)

    p = sub.add_parser("fit", help="fit parameters to meson masses")
    p.add_argument("--observations", required=True)
    p.add_argument("--params", required=True, help="initial parameters")
    p.add_argument("--free", default="alpha_s,b")
    p.add_argument("--backend", choices=BACKENDS, default="oea-closed-form")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--out")
    solver_flags(p)
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("n_max", "l_max"):
        if getattr(args, name, 0) < 0:
            print(f"quarkspec: error: --{name.replace('_', '-')} must be >= 0", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"quarkspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
