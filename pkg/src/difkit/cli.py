"""Command-line interface.

Exit codes: 0 success, 1 validation failure (bad input files or tolerances
exceeded), 2 usage error, 3 numerical failure (non-convergent quadrature or
fit). Output files are written atomically (temp file + rename).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import decompose as dec
from . import eta as eta_mod
from .bath_response import (alpha_exponential_grid, alpha_quadrature_grid,
                            read_alpha_csv, write_alpha_csv, AlphaGrid)
from .expfit import FitInitializationError, fit_exponential_bath
from .model import (DivergentIntegralError, PhysicalContext, PowerLawExpCutoff,
                    bath_from_json, bath_to_json, eval_spectral_density,
                    reorganization_energy, spectral_density_from_config)
from .quadrature import QuadratureConfig, QuadratureConvergenceError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


@dataclass
class CommandOutcome:
    exit_code: int
    artifacts_written: list = field(default_factory=list)


class _CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".difkit-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise _CliError(f"cannot read config {path}: {exc}", EXIT_VALIDATION)
    except json.JSONDecodeError as exc:
        raise _CliError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}", EXIT_VALIDATION)
    try:
        return spectral_density_from_config(data)
    except ValueError as exc:
        raise _CliError(f"{path}: {exc}", EXIT_VALIDATION)


def _load_bath(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise _CliError(f"cannot read bath {path}: {exc}", EXIT_VALIDATION)
    except json.JSONDecodeError as exc:
        raise _CliError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}", EXIT_VALIDATION)
    try:
        return bath_from_json(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise _CliError(f"{path}: {exc}", EXIT_VALIDATION)


def _need_context(context, what: str) -> PhysicalContext:
    if context is None:
        raise _CliError(f"{what} requires temperature_K or beta_hbar_ps in the config",
                        EXIT_VALIDATION)
    return context


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="difkit",
        description="Influence-functional coefficient toolkit: spectral densities, "
                    "exponential bath decompositions and fits, coefficient tables, "
                    "validation, and benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_spec = sub.add_parser("spectral", help="spectral-density operations")
    spec_sub = p_spec.add_subparsers(dest="spectral_command", required=True)
    p_eval = spec_sub.add_parser("eval", help="tabulate J(w) on a frequency grid")
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--wmin", type=float, default=0.0)
    p_eval.add_argument("--wmax", type=float, required=True)
    p_eval.add_argument("--n", type=int, default=200)
    p_eval.add_argument("--out", required=True)

    p_alpha = sub.add_parser("alpha", help="tabulate the bath response on a time grid")
    p_alpha.add_argument("--config", required=True)
    p_alpha.add_argument("--route", choices=("analytic", "quad"), default="analytic")
    p_alpha.add_argument("--quad-route", choices=("coth", "sinh", "bose"),
                         default="coth", help="integral representation for --route quad")
    p_alpha.add_argument("--tmin", type=float, default=0.0)
    p_alpha.add_argument("--tmax", type=float, required=True)
    p_alpha.add_argument("--n", type=int, default=201)
    p_alpha.add_argument("--order", type=int, default=None,
                         help="expansion order for the analytic route (default: auto)")
    p_alpha.add_argument("--out", required=True)

    p_dec = sub.add_parser("decompose", help="exponential-sum bath from a config")
    p_dec.add_argument("--config", required=True)
    p_dec.add_argument("--order", type=int, default=None, help="default: auto-doubling")
    p_dec.add_argument("--method", choices=("pade", "matsubara"), default="pade")
    p_dec.add_argument("--out", required=True)

    p_pade = sub.add_parser("pade", help="print rational-expansion parameters")
    p_pade.add_argument("--stats", choices=("bose", "fermi"), required=True)
    p_pade.add_argument("--order", type=int, required=True)

    p_fit = sub.add_parser("fit", help="fit exponentials to a sampled response")
    p_fit.add_argument("--alpha", required=True, help="AlphaGrid CSV")
    p_fit.add_argument("--terms", type=int, required=True)
    p_fit.add_argument("--beta-hbar-ps", type=float, default=None,
                       help="attach a thermal context to the fitted bath JSON")
    p_fit.add_argument("--out", required=True)

    p_eta = sub.add_parser("eta", help="build a coefficient table from a bath")
    p_eta.add_argument("--bath", required=True)
    p_eta.add_argument("--dt", type=float, required=True)
    p_eta.add_argument("--steps", type=int, required=True)
    p_eta.add_argument("--splitting", choices=("trotter", "strang"), default="trotter")
    p_eta.add_argument("--quapi", action="store_true",
                       help="include the adiabatic counter term")
    p_eta.add_argument("--config", default=None,
                       help="config to compute the reorganization energy from")
    p_eta.add_argument("--lambda", dest="lambda_reorg", type=float, default=None,
                       help="reorganization energy, overrides --config")
    p_eta.add_argument("--out", required=True)

    p_val = sub.add_parser("validate",
                           help="analytic coefficients vs both oracles over a sweep")
    p_val.add_argument("--config", required=True)
    p_val.add_argument("--dt", type=float, required=True)
    p_val.add_argument("--steps", type=int, default=None)
    p_val.add_argument("--dkmax", type=int, required=True)
    p_val.add_argument("--tol", type=float, default=1e-3)
    p_val.add_argument("--order", type=int, default=None,
                       help="decomposition order when the family has one")
    p_val.add_argument("--terms", type=int, default=4,
                       help="fit size for families without a decomposition")

    p_rec = sub.add_parser("reconstruct",
                           help="spectral density implied by a bath vs a config")
    p_rec.add_argument("--bath", required=True)
    p_rec.add_argument("--config", required=True)
    p_rec.add_argument("--wmin", type=float, default=0.05)
    p_rec.add_argument("--wmax", type=float, default=20.0)
    p_rec.add_argument("--n", type=int, default=400)
    p_rec.add_argument("--out", required=True)
    return parser


def _cmd_spectral_eval(args) -> CommandOutcome:
    spec, context = _load_config(args.config)
    w = np.linspace(args.wmin, args.wmax, args.n)
    try:
        j = eval_spectral_density(spec, w, context)
    except ValueError as exc:
        raise _CliError(str(exc), EXIT_VALIDATION)
    lines = ["omega_ps_inv,j"]
    lines += [f"{wi:.17g},{ji:.17g}" for wi, ji in zip(w, np.atleast_1d(j))]
    _atomic_write(args.out, "\n".join(lines) + "\n")
    return CommandOutcome(EXIT_OK, [args.out])


def _analytic_alpha_grid(spec, context, times, order):
    if isinstance(spec, PowerLawExpCutoff):
        if spec.q == 1.0 and spec.s >= 1 and spec.s == int(spec.s):
            vals = dec.alpha_power_law(spec.A, int(spec.s), spec.omega_c, context, times)
            return AlphaGrid(times=tuple(times), values=tuple(np.atleast_1d(vals)),
                             provenance="analytic"), None
        return None, ("no analytic bath response for power_exp with "
                      f"s={spec.s}, q={spec.q}; falling back to quadrature")
    report = dec.decompose(spec, context, order)
    return alpha_exponential_grid(report.bath, times), None


def _cmd_alpha(args) -> CommandOutcome:
    spec, context = _load_config(args.config)
    context = _need_context(context, "alpha")
    if args.tmax <= args.tmin:
        raise _CliError("--tmax must exceed --tmin", EXIT_USAGE)
    times = np.linspace(args.tmin, args.tmax, args.n)
    grid = None
    if args.route == "analytic":
        grid, warning = _analytic_alpha_grid(spec, context, times, args.order)
        if warning:
            print(f"warning: {warning}", file=sys.stderr)
    if grid is None:
        grid = alpha_quadrature_grid(spec, context, times, route=args.quad_route)
    tmp_path = args.out
    write_alpha_csv(tmp_path + ".part", grid)
    os.replace(tmp_path + ".part", tmp_path)
    return CommandOutcome(EXIT_OK, [args.out])


def _cmd_decompose(args) -> CommandOutcome:
    spec, context = _load_config(args.config)
    context = _need_context(context, "decompose")
    try:
        if args.method == "matsubara":
            report = dec.decompose_multi_lorentz_drude(spec, context, args.order,
                                                       method="matsubara")
        else:
            report = dec.decompose(spec, context, args.order)
    except (TypeError, ValueError) as exc:
        raise _CliError(str(exc), EXIT_VALIDATION)
    payload = bath_to_json(report.bath, context)
    _atomic_write(args.out, json.dumps(payload, indent=2) + "\n")
    print(json.dumps({
        "n_terms": report.bath.K,
        "n_pade_or_matsubara": report.n_pade_or_matsubara,
        "alpha_rms_error": report.alpha_rms_error,
    }, indent=2))
    return CommandOutcome(EXIT_OK, [args.out])


def _cmd_pade(args) -> CommandOutcome:
    try:
        params = dec.pade_parameters(args.stats, args.order)
    except ValueError as exc:
        raise _CliError(str(exc), EXIT_USAGE)
    print(f"# statistics={params.statistics} N={params.N}")
    print("n,xi,Xi")
    for n, (xi, Xi) in enumerate(zip(params.xi, params.Xi), start=1):
        print(f"{n},{xi:.17g},{Xi:.17g}")
    return CommandOutcome(EXIT_OK)


def _cmd_fit(args) -> CommandOutcome:
    try:
        samples = read_alpha_csv(args.alpha)
    except (OSError, ValueError) as exc:
        raise _CliError(str(exc), EXIT_VALIDATION)
    try:
        report = fit_exponential_bath(samples, args.terms)
    except (ValueError, FitInitializationError) as exc:
        raise _CliError(f"fit failed: {exc}", EXIT_NUMERICAL)
    context = (PhysicalContext(beta_hbar=args.beta_hbar_ps)
               if args.beta_hbar_ps else None)
    payload = bath_to_json(report.bath, context)
    payload["fit"] = {
        "rms_residual": report.rms_residual,
        "max_residual": report.max_residual,
        "iterations": report.iterations,
        "converged": report.converged,
    }
    _atomic_write(args.out, json.dumps(payload, indent=2) + "\n")
    print(json.dumps(payload["fit"], indent=2))
    return CommandOutcome(EXIT_OK, [args.out])


def _cmd_eta(args) -> CommandOutcome:
    data = _load_bath(args.bath)
    bath, _ = data
    quapi_lambda = None
    if args.quapi:
        if args.lambda_reorg is not None:
            quapi_lambda = args.lambda_reorg
        elif args.config:
            spec, context = _load_config(args.config)
            quapi_lambda = reorganization_energy(spec, context)
        else:
            raise _CliError("--quapi needs --lambda or --config", EXIT_USAGE)
    try:
        table = eta_mod.build_eta_table(bath, args.dt, args.steps,
                                        splitting=args.splitting,
                                        quapi_lambda=quapi_lambda)
    except ValueError as exc:
        raise _CliError(str(exc), EXIT_USAGE)
    tmp = args.out + ".part"
    eta_mod.write_eta_csv(tmp, table)
    os.replace(tmp, args.out)
    return CommandOutcome(EXIT_OK, [args.out])


def _cmd_validate(args) -> CommandOutcome:
    spec, context = _load_config(args.config)
    context = _need_context(context, "validate")
    if args.dkmax < 0:
        raise _CliError("--dkmax must be >= 0", EXIT_USAGE)
    if args.steps is not None and args.dkmax > args.steps:
        raise _CliError("--dkmax must not exceed --steps", EXIT_USAGE)
    if isinstance(spec, PowerLawExpCutoff):
        tmax = max(2.0, 1.2 * args.dkmax * args.dt)
        times = np.linspace(0.0, tmax, 401)
        samples = alpha_quadrature_grid(spec, context, times)
        fit = fit_exponential_bath(samples, args.terms)
        bath = fit.bath
        print(f"fitted K={args.terms} exponentials: rms residual "
              f"{fit.rms_residual:.3e} (max |alpha| {max(abs(v) for v in samples.values):.3e})")
    else:
        report = dec.decompose(spec, context, args.order)
        bath = report.bath
        print(f"decomposed to K={bath.K} terms "
              f"(N={report.n_pade_or_matsubara}, alpha rms err {report.alpha_rms_error:.3e})")
    bench = eta_mod.benchmark_eta(bath, spec, context, args.dt, args.dkmax)
    print(f"normalized max deviation vs makri oracle: {bench.max_rel_err_vs_makri:.3e}")
    print(f"normalized max deviation vs vagov oracle: {bench.max_rel_err_vs_vagov:.3e}")
    print(f"analytic sweep: {bench.time_analytic:.4f} s; fastest oracle sweep: "
          f"{bench.time_oracle:.4f} s; speedup {bench.speedup:.1f}x")
    if bench.oracle_failures["makri"] or bench.oracle_failures["vagov"]:
        print(f"oracle non-convergence counts: {bench.oracle_failures}")
    worst = max(bench.max_rel_err_vs_makri, bench.max_rel_err_vs_vagov)
    if worst > args.tol:
        print(f"FAIL: {worst:.3e} > tol {args.tol:.3e}")
        return CommandOutcome(EXIT_VALIDATION)
    print(f"PASS: {worst:.3e} <= tol {args.tol:.3e}")
    return CommandOutcome(EXIT_OK)


def _cmd_reconstruct(args) -> CommandOutcome:
    bath, bath_context = _load_bath(args.bath)
    spec, context = _load_config(args.config)
    context = context or bath_context
    context = _need_context(context, "reconstruct")
    from .bath_response import reconstruct_spectral_density
    w = np.linspace(args.wmin, args.wmax, args.n)
    j_rec = reconstruct_spectral_density(bath, context, w)
    j_ref = eval_spectral_density(spec, w, context)
    scale = float(np.abs(j_ref).max())
    max_rel = float(np.abs(j_rec - j_ref).max() / scale) if scale > 0 else math.inf
    lines = ["omega_ps_inv,j_reconstructed,j_reference"]
    lines += [f"{wi:.17g},{a:.17g},{b:.17g}" for wi, a, b in zip(w, j_rec, j_ref)]
    _atomic_write(args.out, "\n".join(lines) + "\n")
    print(json.dumps({"max_rel_err": max_rel, "scale": scale}, indent=2))
    return CommandOutcome(EXIT_OK, [args.out])


_HANDLERS = {
    "alpha": _cmd_alpha,
    "decompose": _cmd_decompose,
    "pade": _cmd_pade,
    "fit": _cmd_fit,
    "eta": _cmd_eta,
    "validate": _cmd_validate,
    "reconstruct": _cmd_reconstruct,
}


def run(argv) -> CommandOutcome:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return CommandOutcome(EXIT_USAGE if exc.code != 0 else EXIT_OK)
    try:
        if args.command == "spectral":
            return _cmd_spectral_eval(args)
        return _HANDLERS[args.command](args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CommandOutcome(exc.code)
    except (QuadratureConvergenceError, DivergentIntegralError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_NUMERICAL)
    except FitInitializationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_NUMERICAL)


def main() -> None:
    sys.exit(run(sys.argv[1:]).exit_code)


if __name__ == "__main__":
    main()
