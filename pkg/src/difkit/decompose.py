"""Exponential-sum representations of the spectral-density families.

Produces ExponentialBath terms {p_j, Omega_j} such that
alpha(t) = sum_j p_j e^{Omega_j t} reproduces the thermal transform of J(w):

* multi-Lorentz-Drude: Lorentzian pole pairs plus [N-1/N] Pade (Bose) terms,
* tanh-Lorentz-Drude: pole pairs plus Fermi-Dirac Pade terms (imaginary part),
* Meier-Tannor: pole pairs plus Matsubara terms at nu_n = 2 pi n / beta,

plus the rational-function parameters themselves (tridiagonal eigenproblems)
and the closed-form bath response of the power-law / exponential-cutoff
family via the Hurwitz zeta function.

All residues are normalized so the sums match direct quadrature of the
response integral; the classical Matsubara variant of the Lorentz-Drude
expansion is kept behind method="matsubara" purely as a convergence baseline.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from . import special
from .bath_response import (alpha_exponential_grid, alpha_quadrature_grid,
                            compare_alpha)
from .model import (BathTerm, ExponentialBath, MeierTannor, MultiLorentzDrude,
                    PhysicalContext, TanhLorentzDrude)
from .quadrature import QuadratureConfig
from .special import polygamma  # noqa: F401  (part of this module's surface)

__all__ = [
    "PadeParameters",
    "pade_parameters",
    "bose_function_pade",
    "tanh_half_pade",
    "DecompositionReport",
    "PoleCollisionError",
    "decompose_multi_lorentz_drude",
    "decompose_tanh_lorentz_drude",
    "decompose_meier_tannor",
    "decompose",
    "alpha_power_law",
    "polygamma",
]

_POLE_COLLISION_RTOL = 1e-12
_AUTO_N_MAX = 128
_AUTO_N_RTOL = 1e-8


class PoleCollisionError(ValueError):
    """A decomposition pole nearly coincides with a Lorentzian rate.

    Raised instead of emitting a numerically explosive residue; choosing a
    different expansion order N moves the offending pole.
    """


@dataclass(frozen=True)
class PadeParameters:
    """[N-1/N] rational-approximation parameters of a thermal function.

    statistics="bose": 1/(1 - e^{-x}) ~ 1/x + 1/2 + sum_n 2 Xi_n x/(x^2 + xi_n^2)
    statistics="fermi": tanh(x/2)     ~ sum_n 4 Xi_n x/(x^2 + xi_n^2)

    xi are the reciprocal positive eigenvalues of the 2N x 2N symmetric
    tridiagonal matrix, zeta those of the (2N-1) x (2N-1) companion (its
    zero eigenvalue discarded).
    """
    statistics: str
    N: int
    xi: tuple[float, ...]
    Xi: tuple[float, ...]
    zeta: tuple[float, ...]


def _reciprocal_positive_eigenvalues(offdiag: np.ndarray) -> np.ndarray:
    dim = len(offdiag) + 1
    ev = eigvalsh_tridiagonal(np.zeros(dim), offdiag)
    cutoff = 1e-12 * np.abs(ev).max()
    pos = ev[ev > cutoff]
    return np.sort(1.0 / pos)


def pade_parameters(statistics: str, N: int) -> PadeParameters:
    """Solve the tridiagonal eigenproblems behind the [N-1/N] expansion."""
    if statistics not in ("bose", "fermi"):
        raise ValueError(f"statistics must be 'bose' or 'fermi', got {statistics!r}")
    if N < 1 or N != int(N):
        raise ValueError("order N must be a positive integer")
    N = int(N)

    if statistics == "bose":
        main = np.array([1.0 / (2.0 * math.sqrt((2 * c + 1) * (2 * c + 3)))
                         for c in range(1, 2 * N)])
        comp = np.array([1.0 / (2.0 * math.sqrt((2 * c + 3) * (2 * c + 5)))
                         for c in range(1, 2 * N - 1)])
        prefactor = N * N + 1.5 * N
    else:
        main = np.array([1.0 / (2.0 * math.sqrt((2 * c - 1) * (2 * c + 1)))
                         for c in range(1, 2 * N)])
        comp = np.array([1.0 / (2.0 * math.sqrt((2 * c + 1) * (2 * c + 3)))
                         for c in range(1, 2 * N - 1)])
        prefactor = N * N + 0.5 * N

    xi = _reciprocal_positive_eigenvalues(main)
    if len(xi) != N:
        raise RuntimeError(f"expected {N} positive eigenvalues, got {len(xi)}")
    if N > 1:
        zeta = _reciprocal_positive_eigenvalues(comp)
        if len(zeta) != N - 1:
            raise RuntimeError(f"expected {N - 1} companion eigenvalues, got {len(zeta)}")
    else:
        zeta = np.array([])

    xi2 = xi ** 2
    zeta2 = zeta ** 2
    Xi = np.empty(N)
    for n in range(N):
        # log-space product with sign tracking; plain products overflow near N ~ 40
        Xi[n] = prefactor * special.signed_log_ratio(
            (z2 - xi2[n] for z2 in zeta2),
            (xi2[m] - xi2[n] for m in range(N) if m != n))
    return PadeParameters(statistics=statistics, N=N,
                          xi=tuple(xi), Xi=tuple(Xi), zeta=tuple(zeta))


def bose_function_pade(params: PadeParameters, x):
    """Rational approximant of 1/(1 - e^{-x}) built from Bose parameters."""
    if params.statistics != "bose":
        raise ValueError("Bose parameters required")
    x = np.asarray(x, dtype=float)
    xi = np.asarray(params.xi)
    Xi = np.asarray(params.Xi)
    out = 1.0 / x + 0.5
    for n in range(params.N):
        out = out + 2.0 * Xi[n] * x / (x * x + xi[n] ** 2)
    return out


def tanh_half_pade(params: PadeParameters, x):
    """Rational approximant of tanh(x/2) built from Fermi parameters."""
    if params.statistics != "fermi":
        raise ValueError("Fermi parameters required")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for n in range(params.N):
        out = out + 4.0 * params.Xi[n] * x / (x * x + params.xi[n] ** 2)
    return out


@dataclass(frozen=True)
class DecompositionReport:
    bath: ExponentialBath
    n_pade_or_matsubara: int
    alpha_rms_error: float
    grid: tuple[float, ...]


def _require_finite_beta(context: PhysicalContext):
    if context is None:
        raise ValueError("a PhysicalContext is required")
    if context.is_zero_temperature:
        raise ValueError("analytic decompositions require finite beta")


def _check_collisions(nu: np.ndarray, rates):
    for n, v in enumerate(nu):
        v2 = v * v
        for om in rates:
            om2 = om * om
            if abs(v2 - om2) < _POLE_COLLISION_RTOL * max(abs(v2), abs(om2)):
                raise PoleCollisionError(
                    f"expansion pole nu_{n + 1} = {v:.6g} collides with a "
                    f"Lorentzian rate Omega = {om:.6g}; use a different order N")


def _report(bath, n, spec, context, grid, quad_cfg) -> DecompositionReport:
    grid = np.asarray(grid, dtype=float)
    analytic = alpha_exponential_grid(bath, grid)
    reference = alpha_quadrature_grid(spec, context, grid, route="coth",
                                      quad_cfg=quad_cfg)
    metrics = compare_alpha(analytic, reference)
    return DecompositionReport(bath=bath, n_pade_or_matsubara=n,
                               alpha_rms_error=metrics["rms_rel"],
                               grid=tuple(grid))


def _auto_order(build, grid) -> int:
    """Double N until the analytic alpha grid stops changing (rms < 1e-8 rel)."""
    grid = np.asarray(grid, dtype=float)
    n = 2
    prev = alpha_exponential_grid(build(n), grid)
    while 2 * n <= _AUTO_N_MAX:
        cur = alpha_exponential_grid(build(2 * n), grid)
        change = compare_alpha(cur, prev)["rms_rel"]
        n *= 2
        if change < _AUTO_N_RTOL:
            break
        prev = cur
    return n


def _default_grid(spec, t_start: float) -> np.ndarray:
    return np.linspace(t_start, 5.0, 60)


def decompose_multi_lorentz_drude(spec: MultiLorentzDrude, context: PhysicalContext,
                                  N: int | None = None, *, method: str = "pade",
                                  grid=None,
                                  quad_cfg: QuadratureConfig | None = None
                                  ) -> DecompositionReport:
    """Exponential expansion of the multi-Lorentz-Drude response.

    K = 2J + N terms: one pole term per Lorentzian branch Omega = -gamma +- i
    omega_tilde plus N thermal-pole terms. method="pade" places them at
    nu_n = xi_n / beta; method="matsubara" uses the classical nu_n = 2 pi n /
    beta series (kept as a slow-converging baseline).
    """
    if not isinstance(spec, MultiLorentzDrude):
        raise TypeError("multi_lorentz_drude spectral density required")
    _require_finite_beta(context)
    if method not in ("pade", "matsubara"):
        raise ValueError(f"method must be 'pade' or 'matsubara', got {method!r}")
    if grid is None:
        # the response integral log-diverges at t = 0 for this family's 1/w
        # tail, so the reference grid starts just above zero
        grid = _default_grid(spec, 0.05)

    if N is None:
        N = _auto_order(lambda n: _build_mld(spec, context, n, method), grid)
    bath = _build_mld(spec, context, int(N), method)
    return _report(bath, int(N), spec, context, grid, quad_cfg)


def _build_mld(spec, context, N, method) -> ExponentialBath:
    beta = context.beta_hbar
    if method == "pade" and N > 0:
        params = pade_parameters("bose", N)
        nu = np.asarray(params.xi) / beta
        Xi = np.asarray(params.Xi)
    elif method == "matsubara" and N > 0:
        nu = 2.0 * math.pi * np.arange(1, N + 1) / beta
        Xi = np.ones(N)
    else:
        nu = np.zeros(0)
        Xi = np.zeros(0)

    branch_rates = [complex(-t.gamma, s * t.omega_tilde)
                    for t in spec.terms for s in (+1.0, -1.0)]
    _check_collisions(nu, branch_rates)

    terms = []
    for t in spec.terms:
        for sign in (+1.0, -1.0):
            om = complex(-t.gamma, sign * t.omega_tilde)
            if method == "pade":
                corr = np.sum(2.0 * Xi * om ** 2 / (nu ** 2 - om ** 2)) if N else 0.0
                p = t.lam / (math.pi * beta) * (1.0 - corr) \
                    + 1j * t.lam * om / (2.0 * math.pi)
            else:
                # exact thermal weight at the pole: i Omega / (1 - e^{-i beta Omega})
                p = (t.lam / math.pi) * (1j * om) / (-special.cexpm1(-1j * beta * om))
            terms.append(BathTerm(p=complex(p), omega=om))
    for n in range(len(nu)):
        acc = 0.0
        for t in spec.terms:
            om = complex(-t.gamma, t.omega_tilde)
            acc += t.lam * t.gamma * (abs(om) ** 2 - nu[n] ** 2) \
                / abs(nu[n] ** 2 - om ** 2) ** 2
        p = -4.0 * Xi[n] * nu[n] * acc / (math.pi * beta)
        terms.append(BathTerm(p=complex(p), omega=complex(-nu[n])))
    return ExponentialBath(terms=tuple(terms))


def decompose_tanh_lorentz_drude(spec: TanhLorentzDrude, context: PhysicalContext,
                                 N: int | None = None, *, grid=None,
                                 quad_cfg: QuadratureConfig | None = None
                                 ) -> DecompositionReport:
    """Exponential expansion of the tanh-prefactor Lorentzian response.

    The real part of each pole residue is temperature-free (lam/2pi); only the
    imaginary part carries the Fermi-Dirac expansion, and the N thermal terms
    are purely imaginary.
    """
    if not isinstance(spec, TanhLorentzDrude):
        raise TypeError("tanh_lorentz_drude spectral density required")
    _require_finite_beta(context)
    if grid is None:
        grid = np.linspace(0.0, 3.0, 60)
    if N is None:
        N = _auto_order(lambda n: _build_tld(spec, context, n), grid)
    bath = _build_tld(spec, context, int(N))
    return _report(bath, int(N), spec, context, grid, quad_cfg)


def _build_tld(spec, context, N) -> ExponentialBath:
    beta = context.beta_hbar
    params = pade_parameters("fermi", N) if N > 0 else None
    nu = np.asarray(params.xi) / beta if params else np.zeros(0)
    Xi = np.asarray(params.Xi) if params else np.zeros(0)

    branch_rates = [complex(-t.gamma, s * t.omega_tilde)
                    for t in spec.terms for s in (+1.0, -1.0)]
    _check_collisions(nu, branch_rates)

    terms = []
    for t in spec.terms:
        for sign in (+1.0, -1.0):
            om = complex(-t.gamma, sign * t.omega_tilde)
            corr = np.sum(Xi * om / (nu ** 2 - om ** 2)) if N else 0.0
            p = t.lam / (2.0 * math.pi) + 2j * t.lam * corr / (math.pi * beta)
            terms.append(BathTerm(p=complex(p), omega=om))
    for n in range(len(nu)):
        acc = 0.0
        for t in spec.terms:
            om = complex(-t.gamma, t.omega_tilde)
            acc += t.lam * t.gamma * (abs(om) ** 2 - nu[n] ** 2) \
                / abs(nu[n] ** 2 - om ** 2) ** 2
        p = -4j * Xi[n] * acc / (math.pi * beta)
        terms.append(BathTerm(p=complex(p), omega=complex(-nu[n])))
    return ExponentialBath(terms=tuple(terms))


def decompose_meier_tannor(spec: MeierTannor, context: PhysicalContext,
                           N: int | None = None, *, grid=None,
                           quad_cfg: QuadratureConfig | None = None
                           ) -> DecompositionReport:
    """Matsubara-style expansion of the Meier-Tannor response.

    Pole residues (pi lam / (16 gamma wt)) (coth(beta(wt + i gamma)/2) - 1)
    and (pi lam / (16 gamma wt)) (coth(beta(wt - i gamma)/2) + 1); thermal
    terms -(pi nu_n / beta) sum_m lam_m / |nu_n^2 - Omega_m^2|^2 at
    nu_n = 2 pi n / beta. Converges like 1/N^2, so large N is normal here.
    """
    if not isinstance(spec, MeierTannor):
        raise TypeError("meier_tannor spectral density required")
    _require_finite_beta(context)
    beta = context.beta_hbar
    for t in spec.terms:
        if t.omega_tilde == 0.0 or t.gamma == 0.0:
            raise ValueError("Meier-Tannor residues need omega_tilde > 0 and gamma > 0")
        for sign in (+1.0, -1.0):
            arg = 0.5 * beta * complex(t.omega_tilde, sign * t.gamma)
            if abs(cmath.sinh(arg)) < 1e-12:
                raise ValueError(f"coth argument {arg} is singular")
    if grid is None:
        grid = _default_grid(spec, 0.05)
    if N is None:
        N = _auto_order(lambda n: _build_mt(spec, context, n), grid)
    bath = _build_mt(spec, context, int(N))
    return _report(bath, int(N), spec, context, grid, quad_cfg)


def _build_mt(spec, context, N) -> ExponentialBath:
    beta = context.beta_hbar
    nu = 2.0 * math.pi * np.arange(1, N + 1) / beta
    branch_rates = [complex(-t.gamma, s * t.omega_tilde)
                    for t in spec.terms for s in (+1.0, -1.0)]
    _check_collisions(nu, branch_rates)

    terms = []
    for t in spec.terms:
        pref = math.pi * t.lam / (16.0 * t.gamma * t.omega_tilde)
        p_plus = pref * (special.coth(0.5 * beta * complex(t.omega_tilde, t.gamma)) - 1.0)
        p_minus = pref * (special.coth(0.5 * beta * complex(t.omega_tilde, -t.gamma)) + 1.0)
        terms.append(BathTerm(p=complex(p_plus), omega=complex(-t.gamma, t.omega_tilde)))
        terms.append(BathTerm(p=complex(p_minus), omega=complex(-t.gamma, -t.omega_tilde)))
    for n in range(N):
        acc = 0.0
        for t in spec.terms:
            om = complex(-t.gamma, t.omega_tilde)
            acc += t.lam / abs(nu[n] ** 2 - om ** 2) ** 2
        p = -math.pi * nu[n] * acc / beta
        terms.append(BathTerm(p=complex(p), omega=complex(-nu[n])))
    return ExponentialBath(terms=tuple(terms))


def decompose(spec, context: PhysicalContext, N: int | None = None, *,
              grid=None, quad_cfg: QuadratureConfig | None = None
              ) -> DecompositionReport:
    """Family dispatch for the three Lorentzian-type densities."""
    if isinstance(spec, MultiLorentzDrude):
        return decompose_multi_lorentz_drude(spec, context, N, grid=grid,
                                             quad_cfg=quad_cfg)
    if isinstance(spec, TanhLorentzDrude):
        return decompose_tanh_lorentz_drude(spec, context, N, grid=grid,
                                            quad_cfg=quad_cfg)
    if isinstance(spec, MeierTannor):
        return decompose_meier_tannor(spec, context, N, grid=grid,
                                      quad_cfg=quad_cfg)
    raise TypeError(f"no exponential decomposition for family "
                    f"{getattr(spec, 'family', type(spec).__name__)!r}")


def alpha_power_law(A: float, s: int, omega_c: float, context: PhysicalContext, t):
    """Closed-form bath response of J(w) = A w^s e^{-w/w_c} for integer s >= 1:

        alpha(t) = (A s! / (pi beta^{s+1})) [ zeta(s+1, b) + zeta(s+1, conj(b)+1) ]

    with b = (1 + i w_c t) / (beta w_c). Accepts scalar or array t >= 0.
    """
    if s < 1 or s != int(s):
        raise ValueError("analytic path requires integer s >= 1; "
                         "use the quadrature route otherwise")
    if context is None or context.is_zero_temperature:
        raise ValueError("finite beta required")
    if A < 0 or omega_c <= 0:
        raise ValueError("A >= 0 and omega_c > 0 required")
    s = int(s)
    beta = context.beta_hbar

    def _one(tv: float) -> complex:
        if tv < 0:
            raise ValueError("t >= 0 required")
        if A == 0.0:
            return 0.0 + 0.0j
        b = complex(1.0, omega_c * tv) / (beta * omega_c)
        total = special.hurwitz_zeta(s + 1, b) \
            + special.hurwitz_zeta(s + 1, b.conjugate() + 1.0)
        return A * math.factorial(s) / (math.pi * beta ** (s + 1)) * total

    if np.ndim(t) == 0:
        return _one(float(t))
    return np.array([_one(float(tv)) for tv in np.asarray(t, dtype=float)])
