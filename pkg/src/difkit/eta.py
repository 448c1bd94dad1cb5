"""Discretized-influence-functional coefficient tables.

For a bath response alpha(t) = sum_j p_j e^{Omega_j t} every coefficient is a
double integral of alpha over a rectangle or triangle of the time grid and has
a closed form; this module provides those closed forms, two independent
numerical oracles (the finite double integral of alpha and the improper
spectral-density integrals in their Makri and Vagov forms), the adiabatic
counter term, the assembled influence phase, and an analytic-vs-oracle
benchmark.

Grid conventions. Uniform ("trotter") splitting uses intervals
[k dt, (k+1) dt], k = 0..N. Symmetric ("strang") splitting uses half-width
boundary cells [0, dt/2] and [N dt - dt/2, N dt] with centered interior cells
[k dt - dt/2, k dt + dt/2]; interior coefficients then coincide with the
uniform ones and only coefficients touching cell 0 or N need the edge
formulas.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import special
from .model import (DiscretePath, ExponentialBath, PhysicalContext,
                    SpectralDensity, reorganization_energy)
from .quadrature import (QuadratureConfig, QuadratureConvergenceError, Rectangle,
                         Triangle, integrate_double, integrate_semi_infinite)

__all__ = [
    "TROTTER",
    "STRANG",
    "EtaTable",
    "BenchmarkReport",
    "eta_trotter_analytic",
    "eta_trotter_interior_sweep",
    "eta_strang_analytic",
    "eta_generic_quadrature",
    "eta_spectral_oracle",
    "quapi_counter_term",
    "build_eta_table",
    "influence_phase",
    "benchmark_eta",
    "write_eta_csv",
    "read_eta_csv",
]

TROTTER = "trotter"
STRANG = "strang"


# ---------------------------------------------------------------------------
# Analytic formulas
# ---------------------------------------------------------------------------

def _coeffs(bath: ExponentialBath, dt: float):
    if not (dt > 0):
        raise ValueError("dt must be positive")
    p = bath.amplitudes()
    x = bath.rates() * dt
    return p, x


def eta_trotter_analytic(bath: ExponentialBath, dt: float, dk: int) -> complex:
    """Interior/self coefficient of the uniform splitting.

    dk >= 1: 4 sum_j (p_j/Omega_j^2) sinh^2(Omega_j dt/2) e^{Omega_j dk dt}
    dk == 0: 2 sum_j (p_j/Omega_j^2) (sinh(Omega_j dt/2) e^{Omega_j dt/2}
             - Omega_j dt/2)

    Both evaluated through kernels with small-|Omega dt| series so the
    Omega -> 0 limits (p dt^2 and p dt^2 / 2) come out exactly.
    """
    if dk < 0:
        raise ValueError("dk must be >= 0")
    p, x = _coeffs(bath, dt)
    if dk == 0:
        vals = 0.5 * p * special.kernel_self(x)
    else:
        vals = p * special.kernel_rect(x) * np.exp(x * dk)
    return complex(dt * dt * np.sum(vals))


def eta_trotter_interior_sweep(bath: ExponentialBath, dt: float, dks) -> np.ndarray:
    """Vectorized interior coefficients for an array of separations dk >= 1."""
    dks = np.asarray(dks, dtype=float)
    if np.any(dks < 1):
        raise ValueError("interior sweep requires dk >= 1")
    p, x = _coeffs(bath, dt)
    c = dt * dt * p * special.kernel_rect(x)
    return np.exp(np.outer(dks, x)) @ c


def eta_strang_analytic(bath: ExponentialBath, dt: float, n_steps: int,
                        which: str, k: int | None = None) -> complex:
    """Boundary coefficients of the symmetric splitting, t = n_steps * dt.

    which = "N0":        4 (p/Om^2) sinh^2(Om dt/4) e^{Om (t - dt/2)}
    which = "self_edge": 2 (p/Om^2) (sinh(Om dt/4) e^{Om dt/4} - Om dt/4)
    which = "k0":        4 (p/Om^2) sinh(Om dt/2) sinh(Om dt/4) e^{Om (k dt - dt/4)}
    which = "Nk":        same, phase e^{Om (t - k dt - dt/4)}
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    p, x = _coeffs(bath, dt)
    t_total = n_steps * dt
    if which == "N0":
        vals = 0.25 * p * special.kernel_rect(0.5 * x) * np.exp(x * (n_steps - 0.5))
    elif which == "self_edge":
        vals = 0.125 * p * special.kernel_self(0.5 * x)
    elif which in ("k0", "Nk"):
        if k is None or not (0 < k < n_steps):
            raise ValueError(f"{which} requires 0 < k < n_steps, got k={k}")
        phase = (k - 0.25) if which == "k0" else (n_steps - k - 0.25)
        vals = 0.5 * p * special.kernel_edge(x) * np.exp(x * phase)
    else:
        raise ValueError(f"unknown edge selector {which!r}")
    return complex(dt * dt * np.sum(vals))


# ---------------------------------------------------------------------------
# Coefficient selectors and their integration regions
# ---------------------------------------------------------------------------

def _interval(splitting: str, k: int, dt: float, n_steps: int) -> tuple[float, float]:
    if k < 0 or k > n_steps:
        raise ValueError(f"cell index {k} outside 0..{n_steps}")
    if splitting == TROTTER:
        return k * dt, (k + 1) * dt
    if splitting == STRANG:
        if k == 0:
            return 0.0, 0.5 * dt
        if k == n_steps:
            return n_steps * dt - 0.5 * dt, n_steps * dt
        return k * dt - 0.5 * dt, k * dt + 0.5 * dt
    raise ValueError(f"unknown splitting {splitting!r}")


def _selector_region(selector, dt: float, n_steps: int, splitting: str):
    kind = selector[0]
    if kind == "interior":
        _, k, kp = selector
        if not (0 <= kp < k <= n_steps):
            raise ValueError(f"interior requires 0 <= k' < k <= N, got {selector}")
        a1, b1 = _interval(splitting, k, dt, n_steps)
        a2, b2 = _interval(splitting, kp, dt, n_steps)
        return Rectangle(a1, b1, a2, b2)
    if kind == "self":
        _, k = selector
        a, b = _interval(splitting, k, dt, n_steps)
        return Triangle(a, b)
    if splitting != STRANG:
        raise ValueError(f"edge selector {selector} requires the strang splitting")
    if kind == "edge_N0":
        a1, b1 = _interval(STRANG, n_steps, dt, n_steps)
        a2, b2 = _interval(STRANG, 0, dt, n_steps)
        return Rectangle(a1, b1, a2, b2)
    if kind == "edge_00":
        return Triangle(*_interval(STRANG, 0, dt, n_steps))
    if kind == "edge_NN":
        return Triangle(*_interval(STRANG, n_steps, dt, n_steps))
    if kind == "edge_k0":
        _, k = selector
        if not (0 < k < n_steps):
            raise ValueError(f"edge_k0 requires 0 < k < N, got {k}")
        a1, b1 = _interval(STRANG, k, dt, n_steps)
        a2, b2 = _interval(STRANG, 0, dt, n_steps)
        return Rectangle(a1, b1, a2, b2)
    if kind == "edge_Nk":
        _, k = selector
        if not (0 < k < n_steps):
            raise ValueError(f"edge_Nk requires 0 < k < N, got {k}")
        a1, b1 = _interval(STRANG, n_steps, dt, n_steps)
        a2, b2 = _interval(STRANG, k, dt, n_steps)
        return Rectangle(a1, b1, a2, b2)
    raise ValueError(f"unknown selector {selector!r}")


def eta_generic_quadrature(alpha, dt: float, n_steps: int, selector,
                           quad_cfg: QuadratureConfig | None = None,
                           splitting: str = TROTTER) -> complex:
    """Finite double quadrature of alpha(t' - t'') over a coefficient's region.

    This is the fallback (and oracle) that works for any alpha evaluator; the
    integration bounds are tiny (one or two grid cells), which is exactly why
    it is preferred over the improper spectral integrals when no closed form
    exists.
    """
    cfg = quad_cfg or QuadratureConfig(rel_tol=1e-12, abs_tol=1e-15)
    region = _selector_region(selector, dt, n_steps, splitting)

    def g(tp, ts):
        return alpha(tp - ts)

    r = integrate_double(g, region, cfg)
    if not r.converged:
        raise QuadratureConvergenceError(
            f"double quadrature for {selector} did not converge "
            f"(error estimate {r.error_estimate:.3e})")
    return complex(r.value)


# ---------------------------------------------------------------------------
# Improper spectral-density oracles
# ---------------------------------------------------------------------------

def _thermal_pair(w, beta):
    """(w e^{+beta w/2}/sinh(beta w/2), w e^{-beta w/2}/sinh(beta w/2))."""
    if math.isinf(beta):
        return 2.0 * w, np.zeros_like(w)
    x = 0.5 * beta * w
    small = np.abs(x) < special.SERIES_SWITCH
    f_plus = np.empty_like(w)
    f_minus = np.empty_like(w)
    xs, ws = x[small], w[small]
    series_coth = 1.0 / xs + xs / 3.0 - xs ** 3 / 45.0 if xs.size else xs
    f_plus[small] = ws * (series_coth + 1.0)
    f_minus[small] = ws * (series_coth - 1.0)
    xl, wl = x[~small], w[~small]
    em = np.exp(-2.0 * xl)
    f_plus[~small] = 2.0 * wl / (1.0 - em)
    f_minus[~small] = 2.0 * wl * em / (1.0 - em)
    return f_plus, f_minus


def _selector_shape(selector, dt, n_steps):
    """(kernel name, effective cell width, scale, phase offset tau).

    Each coefficient's improper-integral form factors as
    scale * dt_eff^2 * kernel(-i w dt_eff) * e^{-i w tau} against the thermal
    weight and J(w)/w.
    """
    kind = selector[0]
    t_total = n_steps * dt
    if kind == "interior":
        _, k, kp = selector
        return ("rect", dt, 1.0, (k - kp) * dt)
    if kind == "self":
        return ("self", dt, 0.5, 0.0)
    if kind == "edge_N0":
        return ("rect", 0.5 * dt, 1.0, t_total - 0.5 * dt)
    if kind in ("edge_00", "edge_NN"):
        return ("self", 0.5 * dt, 0.5, 0.0)
    if kind == "edge_k0":
        _, k = selector
        if not (0 < k < n_steps):
            raise ValueError(f"edge_k0 requires 0 < k < N, got {k}")
        return ("edge", dt, 0.5, k * dt - 0.25 * dt)
    if kind == "edge_Nk":
        _, k = selector
        if not (0 < k < n_steps):
            raise ValueError(f"edge_Nk requires 0 < k < N, got {k}")
        return ("edge", dt, 0.5, t_total - k * dt - 0.25 * dt)
    raise ValueError(f"unknown selector {selector!r}")


_KERNELS = {"rect": special.kernel_rect, "self": special.kernel_self,
            "edge": special.kernel_edge}


def eta_spectral_oracle(spec: SpectralDensity, context: PhysicalContext,
                        dt: float, n_steps: int, selector,
                        variant: str = "makri",
                        quad_cfg: QuadratureConfig | None = None) -> complex:
    """Traditional improper-integral evaluation of a coefficient.

    variant="makri": full-line Fourier form with the e^{beta w/2}/sinh weight,
    folded onto (0, inf) with the odd extension of J. Supports every selector
    including the symmetric-splitting edges.

    variant="vagov": half-line form with the coth weight; interior and self
    coefficients only (no published edge forms; use eta_generic_quadrature).
    """
    if variant not in ("makri", "vagov"):
        raise ValueError(f"variant must be 'makri' or 'vagov', got {variant!r}")
    kernel_name, dt_eff, scale, tau = _selector_shape(selector, dt, n_steps)
    if variant == "vagov" and selector[0] not in ("interior", "self"):
        raise ValueError("the vagov route has no edge forms; "
                         "use eta_generic_quadrature for edges")
    kernel = _KERNELS[kernel_name]
    beta = context.beta_hbar
    pref = scale * dt_eff * dt_eff

    # a period hint only helps when the oscillation is faster than the
    # integrand's own frequency support; beyond that the fixed-width segments
    # would straddle (or skip) the support entirely
    period = 2.0 * math.pi / max(abs(tau), dt_eff)
    hint = period if period <= 256.0 * spec.frequency_scale() else None
    base = quad_cfg or QuadratureConfig(rel_tol=1e-10, abs_tol=1e-16)
    cfg = QuadratureConfig(rel_tol=base.rel_tol, abs_tol=base.abs_tol,
                           max_evaluations=base.max_evaluations,
                           oscillation_period_hint=hint)

    # Self-type coefficients carry a slowly decaying non-oscillatory piece:
    # the -i w dt term of their kernel integrates, against J/w^2 and the
    # thermal weight, to exactly -i dt_eff * lambda / pi with lambda the
    # reorganization energy. It is split off and added in closed form; the
    # remaining integrand decays a full power of w faster and oscillates.
    closed_part = 0.0 + 0.0j
    if kernel_name == "self":
        lam = reorganization_energy(spec, context)
        closed_part = -2j * pref * lam / (math.pi * dt_eff)

    if variant == "makri":
        def integrand(w):
            jw = spec.density_over_omega(w, context)
            f_plus, f_minus = _thermal_pair(w, beta)
            if kernel_name == "self":
                theta = w * dt_eff
                r_part = special.kernel_rect(-1j * theta).real
                osc_part = (f_plus + f_minus) * r_part \
                    + (4j / dt_eff) * np.sinc(theta / math.pi)
            else:
                kv = kernel(-1j * w * dt_eff)
                phase = np.exp(-1j * w * tau)
                osc_part = kv * (f_plus * phase + f_minus / phase)
            return (0.5 / math.pi) * pref * jw * osc_part
    else:
        def integrand(w):
            jw = spec.density_over_omega(w, context)
            wcoth = special.omega_coth(w, beta)
            if kernel_name == "self":
                theta = w * dt_eff
                r_part = special.kernel_rect(-1j * theta).real
                part = wcoth * r_part + (2j / dt_eff) * np.sinc(theta / math.pi)
            else:
                kv = kernel(-1j * w * dt_eff)
                part = kv * (wcoth * np.cos(w * tau) - 1j * w * np.sin(w * tau))
            return (1.0 / math.pi) * pref * jw * part

    r = integrate_semi_infinite(integrand, 0.0, cfg)
    if not r.converged:
        raise QuadratureConvergenceError(
            f"spectral oracle ({variant}, {selector}) did not converge; "
            f"error estimate {r.error_estimate:.3e}")
    return complex(r.value) + closed_part


# ---------------------------------------------------------------------------
# Counter term, table assembly, influence phase
# ---------------------------------------------------------------------------

def quapi_counter_term(lambda_reorg: float, dt: float) -> complex:
    """Adiabatic-displacement counter term i dt lambda / pi (hbar = 1).

    Added to the self coefficients when the displaced-oscillator propagator
    form is in use.
    """
    if not (dt > 0):
        raise ValueError("dt must be positive")
    return 1j * dt * lambda_reorg / math.pi


@dataclass(frozen=True)
class EtaTable:
    """All coefficients of one splitting at fixed dt and step count.

    interior[i] holds the stationary coefficient at separation dk = i + 1;
    self_coeff is the (interior) same-cell coefficient. The symmetric
    splitting additionally fills eta_00 (= eta_NN), eta_n0, and the
    eta_k0/eta_nk lists over k = 1..N-1. quapi_term is stored separately and
    applied by influence_phase; self_coeff stays bare.
    """
    splitting: str
    dt: float
    n_steps: int
    interior: tuple[complex, ...]
    self_coeff: complex
    quapi_term: complex = 0j
    eta_00: complex | None = None
    eta_n0: complex | None = None
    eta_k0: tuple[complex, ...] | None = None
    eta_nk: tuple[complex, ...] | None = None

    def interior_at(self, dk: int) -> complex:
        if not (1 <= dk <= self.n_steps):
            raise ValueError(f"dk must be in 1..{self.n_steps}, got {dk}")
        return self.interior[dk - 1]

    def coefficient(self, k: int, kp: int) -> complex:
        """Coefficient eta_{k k'} for 0 <= k' <= k <= N (without counter term)."""
        n = self.n_steps
        if not (0 <= kp <= k <= n):
            raise ValueError(f"need 0 <= k' <= k <= N, got ({k}, {kp})")
        if self.splitting == TROTTER:
            return self.self_coeff if k == kp else self.interior[k - kp - 1]
        if k == kp:
            return self.eta_00 if k in (0, n) else self.self_coeff
        if kp == 0 and k == n:
            return self.eta_n0
        if kp == 0:
            return self.eta_k0[k - 1]
        if k == n:
            return self.eta_nk[kp - 1]
        return self.interior[k - kp - 1]


def build_eta_table(bath: ExponentialBath, dt: float, n_steps: int,
                    splitting: str = TROTTER,
                    quapi_lambda: float | None = None) -> EtaTable:
    """Fill a coefficient table from the analytic formulas."""
    if splitting not in (TROTTER, STRANG):
        raise ValueError(f"unknown splitting {splitting!r}")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    interior = tuple(complex(v) for v in
                     eta_trotter_interior_sweep(bath, dt, np.arange(1, n_steps + 1)))
    self_coeff = eta_trotter_analytic(bath, dt, 0)
    quapi = quapi_counter_term(quapi_lambda, dt) if quapi_lambda is not None else 0j
    if splitting == TROTTER:
        return EtaTable(splitting=TROTTER, dt=dt, n_steps=n_steps,
                        interior=interior, self_coeff=self_coeff, quapi_term=quapi)
    ks = range(1, n_steps)
    return EtaTable(
        splitting=STRANG, dt=dt, n_steps=n_steps,
        interior=interior, self_coeff=self_coeff, quapi_term=quapi,
        eta_00=eta_strang_analytic(bath, dt, n_steps, "self_edge"),
        eta_n0=eta_strang_analytic(bath, dt, n_steps, "N0"),
        eta_k0=tuple(eta_strang_analytic(bath, dt, n_steps, "k0", k) for k in ks),
        eta_nk=tuple(eta_strang_analytic(bath, dt, n_steps, "Nk", k) for k in ks),
    )


def influence_phase(table: EtaTable, path: DiscretePath) -> complex:
    """Discretized influence phase of a forward/backward path pair:

        Phi = - sum_{k} sum_{k' <= k} (s_k+ - s_k-)
                  (eta_{kk'} s_{k'}+ - conj(eta_{kk'}) s_{k'}-)

    plus, when the counter term is enabled,
    -quapi_term * sum_k ((s_k+)^2 - (s_k-)^2).
    """
    n = table.n_steps
    if len(path.s_plus) != n + 1:
        raise ValueError(f"path length {len(path.s_plus)} != n_steps+1 = {n + 1}")
    sp = np.asarray(path.s_plus)
    sm = np.asarray(path.s_minus)
    phi = 0.0 + 0.0j
    for k in range(n + 1):
        d = sp[k] - sm[k]
        if d == 0.0 and table.quapi_term == 0:
            continue
        for kp in range(k + 1):
            eta = table.coefficient(k, kp)
            phi -= d * (eta * sp[kp] - eta.conjugate() * sm[kp])
    if table.quapi_term != 0:
        phi -= table.quapi_term * float(np.sum(sp * sp - sm * sm))
    return complex(phi)


# ---------------------------------------------------------------------------
# Benchmark
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchmarkReport:
    """Interior-coefficient sweep comparison: analytic path vs both oracles.

    Each curve is normalized by its own real part at dk = 0 before the
    deviations are taken, so max_rel_err_* are relative to the dk = 0 scale.
    time_oracle is the faster of the two oracle sweeps; speedup is its ratio
    to the analytic sweep time.
    """
    max_rel_err_vs_makri: float
    max_rel_err_vs_vagov: float
    time_analytic: float
    time_oracle: float
    speedup: float
    n_points: int
    oracle_failures: dict = field(default_factory=dict)


def _normalized(values: np.ndarray) -> np.ndarray:
    scale = values[0].real
    if scale == 0.0:
        raise ValueError("cannot normalize: Re eta(0) = 0")
    return values / scale


def benchmark_eta(bath: ExponentialBath, spec: SpectralDensity,
                  context: PhysicalContext, dt: float, dk_max: int,
                  quad_cfg: QuadratureConfig | None = None) -> BenchmarkReport:
    """Sweep interior coefficients for dk = 0..dk_max three ways and time them.

    Oracle quadrature runs at 1e-8 relative tolerance unless overridden so the
    timing comparison is reproducible. Oracle non-convergence at a given dk is
    counted and excluded from the error maxima.
    """
    if dk_max < 0:
        raise ValueError("dk_max must be >= 0")
    cfg = quad_cfg or QuadratureConfig(rel_tol=1e-8, abs_tol=1e-16)

    t0 = time.perf_counter()
    analytic = np.empty(dk_max + 1, dtype=complex)
    analytic[0] = eta_trotter_analytic(bath, dt, 0)
    if dk_max >= 1:
        analytic[1:] = eta_trotter_interior_sweep(bath, dt, np.arange(1, dk_max + 1))
    time_analytic = time.perf_counter() - t0

    failures = {"makri": 0, "vagov": 0}
    oracle_vals = {}
    oracle_times = {}
    for variant in ("makri", "vagov"):
        vals = np.full(dk_max + 1, np.nan + 0j, dtype=complex)
        t0 = time.perf_counter()
        for dk in range(dk_max + 1):
            selector = ("self", 0) if dk == 0 else ("interior", dk, 0)
            try:
                vals[dk] = eta_spectral_oracle(spec, context, dt, dk_max + 1,
                                               selector, variant, cfg)
            except QuadratureConvergenceError:
                failures[variant] += 1
        oracle_times[variant] = time.perf_counter() - t0
        oracle_vals[variant] = vals

    a_hat = _normalized(analytic)
    errs = {}
    for variant in ("makri", "vagov"):
        vals = oracle_vals[variant]
        ok = ~np.isnan(vals.real)
        if not ok[0]:
            raise QuadratureConvergenceError(f"{variant} oracle failed at dk=0")
        v_hat = vals / vals[0].real
        errs[variant] = float(np.max(np.abs(a_hat[ok] - v_hat[ok])))

    time_analytic = max(time_analytic, 1e-9)
    time_oracle = min(oracle_times.values())
    return BenchmarkReport(
        max_rel_err_vs_makri=errs["makri"],
        max_rel_err_vs_vagov=errs["vagov"],
        time_analytic=time_analytic,
        time_oracle=time_oracle,
        speedup=time_oracle / time_analytic,
        n_points=dk_max + 1,
        oracle_failures=failures,
    )


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------

def write_eta_csv(path, table: EtaTable) -> None:
    quapi_lambda = table.quapi_term.imag * math.pi / table.dt
    lines = [
        f"# splitting={table.splitting}",
        f"# dt_ps={table.dt:.17g}",
        f"# n_steps={table.n_steps}",
        f"# quapi_lambda={quapi_lambda:.17g}",
        "kind,index,re,im",
    ]

    def row(kind, index, v):
        lines.append(f"{kind},{index},{v.real:.17g},{v.imag:.17g}")

    for i, v in enumerate(table.interior, start=1):
        row("interior", i, v)
    row("self", 0, table.self_coeff)
    if table.splitting == STRANG:
        row("edge_00", 0, table.eta_00)
        row("edge_N0", 0, table.eta_n0)
        for k, v in enumerate(table.eta_k0, start=1):
            row("edge_k0", k, v)
        for k, v in enumerate(table.eta_nk, start=1):
            row("edge_Nk", k, v)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_eta_csv(path) -> EtaTable:
    meta = {}
    rows = {"interior": {}, "self": {}, "edge_00": {}, "edge_N0": {},
            "edge_k0": {}, "edge_Nk": {}}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line.lstrip("# ").partition("=")
                meta[key.strip()] = val.strip()
                continue
            if line.startswith("kind,"):
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 columns")
            kind, idx, re, im = parts
            if kind not in rows:
                raise ValueError(f"{path}:{lineno}: unknown kind {kind!r}")
            try:
                rows[kind][int(idx)] = complex(float(re), float(im))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    try:
        splitting = meta["splitting"]
        dt = float(meta["dt_ps"])
        n_steps = int(meta["n_steps"])
        quapi_lambda = float(meta.get("quapi_lambda", "0"))
    except KeyError as exc:
        raise ValueError(f"{path}: missing header line for {exc}") from None
    interior = tuple(rows["interior"][i] for i in range(1, n_steps + 1))
    table = {"splitting": splitting, "dt": dt, "n_steps": n_steps,
             "interior": interior, "self_coeff": rows["self"][0],
             "quapi_term": quapi_counter_term(quapi_lambda, dt) if quapi_lambda else 0j}
    if splitting == STRANG:
        table["eta_00"] = rows["edge_00"][0]
        table["eta_n0"] = rows["edge_N0"][0]
        table["eta_k0"] = tuple(rows["edge_k0"][k] for k in range(1, n_steps))
        table["eta_nk"] = tuple(rows["edge_Nk"][k] for k in range(1, n_steps))
    return EtaTable(**table)
