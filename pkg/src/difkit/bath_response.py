"""Bath response function alpha(t) by every available route, the rational
back-transform to the spectral density, and grid comparison metrics.

Routes: the exponential sum (analytic), and three numerically distinct
quadrature representations of the same thermal transform of J(w):

* "coth":  (1/pi) int_0^inf J(w) [coth(beta w/2) cos(wt) - i sin(wt)] dw
* "sinh":  (1/2pi) int over both signs of J_odd(w) e^{beta w/2}/sinh(beta w/2) e^{-iwt}
* "bose":  (1/pi) int over both signs of J_odd(w) / (1 - e^{-beta w}) e^{-iwt}

The full-line routes are folded onto w in (0, inf) using the odd extension.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import special
from .model import ExponentialBath, PhysicalContext, SpectralDensity
from .quadrature import (QuadratureConfig, QuadratureConvergenceError,
                         integrate_semi_infinite)

__all__ = [
    "AlphaGrid",
    "alpha_exponential",
    "alpha_exponential_grid",
    "alpha_quadrature",
    "alpha_quadrature_grid",
    "reconstruct_spectral_density",
    "compare_alpha",
    "write_alpha_csv",
    "read_alpha_csv",
    "QUAD_ROUTES",
]

QUAD_ROUTES = ("coth", "sinh", "bose")

REL_ERROR_FLOOR = 1e-3  # fraction of max|alpha| guarding relative errors


@dataclass(frozen=True)
class AlphaGrid:
    """Sampled bath response on a strictly ascending time grid (ps, ps^-2)."""
    times: tuple[float, ...]
    values: tuple[complex, ...]
    provenance: str = "quadrature"  # analytic | quadrature | fitted

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        values = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if len(times) != len(values):
            raise ValueError("times and values must have equal length")
        if any(t < 0 for t in times):
            raise ValueError("times must be >= 0")
        if any(t1 >= t2 for t1, t2 in zip(times, times[1:])):
            raise ValueError("times must be strictly ascending")
        if self.provenance not in ("analytic", "quadrature", "fitted"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def times_array(self) -> np.ndarray:
        return np.asarray(self.times, dtype=float)

    def values_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=complex)


def alpha_exponential(bath: ExponentialBath, t: float) -> complex:
    """sum_j p_j e^{Omega_j t}, accumulated in descending |p_j| order."""
    if t < 0:
        raise ValueError("the exponential form is defined on t >= 0")
    p = bath.amplitudes()
    om = bath.rates()
    order = np.argsort(-np.abs(p), kind="stable")
    terms = p[order] * np.exp(om[order] * t)
    return complex(np.add.reduce(terms))


def alpha_exponential_grid(bath: ExponentialBath, times) -> AlphaGrid:
    times = np.asarray(times, dtype=float)
    p = bath.amplitudes()
    om = bath.rates()
    order = np.argsort(-np.abs(p), kind="stable")
    vals = np.exp(np.outer(times, om[order])) @ p[order]
    return AlphaGrid(times=tuple(times), values=tuple(vals), provenance="analytic")


def _thermal_weight_pair(w: np.ndarray, beta: float, route: str):
    """(f_plus, f_minus) with f_pm = w * (thermal factor at +-w), finite at 0."""
    if route == "bose":
        nb = special.omega_bose(w, beta)
        return nb + w, nb
    # route == "sinh": w e^{+-x} / sinh(x), x = beta w / 2
    if math.isinf(beta):
        return 2.0 * w, np.zeros_like(w)
    x = 0.5 * beta * w
    small = np.abs(x) < special.SERIES_SWITCH
    f_plus = np.empty_like(w)
    f_minus = np.empty_like(w)
    xs, ws = x[small], w[small]
    # e^{+-x}/sinh(x) = coth(x) +- 1
    series_coth = 1.0 / xs + xs / 3.0 - xs ** 3 / 45.0 if xs.size else xs
    f_plus[small] = ws * (series_coth + 1.0)
    f_minus[small] = ws * (series_coth - 1.0)
    xl, wl = x[~small], w[~small]
    with np.errstate(over="ignore"):
        em = np.exp(-2.0 * xl)
    f_plus[~small] = 2.0 * wl / (1.0 - em)
    f_minus[~small] = 2.0 * wl * em / (1.0 - em)
    return f_plus, f_minus


def alpha_quadrature(spec: SpectralDensity, context: PhysicalContext, t: float,
                     route: str = "coth",
                     quad_cfg: QuadratureConfig | None = None) -> complex:
    """Numerically integrate the selected representation of alpha(t).

    t may be negative for the "coth" route (hermiticity checks); the folded
    full-line routes accept any real t as well.
    """
    if route not in QUAD_ROUTES:
        raise ValueError(f"route must be one of {QUAD_ROUTES}, got {route!r}")
    beta = context.beta_hbar
    if context.is_zero_temperature and route != "coth":
        raise ValueError("T -> 0 supports only the 'coth' route "
                         "(coth replaced by sign)")
    cfg = quad_cfg or QuadratureConfig(rel_tol=1e-10, abs_tol=1e-13)
    if cfg.oscillation_period_hint is None and t != 0.0:
        # hint only when the e^{-iwt} period is faster than the integrand's
        # own support; wider fixed segments would under-sample the envelope
        period = 2.0 * math.pi / abs(t)
        if period <= 256.0 * spec.frequency_scale():
            cfg = QuadratureConfig(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                                   max_evaluations=cfg.max_evaluations,
                                   oscillation_period_hint=period)

    if route == "coth":
        def integrand(w):
            jw = spec.density_over_omega(w, context)
            wc = special.omega_coth(w, beta)
            return (jw / math.pi) * (wc * np.cos(w * t) - 1j * w * np.sin(w * t))
    else:
        pref = 0.5 / math.pi if route == "sinh" else 1.0 / math.pi

        def integrand(w):
            jw = spec.density_over_omega(w, context)
            f_plus, f_minus = _thermal_weight_pair(w, beta, route)
            phase = np.exp(-1j * w * t)
            return pref * jw * (f_plus * phase + f_minus / phase)

    r = integrate_semi_infinite(integrand, 0.0, cfg)
    if not r.converged:
        raise QuadratureConvergenceError(
            f"alpha quadrature (route={route}, t={t}) did not converge; "
            f"error estimate {r.error_estimate:.3e}")
    return complex(r.value)


def alpha_quadrature_grid(spec: SpectralDensity, context: PhysicalContext, times,
                          route: str = "coth",
                          quad_cfg: QuadratureConfig | None = None) -> AlphaGrid:
    vals = [alpha_quadrature(spec, context, float(t), route, quad_cfg) for t in times]
    return AlphaGrid(times=tuple(float(t) for t in times), values=tuple(vals),
                     provenance="quadrature")


def reconstruct_spectral_density(bath: ExponentialBath, context: PhysicalContext, w):
    """Spectral density implied by an exponential bath:

        J(w) = (1 - e^{-beta w}) * Re sum_j i p_j / (w - i Omega_j)

    finite and odd-consistent at w = 0 through the expm1 evaluation.
    """
    if context.is_zero_temperature:
        raise ValueError("reconstruction requires finite beta")
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    acc = np.zeros(w_arr.shape, dtype=complex)
    for term in bath.terms:
        den = w_arr - 1j * term.omega
        if np.any(den == 0.0):
            raise ZeroDivisionError(f"evaluation point on a bath pole: omega={term.omega}")
        acc += 1j * term.p / den
    out = -np.expm1(-context.beta_hbar * w_arr) * acc.real
    return float(out[0]) if np.ndim(w) == 0 else out


def compare_alpha(a: AlphaGrid, b: AlphaGrid) -> dict:
    """Error metrics of grid a against reference b on identical time grids.

    Relative errors are guarded by max(|b_i|, 1e-3 * max|b|) so zero
    crossings of alpha do not blow up the metric.
    """
    if a.times != b.times:
        raise ValueError("time grids differ")
    av = a.values_array()
    bv = b.values_array()
    diff = np.abs(av - bv)
    scale = np.abs(bv)
    floor = REL_ERROR_FLOOR * scale.max() if scale.max() > 0 else 1.0
    rel = diff / np.maximum(scale, floor)
    return {
        "rms_rel": float(np.sqrt(np.mean(rel ** 2))),
        "max_rel": float(rel.max()),
        "max_abs": float(diff.max()),
    }


def write_alpha_csv(path, grid: AlphaGrid) -> None:
    lines = [f"# provenance={grid.provenance}", "t_ps,re_alpha,im_alpha"]
    for t, v in zip(grid.times, grid.values):
        lines.append(f"{t:.17g},{v.real:.17g},{v.imag:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_alpha_csv(path) -> AlphaGrid:
    provenance = "quadrature"
    times: list[float] = []
    values: list[complex] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "provenance=" in line:
                    provenance = line.split("provenance=", 1)[1].strip()
                continue
            if line.startswith("t_ps"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns, got {len(parts)}")
            try:
                t, re, im = (float(p) for p in parts)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            times.append(t)
            values.append(complex(re, im))
    return AlphaGrid(times=tuple(times), values=tuple(values), provenance=provenance)
