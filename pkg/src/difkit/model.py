"""Physical data model: thermal context, spectral density families,
exponential baths, and discretized system paths.

Units: hbar = 1, frequencies in ps^-1, times in ps, couplings such that the
bath response function has units ps^-2. Temperature enters only through
beta_hbar = hbar/(k_B T) = 7.63824 / T[K] ps.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import special
from .quadrature import QuadratureConfig, QuadratureResult, integrate_semi_infinite

__all__ = [
    "HBAR_OVER_KB_K_PS",
    "PhysicalContext",
    "LorentzianTerm",
    "SpectralDensity",
    "MultiLorentzDrude",
    "TanhLorentzDrude",
    "MeierTannor",
    "PowerLawExpCutoff",
    "debye",
    "BathTerm",
    "ExponentialBath",
    "DiscretePath",
    "eval_spectral_density",
    "odd_extension",
    "reorganization_energy",
    "DivergentIntegralError",
    "spectral_density_from_config",
    "spectral_density_to_config",
    "bath_from_json",
    "bath_to_json",
]

HBAR_OVER_KB_K_PS = 7.63824  # hbar/k_B in K*ps


class DivergentIntegralError(RuntimeError):
    """An integral required by the model failed to converge."""


@dataclass(frozen=True)
class PhysicalContext:
    """Inverse-temperature scale beta*hbar in ps; math.inf marks T -> 0.

    At T -> 0 only the quadrature paths that replace coth(beta*w/2) by
    sign(w) are available; analytic decompositions require finite beta.
    """
    beta_hbar: float

    def __post_init__(self):
        if not (self.beta_hbar > 0):
            raise ValueError(f"beta_hbar must be positive, got {self.beta_hbar!r}")

    @classmethod
    def from_temperature(cls, temperature_K: float) -> "PhysicalContext":
        if not (temperature_K > 0):
            raise ValueError("temperature must be positive")
        return cls(beta_hbar=HBAR_OVER_KB_K_PS / temperature_K)

    @property
    def is_zero_temperature(self) -> bool:
        return math.isinf(self.beta_hbar)


@dataclass(frozen=True)
class LorentzianTerm:
    """One (coupling weight, width, center) triple of a Lorentzian family."""
    lam: float
    gamma: float
    omega_tilde: float = 0.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("coupling weight lam must be >= 0")
        if not (self.gamma > 0):
            raise ValueError("width gamma must be positive")
        if self.omega_tilde < 0:
            raise ValueError("center omega_tilde must be >= 0")


class SpectralDensity:
    """Base class; concrete families implement evaluate / density_over_omega."""

    family: str = ""

    def evaluate(self, w, context: PhysicalContext | None = None):
        """J(w) for w >= 0 (evaluated literally for any finite w)."""
        raise NotImplementedError

    def density_over_omega(self, w, context: PhysicalContext | None = None):
        """J(w)/w with the removable zero at w=0 cancelled analytically."""
        raise NotImplementedError

    def reorganization_energy_analytic(self) -> float | None:
        """Closed-form int_0^inf J/w dw, or None when the family has none."""
        return None

    def frequency_scale(self) -> float:
        """Characteristic frequency for grid/series heuristics."""
        raise NotImplementedError

    def requires_context(self) -> bool:
        return False


def _lorentzian_sum(terms, w):
    out = np.zeros_like(np.asarray(w, dtype=float))
    for t in terms:
        out = out + t.lam * t.gamma / (t.gamma ** 2 + (w - t.omega_tilde) ** 2)
        out = out + t.lam * t.gamma / (t.gamma ** 2 + (w + t.omega_tilde) ** 2)
    return out


@dataclass(frozen=True)
class MultiLorentzDrude(SpectralDensity):
    """J(w) = (w/pi) sum_j [ lam_j g_j / (g_j^2 + (w -+ wtilde_j)^2) ] (both signs)."""
    terms: tuple[LorentzianTerm, ...]
    family = "multi_lorentz_drude"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("at least one Lorentzian term required")

    def evaluate(self, w, context=None):
        w = np.asarray(w, dtype=float)
        return w / math.pi * _lorentzian_sum(self.terms, w)

    def density_over_omega(self, w, context=None):
        return _lorentzian_sum(self.terms, np.asarray(w, dtype=float)) / math.pi

    def reorganization_energy_analytic(self):
        # each mirrored pair integrates to exactly lam_j regardless of g, wtilde
        return float(sum(t.lam for t in self.terms))

    def frequency_scale(self):
        return max(max(t.gamma, t.omega_tilde) for t in self.terms)


@dataclass(frozen=True)
class TanhLorentzDrude(SpectralDensity):
    """Lorentzian pairs with a tanh(beta w / 2) prefactor instead of w/pi.

    Temperature-coupled: evaluation requires a PhysicalContext.
    """
    terms: tuple[LorentzianTerm, ...]
    family = "tanh_lorentz_drude"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("at least one Lorentzian term required")

    def requires_context(self):
        return True

    def _check_context(self, context):
        if context is None:
            raise ValueError("TanhLorentzDrude evaluation requires a PhysicalContext")
        if context.is_zero_temperature:
            raise ValueError("TanhLorentzDrude is undefined at T -> 0 (tanh prefactor)")

    def evaluate(self, w, context=None):
        self._check_context(context)
        w = np.asarray(w, dtype=float)
        return np.tanh(0.5 * context.beta_hbar * w) / math.pi * _lorentzian_sum(self.terms, w)

    def density_over_omega(self, w, context=None):
        self._check_context(context)
        w = np.asarray(w, dtype=float)
        b = context.beta_hbar
        return (0.5 * b / math.pi) * special.tanh_over_x(0.5 * b * w) \
            * _lorentzian_sum(self.terms, w)

    def frequency_scale(self):
        return max(max(t.gamma, t.omega_tilde) for t in self.terms)


@dataclass(frozen=True)
class MeierTannor(SpectralDensity):
    """J(w) = (pi w / 2) sum_j lam_j / [ (g^2+(w+wt)^2)(g^2+(w-wt)^2) ]."""
    terms: tuple[LorentzianTerm, ...]
    family = "meier_tannor"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("at least one term required")

    def evaluate(self, w, context=None):
        return np.asarray(w, dtype=float) * self.density_over_omega(w)

    def density_over_omega(self, w, context=None):
        w = np.asarray(w, dtype=float)
        out = np.zeros_like(w)
        for t in self.terms:
            out = out + t.lam / ((t.gamma ** 2 + (w + t.omega_tilde) ** 2)
                                 * (t.gamma ** 2 + (w - t.omega_tilde) ** 2))
        return 0.5 * math.pi * out

    def reorganization_energy_analytic(self):
        # per-term: pi^2 lam / (8 g (g^2 + wt^2))
        return float(sum(math.pi ** 2 * t.lam
                         / (8.0 * t.gamma * (t.gamma ** 2 + t.omega_tilde ** 2))
                         for t in self.terms))

    def frequency_scale(self):
        return max(max(t.gamma, t.omega_tilde) for t in self.terms)


@dataclass(frozen=True)
class PowerLawExpCutoff(SpectralDensity):
    """J(w) = A w^s exp(-(w/w_c)^q), s > 0, w_c > 0, q > 0."""
    A: float
    s: float
    omega_c: float
    q: float = 1.0
    family = "power_exp"

    def __post_init__(self):
        if self.A < 0:
            raise ValueError("amplitude A must be >= 0")
        if not (self.s > 0 and self.omega_c > 0 and self.q > 0):
            raise ValueError("s, omega_c, q must be positive")

    def evaluate(self, w, context=None):
        w = np.asarray(w, dtype=float)
        return self.A * np.abs(w) ** self.s * np.exp(-np.abs(w / self.omega_c) ** self.q)

    def density_over_omega(self, w, context=None):
        w = np.asarray(w, dtype=float)
        with np.errstate(divide="ignore"):
            out = self.A * np.abs(w) ** (self.s - 1.0) \
                * np.exp(-np.abs(w / self.omega_c) ** self.q)
        if self.s > 1.0:
            out = np.where(w == 0.0, 0.0, out)
        elif self.s == 1.0:
            out = np.where(w == 0.0, self.A, out)
        return out

    def reorganization_energy_analytic(self):
        # int_0^inf A w^{s-1} e^{-(w/w_c)^q} dw = (A/q) w_c^s Gamma(s/q)
        return float(self.A / self.q * self.omega_c ** self.s * math.gamma(self.s / self.q))

    def frequency_scale(self):
        return self.omega_c


def debye(lam: float, gamma: float) -> MultiLorentzDrude:
    """Single-peak Debye density J = (w/pi) lam g / (g^2 + w^2).

    The multi-Lorentz-Drude row evaluates its mirrored pair twice at
    omega_tilde = 0, so the coupling is halved here to recover the
    single-Lorentzian form exactly.
    """
    return MultiLorentzDrude(terms=(LorentzianTerm(lam=0.5 * lam, gamma=gamma),))


# --------------------------------------------------------------------------
# Operations on spectral densities
# --------------------------------------------------------------------------

def eval_spectral_density(spec: SpectralDensity, w, context: PhysicalContext | None = None):
    """J(w) per the family formula, evaluated literally."""
    w_arr = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w_arr)):
        raise ValueError("non-finite frequency")
    out = spec.evaluate(w_arr, context)
    return float(out) if np.ndim(w) == 0 else np.asarray(out)


def odd_extension(spec: SpectralDensity, context: PhysicalContext | None, w):
    """J(w) for w >= 0 and -J(-w) for w < 0."""
    w_arr = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w_arr)):
        raise ValueError("non-finite frequency")
    out = np.sign(w_arr) * spec.evaluate(np.abs(w_arr), context)
    return float(out) if np.ndim(w) == 0 else out


def reorganization_energy(spec: SpectralDensity,
                          context: PhysicalContext | None = None,
                          *,
                          method: str = "auto",
                          quad_cfg: QuadratureConfig | None = None) -> float:
    """Reorganization energy lambda = int_0^inf J(w)/w dw.

    method='auto' returns the closed form when the family has one and
    integrates numerically otherwise; 'analytic' and 'quadrature' force a
    path. Divergence is reported as DivergentIntegralError, never truncated.
    """
    if method not in ("auto", "analytic", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    analytic = spec.reorganization_energy_analytic()
    if method == "analytic":
        if analytic is None:
            raise ValueError(f"{spec.family} has no closed-form reorganization energy")
        return analytic
    if method == "auto" and analytic is not None:
        return analytic

    cfg = quad_cfg or QuadratureConfig(rel_tol=1e-12, abs_tol=1e-15)
    r = integrate_semi_infinite(lambda w: spec.density_over_omega(w, context), 0.0, cfg)
    if not r.converged:
        raise DivergentIntegralError(
            f"reorganization-energy integral did not converge for {spec.family} "
            f"(error estimate {r.error_estimate:.3e})")
    return float(r.value.real)


# --------------------------------------------------------------------------
# Exponential bath representation alpha(t) = sum_j p_j exp(Omega_j t)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BathTerm:
    p: complex
    omega: complex

    def __post_init__(self):
        for v in (self.p, self.omega):
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError("bath term entries must be finite")
        if not (self.omega.real < 0.0):
            raise ValueError(f"decaying rate required: Re Omega < 0, got {self.omega!r}")


@dataclass(frozen=True)
class ExponentialBath:
    """alpha(t) = sum_j p_j e^{Omega_j t} on t >= 0, all Re Omega_j < 0."""
    terms: tuple[BathTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("at least one bath term required")

    @property
    def K(self) -> int:
        return len(self.terms)

    def amplitudes(self) -> np.ndarray:
        return np.array([t.p for t in self.terms], dtype=complex)

    def rates(self) -> np.ndarray:
        return np.array([t.omega for t in self.terms], dtype=complex)

    def imaginary_imbalance(self) -> float:
        """|Im sum p| / |sum p|; small when alpha(0+) is real.

        Lorentz-Drude-type densities (1/w tails) carry a genuine nonzero
        Im sum p = -sum(lam*gamma)/pi, so this is a query, not a validator.
        """
        s = complex(np.sum(self.amplitudes()))
        return abs(s.imag) / abs(s) if s != 0 else 0.0


@dataclass(frozen=True)
class DiscretePath:
    """Piecewise-constant forward/backward system coordinates s_k^+ / s_k^-."""
    s_plus: tuple[float, ...]
    s_minus: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "s_plus", tuple(float(v) for v in self.s_plus))
        object.__setattr__(self, "s_minus", tuple(float(v) for v in self.s_minus))
        if len(self.s_plus) != len(self.s_minus):
            raise ValueError("s_plus and s_minus must have identical length")
        if len(self.s_plus) < 1:
            raise ValueError("paths need at least one point")


# --------------------------------------------------------------------------
# JSON configuration (CLI surface)
# --------------------------------------------------------------------------

_LORENTZIAN_FAMILIES = {
    "multi_lorentz_drude": MultiLorentzDrude,
    "tanh_lorentz_drude": TanhLorentzDrude,
    "meier_tannor": MeierTannor,
}
_TERM_KEYS = {"lambda", "gamma", "omega_tilde"}
_TOP_KEYS = {"family", "terms", "A", "s", "omega_c", "q",
             "temperature_K", "beta_hbar_ps"}


def spectral_density_from_config(data: dict) -> tuple[SpectralDensity, PhysicalContext | None]:
    """Parse the JSON spectral-density config; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "temperature_K" in data and "beta_hbar_ps" in data:
        raise ValueError("give temperature_K or beta_hbar_ps, not both")

    context = None
    if "temperature_K" in data:
        context = PhysicalContext.from_temperature(float(data["temperature_K"]))
    elif "beta_hbar_ps" in data:
        context = PhysicalContext(beta_hbar=float(data["beta_hbar_ps"]))

    family = data.get("family")
    if family in _LORENTZIAN_FAMILIES:
        raw_terms = data.get("terms")
        if not raw_terms:
            raise ValueError(f"family {family!r} requires a non-empty 'terms' list")
        terms = []
        for i, t in enumerate(raw_terms):
            unknown = set(t) - _TERM_KEYS
            if unknown:
                raise ValueError(f"unknown keys in terms[{i}]: {sorted(unknown)}")
            if "lambda" not in t or "gamma" not in t:
                raise ValueError(f"terms[{i}] needs 'lambda' and 'gamma'")
            terms.append(LorentzianTerm(lam=float(t["lambda"]),
                                        gamma=float(t["gamma"]),
                                        omega_tilde=float(t.get("omega_tilde", 0.0))))
        spec = _LORENTZIAN_FAMILIES[family](terms=tuple(terms))
    elif family == "power_exp":
        for key in ("A", "s", "omega_c"):
            if key not in data:
                raise ValueError(f"family 'power_exp' requires {key!r}")
        if "terms" in data:
            raise ValueError("family 'power_exp' takes no 'terms'")
        spec = PowerLawExpCutoff(A=float(data["A"]), s=float(data["s"]),
                                 omega_c=float(data["omega_c"]),
                                 q=float(data.get("q", 1.0)))
    else:
        raise ValueError(f"unknown family {family!r}")
    return spec, context


def spectral_density_to_config(spec: SpectralDensity,
                               context: PhysicalContext | None = None) -> dict:
    if isinstance(spec, PowerLawExpCutoff):
        out = {"family": spec.family, "A": spec.A, "s": spec.s,
               "omega_c": spec.omega_c, "q": spec.q}
    else:
        out = {"family": spec.family,
               "terms": [{"lambda": t.lam, "gamma": t.gamma, "omega_tilde": t.omega_tilde}
                         for t in spec.terms]}
    if context is not None:
        out["beta_hbar_ps"] = context.beta_hbar
    return out


def bath_to_json(bath: ExponentialBath, context: PhysicalContext | None = None) -> dict:
    out = {"terms": [{"p": {"re": t.p.real, "im": t.p.imag},
                      "omega": {"re": t.omega.real, "im": t.omega.imag}}
                     for t in bath.terms]}
    if context is not None:
        out["beta_hbar_ps"] = context.beta_hbar
    return out


def bath_from_json(data: dict) -> tuple[ExponentialBath, PhysicalContext | None]:
    unknown = set(data) - {"terms", "beta_hbar_ps"}
    if unknown:
        raise ValueError(f"unknown bath keys: {sorted(unknown)}")
    raw = data.get("terms")
    if not raw:
        raise ValueError("bath JSON needs a non-empty 'terms' list")
    terms = []
    for i, t in enumerate(raw):
        unknown = set(t) - {"p", "omega"}
        if unknown:
            raise ValueError(f"unknown keys in terms[{i}]: {sorted(unknown)}")
        terms.append(BathTerm(p=complex(t["p"]["re"], t["p"]["im"]),
                              omega=complex(t["omega"]["re"], t["omega"]["im"])))
    context = None
    if "beta_hbar_ps" in data:
        context = PhysicalContext(beta_hbar=float(data["beta_hbar_ps"]))
    return ExponentialBath(terms=tuple(terms)), context
