"""Least-squares fitting of sampled bath response functions to
alpha(t) = sum_j p_j e^{Omega_j t}.

Two stages: a matrix-pencil (ESPRIT-style) estimate of the rates from
uniform samples with linear least squares for the amplitudes, then damped
Gauss-Newton refinement over all 4K real parameters with the decay
constraint Re Omega_j <= -eps enforced by projection. Acceptance is
monotone in the weighted cost, so the residual never increases across
refinement iterations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import lstsq, pinv, svd

from .bath_response import AlphaGrid, REL_ERROR_FLOOR, reconstruct_spectral_density
from .model import (BathTerm, ExponentialBath, PhysicalContext, SpectralDensity,
                    eval_spectral_density)

__all__ = ["FitReport", "FitInitializationError", "fit_exponential_bath",
           "fit_quality_vs_spectrum"]

_RE_OMEGA_CEILING = -1e-8  # ps^-1; hard decay constraint
_REAL_DATA_TOL = 1e-10     # relative Im level below which samples count as real
_PAIR_TOL = 1e-6           # relative mismatch allowed when closing conjugate pairs


class FitInitializationError(RuntimeError):
    """The matrix-pencil initializer produced unusable modes."""


@dataclass
class FitReport:
    bath: ExponentialBath
    rms_residual: float
    max_residual: float
    iterations: int
    converged: bool
    spectral_check: dict | None = None


def _uniform_samples(grid: AlphaGrid):
    t = grid.times_array()
    f = grid.values_array()
    if len(t) < 2:
        raise ValueError("need at least two samples")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) <= 1e-9 * dt[0]:
        return t, f
    # non-uniform grids are resampled by interpolation for the initializer
    tu = np.linspace(t[0], t[-1], len(t))
    spline = CubicSpline(t, f)
    return tu, spline(tu)


def _matrix_pencil(t: np.ndarray, f: np.ndarray, K: int) -> np.ndarray:
    """Estimate K decay rates from uniform samples via the SVD pencil."""
    M = len(f)
    L = M // 2
    if L < K + 1:
        raise FitInitializationError(f"too few samples ({M}) for K={K}")
    dt = t[1] - t[0]
    H = np.empty((M - L, L + 1), dtype=complex)
    for row in range(M - L):
        H[row, :] = f[row:row + L + 1]
    _, _, W = svd(H, full_matrices=False)
    W0 = W[:K, :L]
    W1 = W[:K, 1:L + 1]
    z = np.linalg.eigvals(pinv(W0.T) @ W1.T)
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) < 1e-300):
        raise FitInitializationError(f"degenerate pencil eigenvalues {z!r}")
    omega = np.log(z) / dt
    # projection onto the decaying half-plane
    omega = np.where(omega.real > _RE_OMEGA_CEILING,
                     omega - omega.real + _RE_OMEGA_CEILING, omega)
    return omega


def _amplitudes(t: np.ndarray, f: np.ndarray, omega: np.ndarray,
                weights: np.ndarray) -> np.ndarray:
    A = np.exp(np.outer(t, omega)) * weights[:, None]
    p, *_ = lstsq(A, f * weights, lapack_driver="gelsd")
    return p


def _pack(p, omega):
    return np.concatenate([p.real, p.imag, omega.real, omega.imag])


def _unpack(theta, K):
    return (theta[0:K] + 1j * theta[K:2 * K],
            theta[2 * K:3 * K] + 1j * theta[3 * K:4 * K])


def _project(theta, K):
    theta = theta.copy()
    re_om = theta[2 * K:3 * K]
    np.minimum(re_om, _RE_OMEGA_CEILING, out=re_om)
    return theta


def _residual_and_jacobian(theta, K, t, f, weights, with_jac=True):
    p, omega = _unpack(theta, K)
    E = np.exp(np.outer(t, omega))            # M x K
    model = E @ p
    r = (model - f) * weights
    resid = np.concatenate([r.real, r.imag])
    if not with_jac:
        return resid, None
    dp = E * weights[:, None]                 # d model / d p
    dom = (E * p[None, :]) * (t[:, None] * weights[:, None])
    jac = np.empty((2 * len(t), 4 * K))
    jac[:len(t), 0:K] = dp.real
    jac[len(t):, 0:K] = dp.imag
    jac[:len(t), K:2 * K] = -dp.imag
    jac[len(t):, K:2 * K] = dp.real
    jac[:len(t), 2 * K:3 * K] = dom.real
    jac[len(t):, 2 * K:3 * K] = dom.imag
    jac[:len(t), 3 * K:4 * K] = -dom.imag
    jac[len(t):, 3 * K:4 * K] = dom.real
    return resid, jac


def _refine(t, f, weights, p0, omega0, max_iterations):
    """Damped least squares with monotone acceptance and decay projection."""
    K = len(p0)
    theta = _project(_pack(p0, omega0), K)
    resid, jac = _residual_and_jacobian(theta, K, t, f, weights)
    cost = float(resid @ resid)
    mu = 1e-3 * float(np.max(np.sum(jac * jac, axis=0))) or 1e-3
    iterations = 0
    stalls = 0
    for _ in range(max_iterations):
        g = jac.T @ resid
        if np.max(np.abs(g)) < 1e-14 * max(1.0, cost):
            break
        JtJ = jac.T @ jac
        accepted = False
        for _ in range(60):
            try:
                delta = np.linalg.solve(JtJ + mu * np.eye(4 * K), -g)
            except np.linalg.LinAlgError:
                mu *= 4.0
                continue
            cand = _project(theta + delta, K)
            r_cand, _ = _residual_and_jacobian(cand, K, t, f, weights, with_jac=False)
            c_cand = float(r_cand @ r_cand)
            if c_cand < cost:
                improvement = (cost - c_cand) / max(cost, 1e-300)
                theta = cand
                cost = c_cand
                mu = max(mu / 3.0, 1e-14)
                accepted = True
                iterations += 1
                break
            mu *= 4.0
        if not accepted:
            break
        resid, jac = _residual_and_jacobian(theta, K, t, f, weights)
        if improvement < 1e-14:
            stalls += 1
            if stalls >= 3:
                break
        else:
            stalls = 0
    p, omega = _unpack(theta, K)
    return p, omega, iterations


def _enforce_conjugate_closure(p, omega):
    """Pair terms so {p, Omega} is closed under conjugation (real data only)."""
    K = len(p)
    used = [False] * K
    out_p = np.empty(K, dtype=complex)
    out_om = np.empty(K, dtype=complex)
    idx = 0
    for j in range(K):
        if used[j]:
            continue
        scale = max(abs(omega[j]), 1.0)
        if abs(omega[j].imag) <= _PAIR_TOL * scale:
            out_om[idx] = complex(omega[j].real, 0.0)
            out_p[idx] = complex(p[j].real, 0.0)
            used[j] = True
            idx += 1
            continue
        partner = None
        best = math.inf
        for m in range(K):
            if m == j or used[m]:
                continue
            mismatch = abs(omega[m] - omega[j].conjugate())
            if mismatch < best:
                best, partner = mismatch, m
        if partner is None or best > _PAIR_TOL * scale:
            raise FitInitializationError(
                f"real-valued samples but no conjugate partner for "
                f"Omega={omega[j]:.6g} (best mismatch {best:.3e})")
        om = 0.5 * (omega[j] + omega[partner].conjugate())
        pp = 0.5 * (p[j] + p[partner].conjugate())
        out_om[idx], out_p[idx] = om, pp
        out_om[idx + 1], out_p[idx + 1] = om.conjugate(), pp.conjugate()
        used[j] = used[partner] = True
        idx += 2
    return out_p[:idx], out_om[:idx]


def _ordered_terms(p, omega):
    """Descending |p| with conjugate pairs adjacent (positive Im first)."""
    items = list(zip(p, omega))
    used = [False] * len(items)
    groups = []
    for j, (pj, oj) in enumerate(items):
        if used[j]:
            continue
        group = [(pj, oj)]
        used[j] = True
        if abs(oj.imag) > 0:
            for m in range(j + 1, len(items)):
                if used[m]:
                    continue
                if abs(items[m][1] - oj.conjugate()) <= 1e-9 * max(abs(oj), 1.0):
                    group.append(items[m])
                    used[m] = True
                    break
        group.sort(key=lambda term: -term[1].imag)
        groups.append(group)
    groups.sort(key=lambda g: -max(abs(term[0]) for term in g))
    return [term for g in groups for term in g]


def fit_exponential_bath(samples: AlphaGrid, K: int, *,
                         max_iterations: int = 200,
                         target_rms: float | None = None) -> FitReport:
    """Fit K complex exponentials to a sampled response function.

    Residuals are weighted by 1/max(|alpha_i|, 1e-3 max|alpha|); the reported
    rms/max residuals are unweighted, on the original samples. target_rms, if
    given, is an absolute bound the fit must reach for converged=True;
    otherwise converged means the refinement stalled before the iteration
    budget was spent.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    t_raw = samples.times_array()
    f_raw = samples.values_array()
    if len(t_raw) < 4 * K:
        raise ValueError(f"need at least 4K={4 * K} samples, got {len(t_raw)}")

    t, f = _uniform_samples(samples)
    scale = np.abs(f_raw).max()
    if scale == 0.0:
        raise ValueError("all-zero samples cannot be fitted")
    weights = 1.0 / np.maximum(np.abs(f), REL_ERROR_FLOOR * scale)

    omega0 = _matrix_pencil(t, f, K)
    p0 = _amplitudes(t, f, omega0, weights)
    p, omega, iterations = _refine(t, f, weights, p0, omega0, max_iterations)

    data_is_real = np.abs(f_raw.imag).max() <= _REAL_DATA_TOL * scale
    if data_is_real:
        p, omega = _enforce_conjugate_closure(p, omega)

    terms = tuple(BathTerm(p=complex(pv), omega=complex(ov))
                  for pv, ov in _ordered_terms(p, omega))
    bath = ExponentialBath(terms=terms)

    model = np.exp(np.outer(t_raw, bath.rates())) @ bath.amplitudes()
    resid = np.abs(model - f_raw)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    if target_rms is not None:
        converged = rms <= target_rms
    else:
        converged = iterations < max_iterations
    return FitReport(bath=bath, rms_residual=rms, max_residual=float(resid.max()),
                     iterations=iterations, converged=converged)


def fit_quality_vs_spectrum(report: FitReport, spec: SpectralDensity,
                            context: PhysicalContext, w_grid) -> dict:
    """Compare the fitted bath's implied spectral density against the target.

    max_rel_err is sup-norm relative: max|J_fit - J| / max|J| over the grid,
    so an all-zero bath scores exactly 1. Fills report.spectral_check.
    """
    w = np.asarray(w_grid, dtype=float)
    j_fit = reconstruct_spectral_density(report.bath, context, w)
    j_ref = eval_spectral_density(spec, w, context)
    scale = np.abs(j_ref).max()
    if scale == 0.0:
        raise ValueError("reference spectral density vanishes on the grid")
    out = {"max_rel_err": float(np.abs(j_fit - j_ref).max() / scale)}
    report.spectral_check = out
    return out
