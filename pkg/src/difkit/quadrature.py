"""Adaptive quadrature engine.

Three entry points: finite intervals, semi-infinite tails (with optional
oscillation-aware segmentation and Euler acceleration), and iterated double
integrals over rectangles or triangles.

Integrands receive a numpy array of abscissae and must return an array of the
same shape (real or complex). The engine is deterministic: fixed Gauss-Kronrod
panels, worst-first bisection with a stable tie-break, no randomized rules.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np

__all__ = [
    "QuadratureConfig",
    "QuadratureResult",
    "QuadratureConvergenceError",
    "Rectangle",
    "Triangle",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_double",
]


class QuadratureConvergenceError(RuntimeError):
    """An integration did not reach the requested tolerance."""

# 15-point Kronrod extension of 7-point Gauss (nodes/weights on [-1, 1]).
_XGK = np.array([
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
])
_WGK = np.array([
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278,
])
_WG = np.array([
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694,
])

_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))          # ascending, 15
_WEIGHTS_K = np.concatenate((_WGK[:-1], _WGK[::-1]))
_GAUSS_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_WEIGHTS_G = np.array([_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]])

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_evaluations: int = 10 ** 6
    oscillation_period_hint: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_evaluations < 15:
            raise ValueError("max_evaluations must be >= 15")
        if self.oscillation_period_hint is not None and self.oscillation_period_hint <= 0:
            raise ValueError("oscillation_period_hint must be positive")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class Rectangle:
    """Region [a1, b1] x [a2, b2] for the outer (t') and inner (t'') variable."""
    a1: float
    b1: float
    a2: float
    b2: float


@dataclass(frozen=True)
class Triangle:
    """Region a <= t'' <= t' <= b."""
    a: float
    b: float


Region = Union[Rectangle, Triangle]


def _panel(f, a: float, b: float):
    """One Gauss-Kronrod panel; returns (k15, error, 15)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    xs = mid + half * _NODES
    ys = np.asarray(f(xs))
    if ys.shape != xs.shape:
        ys = np.broadcast_to(ys, xs.shape)
    ys = ys.astype(complex, copy=False)
    k15 = half * complex(np.dot(_WEIGHTS_K, ys))
    g7 = half * complex(np.dot(_WEIGHTS_G, ys[_GAUSS_IDX]))
    resabs = abs(half) * float(np.dot(_WEIGHTS_K, np.abs(ys)))
    err = max(abs(k15 - g7), 50.0 * _EPS * resabs)
    return k15, err


def _tolerance(cfg: QuadratureConfig, value: complex) -> float:
    return max(cfg.abs_tol, cfg.rel_tol * abs(value))


def integrate_finite(f: Callable, a: float, b: float,
                     cfg: QuadratureConfig | None = None) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integration of f over [a, b].

    Non-convergence within the evaluation budget returns the best estimate
    with converged=False; the caller decides what to do with it.
    """
    cfg = cfg or QuadratureConfig()
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("finite bounds required")
    if a > b:
        raise ValueError("a <= b required")
    if a == b:
        return QuadratureResult(0.0 + 0.0j, 0.0, 0, True)

    value, err = _panel(f, a, b)
    evaluations = 15
    counter = 0
    heap = [(-err, counter, a, b, value, err)]
    total_value, total_err = value, err
    stuck_err = 0.0

    while total_err > _tolerance(cfg, total_value) and heap:
        if evaluations + 30 > cfg.max_evaluations:
            break
        neg_err, _, ia, ib, ival, ierr = heapq.heappop(heap)
        mid = 0.5 * (ia + ib)
        if mid - ia <= 4.0 * np.spacing(max(abs(ia), abs(ib))):
            # cannot subdivide further; keep its error as a floor
            stuck_err += ierr
            total_err = stuck_err + sum(h[5] for h in heap)
            continue
        v1, e1 = _panel(f, ia, mid)
        v2, e2 = _panel(f, mid, ib)
        evaluations += 30
        total_value += (v1 + v2) - ival
        total_err += (e1 + e2) - ierr
        counter += 1
        heapq.heappush(heap, (-e1, counter, ia, mid, v1, e1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, mid, ib, v2, e2))

    converged = total_err <= _tolerance(cfg, total_value)
    return QuadratureResult(total_value, float(total_err), evaluations, converged)


def _euler_accelerate(partials) -> complex:
    """Iterated-mean (Euler-style) limit estimate of a partial-sum sequence."""
    t = np.asarray(partials, dtype=complex)
    while t.size > 1:
        t = 0.5 * (t[:-1] + t[1:])
    return complex(t[0])


def _accelerate(partials) -> complex:
    """Limit estimate of a partial-sum sequence via the Wynn epsilon table.

    Far stronger than iterated means on alternating tails with slowly
    decaying envelopes; falls back to the plain iterated mean when the table
    degenerates (vanishing differences).
    """
    p = [complex(v) for v in partials[-24:]]
    if len(p) < 3:
        return p[-1]
    scale = max(abs(v) for v in p) or 1.0
    prev = [0.0 + 0.0j] * (len(p) + 1)
    cur = p
    best = cur[-1]
    col = 0
    while len(cur) > 1:
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            if abs(d) < 1e-290 * scale:
                return best
            nxt.append(prev[i + 1] + 1.0 / d)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0:
            best = cur[-1]
    return best


_MAX_SEGMENTS = 8192
_GROWTH_LIMIT = 8


_UNIFORM_PHASE = 64  # hinted segments before switching to geometric widths


def integrate_semi_infinite(f: Callable, a: float,
                            cfg: QuadratureConfig | None = None) -> QuadratureResult:
    """Integrate f over [a, inf).

    The half-line is split into segments. With cfg.oscillation_period_hint
    set, the first segments have constant width of half the oscillation
    period, so the partial sums oscillate around the limit and Euler
    acceleration applies; after that (and always, without a hint) widths
    double geometrically and a ratio-based tail bound finishes algebraic and
    exponential tails. Segment panel errors combine in quadrature. Sustained
    growth of the segment magnitudes is reported as divergence
    (converged=False, infinite error estimate).
    """
    cfg = cfg or QuadratureConfig()
    if not math.isfinite(a):
        raise ValueError("finite lower bound required")

    hint = cfg.oscillation_period_hint
    seg_cfg = replace(cfg, rel_tol=max(cfg.rel_tol * 0.1, 1e-15),
                      abs_tol=cfg.abs_tol * 0.1,
                      oscillation_period_hint=None)

    partial = 0.0 + 0.0j
    partials: list[complex] = []
    seg_vals: list[complex] = []
    seg_mags: list[float] = []
    euler_history: list[complex] = []
    quad_err_sq = 0.0
    evaluations = 0
    x0 = a
    width = 0.5 * hint if hint is not None else 1.0
    growth = 0
    all_converged = True

    for k in range(_MAX_SEGMENTS):
        uniform_phase = hint is not None and k < _UNIFORM_PHASE
        x1 = x0 + width
        if k == 0 and hint is not None:
            # force-resolve the opening segment: a wide hinted segment could
            # otherwise place every panel node outside a compactly supported
            # integrand and silently return zero
            sub = np.linspace(x0, x1, 9)
            parts = [integrate_finite(f, float(lo), float(hi), seg_cfg)
                     for lo, hi in zip(sub[:-1], sub[1:])]
            r = QuadratureResult(sum(p.value for p in parts),
                                 sum(p.error_estimate for p in parts),
                                 sum(p.evaluations for p in parts),
                                 all(p.converged for p in parts))
        else:
            r = integrate_finite(f, x0, x1, seg_cfg)
        evaluations += r.evaluations
        all_converged = all_converged and r.converged
        quad_err_sq += r.error_estimate ** 2
        quad_err = math.sqrt(quad_err_sq)
        partial += r.value
        partials.append(partial)
        seg_vals.append(r.value)
        seg_mags.append(abs(r.value))

        tol = _tolerance(cfg, partial)

        # divergence: sustained growth of segment magnitudes
        if k >= 1 and seg_mags[-1] > seg_mags[-2] and seg_mags[-1] > tol:
            growth += 1
            if growth >= _GROWTH_LIMIT:
                return QuadratureResult(partial, math.inf, evaluations, False)
        else:
            growth = 0

        # plain tail bound for decaying segment sums
        if k >= 2 and seg_mags[-1] <= 0.25 * tol and seg_mags[-2] <= 0.25 * tol:
            ratio = seg_mags[-1] / seg_mags[-2] if seg_mags[-2] > 0 else 0.0
            tail = seg_mags[-1] * (ratio / (1.0 - ratio) if ratio < 0.9 else 3.0)
            err = quad_err + tail + seg_mags[-1]
            if err <= tol:
                return QuadratureResult(partial, err, evaluations,
                                        all_converged and err <= _tolerance(cfg, partial))

        # accelerated estimate for oscillating tails (alternation only holds
        # while the segment width is half the oscillation period). A
        # non-oscillatory tail component biases the accelerated estimate by
        # ~c/x^a; consecutive Euler estimates then drift like c*a/x^{a+1}, so
        # k/2 times the drift over four segments bounds the bias for a >= 1.
        if uniform_phase and k >= 7:
            window = partials[-24:]
            est = _accelerate(window)
            est_prev = _accelerate(window[:-1])
            euler_history.append(est)
            err = 2.0 * abs(est - est_prev) + quad_err
            if len(euler_history) >= 5:
                err += 0.5 * k * abs(est - euler_history[-5])
            if err <= _tolerance(cfg, est):
                return QuadratureResult(est, err, evaluations, all_converged)

        # geometric tail extrapolation in the doubling phase. Under width
        # doubling an algebraic tail c/x^a gives segment values in exact
        # geometric progression, so summing the progression is exact up to
        # the observed ratio drift, which bounds the model error.
        if (not uniform_phase and k >= 3
                and seg_mags[-1] > 0 and seg_mags[-2] > 0 and seg_mags[-3] > 0):
            rho_prev = seg_vals[-2] / seg_vals[-3]
            rho = seg_vals[-1] / seg_vals[-2]
            drift = abs(rho - rho_prev)
            if abs(rho) < 0.8 and drift <= 0.25 * max(abs(rho), 0.02):
                tail = seg_vals[-1] * rho / (1.0 - rho)
                est = partial + tail
                err = (4.0 * seg_mags[-1] * drift / (1.0 - abs(rho)) ** 2
                       + quad_err)
                if err <= _tolerance(cfg, est):
                    return QuadratureResult(est, err, evaluations, all_converged)

        if evaluations >= cfg.max_evaluations:
            break
        x0 = x1
        if not uniform_phase:
            width = min(width * 2.0, 1e9)

    est = _accelerate(partials) if len(partials) >= 8 else partial
    err = quad_err + (abs(est - partial) if len(partials) >= 8 else math.inf)
    return QuadratureResult(est, err, evaluations, False)


def integrate_double(g: Callable, region: Region,
                     cfg: QuadratureConfig | None = None) -> QuadratureResult:
    """Iterated adaptive integration of g(t', t'') over a rectangle or triangle.

    g receives a scalar t' and an array of t'' values. Triangle regions use
    the inner bounds [a, t'].
    """
    cfg = cfg or QuadratureConfig()
    if isinstance(region, Rectangle):
        out_lo, out_hi = region.a1, region.b1
        inner_bounds = lambda tp: (region.a2, region.b2)  # noqa: E731
    elif isinstance(region, Triangle):
        out_lo, out_hi = region.a, region.b
        inner_bounds = lambda tp: (region.a, tp)  # noqa: E731
    else:
        raise TypeError(f"unsupported region {region!r}")

    width = out_hi - out_lo
    inner_cfg = replace(cfg,
                        rel_tol=max(cfg.rel_tol * 0.05, 1e-15),
                        abs_tol=max(cfg.abs_tol * 0.05 / max(width, 1.0), 1e-300),
                        oscillation_period_hint=None)
    state = {"max_err": 0.0, "evals": 0, "ok": True}

    def outer_integrand(tps):
        vals = np.empty(tps.shape, dtype=complex)
        for i, tp in enumerate(tps):
            lo, hi = inner_bounds(float(tp))
            r = integrate_finite(lambda ts: g(float(tp), ts), lo, hi, inner_cfg)
            state["max_err"] = max(state["max_err"], r.error_estimate)
            state["evals"] += r.evaluations
            state["ok"] = state["ok"] and r.converged
            vals[i] = r.value
        return vals

    outer = integrate_finite(outer_integrand, out_lo, out_hi, cfg)
    err = outer.error_estimate + state["max_err"] * abs(width)
    converged = (outer.converged and state["ok"]
                 and err <= max(cfg.abs_tol, cfg.rel_tol * max(1.0, abs(outer.value))))
    return QuadratureResult(outer.value, float(err), state["evals"] + outer.evaluations,
                            converged)
