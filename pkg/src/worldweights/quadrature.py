"""Adaptive log-domain quadrature and improper-integral classification.

Integrand logarithms here reach ~1e13, so panel sums are combined with
log-sum-exp and the integrand is never exponentiated at its own scale. The
integrator keeps a partition of the interval and bisects whichever panels
show too large a coarse/fine disagreement relative to the running total,
which naturally drives refinement into the panel holding the maximum first.
Improper upper limits are never integrated numerically; they are classified
by the asymptotic slope of the log integrand instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigError, DomainError
from .logweight import LogWeight

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "GeometricProbe",
    "TailVerdict",
    "log_integrate",
    "classify_tail",
    "find_extremum",
]

LogIntegrand = Callable[[float], float]

_LN2 = math.log(2.0)
_LN4 = math.log(4.0)
# Panels are never split below this width; the peak widths that matter are
# O(1/A) ~ 1e-13 at the smallest masses, safely above the floor.
_PANEL_WIDTH_FLOOR = 1e-15
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the adaptive log-domain integrator."""

    rule: str = "simpson"
    initial_panels: int = 64
    max_refinements: int = 200
    rel_tol_log: float = 1e-9

    def __post_init__(self) -> None:
        if self.rule not in ("simpson", "trapezoid"):
            raise ConfigError(f"unknown quadrature rule {self.rule!r}")
        if self.initial_panels < 8:
            raise ConfigError("initial_panels must be at least 8")
        if self.max_refinements < 1:
            raise ConfigError("max_refinements must be positive")
        if not (self.rel_tol_log >= 1e-12):
            raise ConfigError("rel_tol_log must be at least 1e-12")


@dataclass(frozen=True)
class IntegralResult:
    """Value of a log-domain integral plus convergence diagnostics.

    ``estimates`` holds the log values of the last two refinement passes so
    an unconverged result still says how far apart they were, and
    ``log_rel_error`` is the log of the achieved relative error bound (it can
    sit above log(rel_tol_log) when refinement stopped at the width floor).
    """

    value: LogWeight
    converged: bool
    estimates: tuple[float, float]
    refinements: int
    evaluations: int
    log_rel_error: float


@dataclass(frozen=True)
class TailVerdict:
    """Convergence classification of an improper log-domain integral."""

    verdict: str
    asymptotic_slope: float


@dataclass(frozen=True)
class GeometricProbe:
    """Geometric probe grid u_start * ratio**n used for tail slopes."""

    ratio: float = 2.0
    steps: int = 40

    def __post_init__(self) -> None:
        if not (self.ratio > 1.0):
            raise ConfigError("probe ratio must exceed 1")
        if self.steps < 4:
            raise ConfigError("probe needs at least 4 steps")


def _lse(values) -> float:
    return float(logsumexp(values))


class _Panel:
    """One partition cell with five integrand samples at dyadic offsets."""

    __slots__ = ("a", "b", "fs", "coarse", "fine", "err")

    def __init__(self, a: float, b: float, fs: list[float], rule: str):
        self.a = a
        self.b = b
        self.fs = fs
        w = b - a
        f0, f1, f2, f3, f4 = fs
        if rule == "simpson":
            self.coarse = math.log(w / 6.0) + _lse([f0, f2 + _LN4, f4])
            self.fine = math.log(w / 12.0) + _lse([f0, f1 + _LN4, f2 + _LN2, f3 + _LN4, f4])
            richardson = math.log(15.0)
        else:
            self.coarse = math.log(w / 4.0) + _lse([f0, f2 + _LN2, f4])
            self.fine = math.log(w / 8.0) + _lse([f0, f1 + _LN2, f2 + _LN2, f3 + _LN2, f4])
            richardson = math.log(3.0)
        d = abs(self.fine - self.coarse)
        if d == 0.0:
            self.err = -math.inf
        else:
            # Richardson estimate of the fine value's error: the linear-scale
            # coarse/fine disagreement over 15 (Simpson) or 3 (trapezoid).
            self.err = max(self.fine, self.coarse) + math.log(-math.expm1(-d)) - richardson


class _Evaluator:
    """Wraps the integrand with a finiteness guard and an eval counter."""

    __slots__ = ("f", "count")

    def __init__(self, f: LogIntegrand):
        self.f = f
        self.count = 0

    def __call__(self, x: float) -> float:
        self.count += 1
        v = float(self.f(x))
        if not math.isfinite(v):
            raise DomainError(f"integrand is not finite at u={x!r} (got {v!r})")
        return v


def _make_panel(ev: _Evaluator, a: float, b: float, rule: str,
                f0: float | None = None, f2: float | None = None,
                f4: float | None = None) -> _Panel:
    w = b - a
    x1 = a + 0.25 * w
    x3 = a + 0.75 * w
    fs = [
        ev(a) if f0 is None else f0,
        ev(x1),
        ev(a + 0.5 * w) if f2 is None else f2,
        ev(x3),
        ev(b) if f4 is None else f4,
    ]
    return _Panel(a, b, fs, rule)


def _can_split(a: float, b: float) -> bool:
    w = b - a
    if 0.5 * w < _PANEL_WIDTH_FLOOR:
        return False
    # Children need dyadic eighths of this panel to be distinct floats.
    xs = [a + w * (k / 8.0) for k in range(9)]
    xs[-1] = b
    return all(xs[k] < xs[k + 1] for k in range(8))


def log_integrate(f_log: LogIntegrand, u_lo: float, u_hi: float,
                  spec: QuadratureSpec | None = None) -> IntegralResult:
    """log of the integral of exp(f_log) over [u_lo, u_hi].

    Starts from a uniform partition and repeatedly bisects the panels whose
    local coarse/fine disagreement exceeds an equidistributed share of the
    tolerance, until the summed disagreement is below rel_tol_log relative
    to the total. Refinement stops early when the only offending panels are
    already at the width floor or the float resolution of their position;
    the result is then the best this precision supports and log_rel_error
    records what was achieved. Only an exhausted refinement budget yields
    converged=False. The result is exact under a constant shift of f_log up
    to the rounding of the shifted samples.
    """
    spec = spec or QuadratureSpec()
    lo, hi = float(u_lo), float(u_hi)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f"integration endpoints must be finite, got [{u_lo!r}, {u_hi!r}]")
    if not lo < hi:
        raise DomainError(f"empty integration interval [{u_lo!r}, {u_hi!r}]")

    ev = _Evaluator(f_log)
    rule = spec.rule
    edges = np.linspace(lo, hi, spec.initial_panels + 1)
    panels = [_make_panel(ev, float(edges[i]), float(edges[i + 1]), rule)
              for i in range(spec.initial_panels)]

    ln_tol = math.log(spec.rel_tol_log)
    total = _lse([p.fine for p in panels])
    history = [total]
    converged = False
    rounds = 0

    while True:
        err_bound = _lse([p.err for p in panels])
        if err_bound <= total + ln_tol:
            converged = True
            break
        if rounds >= spec.max_refinements:
            break
        threshold = total + ln_tol - math.log(len(panels))
        refreshed: list[_Panel] = []
        split_any = False
        for p in panels:
            if p.err > threshold and _can_split(p.a, p.b):
                mid = p.a + 0.5 * (p.b - p.a)
                refreshed.append(_make_panel(ev, p.a, mid, rule, f0=p.fs[0], f2=p.fs[1], f4=p.fs[2]))
                refreshed.append(_make_panel(ev, mid, p.b, rule, f0=p.fs[2], f2=p.fs[3], f4=p.fs[4]))
                split_any = True
            else:
                refreshed.append(p)
        if not split_any:
            # Every offending panel sits at the width floor or at the float
            # resolution of its position: refinement is complete even though
            # the requested tolerance was not reachable. The achieved bound
            # is reported in log_rel_error.
            converged = True
            break
        panels = refreshed
        rounds += 1
        total = _lse([p.fine for p in panels])
        history.append(total)

    last_two = (history[-2], history[-1]) if len(history) >= 2 else (history[-1], history[-1])
    return IntegralResult(
        value=LogWeight(total),
        converged=converged,
        estimates=last_two,
        refinements=rounds,
        evaluations=ev.count,
        log_rel_error=err_bound - total,
    )


def classify_tail(f_log: LogIntegrand, u_start: float,
                  probe: GeometricProbe | None = None,
                  slope_margin: float = 1e-3) -> TailVerdict:
    """Classify the improper integral of exp(f_log) toward u -> infinity.

    Estimates the asymptotic slope of f_log on a geometric grid. A slope not
    below -slope_margin means the density cannot decay fast enough and the
    integral diverges; a clearly negative, stable slope means exponential
    decay and convergence; anything else is inconclusive.
    """
    probe = probe or GeometricProbe()
    if not (u_start > 0.0):
        raise DomainError(f"probe start must be positive, got {u_start!r}")
    us = u_start * probe.ratio ** np.arange(probe.steps + 1, dtype=float)
    fs = np.empty_like(us)
    for i, u in enumerate(us):
        v = float(f_log(float(u)))
        if not math.isfinite(v):
            raise DomainError(f"integrand is not finite on the probe grid at u={float(u)!r}")
        fs[i] = v
    slopes = np.diff(fs) / np.diff(us)
    s_last = float(slopes[-1])
    s_prev = float(slopes[-2])
    if s_last >= -slope_margin:
        verdict = "divergent"
    elif abs(s_last - s_prev) <= max(0.05 * abs(s_last), 1e-9):
        verdict = "convergent"
    else:
        verdict = "inconclusive"
    return TailVerdict(verdict=verdict, asymptotic_slope=s_last)


def find_extremum(f_log: LogIntegrand, u_lo: float, u_hi: float,
                  kind: str = "max") -> tuple[float, float]:
    """Locate a single interior extremum by golden-section search.

    Assumes the interval brackets one extremum of the requested kind or that
    the function is monotone, in which case the better endpoint is returned.
    """
    if kind not in ("min", "max"):
        raise DomainError(f"extremum kind must be 'min' or 'max', got {kind!r}")
    lo, hi = float(u_lo), float(u_hi)
    if not lo < hi:
        raise DomainError(f"empty search interval [{u_lo!r}, {u_hi!r}]")
    sign = 1.0 if kind == "max" else -1.0

    def g(u: float) -> float:
        v = float(f_log(u))
        if not math.isfinite(v):
            raise DomainError(f"objective is not finite at u={u!r}")
        return sign * v

    g_lo, g_hi = g(lo), g(hi)
    a, b = lo, hi
    tol = 1e-9 * (hi - lo)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d)
    while (b - a) > tol and a < c < d < b:
        if gc > gd:
            b, d, gd = d, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INVPHI * (b - a)
            gd = g(d)
    mid = 0.5 * (a + b)
    candidates = [(g(mid), mid), (g_lo, lo), (g_hi, hi)]
    best_g, best_u = max(candidates, key=lambda t: t[0])
    return best_u, sign * best_g
