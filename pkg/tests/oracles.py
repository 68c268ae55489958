"""Independent oracles used by the tests.

Everything here recomputes expected values from first principles (explicit
formulas, dense fixed grids, bisection) without touching the adaptive code
paths under test.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp


def density_exponent_scale(m: float) -> float:
    return 4.5 * math.pi / (m * m)


def bare_density_log(m: float, u):
    return density_exponent_scale(m) / (u + 1.5 * np.log(u))


def bare_integrand_log(m: float, u):
    return bare_density_log(m, u) + u


def observational_integrand_log(m: float, u):
    return bare_density_log(m, u) + 2.0 * u


def bisect_exponent_root(target: float, lo: float = 1e-12, hi: float = 1e16) -> float:
    """Root of u + 1.5 ln u = target by plain bisection."""
    f = lambda u: u + 1.5 * math.log(u) - target
    assert f(lo) < 0.0 < f(hi)
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def planck_cap(m: float) -> float:
    return bisect_exponent_root(9.0 / (m * m))


def _clustered_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    """Fixed grid with geometric clustering toward both endpoints.

    The integrands under test are monotone or single-dipped, so all the mass
    sits against an endpoint; geometric spacing resolves boundary layers as
    narrow as 1e-12 of the interval length without adaptivity.
    """
    length = hi - lo
    half = n // 2
    offsets = np.geomspace(length * 1e-12, length / 2.0, half)
    left = lo + offsets
    right = hi - offsets
    nodes = np.concatenate(([lo, hi], left, right))
    nodes = np.unique(np.clip(nodes, lo, hi))
    return nodes


def fixed_grid_log_mass(f_log_vec, lo: float, hi: float, n: int = 1_000_001,
                        layout: str = "clustered") -> float:
    """log of the integral of exp(f_log_vec) by trapezoid on a fixed grid.

    ``f_log_vec`` must accept a numpy array. ``layout`` is "uniform" or
    "clustered" (geometric refinement toward both endpoints).
    """
    if layout == "uniform":
        nodes = np.linspace(lo, hi, n)
    else:
        nodes = _clustered_nodes(lo, hi, n)
    values = f_log_vec(nodes)
    gaps = np.diff(nodes)
    weights = np.empty_like(nodes)
    weights[0] = gaps[0] / 2.0
    weights[-1] = gaps[-1] / 2.0
    weights[1:-1] = (gaps[:-1] + gaps[1:]) / 2.0
    return float(logsumexp(values, b=weights))
