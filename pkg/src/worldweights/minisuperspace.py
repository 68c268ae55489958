"""Tree-level minisuperspace measure density over universe size.

Everything is computed in the log coordinate u = ln(m^3 V), where V is the
spatial volume at the end of inflation in Planck units and m the inflaton
mass. The density exponent is A / (u + 1.5 ln u) with A = 4.5 pi / m^2, with
the opposite sign for the tunneling variant. V itself can reach exp(1e13),
so V is never formed: the Jacobian of the change of variable is carried
additively in log space by the integrand helpers.

Normalization constants dropped here (powers of m) are common to the bare
and observational integrands of a given model, so every dominance ratio and
region fraction is unaffected; absolute log masses are meaningful only up to
one model-wide additive constant.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import ConfigError, DomainError

__all__ = [
    "KIND_NO_BOUNDARY",
    "KIND_TUNNELING",
    "KINDS",
    "WEIGHT_BARE",
    "WEIGHT_OBSERVATIONAL",
    "WEIGHTINGS",
    "CapRule",
    "NoBoundaryModel",
    "amplitude_exponent",
    "u_floor",
    "log_bare_density",
    "log_integrand",
    "phi0_to_u",
    "nucleation_radius",
    "cap_u",
    "model_from_dict",
]

KIND_NO_BOUNDARY = "no-boundary"
KIND_TUNNELING = "tunneling"
KINDS = (KIND_NO_BOUNDARY, KIND_TUNNELING)

WEIGHT_BARE = "bare"
WEIGHT_OBSERVATIONAL = "observational"
WEIGHTINGS = (WEIGHT_BARE, WEIGHT_OBSERVATIONAL)

ArrayLike = Union[float, np.ndarray]


def amplitude_exponent(m: float) -> float:
    """The large exponent scale A = 4.5 pi / m^2 for inflaton mass m."""
    m = float(m)
    if not (m > 0.0) or not math.isfinite(m):
        raise DomainError(f"inflaton mass must be positive and finite, got {m!r}")
    return 4.5 * math.pi / (m * m)


def _exponent_denominator(u: ArrayLike) -> ArrayLike:
    # d(u) = u + 1.5 ln u, the denominator of the density exponent. Strictly
    # increasing for u > 0, with a single root in (0, 1).
    return u + 1.5 * np.log(u)


@functools.lru_cache(maxsize=1)
def u_floor() -> float:
    """Root of u + 1.5 ln u on (0, 1): the validity floor of the density.

    Below this point the exponent changes sign and the tree-level formula
    does not apply. Mass-independent; found by bisection to 1e-12.
    """
    lo, hi = 1e-12, 1.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if _exponent_denominator(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CapRule:
    """Upper cutoff rule for u: none, the Planck-density bound, or a fixed u.

    The Planck rule caps inflation where the initial potential would reach
    the Planck density, the point past which the tree-level density cannot be
    trusted at all.
    """

    kind: str
    fixed_u: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("none", "planck", "fixed"):
            raise ConfigError(f"unknown cap kind {self.kind!r}")
        if self.kind == "fixed":
            if self.fixed_u is None or not math.isfinite(float(self.fixed_u)):
                raise ConfigError("fixed cap requires a finite fixed_u")
            object.__setattr__(self, "fixed_u", float(self.fixed_u))
        elif self.fixed_u is not None:
            raise ConfigError(f"cap kind {self.kind!r} takes no fixed_u")

    @classmethod
    def none(cls) -> "CapRule":
        return cls("none")

    @classmethod
    def planck(cls) -> "CapRule":
        return cls("planck")

    @classmethod
    def fixed(cls, u: float) -> "CapRule":
        return cls("fixed", float(u))

    @classmethod
    def parse(cls, text: str) -> "CapRule":
        """Parse "none", "planck", or a number (a fixed cap in u)."""
        if text == "none":
            return cls.none()
        if text == "planck":
            return cls.planck()
        try:
            return cls.fixed(float(text))
        except ValueError as exc:
            raise ConfigError(f"cap must be 'planck', 'none', or a number, got {text!r}") from exc

    def describe(self) -> str:
        return self.kind if self.kind != "fixed" else f"fixed({self.fixed_u:g})"


@dataclass(frozen=True)
class NoBoundaryModel:
    """Parameters of the minisuperspace density.

    Attributes:
        m: inflaton mass in Planck units, in (0, 1).
        u_cut: lower cutoff in u = ln(m^3 V); below order unity there is no
            inflationary solution, so the default is 1.0 and the exact value
            is a configuration knob.
        cap: upper cutoff rule (default: Planck density).
        kind: "no-boundary" (enhanced small universes) or "tunneling"
            (suppressed small universes, the sign-flipped variant).
    """

    m: float
    u_cut: float = 1.0
    cap: CapRule = CapRule.planck()
    kind: str = KIND_NO_BOUNDARY

    def __post_init__(self) -> None:
        m = float(self.m)
        if not (0.0 < m < 1.0):
            raise ConfigError(f"inflaton mass must lie in (0, 1) in Planck units, got {self.m!r}")
        object.__setattr__(self, "m", m)
        if self.kind not in KINDS:
            raise ConfigError(f"unknown measure kind {self.kind!r}; expected one of {KINDS}")
        uc = float(self.u_cut)
        if not math.isfinite(uc) or uc <= u_floor():
            raise ConfigError(
                f"u_cut must exceed the formula validity floor {u_floor():.6f}, got {self.u_cut!r}"
            )
        object.__setattr__(self, "u_cut", uc)
        if self.cap.kind == "fixed" and self.cap.fixed_u <= uc:
            raise ConfigError(
                f"fixed cap {self.cap.fixed_u!r} must exceed u_cut {uc!r}"
            )

    @property
    def amplitude(self) -> float:
        return amplitude_exponent(self.m)

    @property
    def u_floor(self) -> float:
        return u_floor()

    def describe(self) -> str:
        return f"m={self.m:g} u_cut={self.u_cut:g} cap={self.cap.describe()} kind={self.kind}"


def _check_domain(model: NoBoundaryModel, u: np.ndarray) -> None:
    if np.any(u <= u_floor()):
        bad = float(np.min(u))
        raise DomainError(
            f"u={bad:g} is outside formula validity (requires u > {u_floor():.6f})"
        )
    if np.any(u < model.u_cut):
        bad = float(np.min(u))
        raise DomainError(f"u={bad:g} is below the cutoff u_cut={model.u_cut:g}")


def log_bare_density(model: NoBoundaryModel, u: ArrayLike) -> ArrayLike:
    """Natural log of the measure density at u = ln(m^3 V).

    No-boundary: A / (u + 1.5 ln u), strictly decreasing and tending to 0
    from above as u grows. Tunneling: the exact negation. Accepts scalars or
    arrays; evaluation below u_cut or the validity floor is refused.
    """
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 0
    _check_domain(model, arr)
    dens = model.amplitude / _exponent_denominator(arr)
    if model.kind == KIND_TUNNELING:
        dens = -dens
    return float(dens) if scalar else dens


def log_integrand(model: NoBoundaryModel, u: ArrayLike, weighting: str = WEIGHT_BARE) -> ArrayLike:
    """Log integrand over u for the requested weighting.

    bare: density plus the Jacobian of V = e^u / m^3 (one factor of e^u,
    constants in m dropped as a model-wide additive constant).
    observational: one extra factor of V, the crude observer count.
    """
    if weighting not in WEIGHTINGS:
        raise DomainError(f"unknown weighting {weighting!r}; expected one of {WEIGHTINGS}")
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 0
    base = log_bare_density(model, arr) + arr
    if weighting == WEIGHT_OBSERVATIONAL:
        base = base + arr
    return float(base) if scalar else base


def _solve_exponent_denominator(target: float) -> float:
    """Return the unique u > u_floor with u + 1.5 ln u = target.

    Safeguarded Newton: iterates fall back to bisection of the maintained
    bracket, converging to relative tolerance 1e-12.
    """
    if not (target > 0.0):
        raise DomainError(f"no solution above the validity floor for target {target!r}")
    lo = u_floor()
    hi = max(target, 1.0) + 2.0
    u = target - 1.5 * math.log(max(target, 2.0))
    if not (lo < u < hi):
        u = 0.5 * (lo + hi)
    for _ in range(200):
        f = _exponent_denominator(u) - target
        if f < 0.0:
            lo = u
        else:
            hi = u
        step = f / (1.0 + 1.5 / u)
        candidate = u - step
        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)
        if abs(candidate - u) <= 1e-12 * max(1.0, abs(candidate)):
            return candidate
        u = candidate
    return u


def phi0_to_u(model: NoBoundaryModel, phi0: float) -> float:
    """Map an initial inflaton value to its end-of-inflation u.

    Solves u + 1.5 ln u = 4.5 phi0^2, so that the density exponent at the
    solution equals pi / (m phi0)^2: the nucleation form of the measure.
    """
    phi0 = float(phi0)
    if not (phi0 > 0.0) or not math.isfinite(phi0):
        raise DomainError(f"below inflationary cutoff: phi0 must be positive, got {phi0!r}")
    target = 4.5 * phi0 * phi0
    if target <= 0.0:
        raise DomainError(f"below inflationary cutoff: no valid u for phi0 = {phi0!r}")
    return _solve_exponent_denominator(target)


def nucleation_radius(model: NoBoundaryModel, phi0: float) -> tuple[float, float]:
    """Nucleation radius a0 = 1 / (m phi0) and the log measure pi a0^2.

    Proportionality constants are taken as one; every reported dominance
    result is a ratio in which they cancel.
    """
    phi0 = float(phi0)
    if not (phi0 > 0.0) or not math.isfinite(phi0):
        raise DomainError(f"phi0 must be positive, got {phi0!r}")
    a0 = 1.0 / (model.m * phi0)
    return a0, math.pi * a0 * a0


def cap_u(model: NoBoundaryModel) -> float | None:
    """Upper cutoff in u implied by the model's cap rule (None = unbounded).

    The Planck rule solves u + 1.5 ln u = 9 / m^2, i.e. phi0_to_u at the
    initial value where the potential m^2 phi0^2 / 2 reaches the Planck
    density.
    """
    if model.cap.kind == "none":
        return None
    if model.cap.kind == "fixed":
        return model.cap.fixed_u
    return _solve_exponent_denominator(9.0 / (model.m * model.m))


def model_from_dict(doc: Mapping) -> NoBoundaryModel:
    """Build a model from a parsed definition block (strict keys)."""
    if not isinstance(doc, Mapping):
        raise ConfigError(f"model: expected an object, got {type(doc).__name__}")
    allowed = {"m", "u_cut", "cap", "kind"}
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"model: unknown key {key!r}")
    if "m" not in doc:
        raise ConfigError("model: missing required key 'm'")
    try:
        m = float(doc["m"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"model.m: not a number ({exc})") from exc
    kwargs = {}
    if "u_cut" in doc:
        try:
            kwargs["u_cut"] = float(doc["u_cut"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"model.u_cut: not a number ({exc})") from exc
    if "cap" in doc:
        raw = doc["cap"]
        if isinstance(raw, str):
            kwargs["cap"] = CapRule.parse(raw)
        elif isinstance(raw, Mapping):
            for key in raw:
                if key != "fixed_u":
                    raise ConfigError(f"model.cap: unknown key {key!r}")
            if "fixed_u" not in raw:
                raise ConfigError("model.cap: missing 'fixed_u'")
            kwargs["cap"] = CapRule.fixed(float(raw["fixed_u"]))
        else:
            raise ConfigError("model.cap: expected 'none', 'planck', or {'fixed_u': number}")
    if "kind" in doc:
        kwargs["kind"] = doc["kind"]
    return NoBoundaryModel(m=m, **kwargs)
