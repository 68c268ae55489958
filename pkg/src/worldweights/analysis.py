"""Region-dominance analysis of capped minisuperspace measures.

Splits the valid u range into a peak region (near the lower cutoff, where
the density has its enormous exponential spike) and a tail region (large,
long-lived universes), integrates the bare and observational weightings
over both, and reads off what each theory version predicts an observer
should see. Also bridges the continuous model back to a discrete world
ensemble so the two code paths can be cross-checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Union

from . import logweight as lw
from . import minisuperspace as ms
from .ensemble import Ensemble, ObserverClass, World, MANY_WORLDS, SINGLE_HISTORY
from .errors import DomainError, UnconvergedError
from .logweight import LN10, LogWeight
from .minisuperspace import (
    KIND_NO_BOUNDARY,
    NoBoundaryModel,
    WEIGHT_BARE,
    WEIGHT_OBSERVATIONAL,
    WEIGHTINGS,
)
from .quadrature import (
    GeometricProbe,
    QuadratureSpec,
    TailVerdict,
    classify_tail,
    find_extremum,
    log_integrate,
)

__all__ = [
    "TAG_CONTRACTING",
    "TAG_EXPANDING",
    "TAG_SHORT_LIVED",
    "WeightingSummary",
    "RegimeReport",
    "Predictions",
    "regime_report",
    "predictions",
    "crossover_cap",
    "discretize",
]

TAG_CONTRACTING = "contracting-epoch"
TAG_EXPANDING = "expanding-large"
TAG_SHORT_LIVED = "small-short-lived"

SplitSpec = Union[str, float]


@dataclass(frozen=True)
class WeightingSummary:
    """Peak/tail masses and dominance for one weighting.

    Log masses are meaningful up to one model-wide additive constant; the
    dominance ratio, being a difference, is not affected by it.
    """

    peak_region: tuple[float, float]
    tail_region: tuple[float, float]
    log_mass_peak: LogWeight
    log_mass_tail: LogWeight
    dominant: str
    log10_dominance_ratio: float


@dataclass(frozen=True)
class RegimeReport:
    """Per-weighting dominance summary plus per-version predictions."""

    model: NoBoundaryModel
    split_u: float
    weightings: dict[str, WeightingSummary]
    predicted_tags: dict[str, str]
    divergence: dict[str, TailVerdict]


@dataclass(frozen=True)
class Predictions:
    """What each theory version predicts, with the likelihood of seeing a
    large expanding universe."""

    model: NoBoundaryModel
    split_u: float
    predicted_tags: dict[str, str]
    likelihood_expanding_large: dict[str, LogWeight]


def _integrand(model: NoBoundaryModel, weighting: str):
    return lambda u: ms.log_integrand(model, u, weighting)


def _region_mass(f_log, lo: float, hi: float, spec: QuadratureSpec) -> LogWeight:
    if hi <= lo:
        return LogWeight.zero()
    result = log_integrate(f_log, lo, hi, spec)
    if not result.converged:
        raise UnconvergedError(
            f"quadrature did not converge on [{lo:g}, {hi:g}]; "
            f"last estimates {result.estimates[0]:.9g}, {result.estimates[1]:.9g}",
            estimates=result.estimates,
        )
    return result.value


def _resolve_split(model: NoBoundaryModel, cap: float, split_u: SplitSpec) -> float:
    if split_u == "auto":
        u_star, _ = find_extremum(
            _integrand(model, WEIGHT_OBSERVATIONAL), model.u_cut, cap, kind="min"
        )
        return u_star
    split = float(split_u)
    if not (model.u_cut <= split <= cap):
        raise DomainError(
            f"split_u={split!r} must lie within [u_cut={model.u_cut:g}, cap={cap:g}]"
        )
    return split


def _summarize(f_log, u_cut: float, split: float, cap: float,
               spec: QuadratureSpec) -> WeightingSummary:
    mass_peak = _region_mass(f_log, u_cut, split, spec)
    mass_tail = _region_mass(f_log, split, cap, spec)
    if mass_peak >= mass_tail:
        dominant, top, bottom = "peak", mass_peak, mass_tail
    else:
        dominant, top, bottom = "tail", mass_tail, mass_peak
    if bottom.is_zero:
        ratio = math.inf
    else:
        ratio = (top.ln_value - bottom.ln_value) / LN10
    return WeightingSummary(
        peak_region=(u_cut, split),
        tail_region=(split, cap),
        log_mass_peak=mass_peak,
        log_mass_tail=mass_tail,
        dominant=dominant,
        log10_dominance_ratio=ratio,
    )


def _predicted_tag(version: str, summary: WeightingSummary, observerless_peak: bool) -> str:
    if version == SINGLE_HISTORY:
        if summary.dominant == "peak":
            return TAG_SHORT_LIVED if observerless_peak else TAG_CONTRACTING
        return TAG_EXPANDING
    # Many-worlds: with an observerless peak all observational mass sits in
    # the tail regardless of the raw dominance.
    if observerless_peak:
        if summary.log_mass_tail.is_zero:
            raise DomainError(
                "no observations exist: observerless peak and an empty tail region"
            )
        return TAG_EXPANDING
    return TAG_CONTRACTING if summary.dominant == "peak" else TAG_EXPANDING


def regime_report(model: NoBoundaryModel, spec: QuadratureSpec | None = None,
                  split_u: SplitSpec = "auto",
                  observerless_peak: bool = False) -> RegimeReport:
    """Dominance analysis of the capped model.

    The valid range [u_cut, cap] is split at ``split_u`` ("auto" picks the
    interior minimum of the observational log integrand); both weightings
    are integrated over both regions and the per-version predictions follow
    from which region dominates the relevant weighting. Unbounded models
    have no finite masses to compare; classify_tail covers them instead.
    """
    spec = spec or QuadratureSpec()
    cap = ms.cap_u(model)
    if cap is None:
        raise DomainError(
            "unbounded model: total measure is not finite with cap rule 'none'; "
            "use classify_tail for a divergence verdict"
        )
    split = _resolve_split(model, cap, split_u)
    summaries = {
        weighting: _summarize(_integrand(model, weighting), model.u_cut, split, cap, spec)
        for weighting in WEIGHTINGS
    }
    predicted = {
        SINGLE_HISTORY: _predicted_tag(SINGLE_HISTORY, summaries[WEIGHT_BARE], observerless_peak),
        MANY_WORLDS: _predicted_tag(MANY_WORLDS, summaries[WEIGHT_OBSERVATIONAL], observerless_peak),
    }
    divergence = {
        weighting: classify_tail(_integrand(model, weighting), u_start=model.u_cut)
        for weighting in WEIGHTINGS
    }
    return RegimeReport(
        model=model,
        split_u=split,
        weightings=summaries,
        predicted_tags=predicted,
        divergence=divergence,
    )


def _tail_fraction(summary: WeightingSummary) -> LogWeight:
    total = lw.add(summary.log_mass_peak, summary.log_mass_tail)
    if summary.log_mass_tail.is_zero:
        return LogWeight.zero()
    return LogWeight(min((summary.log_mass_tail / total).ln_value, 0.0))


def predictions(model: NoBoundaryModel, spec: QuadratureSpec | None = None,
                split_u: SplitSpec = "auto",
                observerless_peak: bool = False) -> Predictions:
    """Per-version predicted observation plus the likelihood of a large
    expanding universe (the tail-region mass fraction of the weighting that
    drives each version)."""
    report = regime_report(model, spec, split_u=split_u, observerless_peak=observerless_peak)
    sh = _tail_fraction(report.weightings[WEIGHT_BARE])
    if observerless_peak:
        mw = LogWeight.one()
    else:
        mw = _tail_fraction(report.weightings[WEIGHT_OBSERVATIONAL])
    return Predictions(
        model=model,
        split_u=report.split_u,
        predicted_tags=dict(report.predicted_tags),
        likelihood_expanding_large={SINGLE_HISTORY: sh, MANY_WORLDS: mw},
    )


def crossover_cap(model: NoBoundaryModel, spec: QuadratureSpec | None = None) -> float | None:
    """Cap value at which observational peak and tail masses balance.

    Below the returned u the peak region dominates the observational
    weighting, above it the tail does. Returns None when dominance never
    flips within (u_cut, 10 A], e.g. for tunneling models where the peak
    region is empty at every cap.
    """
    spec = spec or QuadratureSpec()
    amplitude = model.amplitude

    def gap(cap_value: float) -> float:
        capped = replace(model, cap=ms.CapRule.fixed(cap_value))
        split = _resolve_split(capped, cap_value, "auto")
        f_log = _integrand(capped, WEIGHT_OBSERVATIONAL)
        peak = _region_mass(f_log, capped.u_cut, split, spec)
        tail = _region_mass(f_log, split, cap_value, spec)
        return tail.ln_value - peak.ln_value

    lo = model.u_cut * (1.0 + 1e-9) + 1e-9
    hi = 10.0 * amplitude
    gap_lo = gap(lo)
    gap_hi = gap(hi)
    if gap_lo >= 0.0 or gap_hi <= 0.0:
        return None
    for _ in range(200):
        if hi - lo <= 1e-6 * hi:
            break
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def discretize(model: NoBoundaryModel, bin_edges, spec: QuadratureSpec | None = None,
               split_u: SplitSpec = "auto",
               observerless_peak: bool = False) -> Ensemble:
    """Collapse the continuous model into a discrete world ensemble.

    Each bin becomes a world whose bare measure is the bare integral over
    the bin and whose single observer class carries count = observational /
    bare bin mass, so the ensemble-level observational distribution
    reproduces the continuous one. Bins at or below the split point are
    tagged as the short-lived epoch, the rest as expanding; with
    ``observerless_peak`` the short-lived bins get no observers at all.
    """
    spec = spec or QuadratureSpec()
    cap = ms.cap_u(model)
    if cap is None:
        if split_u == "auto":
            raise DomainError("unbounded model: provide an explicit split_u and finite edges")
        cap = math.inf
    edges = [float(e) for e in bin_edges]
    if len(edges) < 2:
        raise DomainError("need at least two bin edges")
    for left, right in zip(edges, edges[1:]):
        if not left < right:
            raise DomainError(f"bin edges must be strictly increasing, got {left!r} >= {right!r}")
    slack = 1e-9 * max(1.0, abs(model.u_cut), abs(edges[-1]))
    if edges[0] < model.u_cut - slack or edges[-1] > cap + slack:
        raise DomainError(
            f"bin edges must lie within [u_cut={model.u_cut:g}, cap={cap:g}]"
        )
    split = _resolve_split(model, cap, split_u)

    bare_f = _integrand(model, WEIGHT_BARE)
    obs_f = _integrand(model, WEIGHT_OBSERVATIONAL)
    worlds = []
    for i, (left, right) in enumerate(zip(edges, edges[1:])):
        bare_mass = _region_mass(bare_f, left, right, spec)
        obs_mass = _region_mass(obs_f, left, right, spec)
        midpoint = 0.5 * (left + right)
        in_peak = midpoint <= split
        if in_peak:
            tag = TAG_SHORT_LIVED if observerless_peak else TAG_CONTRACTING
        else:
            tag = TAG_EXPANDING
        if in_peak and observerless_peak:
            observers: tuple[ObserverClass, ...] = ()
        else:
            observers = (ObserverClass(label="volume-weighted", count=obs_mass / bare_mass),)
        worlds.append(
            World(
                id=f"bin{i:02d}",
                bare_measure=bare_mass,
                observers=observers,
                tags=frozenset({tag}),
            )
        )
    return Ensemble(tuple(worlds))
