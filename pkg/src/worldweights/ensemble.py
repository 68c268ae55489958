"""Discrete world ensembles and the two observer-weighting prescriptions.

A single-history reading weights each world by its bare quantum measure
alone; a many-worlds reading additionally weights each world by how much
observation happens inside it. Both prescriptions, their existence
probabilities, tag-level typicality, and the resulting Bayes factor live
here. Ensembles are immutable after validation and every operation is a
pure function.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence, Union

from scipy.special import logsumexp

from . import logweight as lw
from .errors import ConfigError, DomainError
from .logweight import LogWeight

__all__ = [
    "SINGLE_HISTORY",
    "MANY_WORLDS",
    "VERSIONS",
    "ObserverClass",
    "World",
    "Ensemble",
    "Distribution",
    "LikelihoodRatio",
    "bare_distribution",
    "observational_distribution",
    "typicality",
    "existence_probability",
    "likelihood_ratio",
    "ensemble_from_dict",
    "load_ensemble",
]

SINGLE_HISTORY = "single-history"
MANY_WORLDS = "many-worlds"
VERSIONS = (SINGLE_HISTORY, MANY_WORLDS)

# A query is a predicate over a single observation tag; a bare string means
# exact equality with that tag.
TagQuery = Union[str, Callable[[str], bool]]

_NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class ObserverClass:
    """One kind of observation occurring in a world.

    ``count`` is the number of observations of this class (a LogWeight, so
    counts like 1e90 are fine) and ``weight`` is the per-observation factor
    that lets some observations matter more than others.
    """

    label: str
    count: LogWeight
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not self.label:
            raise ConfigError("observer class label must be nonempty")
        w = float(self.weight)
        if math.isnan(w) or w < 0.0:
            raise ConfigError(f"observer weight must be nonnegative, got {self.weight!r}")
        object.__setattr__(self, "weight", w)


@dataclass(frozen=True)
class World:
    """A branch of the state treated as one classical universe.

    ``bare_measure`` is the world's quantum measure (must be nonzero), the
    observer classes carry its observation content, and ``tags`` name what an
    observation inside this world would report (e.g. "expanding").
    """

    id: str
    bare_measure: LogWeight
    observers: tuple[ObserverClass, ...] = ()
    tags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.id:
            raise ConfigError("world id must be nonempty")
        if self.bare_measure.is_zero:
            raise ConfigError(f"world {self.id!r} has zero bare measure")
        object.__setattr__(self, "observers", tuple(self.observers))
        object.__setattr__(self, "tags", frozenset(self.tags))

    def observer_measure(self) -> LogWeight:
        """Total observation measure: sum over classes of count * weight."""
        terms = [
            oc.count.ln_value + math.log(oc.weight)
            for oc in self.observers
            if oc.weight > 0.0 and not oc.count.is_zero
        ]
        if not terms:
            return LogWeight.zero()
        return LogWeight(float(logsumexp(terms)))

    @property
    def has_observers(self) -> bool:
        return not self.observer_measure().is_zero


@dataclass(frozen=True)
class Ensemble:
    """A validated, nonempty collection of worlds with distinct ids."""

    worlds: tuple[World, ...]

    def __post_init__(self) -> None:
        worlds = tuple(self.worlds)
        if not worlds:
            raise ConfigError("ensemble must contain at least one world")
        seen: set[str] = set()
        for w in worlds:
            if w.id in seen:
                raise ConfigError(f"duplicate world id {w.id!r}")
            seen.add(w.id)
        object.__setattr__(self, "worlds", worlds)

    def ids(self) -> list[str]:
        return [w.id for w in self.worlds]


@dataclass(frozen=True)
class Distribution:
    """A normalized probability assignment over world ids, in log space."""

    entries: tuple[tuple[str, LogWeight], ...]

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        total = float(logsumexp([p.ln_value for _, p in entries]))
        if abs(total) > _NORMALIZATION_TOL:
            raise DomainError(f"distribution is not normalized: log-sum = {total:.3e}")
        object.__setattr__(self, "entries", entries)

    def probability(self, world_id: str) -> LogWeight:
        for wid, p in self.entries:
            if wid == world_id:
                return p
        raise KeyError(world_id)

    def log10_items(self) -> list[tuple[str, float]]:
        return [(wid, p.log10) for wid, p in self.entries]


@dataclass(frozen=True)
class LikelihoodRatio:
    """Bayes factor of many-worlds over single-history for one query.

    A zero single-history likelihood with nonzero many-worlds likelihood is
    reported as ``infinite=True`` rather than raising.
    """

    value: LogWeight | None
    infinite: bool = False

    @property
    def log10(self) -> float:
        if self.infinite:
            return math.inf
        assert self.value is not None
        return self.value.log10


def bare_distribution(ensemble: Ensemble) -> Distribution:
    """Normalized bare measures: the single-history world probabilities."""
    probs = lw.normalize([w.bare_measure for w in ensemble.worlds])
    return Distribution(tuple(zip(ensemble.ids(), probs)))


def observational_distribution(ensemble: Ensemble) -> Distribution:
    """Normalized bare measure times observation measure per world.

    Worlds without observers get probability zero; if no world has observers
    the distribution does not exist and a DomainError is raised.
    """
    weights = [w.bare_measure * w.observer_measure() for w in ensemble.worlds]
    if all(w.is_zero for w in weights):
        raise DomainError("no observations exist in any world")
    probs = lw.normalize(weights)
    return Distribution(tuple(zip(ensemble.ids(), probs)))


def _as_predicate(query: TagQuery) -> Callable[[str], bool]:
    if callable(query):
        return query
    if isinstance(query, str):
        return lambda tag: tag == query
    raise DomainError(f"query must be a tag string or predicate, got {query!r}")


def _tag_fraction(world: World, predicate: Callable[[str], bool]) -> float:
    # Observations inside a world split uniformly over its tags; an untagged
    # world contributes to no tag-level query.
    if not world.tags:
        return 0.0
    matched = sum(1 for tag in world.tags if predicate(tag))
    return matched / len(world.tags)


def _query_mass(pairs: Iterable[tuple[LogWeight, float]]) -> LogWeight:
    terms = [p.ln_value + math.log(frac) for p, frac in pairs if frac > 0.0 and not p.is_zero]
    if not terms:
        return LogWeight.zero()
    # A probability mass can exceed 1 only by rounding; clamp to exactly 1.
    return LogWeight(min(float(logsumexp(terms)), 0.0))


def _check_version(version: str) -> None:
    if version not in VERSIONS:
        raise DomainError(f"unknown theory version {version!r}; expected one of {VERSIONS}")


def typicality(
    ensemble: Ensemble,
    version: str,
    query: TagQuery,
    condition_on_existence: bool = False,
) -> LogWeight:
    """Probability that a random observation satisfies the query.

    Under many-worlds the observation is drawn from the observational
    distribution. Under single-history the query mass is taken over the bare
    distribution restricted to observer-bearing worlds (a report cannot arise
    in an observerless history); ``condition_on_existence`` divides that mass
    by the probability that any observers exist at all.
    """
    _check_version(version)
    predicate = _as_predicate(query)

    if version == MANY_WORLDS:
        dist = observational_distribution(ensemble)
        pairs = zip((p for _, p in dist.entries), (_tag_fraction(w, predicate) for w in ensemble.worlds))
        return _query_mass(pairs)

    dist = bare_distribution(ensemble)
    pairs = [
        (p, _tag_fraction(w, predicate))
        for (_, p), w in zip(dist.entries, ensemble.worlds)
        if w.has_observers
    ]
    mass = _query_mass(pairs)
    if not condition_on_existence:
        return mass
    existence = existence_probability(ensemble, SINGLE_HISTORY)
    if existence.is_zero:
        raise DomainError("cannot condition on existence: no world has observers")
    return LogWeight(min((mass / existence).ln_value, 0.0))


def existence_probability(ensemble: Ensemble, version: str) -> LogWeight:
    """Probability that any observation exists under the given version.

    Many-worlds: observers in any branch exist outright, so the answer is one
    whenever some world has observers. Single-history: the bare probability
    mass of observer-bearing worlds.
    """
    _check_version(version)
    if version == MANY_WORLDS:
        some = any(w.has_observers for w in ensemble.worlds)
        return LogWeight.one() if some else LogWeight.zero()
    dist = bare_distribution(ensemble)
    pairs = [(p, 1.0) for (_, p), w in zip(dist.entries, ensemble.worlds) if w.has_observers]
    return _query_mass(pairs)


def likelihood_ratio(ensemble: Ensemble, query: TagQuery) -> LikelihoodRatio:
    """Bayes factor: many-worlds typicality over unconditioned single-history
    typicality for the same query."""
    mw = typicality(ensemble, MANY_WORLDS, query)
    if mw.is_zero:
        raise DomainError("query has zero probability under the many-worlds weighting")
    sh = typicality(ensemble, SINGLE_HISTORY, query, condition_on_existence=False)
    if sh.is_zero:
        return LikelihoodRatio(value=None, infinite=True)
    return LikelihoodRatio(value=mw / sh)


# ---------------------------------------------------------------------------
# Definition-file parsing (strict: unknown keys are rejected)
# ---------------------------------------------------------------------------


def _require_keys(obj: Mapping, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(obj, Mapping):
        raise ConfigError(f"{where}: expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{where}: unknown key {key!r}")
    for key in required:
        if key not in obj:
            raise ConfigError(f"{where}: missing required key {key!r}")


def _parse_magnitude(obj, where: str) -> LogWeight:
    _require_keys(obj, {"value", "log10"}, set(), where)
    if ("value" in obj) == ("log10" in obj):
        raise ConfigError(f"{where}: expected exactly one of 'value' or 'log10'")
    try:
        if "value" in obj:
            return LogWeight.from_value(float(obj["value"]))
        return LogWeight.from_log10(float(obj["log10"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: not a number ({exc})") from exc
    except DomainError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_observer(obj, where: str) -> ObserverClass:
    _require_keys(obj, {"class", "count", "weight"}, {"class", "count"}, where)
    label = obj["class"]
    if not isinstance(label, str) or not label:
        raise ConfigError(f"{where}.class: expected a nonempty string")
    count = _parse_magnitude(obj["count"], f"{where}.count")
    weight = 1.0
    if "weight" in obj:
        try:
            weight = float(obj["weight"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.weight: not a number ({exc})") from exc
    try:
        return ObserverClass(label=label, count=count, weight=weight)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_world(obj, where: str) -> World:
    _require_keys(obj, {"id", "measure", "observers", "tags"}, {"id", "measure"}, where)
    wid = obj["id"]
    if not isinstance(wid, str) or not wid:
        raise ConfigError(f"{where}.id: expected a nonempty string")
    measure = _parse_magnitude(obj["measure"], f"{where}.measure")
    if measure.is_zero:
        raise ConfigError(f"{where}.measure: zero-measure worlds are rejected")
    observers = []
    raw_obs = obj.get("observers", [])
    if not isinstance(raw_obs, list):
        raise ConfigError(f"{where}.observers: expected a list")
    for j, oc in enumerate(raw_obs):
        observers.append(_parse_observer(oc, f"{where}.observers[{j}]"))
    raw_tags = obj.get("tags", [])
    if not isinstance(raw_tags, list) or not all(isinstance(t, str) for t in raw_tags):
        raise ConfigError(f"{where}.tags: expected a list of strings")
    return World(id=wid, bare_measure=measure, observers=tuple(observers), tags=frozenset(raw_tags))


def ensemble_from_dict(doc) -> Ensemble:
    """Build a validated ensemble from a parsed definition document."""
    _require_keys(doc, {"worlds"}, {"worlds"}, "top level")
    raw = doc["worlds"]
    if not isinstance(raw, list):
        raise ConfigError("worlds: expected a list")
    if not raw:
        raise ConfigError("worlds: list is empty")
    worlds = [_parse_world(w, f"worlds[{i}]") for i, w in enumerate(raw)]
    return Ensemble(tuple(worlds))


def load_ensemble(source: Union[str, Path]) -> Ensemble:
    """Load an ensemble definition file (JSON, strict keys).

    ``source`` may be any path-like or importlib.resources traversable with a
    ``read_text`` method.
    """
    if hasattr(source, "read_text"):
        name, text = str(source), source.read_text()
    else:
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"definition file not found: {source}")
        name, text = str(path), path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{name}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        return ensemble_from_dict(doc)
    except ConfigError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
