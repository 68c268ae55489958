"""Observer-weighted world ensembles and a no-boundary minisuperspace toy model.

Computes and contrasts what single-history and many-worlds readings of a
quantum cosmology predict for a random observation, both for hand-written
discrete world ensembles and for a continuous tree-level measure density
over universe size, with all arithmetic carried exactly in log space.
"""

from .analysis import (
    Predictions,
    RegimeReport,
    TAG_CONTRACTING,
    TAG_EXPANDING,
    TAG_SHORT_LIVED,
    WeightingSummary,
    crossover_cap,
    discretize,
    predictions,
    regime_report,
)
from .ensemble import (
    Distribution,
    Ensemble,
    LikelihoodRatio,
    MANY_WORLDS,
    ObserverClass,
    SINGLE_HISTORY,
    World,
    bare_distribution,
    ensemble_from_dict,
    existence_probability,
    likelihood_ratio,
    load_ensemble,
    observational_distribution,
    typicality,
)
from .errors import ConfigError, DomainError, UnconvergedError, WorldWeightsError
from .logweight import LogWeight, add, combine, mul, normalize, ratio, render
from .minisuperspace import (
    CapRule,
    KIND_NO_BOUNDARY,
    KIND_TUNNELING,
    NoBoundaryModel,
    WEIGHT_BARE,
    WEIGHT_OBSERVATIONAL,
    amplitude_exponent,
    cap_u,
    log_bare_density,
    log_integrand,
    model_from_dict,
    nucleation_radius,
    phi0_to_u,
    u_floor,
)
from .quadrature import (
    GeometricProbe,
    IntegralResult,
    QuadratureSpec,
    TailVerdict,
    classify_tail,
    find_extremum,
    log_integrate,
)

__version__ = "0.1.0"
