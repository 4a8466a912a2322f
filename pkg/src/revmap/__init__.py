"""Metrics of revolution with common geodesics: the (p, q) family and deformed ellipsoids."""

__version__ = "0.1.0"

from revmap.geometry import (  # noqa: E402
    EquidistantMetric,
    RevolutionProfile,
    TopologyClass,
    arclength_reparameterize,
    classify_topology,
    load_tabulated_profile,
    metric_from_profile,
    pole_smoothness_check,
)
from revmap.mapping import (  # noqa: E402
    MappingParams,
    admissible_q_range,
    christoffel,
    is_nontrivial,
    map_metric,
    psi,
    psi_prime,
    verify_levi_civita,
)
from revmap.geodesics import (  # noqa: E402
    GeodesicState,
    GeodesicTrace,
    clairaut_invariant,
    integrate_geodesic,
    unparametrized_deviation,
    verify_geodesic_equivalence,
)
