"""Verification engine and geodesic laboratory for the five-dimensional
Einstein-Sasaki geometries and their Calabi-Yau metric cones.

The package constructs the explicit metric, the cone metric and the full set
of Killing-Yano forms, machine-checks every defining equation (Einstein
condition, conformal/special Killing-Yano equations, cone parallelism,
Stäckel-Killing condition) and demonstrates superintegrability of geodesic
motion numerically.
"""

from .chart import (
    ChartDomain,
    ChartPoint,
    ConePoint,
    YpqParams,
    compute_domain,
    sample_point,
    validate_params,
)
from .geometry import (
    MetricProvider,
    christoffel,
    cone_provider,
    einstein_residual,
    metric_cone,
    metric_ypq,
    ricci,
    riemann,
    ypq_provider,
)
from .forms import (
    FormField,
    NamedFormCatalog,
    build_catalog,
    cky_residual,
    cone_lift,
    parallel_residual,
    sky_residual,
)
from .integrability import (
    ConservedSet,
    PhaseState,
    StackelTensor,
    conserved_set,
    drift_report,
    hamiltonian,
    independence_rank,
    integrate_geodesic,
    killing_tensor_residual,
    stackel_from_pair,
)

__version__ = "0.1.0"
