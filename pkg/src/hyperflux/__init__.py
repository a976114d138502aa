"""Hypersurface flux integrals and conservation checks in Lorentzian spacetimes.

The package evaluates the probability of finding one body in a region of
an arbitrary, not necessarily spacelike, hypersurface by integrating the
pullback of the current contracted into the metric volume form.  It also
provides the classical spacelike-only route (density against the induced
Riemannian volume), flows of timelike fields to advect surfaces, causal
classification of vectors and tangent spaces, and numerical checks of
probability conservation along flows.
"""

__version__ = "0.1.0"

from .born import (
    ContractedCurrentForm,
    born_probability,
    contracted_form_eval,
    mc_born_probability,
    normal_flux_integral,
    positivity_check,
    verify_spacelike_identity,
)
from .conservation import (
    ConservationReport,
    DivergenceTheoremReport,
    FlowCylinder,
    conservation_sweep,
    divergence_theorem_check,
    reynolds_check,
)
from .currents import (
    CurrentSpec,
    boosted_gaussian_current,
    constant_current,
    example1_field,
    gaussian_tail_mass,
    radial_crossing_time,
    rescale_velocity,
    rotating_observer_field,
    rotating_packet_current,
    static_gaussian_current,
)
from .errors import (
    ConfigError,
    DegenerateImmersionError,
    DifferentiationError,
    HyperfluxError,
    LeftChartDomainError,
    NonLorentzianError,
    NonPositiveRescalingError,
    NotSpacelikeError,
    NotTimelikeError,
    PastDirectedError,
    RootBracketError,
    SingularMetricError,
    StepSizeError,
    SuperluminalError,
    ZeroVectorError,
)
from .flows import (
    CausalSample,
    EvolvedSurface,
    FlowMap,
    causal_sweep,
    evolve_surface,
    flow_point,
    lightlike_crossing,
)
from .geometry import (
    CausalCharacter,
    Spacetime,
    SpacetimeVectorField,
    causal_class,
    causal_class_batch,
    conformal_test_metric,
    constant_field,
    divergence,
    finite_difference_divergence,
    gradient_field,
    inner,
    metric_at,
    minkowski,
    normalize_timelike,
    sqrt_abs_det,
)
from .quadrature import IntegralResult, RegionSpec
from .surfaces import (
    ParametrizedHypersurface,
    TangentFrame,
    disk_surface,
    future_unit_normal,
    graph_surface,
    half_disk_surface,
    induced_volume_integral,
    plane_surface,
    pullback_metric,
    square_disk_surface,
    surface_causal_class,
    surface_causal_class_batch,
    tangent_frame,
)
