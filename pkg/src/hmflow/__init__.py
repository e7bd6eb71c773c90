"""Numerical laboratory for the harmonic map heat flow from the plane to
the two-sphere: bubble (harmonic map) construction and energy bookkeeping,
equivariant and full 2D flow solvers with blow-up detection, multi-bubble
configuration fitting, and collision-interval analysis.
"""

__version__ = "0.1.0"

from .errors import (
    AdmissibilityError,
    ConfigError,
    ConstraintViolationError,
    DegenerateFieldError,
    DegenerateStepError,
    HmflowError,
    NoScaleError,
    OutOfRegimeError,
    ParameterError,
    RangeError,
    ResolutionError,
    SnapshotFormatError,
)
from .fields import (
    Disc,
    Grid2D,
    RadialGrid,
    SphereField,
    dirichlet_energy,
    evaluate_field,
    grad_max,
    project_tangent,
    read_snapshot,
    renormalize,
    sphere_point,
    tension,
    tension_l2_sq,
    write_snapshot,
)
from .bubbles import (
    BubbleMap,
    RationalMap,
    bubble_energy_density,
    bubble_gradient,
    check_gamma0,
    compute_center,
    compute_scale,
    conjugate_bubble,
    default_gamma0,
    disc_energy,
    evaluate_bubble,
    exterior_energy,
    make_equivariant_bubble,
    read_bubble_library,
    render_bubble,
    standard_library,
    total_energy,
    transform_bubble,
    write_bubble_library,
)
from .flow import (
    BlowupVerdict,
    FlowParams,
    FlowState,
    TimeSeries,
    energy_identity_residual,
    estimate_blowup_time,
    initial_bubble_profile,
    initial_excess_angle,
    initial_random_smooth,
    initial_small_radial,
    local_energy_inequality_check,
    run_flow,
    step_equivariant,
    step_full2d,
)
from .fitting import (
    AdmissibleRadii,
    BubbleConfig,
    ConfigBubble,
    FitOutcome,
    ProximityReport,
    bubble_entry,
    bubble_limit,
    check_admissibility,
    config_energy,
    config_gradient,
    distance_d,
    evaluate_config,
    extract_bubbles,
    fit_config,
)
from .collisions import (
    CollisionInterval,
    DeltaSeries,
    build_delta_series,
    detect_collisions,
    duration_law_check,
    quantization_check,
)
