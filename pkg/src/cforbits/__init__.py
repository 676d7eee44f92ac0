"""Numerical toolkit for periodic orbits of generalized central force
problems: closed-orbit construction, KAM-style non-degeneracy verdicts by
two independent routes, and continuation into electromagnetically perturbed
periodic solutions.
"""

from .errors import (
    CForbitsError,
    ChartSingularityError,
    CircularDegenerateError,
    CollisionError,
    DegenerateMomentumError,
    DomainError,
    EnergyInfeasibleError,
    NoBoundOrbitError,
    QuadratureError,
    RootFindError,
    RouteDisagreementError,
    StagnationError,
    TargetOutOfRangeError,
    UnreliableVerdictError,
    UnsupportedConfigurationError,
)
from .model import (
    HamiltonianSystem,
    KineticLaw,
    Perturbation,
    PhaseState,
    Potential,
    eval_fields,
)
from .flow import (
    DriftReport,
    FundamentalMatrix,
    Trajectory,
    integrate,
    integrate_with_variational,
    invariant_drift,
    monodromy,
    symplectic_matrix,
)
from .orbit import (
    ManifoldSample,
    PeriodicOrbit,
    RadialProfile,
    apsidal_angle,
    find_closed_orbit,
    manifold_samples,
    radial_action,
    radial_period,
    radial_profile,
    turning_points,
)
from .actions import (
    ActionPoint,
    NondegReport,
    action_point,
    frequencies,
    k0_hessian,
    nondeg_fixed_energy,
    nondeg_fixed_period,
)
from .nondeg import (
    ConsistencyReport,
    FixedEnergyKernelReport,
    MonodromyReport,
    check_fixed_energy,
    check_planar_fixed_period,
    check_spatial_fixed_period,
    cross_check,
    kernel_dimension,
)
from .continuation import (
    ContinuationResult,
    ShootingProblem,
    continue_fixed_energy,
    continue_fixed_period,
    distance_to_manifold,
    distinct_results,
    eps_path,
    multistart,
)

__version__ = "0.1.0"
