"""Sub-Riemannian geodesics on SE(2).

Hamiltonian geodesic flow with its pendulum reduction, two-point boundary
value solving by multi-start shooting, orientation lifting of grayscale
images, and curve diagnostics.
"""

from .analysis import (
    CurveReport,
    EnergyFunctional,
    PhaseFactorReport,
    analyze_curve,
    curvature_formula,
    curvature_numeric,
    energy_functional,
    horizontality_residuals,
    phase_factor_report,
)
from .bvp import (
    BvpSolution,
    NoConvergenceError,
    ShootingParams,
    endpoint_residual,
    geodesic_fan,
    shoot,
    solve_bvp,
)
from .curveio import CurveFormatError, read_curve_csv, write_curve_csv
from .flow import (
    FlowState,
    GeodesicCurve,
    NonFiniteStateError,
    PendulumState,
    ZeroEnergyError,
    from_pendulum,
    hamilton_rhs_canonical,
    hamilton_rhs_reduced,
    hamiltonian,
    integrate,
    integrate_canonical,
    pendulum_path,
    to_pendulum,
)
from .lift import (
    ImageFormatError,
    IrregularPointError,
    OrientationField,
    ScalarImage,
    ZeroGradientError,
    gradient,
    inducers_at,
    lift,
    read_grid_csv,
    read_image,
    read_pgm,
    smooth,
    theta_brute_force,
    theta_closed_form,
)
from .se2 import (
    ConfigPoint,
    FrameVector,
    MomentumFrame,
    PhasePoint,
    angle_diff,
    angle_dist,
    angle_wrap,
    contact_form_eval,
    frame_at,
    from_momentum_frame,
    se2_apply,
    to_momentum_frame,
)

__version__ = "0.1.0"
