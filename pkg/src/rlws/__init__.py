"""Rotational linear Weingarten surfaces of the 3-sphere.

Classification, integration, reconstruction and verification of rotational
surfaces satisfying a*H + b*K = c, driven by the phase-plane first integral
of the profile equation.
"""
from ._backend import BACKEND
from .contour import ContourSet, contour_oracle, hausdorff_distance
from .errors import NumericalError, RlwsError, ValidationError
from .geometry import (
    CurvaturePair,
    SurfaceMesh,
    build_mesh,
    isoparametric_test,
    principal_curvatures,
    rotation_angle,
    stereographic_project,
    umbilic_spheres,
    weingarten_residual,
)
from .orbit import (
    IntegrateOptions,
    Orbit,
    OrbitOutcome,
    OrbitSample,
    TraceOptions,
    integrate_profile,
    level_turning_points,
    profile_acceleration,
    trace_level_curve,
)
from .phase import (
    Coefficients,
    CriticalData,
    LevelClassification,
    LevelKind,
    PhasePoint,
    boundary_intersections,
    classify_level,
    critical_data,
    gamma_locus_intersections,
    potential_gradient,
    singular_locus_intersections,
    validate_normalize,
    weingarten_potential,
)

__version__ = "0.1.0"
