"""Symmetric periodic orbits of a massless body driven by the figure-eight choreography."""

from __future__ import annotations

__version__ = "0.1.0"

from .choreography import (  # noqa: E402
    EIGHT_CONFIG,
    PRINTED,
    RESTRICTED_CONFIG,
    EightConstants,
    default_constants,
    refine_constants,
    refined_constants,
    verify_choreography,
)
from .dynamics import State, SystemConfig, accelerations, total_energy, vector_field  # noqa: E402
from .errors import (  # noqa: E402
    AmbiguousLabel,
    CollisionProximity,
    CorrectorDivergence,
    DimensionMismatch,
    DomainError,
    Eight4BodyError,
    InvalidIndex,
    NoConvergence,
    NoPhysicalSolution,
    NoSignChange,
    StepSizeUnderflow,
)
from .integrator import IntegratorSettings, Trajectory, find_event, flow, integrate  # noqa: E402
from .kepler2b import KeplerApprox, approx_velocity, eccentricity_from_period, kepler_seed  # noqa: E402
from .porbits import (  # noqa: E402
    ContinuationCurve,
    OrbitRecord,
    SeedPoint,
    Shooter,
    detect_periodic_on_curve,
    find_intersection,
    find_seed,
    refine_periodic,
    reproduce_table1,
    trace_curve,
)
from .symmetry import SymmetryDescriptor, apply_phi, classify_period, fixed_point_embed  # noqa: E402

__all__ = [name for name in dir() if not name.startswith("_")]
