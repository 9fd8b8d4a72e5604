"""Deterministic single-slit scattering with a discrete time step.

Charged particles are emitted toward a uniformly charged screen with a
slit, stepped with a finite-difference Newton update of step tau, and
collected on a detector plane.  The package provides the closed-form
screen force with an independent quadrature oracle, discrete and
continuous-reference trajectory runners, reproducible Monte Carlo
ensembles with detector histograms, and fringe metrics for comparing
distributions across tau.
"""

from .analysis import ExtremaReport, find_extrema, oscillation_index, total_variation
from .dynamics import ParticleState, StepParams, energy, integrate_reference, step_discrete
from .ensemble import (
    EmissionSpec,
    Histogram,
    HistogramSpec,
    emission_angles,
    merge,
    normalize,
    run_ensemble,
)
from .errors import (
    ConfigurationError,
    EmptyHistogramError,
    ScreenSurfaceError,
    SlitSimError,
    SpecMismatchError,
    StepLimitExceededError,
    ToleranceNotMetError,
)
from .field import (
    FieldParams,
    QuadratureSpec,
    Vec2,
    force_closed_form,
    force_quadrature,
    potential,
)
from .scattering import (
    Blocked,
    Detected,
    Escaped,
    Geometry,
    Outcome,
    StepLimit,
    TrajectoryRecord,
    run_continuous_trajectory,
    run_discrete_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "Blocked",
    "ConfigurationError",
    "Detected",
    "EmissionSpec",
    "EmptyHistogramError",
    "Escaped",
    "ExtremaReport",
    "FieldParams",
    "Geometry",
    "Histogram",
    "HistogramSpec",
    "Outcome",
    "ParticleState",
    "QuadratureSpec",
    "ScreenSurfaceError",
    "SlitSimError",
    "SpecMismatchError",
    "StepLimit",
    "StepLimitExceededError",
    "StepParams",
    "ToleranceNotMetError",
    "TrajectoryRecord",
    "Vec2",
    "emission_angles",
    "energy",
    "find_extrema",
    "force_closed_form",
    "force_quadrature",
    "integrate_reference",
    "merge",
    "normalize",
    "oscillation_index",
    "potential",
    "run_continuous_trajectory",
    "run_discrete_trajectory",
    "run_ensemble",
    "step_discrete",
    "total_variation",
]
