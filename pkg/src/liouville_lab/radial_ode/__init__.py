"""Radial reduction of the polyharmonic system: field, integrator, shooting, oracles."""

from .integrator import (
    ATOL,
    R0,
    R_MAX,
    RTOL,
    BlowUp,
    PositiveToRmax,
    ShootResult,
    SignChange,
    Trajectory,
    detect_sign_change,
    integrate,
    rk4_reference,
)
from .oracles import ExactSolution, exact_solution_oracle
from .shooting import ShootOutcome, decay_fit, probe, shoot_scalar, shoot_system_m1
from .state import (
    InitialData,
    RadialField,
    RadialState,
    component_labels,
    series_start,
    sphere_area,
    vector_field,
)

__all__ = [
    "ATOL", "R0", "R_MAX", "RTOL",
    "BlowUp", "ExactSolution", "InitialData", "PositiveToRmax", "RadialField", "RadialState",
    "ShootOutcome", "ShootResult", "SignChange", "Trajectory",
    "component_labels", "decay_fit", "detect_sign_change", "exact_solution_oracle", "integrate",
    "probe", "rk4_reference", "series_start", "shoot_scalar", "shoot_system_m1", "sphere_area",
    "vector_field",
]
