"""Lee-Yang zeros of Blume-Capel and dilute ferromagnets."""

from ._lyzero import (
    Model,
    Polynomial,
    ProblemTooLarge,
    RootFindingError,
    SpecError,
    bound_condition_i,
    bound_condition_ii,
    corollary_bounds,
    epsilon_pm,
    omega_pm,
    theta_from_delta,
    theta_from_q,
)

__all__ = [
    "Model",
    "Polynomial",
    "ProblemTooLarge",
    "RootFindingError",
    "SpecError",
    "bound_condition_i",
    "bound_condition_ii",
    "corollary_bounds",
    "epsilon_pm",
    "omega_pm",
    "theta_from_delta",
    "theta_from_q",
]
