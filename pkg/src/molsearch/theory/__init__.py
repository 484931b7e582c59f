"""Worst-case analysis on explicit finite spaces: one-edit sharpness,
forced-error bounds for smooth predictors, and search convergence."""
from .convergence import exhaustive_convergence_check
from .lipschitz import (
    BoundCheck,
    SmoothFit,
    clamped_fit,
    error_lower_bound_check,
    find_cliffs,
    local_lipschitz,
)
from .space import (
    SPACE_SCHEMA,
    CliffSpace,
    load_space,
    random_cliff_space,
    save_space,
    step_space,
    string_space,
)

__all__ = [
    "SPACE_SCHEMA",
    "CliffSpace",
    "load_space",
    "save_space",
    "string_space",
    "step_space",
    "random_cliff_space",
    "local_lipschitz",
    "find_cliffs",
    "SmoothFit",
    "clamped_fit",
    "BoundCheck",
    "error_lower_bound_check",
    "exhaustive_convergence_check",
]
