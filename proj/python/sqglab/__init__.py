"""Stationary quasi-geostrophic equation in critical Besov spaces."""

from ._core import (
    Error,
    FrequencyLattice,
    PreconditionError,
    ResourceLimit,
    SpectralField,
    bee,
    bee_block,
    bee_coefficient,
    bee_diag_fast,
    besov_norm,
    data_index,
    estimate_constants,
    experiments,
    force_step1,
    inverse_laplacian,
    iterate2_split,
    lowfreq_lower_bound,
    picard_solve,
    random_field,
    relative_distance,
    run_experiment,
    second_iterate,
    shell_profile,
    solution_index,
)

__all__ = [name for name in dir() if not name.startswith("_")]
