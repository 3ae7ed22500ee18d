"""Exact Gaussian-state simulator for the driven Caldeira-Leggett model."""

from .dynamics import (
    NormalModeBasis,
    Propagator,
    diagonalize,
    evolve,
    propagator_at,
    recurrence_time,
)
from .errors import ConfigError, StabilityError
from .gaussian import (
    GaussianState,
    logarithmic_negativity,
    marginal,
    mutual_information,
    partial_transpose,
    product_state,
    relative_entropy,
    symplectic_form,
    symplectic_spectrum,
    von_neumann_entropy,
    williamson,
)
from .model import (
    CouplingSet,
    DrivePulse,
    ModelSpec,
    build_couplings,
    drive_force,
    drive_force_derivative,
    hamiltonian_position_block,
    initial_state,
)
from .pipeline import simulate_trajectory, time_grid
from .thermo import (
    SystemHamiltonianSpec,
    ThermoRecord,
    build_records,
    decomposition,
    definition_gap,
    entropy_production_dl,
    entropy_production_elb,
    entropy_production_spohn,
    gibbs_state_system,
)
from .trajectory import Trajectory

__version__ = "0.1.0"
