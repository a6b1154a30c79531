"""Dephasing-assisted long-lived entanglement of two strongly coupled qubits.

Global Lindblad dynamics of two resonantly coupled qubits in radiative and
dephasing reservoirs, entanglement observables, a reduced rate model and a
scenario runner.
"""

__version__ = "0.1.0"

from .errors import (ChannelError, ConfigError, FitQualityError, InsufficientHorizonError,
                     InvalidStateError, SingularGeometryError, StiffnessError, SubradiantError)
from .system import (BASIS_LABELS, EigenBasis, SystemParams, build_hamiltonian, change_basis,
                     dipole_coupling_constant, eigen_system, ket, projector)
from .lindblad import (JumpChannel, assemble_liouvillian, channels_for, detuned_jump_channels,
                       global_jump_channels, kms_rate, liouvillian_for, local_jump_channels,
                       master_rhs, resonant_jump_channels)
from .evolution import (Trajectory, check_state, expm_propagate, log_time_grid,
                        propagate_params, rk_propagate, spectral_propagate)
from .observables import (ObservableRecord, Populations, concurrence, fit_decay, fit_lifetime,
                          observe, populations, von_neumann_entropy)
from .reduced import (analytic_pas, analytic_validity_start, effective_decay_rate,
                      quasi_stationary, rate_matrix, rate_rhs, solve_rates)
from .config import ScenarioConfig, SweepSpec, load_config, parse_config
from .runner import (NumericalFailure, ScenarioResult, SweepResult, compare_full_vs_reduced,
                     run_scenario, sweep_detuning, validate_scenario)

__all__ = [
    "__version__",
    "ChannelError",
    "ConfigError",
    "FitQualityError",
    "InsufficientHorizonError",
    "InvalidStateError",
    "SingularGeometryError",
    "StiffnessError",
    "SubradiantError",
    "BASIS_LABELS",
    "EigenBasis",
    "SystemParams",
    "build_hamiltonian",
    "change_basis",
    "dipole_coupling_constant",
    "eigen_system",
    "ket",
    "projector",
    "JumpChannel",
    "assemble_liouvillian",
    "channels_for",
    "detuned_jump_channels",
    "global_jump_channels",
    "kms_rate",
    "liouvillian_for",
    "local_jump_channels",
    "master_rhs",
    "resonant_jump_channels",
    "Trajectory",
    "check_state",
    "expm_propagate",
    "log_time_grid",
    "propagate_params",
    "rk_propagate",
    "spectral_propagate",
    "ObservableRecord",
    "Populations",
    "concurrence",
    "fit_decay",
    "fit_lifetime",
    "observe",
    "populations",
    "von_neumann_entropy",
    "analytic_pas",
    "analytic_validity_start",
    "effective_decay_rate",
    "quasi_stationary",
    "rate_matrix",
    "rate_rhs",
    "solve_rates",
    "ScenarioConfig",
    "SweepSpec",
    "load_config",
    "parse_config",
    "NumericalFailure",
    "ScenarioResult",
    "SweepResult",
    "compare_full_vs_reduced",
    "run_scenario",
    "sweep_detuning",
    "validate_scenario",
]
