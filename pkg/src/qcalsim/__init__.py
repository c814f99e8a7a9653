"""qcalsim: driven qubit + finite-size thermal calorimeter toolkit.

Three mutually validating views of the same model:

* stochastic trajectories of the joint wavefunction/temperature process
  (:mod:`qcalsim.trajectory`),
* the hybrid qubit-temperature master equation on an X = Te^2 grid
  (:mod:`qcalsim.hybridme`),
* the reduced temperature Fokker-Planck equation and its stationary
  temperature (:mod:`qcalsim.fokker_planck`).
"""

from .params import PhysicalParams, nominal_params
from .rates import JumpRates, jump_rates, phonon_coefficients, drive_hamiltonian
from .trajectory import (
    HybridState,
    QubitState,
    TrajectoryRecord,
    EnsembleResult,
    run_trajectory,
    run_ensemble,
)
from .hybridme import HybridDensity, XGrid, build_grid, default_grid, evolve
from .fokker_planck import (
    FPCoefficients,
    StationaryResult,
    fp_coefficients,
    reduce_to_stationary,
    reduction_grid,
    stationary_distribution,
    stationary_temperature,
    ts_closed_form,
)

__all__ = [
    "PhysicalParams",
    "nominal_params",
    "JumpRates",
    "jump_rates",
    "phonon_coefficients",
    "drive_hamiltonian",
    "HybridState",
    "QubitState",
    "TrajectoryRecord",
    "EnsembleResult",
    "run_trajectory",
    "run_ensemble",
    "HybridDensity",
    "XGrid",
    "build_grid",
    "default_grid",
    "evolve",
    "FPCoefficients",
    "StationaryResult",
    "fp_coefficients",
    "reduce_to_stationary",
    "reduction_grid",
    "stationary_distribution",
    "stationary_temperature",
    "ts_closed_form",
]

__version__ = "0.1.0"
