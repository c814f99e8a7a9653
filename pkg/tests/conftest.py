import numpy as np
import pytest

from qcalsim.params import nominal_params


@pytest.fixture(scope="session")
def params():
    """Standard operating point: g^2 = 0.1, kappa = 0.05."""
    return nominal_params()


@pytest.fixture(scope="session")
def params_undriven():
    return nominal_params(kappa=0.0)


@pytest.fixture(scope="session")
def x_grid_100(params):
    """100 X values spanning the physically relevant range."""
    return np.linspace(2.0 * params.delta_xq, 16.0 * params.phonon_temp**2, 100)


@pytest.fixture(scope="session", autouse=True)
def _warm_jit(params):
    """Compile the trajectory kernels once up front."""
    from qcalsim.trajectory import HybridState, QubitState, run_ensemble, run_trajectory

    h, dt = 2.0e-12, 1.0e-13
    run_ensemble(4, h, dt, params, base_seed=0, frame="lab")
    run_ensemble(4, h, dt, params, base_seed=0, frame="rotating")
    run_trajectory(HybridState(QubitState.ground(), 0.01), h, dt, params, seed=0, frame="lab")
