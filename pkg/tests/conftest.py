import hypothesis
import numpy as np
import pytest

from wavefan.bvp import ContinuationSchedule, solve_riemann_diffusive
from wavefan.models import (
    make_burgers,
    make_diffusion,
    make_nonconservative_toy,
    make_psystem,
    make_shallow_water,
)

hypothesis.settings.register_profile(
    "ci", max_examples=25, deadline=None, derandomize=True
)
hypothesis.settings.load_profile("ci")

FULL_SCHEDULE = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


@pytest.fixture(scope="session")
def burgers():
    return make_burgers()


@pytest.fixture(scope="session")
def psystem():
    return make_psystem()


@pytest.fixture(scope="session")
def shallow_water():
    return make_shallow_water()


@pytest.fixture(scope="session")
def toy():
    return make_nonconservative_toy(coupling=2.0)


@pytest.fixture(scope="session")
def toy_diffusion():
    return make_diffusion("constant", 2, eta=0.05)


@pytest.fixture(scope="session")
def burgers_shock_sweep(burgers):
    return solve_riemann_diffusive(
        burgers.system,
        burgers.diffusion,
        [0.2],
        [-0.2],
        ContinuationSchedule.from_values(FULL_SCHEDULE),
    )


@pytest.fixture(scope="session")
def burgers_rarefaction_sweep(burgers):
    return solve_riemann_diffusive(
        burgers.system,
        burgers.diffusion,
        [-0.2],
        [0.2],
        ContinuationSchedule.from_values(FULL_SCHEDULE),
    )


@pytest.fixture(scope="session")
def shallow_water_sweep(shallow_water):
    return solve_riemann_diffusive(
        shallow_water.system,
        shallow_water.diffusion,
        [1.05, 0.0],
        [0.95, 0.0],
        ContinuationSchedule.from_values(FULL_SCHEDULE),
    )


@pytest.fixture(scope="session")
def toy_sweep(toy, toy_diffusion):
    ul = np.array([0.025, 0.01])
    ur = np.array([-0.015, 0.02])
    return solve_riemann_diffusive(
        toy.system,
        toy_diffusion,
        ul,
        ur,
        ContinuationSchedule.from_values(FULL_SCHEDULE),
    )
