import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavefan.errors import MeshBudgetExceeded
from wavefan.meshing import (
    Mesh,
    MeshPolicy,
    budget_check,
    enforce_grading,
    interp_states,
    jump_marks,
    peclet_marks,
    refine,
    uniform_mesh,
)


def test_mesh_rejects_nonmonotone_nodes():
    with pytest.raises(ValueError):
        Mesh(np.array([0.0, 1.0, 0.5]))


def test_refine_bisects_marked_cells():
    mesh = uniform_mesh(0.0, 1.0, 5)
    marks = np.array([True, False, False, True])
    out = refine(mesh, marks)
    assert out.n_nodes == 7
    assert out.bounds == (0.0, 1.0)
    assert 0.125 in out.nodes and 0.875 in out.nodes
    assert out.refinement_history == [2]


def test_enforce_grading_bounds_ratio():
    nodes = np.concatenate([np.linspace(0, 0.1, 21), [1.0]])
    mesh = enforce_grading(Mesh(nodes), ratio=4.0)
    assert mesh.max_grading_ratio() <= 4.0 + 1e-12


@given(st.integers(3, 30))
def test_interp_exact_for_linear_profiles(n_nodes):
    old = uniform_mesh(-1.0, 1.0, 7)
    states = np.stack([2 * old.nodes - 1, -old.nodes], axis=1)
    new = uniform_mesh(-1.0, 1.0, n_nodes)
    out = interp_states(old, states, new)
    expect = np.stack([2 * new.nodes - 1, -new.nodes], axis=1)
    assert np.abs(out - expect).max() < 1e-14
    assert np.allclose(out[0], states[0]) and np.allclose(out[-1], states[-1])


def test_interp_second_order_on_tanh():
    def profile(nodes):
        return np.tanh(5 * nodes)[:, None]

    fine = uniform_mesh(-1.0, 1.0, 641)
    errs = []
    for n in (41, 81):
        coarse = uniform_mesh(-1.0, 1.0, n)
        interp = interp_states(coarse, profile(coarse.nodes), fine)
        errs.append(np.abs(interp - profile(fine.nodes)).max())
    assert errs[0] / errs[1] > 3.0


def test_peclet_and_jump_marks():
    mesh = uniform_mesh(0.0, 1.0, 11)
    rates = np.full(10, 3.0)
    assert peclet_marks(mesh, rates, epsilon=0.1, limit=2.0).all()
    assert not peclet_marks(mesh, rates, epsilon=1.0, limit=2.0).any()
    states = np.zeros((11, 1))
    states[5:] = 1.0
    marks = jump_marks(states, 0.5)
    assert marks[4] and marks.sum() == 1


def test_budget_check_raises():
    mesh = uniform_mesh(0.0, 1.0, 200)
    with pytest.raises(MeshBudgetExceeded):
        budget_check(mesh, MeshPolicy(max_nodes=100))
