"""Graded one-dimensional meshes with layer-driven refinement."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MeshBudgetExceeded


@dataclass
class MeshPolicy:
    """Knobs for initial meshing and adaptive refinement.

    ``peclet`` bounds the local cell Peclet number h * max_j |mu_j| / eps
    (central differencing oscillates beyond 2); ``du_jump`` bounds the state
    change across a single cell; ``grading`` bounds adjacent spacing ratios.
    """

    initial_nodes: int = 129
    max_nodes: int = 24000
    peclet: float = 2.0
    du_jump: float = 0.01
    grading: float = 4.0
    max_refine_passes: int = 16


@dataclass
class Mesh:
    nodes: np.ndarray
    refinement_history: list = field(default_factory=list)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("mesh needs at least two nodes")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("mesh nodes must be strictly increasing")
        self.nodes = nodes

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def bounds(self):
        return float(self.nodes[0]), float(self.nodes[-1])

    def max_grading_ratio(self) -> float:
        h = self.spacings
        if h.size < 2:
            return 1.0
        r = h[1:] / h[:-1]
        return float(max(r.max(), (1.0 / r).max()))


def uniform_mesh(a: float, b: float, n_nodes: int) -> Mesh:
    return Mesh(np.linspace(a, b, n_nodes))


def refine(mesh: Mesh, marks: np.ndarray) -> Mesh:
    """Bisect marked cells; endpoints and node ordering are preserved."""
    marks = np.asarray(marks, dtype=bool)
    if marks.size != mesh.n_nodes - 1:
        raise ValueError("one mark per cell expected")
    if not marks.any():
        return mesh
    nodes = mesh.nodes
    mids = 0.5 * (nodes[:-1] + nodes[1:])[marks]
    new_nodes = np.sort(np.concatenate([nodes, mids]))
    out = Mesh(new_nodes, refinement_history=list(mesh.refinement_history))
    out.refinement_history.append(int(marks.sum()))
    return out


def enforce_grading(mesh: Mesh, ratio: float = 4.0, max_passes: int = 64) -> Mesh:
    """Split the larger member of any neighbor pair whose ratio exceeds the bound."""
    current = mesh
    for _ in range(max_passes):
        h = current.spacings
        if h.size < 2:
            return current
        left, right = h[:-1], h[1:]
        bad = np.zeros(h.size, dtype=bool)
        grow = right > ratio * left
        shrink = left > ratio * right
        bad[1:] |= grow
        bad[:-1] |= shrink
        if not bad.any():
            return current
        current = refine(current, bad)
    return current


def interp_states(old_mesh: Mesh, states: np.ndarray, new_mesh: Mesh) -> np.ndarray:
    """Piecewise-linear interpolation of per-node state vectors."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    out = np.empty((new_mesh.n_nodes, states.shape[1]))
    for c in range(states.shape[1]):
        out[:, c] = np.interp(new_mesh.nodes, old_mesh.nodes, states[:, c])
    return out


def peclet_marks(mesh: Mesh, rates: np.ndarray, epsilon: float, limit: float) -> np.ndarray:
    """Cells whose local Peclet number h * rate / eps exceeds the limit."""
    return mesh.spacings * np.asarray(rates) / epsilon > limit


def jump_marks(states: np.ndarray, threshold: float) -> np.ndarray:
    """Cells across which any state component changes by more than threshold."""
    return np.abs(np.diff(states, axis=0)).max(axis=1) > threshold


def budget_check(mesh: Mesh, policy: MeshPolicy, context: str = ""):
    if mesh.n_nodes > policy.max_nodes:
        raise MeshBudgetExceeded(
            f"{mesh.n_nodes} nodes exceed budget {policy.max_nodes} {context}".strip()
        )
