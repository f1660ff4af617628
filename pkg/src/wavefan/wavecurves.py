"""Viscous wave curves traced through an extended boundary-value problem.

The right state joins the unknowns; the extra equations force zero foreign-
family content across every other speed band (measured between gap
midpoints) and pin the amplitude l_j(0) . (u_r - u_l) = m.  Curve points
continue from their neighbors in m; Newton failures truncate the reachable
parameter range rather than aborting the trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .bvp import (
    DEFAULT_NEWTON_TOL,
    NewtonDiverged,
    SelfSimilarSolution,
    _converged_ball_guard,
    _fd_jacobian_tridiag,
    _refine_with_states,
    _refinement_marks,
    band_rate_bound,
    diffusive_residual,
    newton_solve,
)
from .errors import FlatnessUnachievable, StateOutOfBall
from .meshing import MeshPolicy, budget_check, enforce_grading, interp_states, refine, uniform_mesh
from .systems import DiffusionModel, HyperbolicSystem, eigendecompose


@dataclass
class WaveCurve:
    """States psi_j(m; u_l) with tangents and cone margins on the m-grid."""

    family: int
    base_state: np.ndarray
    m_values: np.ndarray
    states: np.ndarray
    tangents: np.ndarray
    cone_margins: np.ndarray
    epsilon: float
    m_range: tuple
    newton_iterations: np.ndarray
    profiles: list = field(default_factory=list)
    requested_range: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class ConeReport:
    threshold: float
    min_margin: float
    margins: np.ndarray
    passed: bool


@dataclass(frozen=True)
class LipschitzReport:
    constant: float
    pair_count: int


def _gap_midpoints(system: HyperbolicSystem):
    """Interval (a_k, b_k) straddling each band between neighboring gap midpoints."""
    bands = system.speed_bands
    length = system.domain_half_width
    n = bands.shape[0]
    lows = np.empty(n)
    highs = np.empty(n)
    for k in range(n):
        below = bands[k - 1, 1] if k > 0 else -length
        above = bands[k + 1, 0] if k < n - 1 else length
        lows[k] = 0.5 * (below + bands[k, 0])
        highs[k] = 0.5 * (bands[k, 1] + above)
    return lows, highs


def _interp_row(nodes, pos):
    k = int(np.clip(np.searchsorted(nodes, pos) - 1, 0, nodes.size - 2))
    t = (pos - nodes[k]) / (nodes[k + 1] - nodes[k])
    return k, float(1.0 - t), float(t)


class _ExtendedProblem:
    """Residual/Jacobian of the profile + unknown right state system."""

    def __init__(self, system, diffusion, u_l, family, m_target, epsilon, mesh):
        self.system = system
        self.diffusion = diffusion
        self.u_l = u_l
        self.family = family
        self.m_target = m_target
        self.epsilon = epsilon
        self.mesh = mesh
        self.n = system.dimension
        ref = eigendecompose(system, system.reference_state, check_ball=False)
        self.left0 = ref.left
        self.lows, self.highs = _gap_midpoints(system)
        self.foreign = [k for k in range(self.n) if k != family - 1]

    def pack(self, states, u_r):
        return np.concatenate([states.ravel(), u_r])

    def unpack(self, x):
        n = self.n
        states = x[:-n].reshape(-1, n)
        return states, x[-n:]

    def residual(self, x):
        states, u_r = self.unpack(x)
        core = diffusive_residual(
            self.system,
            self.diffusion,
            self.epsilon,
            self.mesh,
            states,
            self.u_l,
            u_r,
            enforce_ball=False,
        )
        nodes = self.mesh.nodes
        extra = np.empty(self.n)
        for pos_k, k in enumerate(self.foreign):
            ia, wa0, wa1 = _interp_row(nodes, self.lows[k])
            ib, wb0, wb1 = _interp_row(nodes, self.highs[k])
            ua = wa0 * states[ia] + wa1 * states[ia + 1]
            ub = wb0 * states[ib] + wb1 * states[ib + 1]
            extra[pos_k] = self.left0[k] @ (ub - ua)
        extra[-1] = self.left0[self.family - 1] @ (u_r - self.u_l) - self.m_target
        return np.concatenate([core.ravel(), extra])

    def jacobian(self, x, f0):
        states, u_r = self.unpack(x)
        n = self.n
        k_nodes = states.shape[0]
        size = k_nodes * n + n

        def res_nodes(st):
            return diffusive_residual(
                self.system,
                self.diffusion,
                self.epsilon,
                self.mesh,
                st,
                self.u_l,
                u_r,
                enforce_ball=False,
            )

        core = _fd_jacobian_tridiag(res_nodes, states, f0[: k_nodes * n].reshape(-1, n))
        core = core.tocoo()
        rows = [core.row]
        cols = [core.col]
        vals = [core.data]
        # right boundary row depends on u_r: d(u_K - u_r)/d(u_r) = -I
        last = (k_nodes - 1) * n
        rows.append(np.arange(last, last + n))
        cols.append(np.arange(k_nodes * n, size))
        vals.append(-np.ones(n))
        nodes = self.mesh.nodes
        for pos_k, k in enumerate(self.foreign):
            r = k_nodes * n + pos_k
            ia, wa0, wa1 = _interp_row(nodes, self.lows[k])
            ib, wb0, wb1 = _interp_row(nodes, self.highs[k])
            for node, w in ((ib, wb0), (ib + 1, wb1)):
                rows.append(np.full(n, r))
                cols.append(node * n + np.arange(n))
                vals.append(w * self.left0[k])
            for node, w in ((ia, -wa0), (ia + 1, -wa1)):
                rows.append(np.full(n, r))
                cols.append(node * n + np.arange(n))
                vals.append(w * self.left0[k])
        r = k_nodes * n + n - 1
        rows.append(np.full(n, r))
        cols.append(np.arange(k_nodes * n, size))
        vals.append(self.left0[self.family - 1].copy())
        return sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(size, size),
        ).tocsc()


def _solve_curve_point(
    system, diffusion, u_l, family, m_target, epsilon, mesh, states, u_r_guess,
    policy, tol,
):
    rate_fn = band_rate_bound(system)
    mesh, states = _refine_with_states(
        mesh, states, epsilon, policy, rate_fn, f"(curve m={m_target:.4f})"
    )

    def solve_current(states_in, ur_in):
        prob = _ExtendedProblem(system, diffusion, u_l, family, m_target, epsilon, mesh)
        x, report = newton_solve(
            prob.residual,
            prob.jacobian,
            prob.pack(states_in, ur_in),
            tol,
            context=f"(curve j={family}, m={m_target:.4f}, eps={epsilon:.2e})",
        )
        st, ur = prob.unpack(x)
        return st, ur, report

    states, u_r, report = solve_current(states, u_r_guess)
    for _ in range(policy.max_refine_passes):
        marks = _refinement_marks(mesh, states, epsilon, policy, rate_fn)
        if not marks.any():
            break
        new_mesh = enforce_grading(refine(mesh, marks), policy.grading)
        budget_check(new_mesh, policy, f"(curve m={m_target:.4f})")
        states = interp_states(mesh, states, new_mesh)
        mesh = new_mesh
        states, u_r, report = solve_current(states, u_r)
    return mesh, states, u_r, report


def _eps_path(epsilon, start=1e-1, factor=0.4):
    path = []
    e = max(start, epsilon)
    while e > epsilon * 1.0001:
        path.append(e)
        e *= factor
    path.append(epsilon)
    return path


def trace_wave_curve(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    u_l,
    family: int,
    m_values: Sequence[float],
    epsilon: float,
    mesh_policy: Optional[MeshPolicy] = None,
    *,
    newton_tol: float = DEFAULT_NEWTON_TOL,
    store_profiles: bool = True,
) -> WaveCurve:
    """Trace psi_family(m; u_l) over the requested amplitude grid.

    Both signs of m are walked outward from 0 with neighbor continuation;
    the first step of each leg falls back to continuation in eps.  Points
    where Newton keeps failing delimit the reported m-range.
    """
    policy = mesh_policy or MeshPolicy()
    n = system.dimension
    u_l = np.asarray(u_l, dtype=float).reshape(n)
    if not system.contains(u_l):
        raise StateOutOfBall(f"base state {u_l} outside admissible ball")
    frame_l = eigendecompose(system, u_l, check_ball=False)
    r_dir = frame_l.right[:, family - 1]
    m_values = np.asarray(sorted(set(float(m) for m in m_values) | {0.0}))
    length = system.domain_half_width

    base_mesh = uniform_mesh(-length, length, policy.initial_nodes)
    base_states = np.tile(u_l, (base_mesh.n_nodes, 1))

    results = {}
    trivial = SelfSimilarSolution(
        mesh=base_mesh,
        states=base_states.copy(),
        epsilon=epsilon,
        kind="diffusive",
        newton=_trivial_report(),
    )
    results[0.0] = (u_l.copy(), trivial, 0)

    failures = {}
    for leg in (m_values[m_values > 0], m_values[m_values < 0][::-1]):
        mesh = base_mesh
        states = base_states.copy()
        prev_ur = u_l.copy()
        prev_m = 0.0
        first = True
        for m in leg:
            guess_states = states + np.outer(
                _band_ramp(mesh.nodes, system.speed_bands[family - 1]),
                (m - prev_m) * r_dir,
            )
            guess_ur = prev_ur + (m - prev_m) * r_dir
            try:
                if first:
                    mesh_n, states_n, u_r, report = _solve_first_point(
                        system, diffusion, u_l, family, m, epsilon, mesh,
                        guess_states, guess_ur, policy, newton_tol,
                    )
                else:
                    mesh_n, states_n, u_r, report = _solve_curve_point(
                        system, diffusion, u_l, family, m, epsilon, mesh,
                        guess_states, guess_ur, policy, newton_tol,
                    )
            except NewtonDiverged as exc:
                failures[float(m)] = str(exc)
                break
            try:
                excess = _converged_ball_guard(system, states_n, epsilon)
            except StateOutOfBall as exc:
                failures[float(m)] = str(exc)
                break
            sol = SelfSimilarSolution(
                mesh=mesh_n,
                states=states_n,
                epsilon=epsilon,
                kind="diffusive",
                newton=report,
                ball_excess=excess,
            )
            results[float(m)] = (u_r, sol, report.iterations)
            mesh, states, prev_ur, prev_m = mesh_n, states_n.copy(), u_r, m
            first = False

    if len(results) == 1 and m_values.size > 1:
        raise FlatnessUnachievable(
            f"no nonzero curve point converged for family {family}: {failures}",
            family=family,
        )

    ms = np.array(sorted(results))
    states_arr = np.stack([results[m][0] for m in ms])
    iters = np.array([results[m][2] for m in ms])
    profiles = [results[m][1] for m in ms] if store_profiles else []
    tangents = _grid_tangents(ms, states_arr)
    left_j = eigendecompose(system, system.reference_state, check_ball=False).left[
        family - 1
    ]
    norms = np.linalg.norm(tangents, axis=1)
    margins = np.where(norms > 0, np.abs(tangents @ left_j) / np.maximum(norms, 1e-300), 1.0)
    return WaveCurve(
        family=family,
        base_state=u_l,
        m_values=ms,
        states=states_arr,
        tangents=tangents,
        cone_margins=margins,
        epsilon=epsilon,
        m_range=(float(ms[0]), float(ms[-1])),
        newton_iterations=iters,
        profiles=profiles,
        requested_range=(float(m_values.min()), float(m_values.max())),
    )


def _trivial_report():
    from .bvp import NewtonReport

    return NewtonReport(iterations=0, residual_norm=0.0, backtracks=0, converged=True)


def _band_ramp(nodes, band):
    lo, hi = band
    return np.clip((nodes - lo) / (hi - lo), 0.0, 1.0)


def _solve_first_point(
    system, diffusion, u_l, family, m, epsilon, mesh, states, u_r_guess, policy, tol
):
    """First nonzero amplitude: try directly, else walk eps down to target."""
    try:
        return _solve_curve_point(
            system, diffusion, u_l, family, m, epsilon, mesh, states, u_r_guess,
            policy, tol,
        )
    except NewtonDiverged:
        pass
    mesh_c, states_c, ur_c = mesh, states, u_r_guess
    result = None
    for eps in _eps_path(epsilon):
        mesh_c, states_c, ur_c, report = _solve_curve_point(
            system, diffusion, u_l, family, m, eps, mesh_c, states_c, ur_c, policy, tol
        )
        result = (mesh_c, states_c, ur_c, report)
    return result


def _grid_tangents(ms, states):
    tangents = np.empty_like(states)
    if ms.size == 1:
        tangents[:] = 0.0
        return tangents
    for i in range(ms.size):
        if i == 0:
            tangents[i] = (states[1] - states[0]) / (ms[1] - ms[0])
        elif i == ms.size - 1:
            tangents[i] = (states[-1] - states[-2]) / (ms[-1] - ms[-2])
        else:
            dm = ms[i + 1] - ms[i - 1]
            tangents[i] = (states[i + 1] - states[i - 1]) / dm
    return tangents


def cone_check(curve: WaveCurve, c: float = 0.1) -> ConeReport:
    """Tangents must stay in the cone |t . l_j(0)| >= (1 - c) |t|."""
    if curve.m_values.size < 3:
        raise ValueError("cone check needs at least three curve points")
    threshold = 1.0 - c
    min_margin = float(curve.cone_margins.min())
    return ConeReport(
        threshold=threshold,
        min_margin=min_margin,
        margins=curve.cone_margins,
        passed=min_margin >= threshold,
    )


def lipschitz_probe(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    family: int,
    base_states: Sequence,
    m_values: Sequence[float],
    epsilon: float,
    mesh_policy: Optional[MeshPolicy] = None,
    *,
    newton_tol: float = DEFAULT_NEWTON_TOL,
) -> LipschitzReport:
    """Max difference quotient of psi over (m, u_l) probe pairs."""
    curves = [
        trace_wave_curve(
            system, diffusion, b, family, m_values, epsilon, mesh_policy,
            newton_tol=newton_tol, store_profiles=False,
        )
        for b in base_states
    ]
    points = []
    for curve in curves:
        for m, psi in zip(curve.m_values, curve.states):
            points.append((float(m), curve.base_state, psi))
    worst = 0.0
    count = 0
    for i in range(len(points)):
        mi, bi, pi = points[i]
        for j in range(i + 1, len(points)):
            mj, bj, pj = points[j]
            denom = abs(mi - mj) + float(np.linalg.norm(bi - bj))
            if denom < 1e-14:
                continue
            worst = max(worst, float(np.linalg.norm(pi - pj)) / denom)
            count += 1
    return LipschitzReport(constant=worst, pair_count=count)
