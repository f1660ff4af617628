"""Self-similar two-point boundary-value solvers.

Three problems share the same machinery: the viscous profile equation
eps (B(u) u')' = (A(u) - y) u' on [-L, L], the same equation on [0, L] with
boundary data, and the first-order relaxation system v' = y u',
(a^2 B(u) - y^2) u' = (f(u) - v)/eps.  Discretization is conservative-flux
central differencing (box scheme for the relaxation system), solved by damped
Newton with graph-colored finite-difference Jacobians, with continuation in
eps and layer-driven mesh refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    DomainViolation,
    MissingFlux,
    NewtonDiverged,
    ResonanceSingular,
    StateOutOfBall,
)
from .meshing import (
    Mesh,
    MeshPolicy,
    budget_check,
    enforce_grading,
    interp_states,
    jump_marks,
    refine,
    uniform_mesh,
)
from .systems import DiffusionModel, HyperbolicSystem, ball_lattice

DEFAULT_NEWTON_TOL = 1e-10


@dataclass(frozen=True)
class NewtonReport:
    iterations: int
    residual_norm: float
    backtracks: int
    converged: bool


@dataclass(frozen=True)
class ContinuationSchedule:
    """Decreasing diffusion parameters walked with solution reuse."""

    epsilons: tuple

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if not eps or any(e <= 0 for e in eps):
            raise ValueError("schedule needs positive epsilons")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("schedule must be strictly decreasing")
        object.__setattr__(self, "epsilons", eps)

    @classmethod
    def geometric(cls, start: float, factor: float, minimum: float):
        if not (start > minimum > 0):
            raise ValueError("need epsilon_start > epsilon_min > 0")
        if not (0 < factor < 1):
            raise ValueError("factor must lie in (0, 1)")
        values = []
        v = start
        while v >= minimum * (1 - 1e-12):
            values.append(v)
            v *= factor
        return cls(tuple(values))

    @classmethod
    def from_values(cls, values: Sequence[float]):
        return cls(tuple(values))


@dataclass
class SelfSimilarSolution:
    """Converged profile at one eps; treated as immutable once returned."""

    mesh: Mesh
    states: np.ndarray
    epsilon: float
    kind: str  # "diffusive", "relaxation", or "boundary-diffusive"
    newton: NewtonReport
    aux_states: Optional[np.ndarray] = None
    relaxation_speed: Optional[float] = None
    ball_excess: float = 0.0
    boundary_index: Optional[int] = None
    characteristic: Optional[bool] = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=float)
        self.states.flags.writeable = False
        if self.aux_states is not None:
            self.aux_states = np.asarray(self.aux_states, dtype=float)
            self.aux_states.flags.writeable = False


def interpolate_solution(solution: SelfSimilarSolution, new_mesh: Mesh) -> np.ndarray:
    """States of a solution transferred to a new mesh (piecewise linear)."""
    return interp_states(solution.mesh, solution.states, new_mesh)


# ---------------------------------------------------------------------------
# derivatives and residuals


def centered_gradient(nodes: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Second-order first derivative on a nonuniform mesh, one-sided at ends."""
    y = np.asarray(nodes, dtype=float)
    u = np.atleast_2d(np.asarray(states, dtype=float))
    h = np.diff(y)
    out = np.empty_like(u)
    hm, hp = h[:-1, None], h[1:, None]
    wl = -hp / (hm * (hm + hp))
    wr = hm / (hp * (hm + hp))
    wc = -(wl + wr)
    out[1:-1] = wl * u[:-2] + wc * u[1:-1] + wr * u[2:]
    out[0] = (u[1] - u[0]) / h[0]
    out[-1] = (u[-1] - u[-2]) / h[-1]
    return out


def diffusion_fluxes(diffusion, epsilon, nodes, states):
    """eps * B(u_mid) (u_{k+1} - u_k)/h at cell midpoints."""
    u = states
    h = np.diff(nodes)[:, None]
    umid = 0.5 * (u[1:] + u[:-1])
    bmid = np.asarray(diffusion.matrix(umid), dtype=float)
    return epsilon * np.einsum("kij,kj->ki", bmid, (u[1:] - u[:-1]) / h)


def diffusive_residual(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    epsilon: float,
    mesh: Mesh,
    states: np.ndarray,
    u_left: np.ndarray,
    u_right: np.ndarray,
    *,
    enforce_ball: bool = True,
) -> np.ndarray:
    """Discrete eps (B u')' - (A(u) - y) u' at interior nodes; data rows at ends.

    Conservative flux form: the diffusion term differences cell fluxes
    B(u_mid) du/h, the convection term uses the centered nonuniform gradient.
    Newton iterates may transiently leave the admissible ball, so the solver
    calls this with ``enforce_ball=False`` and re-checks at convergence.
    """
    y = mesh.nodes
    u = np.asarray(states, dtype=float)
    if enforce_ball and not system.contains(u):
        raise StateOutOfBall(
            f"states leave admissible ball by {system.ball_excess(u):.3e}"
        )
    q = diffusion_fluxes(diffusion, epsilon, y, u)
    hk = 0.5 * (y[2:] - y[:-2])[:, None]
    diff_term = (q[1:] - q[:-1]) / hk
    du = centered_gradient(y, u)[1:-1]
    amat = np.asarray(system.jacobian(u[1:-1]), dtype=float)
    conv = np.einsum("kij,kj->ki", amat, du) - y[1:-1, None] * du
    res = np.empty_like(u)
    res[1:-1] = diff_term - conv
    res[0] = u[0] - u_left
    res[-1] = u[-1] - u_right
    return res


def relaxation_residual(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    a_speed: float,
    epsilon: float,
    mesh: Mesh,
    states: np.ndarray,
    aux_states: np.ndarray,
    u_left: np.ndarray,
    u_right: np.ndarray,
) -> np.ndarray:
    """Box-scheme residual of u' = (a^2 B - y^2)^-1 (f(u) - v)/eps, v' = y u'.

    Flat layout: [u(-L) - u_l] ++ per-cell [u-rows, v-rows] ++ [u(L) - u_r].
    """
    if system.flux is None:
        raise MissingFlux("relaxation approximation needs a conservative system")
    n = system.dimension
    y = mesh.nodes
    u = np.asarray(states, dtype=float)
    v = np.asarray(aux_states, dtype=float)
    h = np.diff(y)[:, None]
    ymid = 0.5 * (y[1:] + y[:-1])
    umid = 0.5 * (u[1:] + u[:-1])
    vmid = 0.5 * (v[1:] + v[:-1])
    bmid = np.asarray(diffusion.matrix(umid), dtype=float)
    mmat = a_speed**2 * bmid - (ymid**2)[:, None, None] * np.eye(n)
    dets = np.linalg.det(mmat)
    if np.abs(dets).min() < 1e-12:
        raise ResonanceSingular(
            f"a^2 B - y^2 nearly singular (|det|={np.abs(dets).min():.2e})"
        )
    rhs = np.asarray(system.flux(umid), dtype=float) - vmid
    w = np.linalg.solve(mmat, rhs[..., None])[..., 0] / epsilon
    res_u = (u[1:] - u[:-1]) / h - w
    res_v = (v[1:] - v[:-1]) / h - ymid[:, None] * (u[1:] - u[:-1]) / h
    cells = np.concatenate([res_u, res_v], axis=1)  # (K-1, 2n)
    return np.concatenate([(u[0] - u_left), cells.ravel(), (u[-1] - u_right)])


# ---------------------------------------------------------------------------
# Newton with colored finite-difference Jacobians

FD_STEP = 1e-7


def _fd_jacobian_tridiag(res_fn, x, f0, fd_step=FD_STEP):
    """Jacobian of a residual with node-tridiagonal dependence.

    ``x`` and ``f0`` have shape (K, n).  Three node colors suffice: among any
    three consecutive nodes each residue class mod 3 appears exactly once, so
    each residual row sees at most one perturbed node per color.
    """
    k_nodes, n = x.shape
    idx = np.arange(k_nodes)
    cand = np.stack([idx - 1, idx, idx + 1])
    rows_all, cols_all, vals_all = [], [], []
    for color in range(3):
        match = (cand % 3 == color) & (cand >= 0) & (cand < k_nodes)
        src = np.where(match, cand, -1).max(axis=0)
        valid = src >= 0
        vrows = idx[valid]
        vsrc = src[valid]
        for comp in range(n):
            delta = fd_step * (1.0 + np.abs(x[:, comp]))
            xp = x.copy()
            mask = idx % 3 == color
            xp[mask, comp] += delta[mask]
            fp = res_fn(xp)
            df = (fp[vrows] - f0[vrows]) / delta[vsrc][:, None]
            rows = (vrows[:, None] * n + np.arange(n)[None, :]).ravel()
            cols = np.repeat(vsrc * n + comp, n)
            rows_all.append(rows)
            cols_all.append(cols)
            vals_all.append(df.ravel())
    return sp.coo_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(k_nodes * n, k_nodes * n),
    ).tocsc()


def _fd_jacobian_cells(res_fn, z, f0, n_state, fd_step=FD_STEP):
    """Jacobian for the box-scheme layout [bc; cells; bc] with 2 node colors.

    ``z`` has shape (K, m) with m = 2 n_state; cell rows depend on nodes
    (k, k+1), boundary rows on the first/last node.
    """
    k_nodes, m = z.shape
    n = n_state
    n_rows = f0.size
    # source node of every residual row, per color
    cell_idx = np.repeat(np.arange(k_nodes - 1), m)
    row_node_a = np.concatenate([np.zeros(n, int), cell_idx, np.full(n, k_nodes - 1)])
    row_node_b = np.concatenate([np.zeros(n, int), cell_idx + 1, np.full(n, k_nodes - 1)])
    rows_all, cols_all, vals_all = [], [], []
    row_idx = np.arange(n_rows)
    for color in range(2):
        src = np.where(
            row_node_a % 2 == color,
            row_node_a,
            np.where(row_node_b % 2 == color, row_node_b, -1),
        )
        valid = src >= 0
        vrows = row_idx[valid]
        vsrc = src[valid]
        node_mask = np.arange(k_nodes) % 2 == color
        for comp in range(m):
            delta = fd_step * (1.0 + np.abs(z[:, comp]))
            zp = z.copy()
            zp[node_mask, comp] += delta[node_mask]
            fp = res_fn(zp)
            df = (fp[vrows] - f0[vrows]) / delta[vsrc]
            rows_all.append(vrows)
            cols_all.append(vsrc * m + comp)
            vals_all.append(df)
    return sp.coo_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(n_rows, k_nodes * m),
    ).tocsc()


def newton_solve(res_fn, jac_fn, x0, tol, max_iter=60, max_backtracks=30, context=""):
    """Damped Newton: residual-monotone halving line search on the inf-norm."""
    x = np.asarray(x0, dtype=float).copy()
    f = res_fn(x)
    fn = float(np.abs(f).max())
    backtracks = 0
    for it in range(max_iter):
        if fn <= tol:
            return x, NewtonReport(it, fn, backtracks, True)
        jac = jac_fn(x, f)
        try:
            dx = spla.splu(jac.tocsc()).solve(-f.ravel())
        except RuntimeError as exc:
            raise NewtonDiverged(
                f"singular Jacobian {context}", residual=fn, iterations=it
            ) from exc
        dx = dx.reshape(x.shape)
        alpha = 1.0
        accepted = False
        for bt in range(max_backtracks + 1):
            xt = x + alpha * dx
            try:
                ft = res_fn(xt)
                ftn = float(np.abs(ft).max())
            except (DomainViolation, ResonanceSingular, np.linalg.LinAlgError):
                ftn = np.inf  # reject the trial step, keep backtracking
            if np.isfinite(ftn) and ftn < fn:
                x, f, fn = xt, ft, ftn
                backtracks += bt
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            raise NewtonDiverged(
                f"line search failed at residual {fn:.3e} (tol {tol:.1e}) {context}",
                residual=fn,
                iterations=it,
            )
    if fn <= tol:
        return x, NewtonReport(max_iter, fn, backtracks, True)
    raise NewtonDiverged(
        f"no convergence in {max_iter} iterations {context}", residual=fn
    )


# ---------------------------------------------------------------------------
# refinement drivers


def band_rate_bound(system: HyperbolicSystem):
    """Upper bound for max_j |mu_j(u, y)| from the speed bands alone."""
    lo = float(system.speed_bands[0, 0])
    hi = float(system.speed_bands[-1, 1])

    def rates(ymid):
        return np.maximum(np.abs(lo - ymid), np.abs(hi - ymid))

    return rates


def _refinement_marks(mesh, states, epsilon, policy, rate_fn):
    ymid = 0.5 * (mesh.nodes[1:] + mesh.nodes[:-1])
    marks = mesh.spacings * rate_fn(ymid) / epsilon > policy.peclet
    marks |= jump_marks(states, policy.du_jump)
    return marks


def _refine_with_states(mesh, states, epsilon, policy, rate_fn, context):
    """Refine until criteria hold on the (interpolated) states; no solves."""
    for _ in range(policy.max_refine_passes):
        marks = _refinement_marks(mesh, states, epsilon, policy, rate_fn)
        if not marks.any():
            break
        new_mesh = enforce_grading(refine(mesh, marks), policy.grading)
        budget_check(new_mesh, policy, context)
        states = interp_states(mesh, states, new_mesh)
        mesh = new_mesh
    return mesh, states


# ---------------------------------------------------------------------------
# the three solvers


def _check_data_in_ball(system, *data):
    for u in data:
        if not system.contains(u):
            raise StateOutOfBall(f"datum {np.asarray(u)} outside admissible ball")


def _ramp(u_a, u_b, mesh):
    t = (mesh.nodes - mesh.nodes[0]) / (mesh.nodes[-1] - mesh.nodes[0])
    return np.outer(1 - t, u_a) + np.outer(t, u_b)


def _converged_ball_guard(system, states, epsilon):
    excess = system.ball_excess(states)
    if excess > 1e-9 * (1.0 + system.ball_radius):
        raise StateOutOfBall(
            f"converged solution leaves ball by {excess:.3e} at eps={epsilon:.3e}"
        )
    return excess


def _solve_diffusive_at_eps(
    system, diffusion, u_a, u_b, mesh, states, epsilon, policy, rate_fn, tol
):
    u_a = np.asarray(u_a, dtype=float)
    u_b = np.asarray(u_b, dtype=float)

    def res(x):
        return diffusive_residual(
            system, diffusion, epsilon, mesh_cur, x, u_a, u_b, enforce_ball=False
        )

    mesh_cur = mesh
    mesh_cur, states = _refine_with_states(
        mesh_cur, states, epsilon, policy, rate_fn, f"(eps={epsilon:.3e})"
    )

    def solve_current(x):
        return newton_solve(
            lambda xx: res(xx),
            lambda xx, f0: _fd_jacobian_tridiag(res, xx, f0),
            x,
            tol,
            context=f"(diffusive, eps={epsilon:.3e}, nodes={mesh_cur.n_nodes})",
        )

    states, report = solve_current(states)
    for _ in range(policy.max_refine_passes):
        marks = _refinement_marks(mesh_cur, states, epsilon, policy, rate_fn)
        if not marks.any():
            break
        new_mesh = enforce_grading(refine(mesh_cur, marks), policy.grading)
        budget_check(new_mesh, policy, f"(eps={epsilon:.3e})")
        states = interp_states(mesh_cur, states, new_mesh)
        mesh_cur = new_mesh
        states, report = solve_current(states)
    return mesh_cur, states, report


def _continuation(solve_at_eps, schedule, mesh, states, max_depth=8):
    """Walk the schedule, bisecting eps-steps geometrically on divergence."""
    solutions = []
    prev_eps = None

    def advance(eps, prev, depth):
        nonlocal mesh, states
        try:
            return solve_at_eps(mesh, states, eps)
        except NewtonDiverged:
            if depth >= max_depth or prev is None:
                raise
            mid = math.sqrt(prev * eps)
            mesh, states, _ = advance(mid, prev, depth + 1)
            return advance(eps, mid, depth + 1)

    for eps in schedule.epsilons:
        mesh, states, report = advance(eps, prev_eps, 0)
        solutions.append((eps, mesh, states, report))
        prev_eps = eps
    return solutions


def solve_riemann_diffusive(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    u_l,
    u_r,
    schedule: ContinuationSchedule,
    mesh_policy: Optional[MeshPolicy] = None,
    *,
    newton_tol: float = DEFAULT_NEWTON_TOL,
) -> list:
    """Viscous profiles for the full-line problem, one per scheduled eps.

    The first eps starts from the linear ramp between the data; each later
    eps reuses the previous profile interpolated onto the refined mesh.
    """
    policy = mesh_policy or MeshPolicy()
    u_l = np.asarray(u_l, dtype=float).reshape(system.dimension)
    u_r = np.asarray(u_r, dtype=float).reshape(system.dimension)
    _check_data_in_ball(system, u_l, u_r)
    length = system.domain_half_width
    mesh = uniform_mesh(-length, length, policy.initial_nodes)
    states = _ramp(u_l, u_r, mesh)
    rate_fn = band_rate_bound(system)

    def at_eps(mesh_in, states_in, eps):
        return _solve_diffusive_at_eps(
            system, diffusion, u_l, u_r, mesh_in, states_in, eps, policy, rate_fn, newton_tol
        )

    solutions = []
    for eps, mesh_k, states_k, report in _continuation(at_eps, schedule, mesh, states):
        excess = _converged_ball_guard(system, states_k, eps)
        solutions.append(
            SelfSimilarSolution(
                mesh=mesh_k,
                states=states_k,
                epsilon=eps,
                kind="diffusive",
                newton=report,
                ball_excess=excess,
            )
        )
    return solutions


def solve_boundary_diffusive(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    u_b,
    u_r,
    schedule: ContinuationSchedule,
    mesh_policy: Optional[MeshPolicy] = None,
    *,
    newton_tol: float = DEFAULT_NEWTON_TOL,
) -> list:
    """Half-space profiles on [0, L] with boundary datum u_b at y = 0.

    Output is annotated with the boundary family index p (smallest j whose
    band reaches positive speeds) and whether that family is characteristic
    (0 inside its band); the 90%-variation layer width is reported per eps.
    """
    policy = mesh_policy or MeshPolicy()
    u_b = np.asarray(u_b, dtype=float).reshape(system.dimension)
    u_r = np.asarray(u_r, dtype=float).reshape(system.dimension)
    _check_data_in_ball(system, u_b, u_r)
    bands = system.speed_bands
    positive = np.nonzero(bands[:, 1] > 0)[0]
    p_index = int(positive[0]) + 1 if positive.size else None
    characteristic = (
        bool(bands[p_index - 1, 0] < 0 < bands[p_index - 1, 1]) if p_index else None
    )
    length = system.domain_half_width
    mesh = uniform_mesh(0.0, length, policy.initial_nodes)
    states = _ramp(u_b, u_r, mesh)
    rate_fn = band_rate_bound(system)

    def at_eps(mesh_in, states_in, eps):
        return _solve_diffusive_at_eps(
            system, diffusion, u_b, u_r, mesh_in, states_in, eps, policy, rate_fn, newton_tol
        )

    solutions = []
    for eps, mesh_k, states_k, report in _continuation(at_eps, schedule, mesh, states):
        excess = _converged_ball_guard(system, states_k, eps)
        sol = SelfSimilarSolution(
            mesh=mesh_k,
            states=states_k,
            epsilon=eps,
            kind="boundary-diffusive",
            newton=report,
            ball_excess=excess,
            boundary_index=p_index,
            characteristic=characteristic,
        )
        sol.diagnostics["layer_width_90"] = boundary_layer_width(sol)
        sol.diagnostics["layer_width_by_family"] = boundary_layer_width_by_family(
            sol, system
        )
        solutions.append(sol)
    return solutions


def boundary_layer_width(
    solution: SelfSimilarSolution, fraction: float = 0.9, cutoff: Optional[float] = None
) -> float:
    """Smallest y containing ``fraction`` of the variation on [0, cutoff]."""
    y = solution.mesh.nodes
    cutoff = 0.5 * y[-1] if cutoff is None else cutoff
    inc = np.linalg.norm(np.diff(solution.states, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(inc)])
    total = np.interp(cutoff, y, cum)
    if total <= 0:
        return 0.0
    target = fraction * total
    k = int(np.searchsorted(cum, target))
    return float(y[min(k, y.size - 1)])


def boundary_layer_width_by_family(
    solution: SelfSimilarSolution, system: HyperbolicSystem, fraction: float = 0.9
) -> dict:
    """Per-family 90%-variation widths using the reference left frame."""
    from .systems import eigendecompose

    frame = eigendecompose(system, system.reference_state, check_ball=False)
    y = solution.mesh.nodes
    widths = {}
    for j in range(system.dimension):
        inc = np.abs(np.diff(solution.states, axis=0) @ frame.left[j])
        cum = np.concatenate([[0.0], np.cumsum(inc)])
        total = np.interp(0.5 * y[-1], y, cum)
        if total <= 0:
            widths[j + 1] = 0.0
            continue
        k = int(np.searchsorted(cum, fraction * total))
        widths[j + 1] = float(y[min(k, y.size - 1)])
    return widths


def relaxation_rate_bound(system: HyperbolicSystem, a_speed: float, b_floor: float):
    """Growth-rate bound for the reduced relaxation ODE (a^2 B - y^2) u' = ..."""
    hyp = band_rate_bound(system)

    def rates(ymid):
        denom = a_speed**2 * b_floor - ymid**2
        return hyp(ymid) / np.maximum(denom, 1e-12)

    return rates


def solve_riemann_relaxation(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    a_speed: float,
    u_l,
    u_r,
    schedule: ContinuationSchedule,
    mesh_policy: Optional[MeshPolicy] = None,
    *,
    newton_tol: float = DEFAULT_NEWTON_TOL,
) -> list:
    """Relaxation profiles (u, v) with data imposed on u only.

    Requires the subcharacteristic-like condition a^2 min-eig B(u) > L^2 so
    the reduced first-order system stays nonsingular on the whole domain; the
    equilibrium defect |v - f(u)| at the endpoints is reported per eps.
    """
    if system.flux is None:
        raise MissingFlux("relaxation approximation needs a conservative system")
    policy = mesh_policy or MeshPolicy()
    n = system.dimension
    u_l = np.asarray(u_l, dtype=float).reshape(n)
    u_r = np.asarray(u_r, dtype=float).reshape(n)
    _check_data_in_ball(system, u_l, u_r)
    length = system.domain_half_width

    samples = ball_lattice(system.reference_state, system.ball_radius, 5)
    bsam = np.asarray(diffusion.matrix(samples), dtype=float)
    b_floor = float(np.linalg.eigvals(bsam).real.min())
    if a_speed**2 * b_floor <= length**2:
        raise ResonanceSingular(
            f"a^2 min-eig B = {a_speed ** 2 * b_floor:.3f} must exceed L^2 = {length ** 2:.3f}"
        )

    mesh = uniform_mesh(-length, length, policy.initial_nodes)
    u0 = _ramp(u_l, u_r, mesh)
    z = np.concatenate([u0, np.asarray(system.flux(u0), dtype=float)], axis=1)
    rate_fn = relaxation_rate_bound(system, a_speed, b_floor)

    def at_eps(mesh_in, z_in, eps):
        return _solve_relaxation_at_eps(
            system, diffusion, a_speed, u_l, u_r, mesh_in, z_in, eps, policy, rate_fn, newton_tol
        )

    solutions = []
    for eps, mesh_k, z_k, report in _continuation(at_eps, schedule, mesh, z):
        u_k, v_k = z_k[:, :n], z_k[:, n:]
        excess = _converged_ball_guard(system, u_k, eps)
        sol = SelfSimilarSolution(
            mesh=mesh_k,
            states=u_k,
            aux_states=v_k,
            epsilon=eps,
            kind="relaxation",
            newton=report,
            relaxation_speed=a_speed,
            ball_excess=excess,
        )
        fl = np.asarray(system.flux(u_k[0]))
        fr = np.asarray(system.flux(u_k[-1]))
        sol.diagnostics["equilibrium_defect"] = float(
            max(np.abs(v_k[0] - fl).max(), np.abs(v_k[-1] - fr).max())
        )
        solutions.append(sol)
    return solutions


def _solve_relaxation_at_eps(
    system, diffusion, a_speed, u_l, u_r, mesh, z, epsilon, policy, rate_fn, tol
):
    n = system.dimension

    def res(zz):
        return relaxation_residual(
            system, diffusion, a_speed, epsilon, mesh_cur, zz[:, :n], zz[:, n:], u_l, u_r
        )

    mesh_cur = mesh
    mesh_cur, z = _refine_with_states(
        mesh_cur, z, epsilon, policy, rate_fn, f"(relaxation eps={epsilon:.3e})"
    )

    def solve_current(zz):
        return newton_solve(
            lambda x: res(x),
            lambda x, f0: _fd_jacobian_cells(res, x, f0, n),
            zz,
            tol,
            context=f"(relaxation, eps={epsilon:.3e}, nodes={mesh_cur.n_nodes})",
        )

    z, report = solve_current(z)
    for _ in range(policy.max_refine_passes):
        marks = _refinement_marks(mesh_cur, z, epsilon, policy, rate_fn)
        if not marks.any():
            break
        new_mesh = enforce_grading(refine(mesh_cur, marks), policy.grading)
        budget_check(new_mesh, policy, f"(relaxation eps={epsilon:.3e})")
        z = interp_states(mesh_cur, z, new_mesh)
        mesh_cur = new_mesh
        z, report = solve_current(z)
    return mesh_cur, z, report
