"""Analytic machinery on computed profiles.

Characteristic components in the pencil frames, the coupled component
system and its coefficients, uncoupled and coupled linearized wave measures
with sandwich-bound fitting, wave interaction coefficients, total variation,
entropy residuals, and extraction of the vanishing-viscosity limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bvp import SelfSimilarSolution, centered_gradient, diffusion_fluxes
from .errors import (
    MissingFlux,
    MultipleZeroCrossings,
    OverflowGuard,
    PlateauNotFlat,
    SingularLinearSystem,
)
from .geneigen import GeneralizedSpectrum, frame_along_profile, generalized_eigen, stack_frames
from .systems import DiffusionModel, EntropyPair, HyperbolicSystem, eigendecompose

LOG_HUGE = 700.0  # exp overflow threshold for float64


# ---------------------------------------------------------------------------
# frames and characteristic decomposition


def profile_frames(system, diffusion, solution) -> list:
    """Sign-chained pencil frames at every node of a solution."""
    return frame_along_profile(system, diffusion, solution)


@dataclass(frozen=True)
class CharacteristicDecomposition:
    """Coordinates of u' in the pencil frames, plus the fixed-frame variant.

    ``components[k, j]`` solves u'(y_k) = sum_j components[k, j] r_j(u_k, y_k)
    exactly; ``alpha[k, j]`` is the reference-frame projection l_j(0) . u'.
    """

    epsilon: float
    gradient: np.ndarray
    components: np.ndarray
    alpha: np.ndarray

    def reconstruction_error(self, frames) -> float:
        _, right, _ = stack_frames(frames)
        rec = np.einsum("kij,kj->ki", right, self.components)
        return float(np.abs(rec - self.gradient).max())


def decompose(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    solution: SelfSimilarSolution,
    frames: Optional[list] = None,
) -> CharacteristicDecomposition:
    """Expand the profile derivative in the pencil frames.

    The coordinates are obtained by solving R a = u' per node, which keeps
    the reconstruction exact for any diffusion matrix (the left-frame
    projection l . u' agrees with them only up to the distance of B from the
    identity).
    """
    if frames is None:
        frames = profile_frames(system, diffusion, solution)
    du = centered_gradient(solution.mesh.nodes, solution.states)
    _, right, _ = stack_frames(frames)
    comps = np.linalg.solve(right, du[..., None])[..., 0]
    ref = eigendecompose(system, system.reference_state, check_ball=False)
    alpha = du @ ref.left.T
    return CharacteristicDecomposition(
        epsilon=solution.epsilon, gradient=du, components=comps, alpha=alpha
    )


# ---------------------------------------------------------------------------
# component system coefficients and residual


@dataclass(frozen=True)
class ComponentSystemCoefficients:
    """pi[k, i, j] = l_i . B d_y r_j and kappa[k, i, j, l] = -l_i . D_u(B r_l) r_j."""

    pi: np.ndarray
    kappa: np.ndarray

    def quadratic_source(self, components: np.ndarray) -> np.ndarray:
        return np.einsum("kijl,kj,kl->ki", self.kappa, components, components)


def _aligned_spectrum(system, diffusion, u, y, base: GeneralizedSpectrum):
    # Sign against the nearby base frame directly; skips the standard-frame
    # eigendecompositions a fresh pencil solve would perform.
    from .systems import EigenFrame

    ref = EigenFrame(state=base.state, eigenvalues=base.mu, right=base.right, left=base.left)
    spec = generalized_eigen(
        system, diffusion, u, y, reference_frame=ref, check_ball=False
    )
    flips = np.ones(spec.mu.size)
    for j in range(spec.mu.size):
        if float(spec.right[:, j] @ base.right[:, j]) < 0:
            flips[j] = -1.0
    if np.any(flips < 0):
        spec = GeneralizedSpectrum(
            y=spec.y,
            state=spec.state,
            mu=spec.mu,
            right=spec.right * flips[None, :],
            left=spec.left * flips[:, None],
        )
    return spec


def component_coefficients(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    solution: SelfSimilarSolution,
    frames: Optional[list] = None,
    *,
    fd_step: float = 1e-6,
) -> ComponentSystemCoefficients:
    """Coupling matrices of the component ODE system, by finite differences.

    d_y r_j is taken at frozen state; the state derivative of u -> B(u) r_l
    is taken directionally along r_j, so model authors never supply
    analytic derivatives.
    """
    if frames is None:
        frames = profile_frames(system, diffusion, solution)
    n = system.dimension
    y = solution.mesh.nodes
    u = solution.states
    k_nodes = y.size
    pi = np.empty((k_nodes, n, n))
    kappa = np.empty((k_nodes, n, n, n))
    for k in range(k_nodes):
        base = frames[k]
        bmat = np.asarray(diffusion.matrix(u[k]), dtype=float).reshape(n, n)
        dy = fd_step * (1.0 + abs(y[k]))
        plus = _aligned_spectrum(system, diffusion, u[k], y[k] + dy, base)
        minus = _aligned_spectrum(system, diffusion, u[k], y[k] - dy, base)
        dr_dy = (plus.right - minus.right) / (2 * dy)
        pi[k] = base.left @ bmat @ dr_dy
        duv = fd_step * (1.0 + np.abs(u[k]).max())
        for j in range(n):
            up = u[k] + duv * base.right[:, j]
            um = u[k] - duv * base.right[:, j]
            sp_p = _aligned_spectrum(system, diffusion, up, y[k], base)
            sp_m = _aligned_spectrum(system, diffusion, um, y[k], base)
            bp = np.asarray(diffusion.matrix(up), dtype=float).reshape(n, n)
            bm = np.asarray(diffusion.matrix(um), dtype=float).reshape(n, n)
            dgr = (bp @ sp_p.right - bm @ sp_m.right) / (2 * duv)
            # kappa[i, j, l] = -l_i . D_u(B r_l) r_j for this direction j
            kappa[k, :, j, :] = -(base.left @ dgr)
    return ComponentSystemCoefficients(pi=pi, kappa=kappa)


def half_node_components(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    solution: SelfSimilarSolution,
    frames: Optional[list] = None,
) -> np.ndarray:
    """Frame coordinates of the exact cell slopes (u_{k+1} - u_k)/h."""
    if frames is None:
        frames = profile_frames(system, diffusion, solution)
    y = solution.mesh.nodes
    u = solution.states
    h = np.diff(y)
    umid = 0.5 * (u[1:] + u[:-1])
    ymid = 0.5 * (y[1:] + y[:-1])
    a_mid = np.empty((h.size, system.dimension))
    for m in range(h.size):
        spec = _aligned_spectrum(system, diffusion, umid[m], ymid[m], frames[m])
        a_mid[m] = np.linalg.solve(spec.right, (u[m + 1] - u[m]) / h[m])
    return a_mid


def component_mass(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    solution: SelfSimilarSolution,
    frames: Optional[list] = None,
) -> np.ndarray:
    """int a_j dy by midpoint quadrature; telescopes exactly for scalars."""
    a_mid = half_node_components(system, diffusion, solution, frames)
    return np.diff(solution.mesh.nodes) @ a_mid


def component_residual(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    solution: SelfSimilarSolution,
    frames: Optional[list] = None,
    decomposition: Optional[CharacteristicDecomposition] = None,
    coefficients: Optional[ComponentSystemCoefficients] = None,
) -> np.ndarray:
    """Residual of a_i' - (mu_i/eps) a_i + sum_j pi_ij a_j - Q_i at interior nodes.

    a' is differenced from half-node components built on the solver's own
    cell slopes, which makes the identity exact (up to the Newton residual)
    in the scalar identity-diffusion case and second-order otherwise.
    """
    if frames is None:
        frames = profile_frames(system, diffusion, solution)
    if decomposition is None:
        decomposition = decompose(system, diffusion, solution, frames)
    if coefficients is None:
        coefficients = component_coefficients(system, diffusion, solution, frames)
    y = solution.mesh.nodes
    eps = solution.epsilon
    a_mid = half_node_components(system, diffusion, solution, frames)
    hk = 0.5 * (y[2:] - y[:-2])[:, None]
    da = (a_mid[1:] - a_mid[:-1]) / hk
    mu, _, _ = stack_frames(frames)
    a = decomposition.components
    q = coefficients.quadratic_source(a)
    res = np.zeros_like(a)
    coupling = np.einsum("kij,kj->ki", coefficients.pi, a)
    res[1:-1] = da - (mu[1:-1] / eps) * a[1:-1] + coupling[1:-1] - q[1:-1]
    return res


# ---------------------------------------------------------------------------
# wave measures


@dataclass
class WaveMeasureSet:
    """Anchors, potentials, and linearized wave measures of one profile."""

    epsilon: float
    rho: np.ndarray
    rho_clamped: np.ndarray
    g: np.ndarray
    normalizers: np.ndarray
    phi_star: np.ndarray
    phi: Optional[np.ndarray] = None
    sandwich_constant: Optional[float] = None
    sup_deviation: Optional[float] = None
    eta: Optional[float] = None


def _single_crossing(nodes, mu_col):
    """Anchor where mu changes sign; clamps to the nearer endpoint if none."""
    sgn = np.where(mu_col >= 0.0, 1, -1)
    changes = np.nonzero(np.diff(sgn))[0]
    if changes.size == 0:
        clamped = True
        rho = nodes[-1] if sgn[0] > 0 else nodes[0]
        return float(rho), clamped
    if changes.size > 1:
        raise MultipleZeroCrossings(
            f"mu has {changes.size} sign changes; expected at most one"
        )
    k = int(changes[0])
    m0, m1 = mu_col[k], mu_col[k + 1]
    t = m0 / (m0 - m1)
    return float(nodes[k] + t * (nodes[k + 1] - nodes[k])), False


def _potential(nodes, mu_col, rho):
    """g(y) = -int_rho^y of the piecewise-linear interpolant of mu.

    Using the same interpolant for the anchor and the quadrature keeps g
    exactly nonnegative when mu crosses zero once.
    """
    h = np.diff(nodes)
    cells = 0.5 * (mu_col[1:] + mu_col[:-1]) * h
    big_g = np.concatenate([[0.0], np.cumsum(cells)])
    k = int(np.clip(np.searchsorted(nodes, rho) - 1, 0, nodes.size - 2))
    t = rho - nodes[k]
    slope = (mu_col[k + 1] - mu_col[k]) / h[k]
    g_at_rho = big_g[k] + mu_col[k] * t + 0.5 * slope * t * t
    g = g_at_rho - big_g
    if g.min() < -1e-10:
        raise MultipleZeroCrossings(
            f"potential dips to {g.min():.2e}; mu not single-signed around its zero"
        )
    return np.maximum(g, 0.0)


def uncoupled_measures(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    solution: SelfSimilarSolution,
    frames: Optional[list] = None,
) -> WaveMeasureSet:
    """Anchors rho_i, potentials g_i >= 0, and unit-mass measures phi*_i."""
    if frames is None:
        frames = profile_frames(system, diffusion, solution)
    mu, _, _ = stack_frames(frames)
    y = solution.mesh.nodes
    n = system.dimension
    eps = solution.epsilon
    rho = np.empty(n)
    clamped = np.zeros(n, dtype=bool)
    g = np.empty((y.size, n))
    for i in range(n):
        rho[i], clamped[i] = _single_crossing(y, mu[:, i])
        g[:, i] = _potential(y, mu[:, i], rho[i])
    raw = np.exp(-g / eps)
    normalizers = np.trapezoid(raw, y, axis=0)
    phi_star = raw / normalizers
    return WaveMeasureSet(
        epsilon=eps,
        rho=rho,
        rho_clamped=clamped,
        g=g,
        normalizers=normalizers,
        phi_star=phi_star,
    )


def _trapezoid_weights(nodes):
    h = np.diff(nodes)
    w = np.zeros(nodes.size)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def linearized_measures(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    solution: SelfSimilarSolution,
    measures: WaveMeasureSet,
    frames: Optional[list] = None,
    coefficients: Optional[ComponentSystemCoefficients] = None,
    *,
    tail_floor: float = 1e-13,
) -> WaveMeasureSet:
    """Solve the coupled homogeneous system and fit the sandwich constant.

    Collocation uses an integrating-factor box scheme whose uncoupled part
    reproduces phi* exactly, so K = 0 whenever the coupling vanishes.  The
    normalization is int phi_i = 1 per family.  K is fitted where the
    measures carry mass (sum_j phi*_j above ``tail_floor`` of its max);
    outside, both sides underflow and the bound is vacuous.
    """
    if frames is None:
        frames = profile_frames(system, diffusion, solution)
    if coefficients is None:
        coefficients = component_coefficients(system, diffusion, solution, frames)
    y = solution.mesh.nodes
    n = system.dimension
    eps = solution.epsilon
    k_nodes = y.size
    h = np.diff(y)
    dg = measures.g[1:] - measures.g[:-1]  # (K-1, n)
    if np.abs(dg / eps).max() > 50.0:
        raise SingularLinearSystem(
            "mesh too coarse for the measure collocation (cell growth exceeds e^50)"
        )
    ratio = np.exp(-dg / eps)  # exact phi* cell ratios
    pi = coefficients.pi

    rows, cols, vals = [], [], []

    def add(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(v)

    for k in range(k_nodes - 1):
        for i in range(n):
            r = k * n + i
            add(r, (k + 1) * n + i, 1.0)
            add(r, k * n + i, -ratio[k, i])
            for j in range(n):
                add(r, (k + 1) * n + j, 0.5 * h[k] * pi[k + 1, i, j])
                add(r, k * n + j, 0.5 * h[k] * ratio[k, i] * pi[k, i, j])
    w = _trapezoid_weights(y)
    for i in range(n):
        r = (k_nodes - 1) * n + i
        for k in range(k_nodes):
            add(r, k * n + i, w[k])
    mat = sp.coo_matrix(
        (np.array(vals), (np.array(rows), np.array(cols))),
        shape=(k_nodes * n, k_nodes * n),
    ).tocsc()
    rhs = np.zeros(k_nodes * n)
    rhs[(k_nodes - 1) * n :] = 1.0
    try:
        sol = spla.spsolve(mat, rhs)
    except RuntimeError as exc:
        raise SingularLinearSystem(str(exc)) from exc
    if not np.all(np.isfinite(sol)):
        raise SingularLinearSystem("collocation solve produced non-finite measures")
    phi = sol.reshape(k_nodes, n)

    eta = diffusion.eta
    if eta is None:
        b = np.asarray(diffusion.matrix(solution.states), dtype=float)
        eta = float(np.linalg.svd(b - np.eye(n), compute_uv=False)[:, 0].max())
    phi_star = measures.phi_star
    total = phi_star.sum(axis=1)
    mask = total >= tail_floor * total.max()
    dev = np.abs(phi - phi_star)
    sup_dev = float(dev.max())
    if eta <= 1e-14:
        kconst = 0.0 if sup_dev <= 1e-9 else np.inf
    else:
        denom = eta * (phi_star + eps * total[:, None])
        kconst = float((dev[mask] / denom[mask]).max())
    return replace(
        measures,
        phi=phi,
        sandwich_constant=kconst,
        sup_deviation=sup_dev,
        eta=float(eta),
    )


# ---------------------------------------------------------------------------
# interaction coefficients


@dataclass(frozen=True)
class InteractionCoefficients:
    """F[i, j, k, :] along the mesh and its sup norms, anchors at c_i."""

    anchors: np.ndarray
    values: np.ndarray
    sup_norms: np.ndarray

    def triple(self, i: int, j: int, k: int) -> np.ndarray:
        return self.values[i - 1, j - 1, k - 1]

    def sup(self, i: int, j: int, k: int) -> float:
        return float(self.sup_norms[i - 1, j - 1, k - 1])


def interaction_coefficients(
    system: HyperbolicSystem,
    solution: SelfSimilarSolution,
    measures: WaveMeasureSet,
    anchors: Optional[np.ndarray] = None,
) -> InteractionCoefficients:
    """F*_ijk(y) = phi*_i(y) int_{c_i}^y phi*_j phi*_k / phi*_i dx, in log space.

    Anchors default to the measure anchors rho_i (snapped to the nearest
    mesh node); cumulative integrals run outward from the anchor on both
    sides with log-sum-exp accumulation, so large positive exponents of the
    integrand never materialize.
    """
    y = solution.mesh.nodes
    n = system.dimension
    eps = solution.epsilon
    g = measures.g
    log_i = np.log(measures.normalizers)
    anchors = measures.rho if anchors is None else np.asarray(anchors, dtype=float)
    anchor_idx = np.array([int(np.argmin(np.abs(y - c))) for c in anchors])
    h = np.diff(y)
    values = np.zeros((n, n, n, y.size))
    sups = np.zeros((n, n, n))
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        for i in range(n):
            ai = anchor_idx[i]
            for j in range(n):
                for k in range(j, n):
                    log_int = -(g[:, j] + g[:, k] - g[:, i]) / eps
                    cell = np.log(0.5 * h) + np.logaddexp(log_int[:-1], log_int[1:])
                    log_cum = np.full(y.size, -np.inf)
                    if ai < y.size - 1:
                        log_cum[ai + 1 :] = np.logaddexp.accumulate(cell[ai:])
                    right = log_cum.copy()
                    log_cum_left = np.full(y.size, -np.inf)
                    if ai > 0:
                        log_cum_left[:ai] = np.logaddexp.accumulate(cell[:ai][::-1])[::-1]
                    log_mag_r = -g[:, i] / eps + right - log_i[j] - log_i[k]
                    log_mag_l = -g[:, i] / eps + log_cum_left - log_i[j] - log_i[k]
                    if max(log_mag_r.max(), log_mag_l.max()) > LOG_HUGE:
                        where = y[int(np.argmax(np.maximum(log_mag_r, log_mag_l)))]
                        raise OverflowGuard(
                            f"interaction coefficient F[{i + 1},{j + 1},{k + 1}] "
                            f"overflows near y={where:.4f}"
                        )
                    f = np.exp(log_mag_r) - np.exp(log_mag_l)
                    values[i, j, k] = f
                    values[i, k, j] = f
                    sups[i, j, k] = sups[i, k, j] = float(np.abs(f).max())
    return InteractionCoefficients(anchors=y[anchor_idx], values=values, sup_norms=sups)


# ---------------------------------------------------------------------------
# total variation and entropy


def total_variation(solution: SelfSimilarSolution) -> float:
    """Sum of Euclidean state increments along the mesh."""
    return float(np.linalg.norm(np.diff(solution.states, axis=0), axis=1).sum())


def entropy_residual(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    pair: EntropyPair,
    solution: SelfSimilarSolution,
):
    """Worst signed residual of the weak entropy inequality over interior hats.

    For each nonnegative hat theta_k this lumps
    int [(F(u))' - y (U(u))'] theta_k - eps int (grad U . B u')' theta_k;
    with the discrete profile equation and a compatible convex pair the
    value equals minus the quadratic dissipation and must be <= 0 up to
    the scheme's consistency error.
    """
    if system.flux is None:
        raise MissingFlux("entropy residual needs a conservative system")
    y = solution.mesh.nodes
    u = solution.states
    eps = solution.epsilon
    du = centered_gradient(y, u)
    grad_u = np.asarray(pair.entropy_gradient(u), dtype=float)
    grad_f = np.asarray(pair.entropy_flux_gradient(u), dtype=float)
    conv = np.einsum("ki,ki->k", grad_f - y[:, None] * grad_u, du)
    q = diffusion_fluxes(diffusion, 1.0, y, u)
    umid = 0.5 * (u[1:] + u[:-1])
    grad_mid = np.asarray(pair.entropy_gradient(umid), dtype=float)
    p_half = np.einsum("ki,ki->k", grad_mid, q)
    hk = 0.5 * (y[2:] - y[:-2])
    diss = (p_half[1:] - p_half[:-1]) / hk
    residuals = hk * (conv[1:-1] - eps * diss)
    return float(residuals.max()), residuals


# ---------------------------------------------------------------------------
# limit extraction


@dataclass
class LimitRiemannSolution:
    """Plateaus, per-family wave descriptors, and limit diagnostics."""

    gaps: list
    plateaus: np.ndarray
    flatness: np.ndarray
    jumps: np.ndarray
    speeds: np.ndarray
    rarefaction_flags: np.ndarray
    rh_residuals: Optional[np.ndarray]
    tv: float
    tv_ratio: Optional[float]
    cauchy_l1: list
    alpha_hat_min: np.ndarray
    alpha_orientation: np.ndarray
    entropy_residuals: dict = field(default_factory=dict)

    @property
    def n_jumps(self) -> int:
        return int(np.sum(np.linalg.norm(self.jumps, axis=1) > 1e-8))


def band_gaps(system: HyperbolicSystem):
    """Intervals between consecutive speed bands, including the domain ends."""
    length = system.domain_half_width
    bands = system.speed_bands
    lo, hi = -length, length
    gaps = [(lo, float(bands[0, 0]))]
    for j in range(bands.shape[0] - 1):
        gaps.append((float(bands[j, 1]), float(bands[j + 1, 0])))
    gaps.append((float(bands[-1, 1]), hi))
    return gaps


def plateau_flatness(
    solution: SelfSimilarSolution,
    system: HyperbolicSystem,
    margin_fraction: float = 0.25,
):
    """Max-min of the states over the middle part of each gap."""
    y = solution.mesh.nodes
    gaps = band_gaps(system)
    if solution.kind == "boundary-diffusive":
        gaps = [(max(a, 0.0), b) for a, b in gaps if b > 0.0]
    out = []
    for a, b in gaps:
        pad = margin_fraction * (b - a)
        mask = (y >= a + pad) & (y <= b - pad)
        if not mask.any():
            out.append(((a, b), np.nan, None))
            continue
        seg = solution.states[mask]
        out.append(((a, b), float((seg.max(axis=0) - seg.min(axis=0)).max()), seg.mean(axis=0)))
    return out


def extract_limit(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    sweep: Sequence[SelfSimilarSolution],
    entropy_pairs: Sequence[EntropyPair] = (),
    *,
    margin_fraction: float = 0.25,
    alpha_tol: float = 1e-6,
) -> LimitRiemannSolution:
    """Limit structure from an eps-sweep ordered by decreasing eps.

    Plateau states average the middle half of each gap at the smallest eps;
    per-family speeds locate the largest characteristic component inside the
    band.  The hat-function check of the wave measure uses the orientation
    of the measured amplitude, recording single-signedness of l_j(0) . u'.
    """
    if len(sweep) == 0:
        raise ValueError("empty sweep")
    eps_list = [s.epsilon for s in sweep]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("sweep must be ordered by decreasing epsilon")
    finest = sweep[-1]
    n = system.dimension
    u_l = finest.states[0]
    u_r = finest.states[-1]
    scale = max(float(np.linalg.norm(u_r - u_l)), 1e-9)
    tol = max(10 * finest.epsilon, 1e-6) * scale

    flat = plateau_flatness(finest, system, margin_fraction)
    plateaus = []
    flatness = []
    for (a, b), variation, mean in flat:
        if mean is None:
            raise PlateauNotFlat(
                f"gap ({a:.3f}, {b:.3f}) contains no mesh nodes", gap=(a, b)
            )
        if variation > tol:
            raise PlateauNotFlat(
                f"gap ({a:.3f}, {b:.3f}) varies by {variation:.3e} > {tol:.3e}",
                gap=(a, b),
                variation=variation,
            )
        plateaus.append(mean)
        flatness.append(variation)
    plateaus = np.asarray(plateaus)
    flatness = np.asarray(flatness)

    deco = decompose(system, diffusion, finest)
    y = finest.mesh.nodes
    bands = system.speed_bands
    jumps = np.empty((n, n))
    speeds = np.empty(n)
    rare = np.zeros(n, dtype=bool)
    ref = eigendecompose(system, system.reference_state, check_ball=False)
    alpha_min = np.empty(n)
    orientation = np.empty(n)
    hk_full = _trapezoid_weights(y)
    for j in range(n):
        jumps[j] = plateaus[j + 1] - plateaus[j]
        mask = (y >= bands[j, 0]) & (y <= bands[j, 1])
        if np.linalg.norm(jumps[j]) <= 1e-8 * max(1.0, scale) or not mask.any():
            speeds[j] = 0.5 * (bands[j, 0] + bands[j, 1])
        else:
            k_local = int(np.argmax(np.abs(deco.components[mask, j])))
            speeds[j] = y[mask][k_local]
        lam_left = eigendecompose(system, plateaus[j], check_ball=False).eigenvalues[j]
        lam_right = eigendecompose(system, plateaus[j + 1], check_ball=False).eigenvalues[j]
        rare[j] = lam_right > lam_left + max(tol, 1e-8)
        amp = float(ref.left[j] @ jumps[j])
        orientation[j] = 1.0 if amp >= 0 else -1.0
        hat = orientation[j] * deco.alpha[mask, j] * hk_full[mask]
        alpha_min[j] = float(hat.min()) if mask.any() else 0.0

    rh = None
    if system.flux is not None:
        rh = np.empty(n)
        for j in range(n):
            df = np.asarray(system.flux(plateaus[j + 1])) - np.asarray(
                system.flux(plateaus[j])
            )
            rh[j] = float(np.abs(speeds[j] * jumps[j] - df).max())

    cauchy = [
        l1_distance(sweep[m], sweep[m + 1]) for m in range(len(sweep) - 1)
    ]
    tv = total_variation(finest)
    tv_ratio = tv / scale if scale > 1e-9 else None
    ent = {}
    for pair in entropy_pairs:
        if system.flux is not None:
            worst, _ = entropy_residual(system, diffusion, pair, finest)
            ent[pair.name or "pair"] = worst
    return LimitRiemannSolution(
        gaps=[seg for seg, _, _ in flat],
        plateaus=plateaus,
        flatness=flatness,
        jumps=jumps,
        speeds=speeds,
        rarefaction_flags=rare,
        rh_residuals=rh,
        tv=tv,
        tv_ratio=tv_ratio,
        cauchy_l1=cauchy,
        alpha_hat_min=alpha_min,
        alpha_orientation=orientation,
        entropy_residuals=ent,
    )


# ---------------------------------------------------------------------------
# distances


def l1_distance(a: SelfSimilarSolution, b: SelfSimilarSolution) -> float:
    """L1 distance of two profiles over the union of their meshes."""
    yy = np.union1d(a.mesh.nodes, b.mesh.nodes)
    ua = np.stack([np.interp(yy, a.mesh.nodes, a.states[:, c]) for c in range(a.states.shape[1])], axis=1)
    ub = np.stack([np.interp(yy, b.mesh.nodes, b.states[:, c]) for c in range(b.states.shape[1])], axis=1)
    return float(np.trapezoid(np.abs(ua - ub).sum(axis=1), yy))


def l1_to_oracle(solution: SelfSimilarSolution, oracle, domain=None) -> float:
    """L1 distance of a profile to an exact fan evaluated on the same mesh."""
    y = solution.mesh.nodes
    if domain is not None:
        mask = (y >= domain[0]) & (y <= domain[1])
        y = y[mask]
        states = solution.states[mask]
    else:
        states = solution.states
    exact = np.asarray(oracle(y), dtype=float)
    return float(np.trapezoid(np.abs(states - exact).sum(axis=1), y))


def linf_to_oracle(solution: SelfSimilarSolution, oracle) -> float:
    y = solution.mesh.nodes
    exact = np.asarray(oracle(y), dtype=float)
    return float(np.abs(solution.states - exact).max())
