"""Hyperbolic system descriptions, diffusion matrices, and hypothesis checks.

All model callables are numpy-vectorized over leading axes: a jacobian maps
states of shape ``(..., N)`` to matrices of shape ``(..., N, N)``, a flux to
vectors ``(..., N)``, an entropy to scalars ``(...,)``.  Evaluators must be
pure; a system description is immutable after validation and safe to share
across concurrent solver runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    BandsOverlap,
    EigenvalueCollision,
    NonRealSpectrum,
    StateOutOfBall,
)

BALL_SLACK = 1e-9


@dataclass(frozen=True)
class HyperbolicSystem:
    """First-order system u_t + A(u) u_x = 0 on a ball of admissible states.

    ``speed_bands`` holds one ``(lower, upper)`` pair per characteristic
    family; they must be disjoint, ordered, and contained in
    ``(-domain_half_width, domain_half_width)``.
    """

    dimension: int
    reference_state: np.ndarray
    ball_radius: float
    jacobian: Callable[[np.ndarray], np.ndarray]
    domain_half_width: float
    speed_bands: Optional[np.ndarray] = None
    flux: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __post_init__(self):
        ref = np.asarray(self.reference_state, dtype=float).reshape(self.dimension)
        object.__setattr__(self, "reference_state", ref)
        if self.speed_bands is not None:
            bands = np.asarray(self.speed_bands, dtype=float).reshape(self.dimension, 2)
            object.__setattr__(self, "speed_bands", bands)
        if self.ball_radius <= 0 or self.domain_half_width <= 0:
            raise ValueError("ball_radius and domain_half_width must be positive")

    @property
    def conservative(self) -> bool:
        return self.flux is not None

    def contains(self, u: np.ndarray, slack: float = BALL_SLACK) -> bool:
        du = np.asarray(u, dtype=float) - self.reference_state
        dist = np.linalg.norm(np.atleast_2d(du), axis=-1)
        return bool(np.all(dist <= self.ball_radius * (1.0 + slack) + slack))

    def ball_excess(self, states: np.ndarray) -> float:
        du = np.atleast_2d(np.asarray(states, dtype=float)) - self.reference_state
        return float(max(0.0, np.linalg.norm(du, axis=-1).max() - self.ball_radius))


@dataclass(frozen=True)
class DiffusionModel:
    """Diffusion matrix B(u) together with its measured distance to identity.

    ``eta`` is the measured sup over sample states of the operator 2-norm of
    ``B(u) - Id`` (filled in by :func:`validate_system`); ``eta_max`` is the
    configured ceiling the model is supposed to respect.
    """

    matrix: Callable[[np.ndarray], np.ndarray]
    eta_max: float
    eta: Optional[float] = None
    name: str = ""

    def with_eta(self, eta: float) -> "DiffusionModel":
        return replace(self, eta=float(eta))


@dataclass(frozen=True)
class EntropyPair:
    """Entropy U and entropy flux F with gradient/Hessian evaluators."""

    entropy: Callable[[np.ndarray], np.ndarray]
    entropy_gradient: Callable[[np.ndarray], np.ndarray]
    entropy_hessian: Callable[[np.ndarray], np.ndarray]
    entropy_flux: Callable[[np.ndarray], np.ndarray]
    entropy_flux_gradient: Callable[[np.ndarray], np.ndarray]
    name: str = ""


@dataclass(frozen=True)
class EigenFrame:
    """Real spectral frame of A(u): columns of ``right`` are unit
    eigenvectors, rows of ``left`` the dual basis with l_i . r_j = delta_ij."""

    state: np.ndarray
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.right @ np.diag(self.eigenvalues) @ self.left


def _canonical_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry of each is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        if out[k, j] < 0:
            out[:, j] = -out[:, j]
    return out


def eigendecompose(
    system: HyperbolicSystem,
    u: np.ndarray,
    *,
    reference_frame: Optional[EigenFrame] = None,
    imag_tol: float = 1e-9,
    gap_tol: float = 1e-9,
    check_ball: bool = True,
) -> EigenFrame:
    """Real, ordered, sign-continuous eigenframe of A(u).

    Eigenvector signs follow ``reference_frame`` (the frame at the system's
    reference state by default) so frames vary continuously along curves.
    """
    u = np.asarray(u, dtype=float).reshape(system.dimension)
    if check_ball and not system.contains(u):
        raise StateOutOfBall(f"state {u} outside admissible ball")
    a = np.asarray(system.jacobian(u), dtype=float).reshape(
        system.dimension, system.dimension
    )
    vals, vecs = np.linalg.eig(a)
    scale = 1.0 + np.abs(vals).max()
    if np.abs(vals.imag).max() > imag_tol * scale:
        raise NonRealSpectrum(f"complex eigenvalues {vals} at u={u}")
    vals = vals.real
    vecs = vecs.real
    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    gaps = np.diff(vals)
    if system.dimension > 1 and gaps.min() <= gap_tol * scale:
        raise EigenvalueCollision(
            f"eigenvalue gap {gaps.min():.3e} below tolerance at u={u}"
        )
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    if reference_frame is None:
        if np.allclose(u, system.reference_state):
            vecs = _canonical_signs(vecs)
        else:
            reference_frame = eigendecompose(
                system, system.reference_state, check_ball=False
            )
    if reference_frame is not None:
        for j in range(system.dimension):
            if float(vecs[:, j] @ reference_frame.right[:, j]) < 0:
                vecs[:, j] = -vecs[:, j]
    left = np.linalg.inv(vecs)
    return EigenFrame(state=u, eigenvalues=vals, right=vecs, left=left)


def ball_lattice(reference: np.ndarray, radius: float, resolution: int) -> np.ndarray:
    """Deterministic lattice covering the admissible ball.

    ``resolution`` points per axis on the bounding cube, pruned to the
    Euclidean ball.  Resolutions of the form 2^k + 1 produce nested lattices,
    so the measured sup of any quantity is nondecreasing under refinement.
    """
    reference = np.asarray(reference, dtype=float)
    n = reference.size
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    axis = np.array([0.0]) if resolution == 1 else np.linspace(-radius, radius, resolution)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    offsets = np.stack([g.ravel() for g in grids], axis=-1)
    offsets = offsets[np.linalg.norm(offsets, axis=1) <= radius * (1 + 1e-12)]
    if not np.any(np.all(offsets == 0.0, axis=1)):
        offsets = np.vstack([offsets, np.zeros(n)])
    return reference + offsets


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list
    diagnostics: dict = field(default_factory=dict)
    diffusion: Optional[DiffusionModel] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(f"{status:4s} {c.name}: margin={c.margin:.3e} {c.detail}")
        return "\n".join(lines)


def _fd_flux_jacobian(flux, u, step=1e-6):
    n = u.size
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = step * (1.0 + abs(u[i]))
        cols.append((np.asarray(flux(u + e)) - np.asarray(flux(u - e))) / (2 * e[i]))
    return np.stack(cols, axis=-1)


def _jacobian_curl_defect(jacobian, u, step=1e-6):
    """Max asymmetry of dA_ij/du_k in (j, k); zero iff A can be a flux Jacobian."""
    n = u.size
    dA = np.empty((n, n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = step * (1.0 + abs(u[k]))
        dA[k] = (np.asarray(jacobian(u + e)) - np.asarray(jacobian(u - e))) / (2 * e[k])
    defect = 0.0
    for i in range(n):
        m = dA[:, i, :]  # m[k, j] = dA_ij / du_k
        defect = max(defect, float(np.abs(m - m.T).max()))
    return defect


def validate_system(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    entropy_pairs: Sequence[EntropyPair] = (),
    sample_count: int = 5,
    *,
    fd_tol: float = 2e-5,
    convexity_tol: float = 1e-10,
    seed: int = 0,
) -> ValidationReport:
    """Check the standing structural hypotheses by lattice sampling.

    Failures are reported, not raised.  The measured eta is recorded into a
    copy of the diffusion model available as ``report.diffusion``.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    samples = ball_lattice(system.reference_state, system.ball_radius, sample_count)
    n = system.dimension
    checks = []
    diagnostics = {"sample_count": len(samples)}

    # Strict hyperbolicity: real distinct spectrum at every sample.
    min_gap = np.inf
    lam = np.empty((len(samples), n))
    spectrum_ok = True
    spectrum_detail = ""
    for s, u in enumerate(samples):
        try:
            frame = eigendecompose(system, u, check_ball=False)
        except (NonRealSpectrum, EigenvalueCollision) as exc:
            spectrum_ok = False
            spectrum_detail = str(exc)
            lam[s] = np.nan
            continue
        lam[s] = frame.eigenvalues
        if n > 1:
            min_gap = min(min_gap, float(np.diff(frame.eigenvalues).min()))
    if n == 1:
        min_gap = np.inf
    checks.append(
        Check(
            "real_distinct_spectrum",
            spectrum_ok,
            float(min_gap if np.isfinite(min_gap) else 1.0),
            spectrum_detail,
        )
    )

    # Speed bands: ordering and containment of sampled eigenvalues.
    if system.speed_bands is None:
        checks.append(Check("band_ordering", False, -1.0, "speed_bands not set"))
        checks.append(Check("eigenvalues_within_bands", False, -1.0, "speed_bands not set"))
    else:
        bands = system.speed_bands
        seq = np.concatenate(
            [[-system.domain_half_width], bands.ravel(), [system.domain_half_width]]
        )
        order_margin = float(np.diff(seq).min())
        checks.append(
            Check(
                "band_ordering",
                order_margin > 0,
                order_margin,
                "-L < lower_1 < upper_1 < ... < L",
            )
        )
        if spectrum_ok:
            lo = float((lam - bands[:, 0]).min())
            hi = float((bands[:, 1] - lam).min())
            band_margin = min(lo, hi)
            checks.append(
                Check(
                    "eigenvalues_within_bands",
                    band_margin >= 0,
                    band_margin,
                )
            )
        else:
            checks.append(Check("eigenvalues_within_bands", False, -1.0, "spectrum failed"))

    # Flux Jacobian consistency for conservative systems.
    if system.flux is not None:
        worst = 0.0
        for u in samples:
            a = np.asarray(system.jacobian(u))
            scale = 1.0 + float(np.abs(a).max())
            worst = max(worst, float(np.abs(_fd_flux_jacobian(system.flux, u) - a).max()) / scale)
        checks.append(Check("flux_jacobian_consistency", worst <= fd_tol, fd_tol - worst))
    curl = max(_jacobian_curl_defect(system.jacobian, u) for u in samples)
    diagnostics["conservative_compatible"] = bool(curl <= fd_tol)
    diagnostics["jacobian_curl_defect"] = float(curl)

    # Diffusion: invertibility and distance to the identity (operator 2-norm).
    b = np.asarray(diffusion.matrix(samples), dtype=float).reshape(len(samples), n, n)
    svals = np.linalg.svd(b, compute_uv=False)
    inv_margin = float(svals[:, -1].min())
    checks.append(Check("diffusion_invertible", inv_margin > 1e-12, inv_margin))
    eta = float(np.linalg.svd(b - np.eye(n), compute_uv=False)[:, 0].max())
    diagnostics["eta"] = eta
    checks.append(
        Check(
            "diffusion_near_identity",
            eta <= diffusion.eta_max + 1e-12,
            diffusion.eta_max - eta,
            f"measured eta={eta:.3e}",
        )
    )

    # Entropy pairs: compatibility (conservative only) and the sign condition
    # making the viscous dissipation term nonnegative.  The quadratic form
    # w^T (hess U) B w is checked through the symmetric part's smallest
    # eigenvalue, plus seeded random probes for the record.
    rng = np.random.default_rng(seed)
    for idx, pair in enumerate(entropy_pairs):
        tag = pair.name or f"pair{idx}"
        if system.flux is not None:
            worst = 0.0
            for u in samples:
                a = np.asarray(system.jacobian(u))
                gu = np.asarray(pair.entropy_gradient(u))
                gf = np.asarray(pair.entropy_flux_gradient(u))
                worst = max(worst, float(np.abs(gu @ a - gf).max()))
            checks.append(
                Check(f"entropy_compatibility[{tag}]", worst <= fd_tol, fd_tol - worst)
            )
        hess = np.asarray(pair.entropy_hessian(samples)).reshape(len(samples), n, n)
        hb = hess @ b
        sym = 0.5 * (hb + np.swapaxes(hb, -1, -2))
        eigmin = float(np.linalg.eigvalsh(sym)[:, 0].min())
        probes = rng.normal(size=(16, n))
        probes /= np.linalg.norm(probes, axis=1, keepdims=True)
        quad_min = float(np.einsum("pi,sij,pj->sp", probes, hb, probes).min())
        diagnostics[f"convexity_probe_min[{tag}]"] = quad_min
        checks.append(
            Check(
                f"entropy_convexity_like[{tag}]",
                eigmin >= -convexity_tol,
                eigmin,
                "min eig of sym(hess(U) B) over samples",
            )
        )

    return ValidationReport(
        checks=checks, diagnostics=diagnostics, diffusion=diffusion.with_eta(eta)
    )


def suggest_speed_bands(
    system: HyperbolicSystem, sample_count: int = 9, pad: float = 0.05
) -> np.ndarray:
    """Bands [min lambda_j - pad, max lambda_j + pad] over the sample lattice.

    Raises :class:`BandsOverlap` if the padded bands intersect or leave
    (-L, L).
    """
    samples = ball_lattice(system.reference_state, system.ball_radius, sample_count)
    lam = np.stack(
        [eigendecompose(system, u, check_ball=False).eigenvalues for u in samples]
    )
    bands = np.stack([lam.min(axis=0) - pad, lam.max(axis=0) + pad], axis=-1)
    seq = np.concatenate(
        [[-system.domain_half_width], bands.ravel(), [system.domain_half_width]]
    )
    if np.diff(seq).min() <= 0:
        raise BandsOverlap(
            f"padded bands {bands.tolist()} overlap or leave (-L, L) with pad={pad}"
        )
    return bands


def with_suggested_bands(system: HyperbolicSystem, sample_count: int = 9, pad: float = 0.05):
    return replace(system, speed_bands=suggest_speed_bands(system, sample_count, pad))
