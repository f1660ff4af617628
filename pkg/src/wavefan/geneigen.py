"""Pencil spectra (-y + A(u), B(u)) and frames along solution profiles.

The pencil is reduced to the standard eigenproblem of B(u)^-1 (-y Id + A(u)),
which is safe because B stays uniformly close to the identity.  Right frames
are unit eigenvectors; left frames are the rows of (B R)^-1, so that
l_i . B r_j = delta_ij exactly and the component expansion diagonalizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la

from .errors import ComplexGeneralizedSpectrum, DegenerateSpectrum, StateOutOfBall
from .systems import DiffusionModel, EigenFrame, HyperbolicSystem, eigendecompose


@dataclass(frozen=True)
class GeneralizedSpectrum:
    """Spectrum of (-y + A(u)) r = mu B(u) r at one (state, position) pair.

    Columns of ``right`` are the unit eigenvectors r_j; rows of ``left`` the
    B-dual covectors with left @ B @ right = Id.
    """

    y: float
    state: np.ndarray
    mu: np.ndarray
    right: np.ndarray
    left: np.ndarray


def generalized_eigen(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    u: np.ndarray,
    y: float,
    *,
    reference_frame: Optional[EigenFrame] = None,
    imag_tol: float = 1e-9,
    gap_tol: float = 1e-9,
    check_ball: bool = True,
) -> GeneralizedSpectrum:
    """Family-labeled, biorthonormal pencil spectrum at (u, y).

    Families are assigned by ascending mu, which preserves the standard
    ordering whenever B is close to the identity; signs follow the standard
    frame r_j(u).
    """
    n = system.dimension
    u = np.asarray(u, dtype=float).reshape(n)
    if check_ball and not system.contains(u):
        raise StateOutOfBall(f"state {u} outside admissible ball")
    a = np.asarray(system.jacobian(u), dtype=float).reshape(n, n)
    b = np.asarray(diffusion.matrix(u), dtype=float).reshape(n, n)
    pencil = a - y * np.eye(n)
    m = la.solve(b, pencil)
    vals, vecs = np.linalg.eig(m)
    scale = 1.0 + np.abs(vals).max()
    if np.abs(vals.imag).max() > imag_tol * scale:
        raise ComplexGeneralizedSpectrum(
            f"pencil spectrum {vals} not real at (u={u}, y={y}); "
            "diffusion too far from identity"
        )
    vals = vals.real
    vecs = vecs.real
    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    if n > 1 and np.diff(vals).min() <= gap_tol * scale:
        raise DegenerateSpectrum(
            f"pencil eigenvalue gap {np.diff(vals).min():.3e} below tolerance"
        )
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    if reference_frame is None:
        reference_frame = eigendecompose(system, u, check_ball=False)
    for j in range(n):
        if float(vecs[:, j] @ reference_frame.right[:, j]) < 0:
            vecs[:, j] = -vecs[:, j]
    left = np.linalg.inv(b @ vecs)
    return GeneralizedSpectrum(y=float(y), state=u, mu=vals, right=vecs, left=left)


def frame_along_profile(
    system: HyperbolicSystem,
    diffusion: DiffusionModel,
    solution,
    *,
    positions: Optional[np.ndarray] = None,
    states: Optional[np.ndarray] = None,
    check_ball: bool = False,
) -> list:
    """Pencil spectra at every mesh node, with sign flips chained away.

    Accepts either a solved profile or explicit (positions, states) arrays.
    Errors from single nodes are re-raised with the node index attached.
    """
    if positions is None:
        positions = solution.mesh.nodes
        states = solution.states
    star = eigendecompose(system, system.reference_state, check_ball=False)
    frames = []
    for k, (yk, uk) in enumerate(zip(positions, states)):
        try:
            std = eigendecompose(
                system, uk, reference_frame=star, check_ball=check_ball
            )
            frames.append(
                generalized_eigen(
                    system,
                    diffusion,
                    uk,
                    yk,
                    reference_frame=std,
                    check_ball=check_ball,
                )
            )
        except (ComplexGeneralizedSpectrum, DegenerateSpectrum, StateOutOfBall) as exc:
            raise type(exc)(f"node {k} (y={yk:.6g}): {exc}") from exc
    return _chain_signs(frames)


def _chain_signs(frames: list) -> list:
    """Flip (r_j, l_j) pairs so consecutive right frames overlap positively."""
    for k in range(1, len(frames)):
        prev, cur = frames[k - 1], frames[k]
        flips = np.ones(cur.mu.size)
        for j in range(cur.mu.size):
            if float(cur.right[:, j] @ prev.right[:, j]) < 0:
                flips[j] = -1.0
        if np.any(flips < 0):
            frames[k] = GeneralizedSpectrum(
                y=cur.y,
                state=cur.state,
                mu=cur.mu,
                right=cur.right * flips[None, :],
                left=cur.left * flips[:, None],
            )
    return frames


def stack_frames(frames: list):
    """(mu, right, left) arrays of shape (K, N), (K, N, N), (K, N, N)."""
    mu = np.stack([f.mu for f in frames])
    right = np.stack([f.right for f in frames])
    left = np.stack([f.left for f in frames])
    return mu, right, left
