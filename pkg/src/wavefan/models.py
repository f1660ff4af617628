"""Shipped example systems with closed-form eigenstructure and exact solvers.

Every constructor returns a :class:`ModelDescriptor` whose system validates
cleanly at the default parameters.  The exact Riemann solvers double as
oracles for convergence tests; they verify their own jump conditions on
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import BandsOverlap, DomainViolation, NoSolutionInBall
from .systems import (
    DiffusionModel,
    EntropyPair,
    HyperbolicSystem,
    suggest_speed_bands,
    validate_system,
)

_RH_TOL = 1e-10


@dataclass(frozen=True)
class Wave:
    family: int
    kind: str  # "shock", "rarefaction", or "contact"
    left: np.ndarray
    right: np.ndarray
    speed: float  # shock speed, or fan head for rarefactions
    tail_speed: Optional[float] = None  # fan tail for rarefactions
    meta: dict = field(default_factory=dict)  # model data for fan interiors


@dataclass(frozen=True)
class RiemannFan:
    """Self-similar exact solution y -> u(y), evaluable at arbitrary y."""

    left: np.ndarray
    right: np.ndarray
    waves: tuple
    evaluate: Callable[[np.ndarray], np.ndarray]

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return self.evaluate(np.asarray(y, dtype=float))

    @property
    def middle_states(self):
        return tuple(w.right for w in self.waves[:-1])


@dataclass(frozen=True)
class ModelDescriptor:
    name: str
    params: dict
    system: HyperbolicSystem
    diffusion: DiffusionModel
    entropy_pairs: tuple = ()
    exact_riemann: Optional[Callable] = None
    rate_hint: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# diffusion models


def make_diffusion(
    name: str,
    dimension: int,
    eta: float = 0.0,
    eta_max: float = 0.2,
    coupling: Optional[np.ndarray] = None,
) -> DiffusionModel:
    """Named diffusion matrices: identity, Id + eta*C, or Id + eta*C(u).

    The constant coupling C defaults to the symmetric off-diagonal pattern
    with unit operator norm; the state-dependent variant uses an orthogonal
    C(u) so the measured eta equals the requested one exactly.
    """
    n = dimension
    eye = np.eye(n)

    if name == "identity":
        return DiffusionModel(
            matrix=lambda u: np.broadcast_to(eye, np.shape(u)[:-1] + (n, n)).copy(),
            eta_max=eta_max,
            name="identity",
        )

    if name == "constant":
        if coupling is None:
            if n == 1:
                c = np.array([[1.0]])
            else:
                c = np.zeros((n, n))
                c[0, 1] = c[1, 0] = 1.0
        else:
            c = np.asarray(coupling, dtype=float).reshape(n, n)
        norm = np.linalg.svd(c, compute_uv=False)[0]
        c = c / norm
        b = eye + eta * c

        return DiffusionModel(
            matrix=lambda u: np.broadcast_to(b, np.shape(u)[:-1] + (n, n)).copy(),
            eta_max=eta_max,
            name=f"constant(eta={eta})",
        )

    if name == "state":
        if n == 1:

            def matrix(u):
                u = np.asarray(u, dtype=float)
                out = np.empty(u.shape[:-1] + (1, 1))
                out[..., 0, 0] = 1.0 + eta * np.sin(u[..., 0])
                return out

        else:
            # Orthogonal 2x2 block in components (0, 1): ||C(u)||_2 = 1 always.
            def matrix(u):
                u = np.asarray(u, dtype=float)
                shape = u.shape[:-1]
                out = np.broadcast_to(eye, shape + (n, n)).copy()
                s = np.sin(u[..., 0] + u[..., 1])
                c0 = np.cos(u[..., 0] + u[..., 1])
                out[..., 0, 0] += eta * s
                out[..., 0, 1] += eta * c0
                out[..., 1, 0] += eta * c0
                out[..., 1, 1] += -eta * s
                return out

        return DiffusionModel(matrix=matrix, eta_max=eta_max, name=f"state(eta={eta})")

    raise ValueError(f"unknown diffusion model {name!r}")


# ---------------------------------------------------------------------------
# Burgers


def make_burgers(
    reference: float = 0.0,
    radius: float = 0.25,
    domain_half_width: float = 1.0,
    pad: float = 0.05,
) -> ModelDescriptor:
    """Scalar Burgers equation, A(u) = [u], f(u) = u^2/2."""

    def jacobian(u):
        u = np.asarray(u, dtype=float)
        return u[..., :, None].copy()

    def flux(u):
        u = np.asarray(u, dtype=float)
        return 0.5 * u**2

    system = HyperbolicSystem(
        dimension=1,
        reference_state=np.array([reference]),
        ball_radius=radius,
        jacobian=jacobian,
        flux=flux,
        domain_half_width=domain_half_width,
        name="burgers",
    )
    system = _with_bands(system, pad)
    pair = EntropyPair(
        entropy=lambda u: 0.5 * np.asarray(u)[..., 0] ** 2,
        entropy_gradient=lambda u: np.asarray(u, dtype=float).copy(),
        entropy_hessian=lambda u: np.ones(np.shape(u)[:-1] + (1, 1)),
        entropy_flux=lambda u: np.asarray(u)[..., 0] ** 3 / 3.0,
        entropy_flux_gradient=lambda u: np.asarray(u, dtype=float) ** 2,
        name="quadratic",
    )
    return ModelDescriptor(
        name="burgers",
        params={"reference": reference, "radius": radius},
        system=system,
        diffusion=make_diffusion("identity", 1),
        entropy_pairs=(pair,),
        exact_riemann=burgers_riemann,
    )


def burgers_inverted_pair() -> EntropyPair:
    """Concave control pair (-u^2/2, -u^3/3): flips the dissipation sign."""
    return EntropyPair(
        entropy=lambda u: -0.5 * np.asarray(u)[..., 0] ** 2,
        entropy_gradient=lambda u: -np.asarray(u, dtype=float),
        entropy_hessian=lambda u: -np.ones(np.shape(u)[:-1] + (1, 1)),
        entropy_flux=lambda u: -np.asarray(u)[..., 0] ** 3 / 3.0,
        entropy_flux_gradient=lambda u: -np.asarray(u, dtype=float) ** 2,
        name="inverted",
    )


def burgers_riemann(u_l, u_r) -> RiemannFan:
    ul = float(np.asarray(u_l).reshape(1)[0])
    ur = float(np.asarray(u_r).reshape(1)[0])

    if ul > ur:  # admissible shock
        s = 0.5 * (ul + ur)
        waves = (Wave(1, "shock", np.array([ul]), np.array([ur]), s),)

        def evaluate(y):
            y = np.atleast_1d(y)
            return np.where(y < s, ul, ur)[:, None]

        assert abs(s * (ur - ul) - (0.5 * ur**2 - 0.5 * ul**2)) <= _RH_TOL
    elif ul < ur:  # rarefaction fan u(y) = y
        waves = (Wave(1, "rarefaction", np.array([ul]), np.array([ur]), ul, ur),)

        def evaluate(y):
            y = np.atleast_1d(y)
            return np.clip(y, ul, ur)[:, None]

    else:
        waves = ()

        def evaluate(y):
            y = np.atleast_1d(y)
            return np.full((y.size, 1), ul)

    return RiemannFan(np.array([ul]), np.array([ur]), waves, evaluate)


def burgers_boundary_riemann(u_b, u_r) -> Callable[[np.ndarray], np.ndarray]:
    """Interior limit of the half-space problem: the standard fan on y > 0.

    Waves with nonpositive speed exit through the boundary; what remains of
    the (u_b, u_r) fan is the admissible interior trace.
    """
    fan = burgers_riemann(u_b, u_r)

    def evaluate(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(y < 0):
            raise ValueError("boundary oracle is defined for y >= 0")
        return fan(y)

    return evaluate


# ---------------------------------------------------------------------------
# p-system


def make_psystem(
    gamma: float = 2.0,
    v_star: float = 1.0,
    radius: float = 0.1,
    domain_half_width: float = 2.5,
    pad: float = 0.05,
) -> ModelDescriptor:
    """p-system in (v, w): v_t - w_x = 0, w_t + p(v)_x = 0, p(v) = v^-gamma."""
    if v_star - radius <= 0:
        raise DomainViolation("admissible ball must keep v positive")

    def _check_v(v):
        if np.any(v <= 0):
            raise DomainViolation("specific volume must stay positive")

    def jacobian(u):
        u = np.asarray(u, dtype=float)
        v = u[..., 0]
        _check_v(v)
        out = np.zeros(u.shape[:-1] + (2, 2))
        out[..., 0, 1] = -1.0
        out[..., 1, 0] = -gamma * v ** (-gamma - 1.0)
        return out

    def flux(u):
        u = np.asarray(u, dtype=float)
        v = u[..., 0]
        _check_v(v)
        return np.stack([-u[..., 1], v ** (-gamma)], axis=-1)

    system = HyperbolicSystem(
        dimension=2,
        reference_state=np.array([v_star, 0.0]),
        ball_radius=radius,
        jacobian=jacobian,
        flux=flux,
        domain_half_width=domain_half_width,
        name="p_system",
    )
    system = _with_bands(system, pad)

    # Mechanical energy: U = w^2/2 + v^(1-gamma)/(gamma-1), F = w p(v).
    def entropy(u):
        u = np.asarray(u, dtype=float)
        return 0.5 * u[..., 1] ** 2 + u[..., 0] ** (1.0 - gamma) / (gamma - 1.0)

    def entropy_gradient(u):
        u = np.asarray(u, dtype=float)
        return np.stack([-u[..., 0] ** (-gamma), u[..., 1]], axis=-1)

    def entropy_hessian(u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape[:-1] + (2, 2))
        out[..., 0, 0] = gamma * u[..., 0] ** (-gamma - 1.0)
        out[..., 1, 1] = 1.0
        return out

    def entropy_flux(u):
        u = np.asarray(u, dtype=float)
        return u[..., 1] * u[..., 0] ** (-gamma)

    def entropy_flux_gradient(u):
        u = np.asarray(u, dtype=float)
        return np.stack(
            [-gamma * u[..., 1] * u[..., 0] ** (-gamma - 1.0), u[..., 0] ** (-gamma)],
            axis=-1,
        )

    pair = EntropyPair(
        entropy,
        entropy_gradient,
        entropy_hessian,
        entropy_flux,
        entropy_flux_gradient,
        name="mechanical_energy",
    )
    return ModelDescriptor(
        name="p_system",
        params={"gamma": gamma, "v_star": v_star, "radius": radius},
        system=system,
        diffusion=make_diffusion("identity", 2),
        entropy_pairs=(pair,),
        exact_riemann=lambda ul, ur: psystem_riemann(gamma, ul, ur),
    )


def _psystem_sound(gamma, v):
    return np.sqrt(gamma) * v ** (-(gamma + 1.0) / 2.0)


def _psystem_rarefaction_shift(gamma, v_from, v_to):
    """Integral of c(v) dv from v_from to v_to (closed form)."""
    if gamma == 1.0:
        return np.log(v_to / v_from)
    e = (1.0 - gamma) / 2.0
    return np.sqrt(gamma) * (v_to**e - v_from**e) / e


def psystem_wave_family(gamma, family, u_from, v_to):
    """Right state of a single p-system wave with left state ``u_from``.

    Parameterized by the specific volume on the curve; the rarefaction branch
    follows the Riemann invariant, the shock branch the Rankine-Hugoniot
    relation (both families have w decreasing across admissible shocks).
    """
    vf, wf = float(u_from[0]), float(u_from[1])
    p = lambda v: v ** (-gamma)
    sgn = 1.0 if family == 1 else -1.0
    # Family 1 rarefactions move to larger v (lambda_1 = -c(v) increasing),
    # family 2 rarefactions to smaller v (lambda_2 = c(v) increasing).
    rarefies = v_to >= vf if family == 1 else v_to <= vf
    if rarefies:
        w = wf + sgn * _psystem_rarefaction_shift(gamma, vf, v_to)
        return np.array([v_to, w])
    dp = p(v_to) - p(vf)
    dv = v_to - vf
    w = wf - np.sqrt(max(-dp * dv, 0.0))
    return np.array([v_to, w])


def psystem_riemann(gamma, u_l, u_r, v_bracket=(1e-3, 1e3)) -> RiemannFan:
    """Exact two-wave solution by intersecting the 1- and reversed 2-curves."""
    ul = np.asarray(u_l, dtype=float).reshape(2)
    ur = np.asarray(u_r, dtype=float).reshape(2)
    p = lambda v: v ** (-gamma)

    def w_mid_from_left(v):
        return psystem_wave_family(gamma, 1, ul, v)[1]

    def w_mid_from_right(v):
        # middle state u_m such that a 2-wave connects u_m (left) to u_r.
        if v <= ur[0]:  # 2-shock: v_m < v_r, w_m = w_r + s [v]
            dp = p(ur[0]) - p(v)
            dv = ur[0] - v
            s = np.sqrt(max(-dp / dv, 0.0)) if dv != 0 else 0.0
            return ur[1] + s * dv
        return ur[1] - _psystem_rarefaction_shift(gamma, ur[0], v)

    def gap(v):
        return w_mid_from_left(v) - w_mid_from_right(v)

    lo, hi = v_bracket
    try:
        vm = brentq(gap, lo, hi, xtol=1e-14, rtol=1e-15)
    except ValueError as exc:
        raise NoSolutionInBall(f"no middle state in v-bracket {v_bracket}") from exc
    um = np.array([vm, w_mid_from_left(vm)])

    waves = []
    waves.append(_psystem_wave(gamma, 1, ul, um))
    waves.append(_psystem_wave(gamma, 2, um, ur))
    return _fan_from_waves(ul, ur, waves, lambda u: np.array([-u[1], p(u[0])]))


def _psystem_wave(gamma, family, left, right) -> Wave:
    sgn = -1.0 if family == 1 else 1.0
    c = lambda v: _psystem_sound(gamma, v)
    lam = lambda u: sgn * c(u[0])
    meta = {"model": "p_system", "gamma": gamma}
    if abs(right[0] - left[0]) < 1e-14:
        return Wave(family, "contact", left, right, lam(left), lam(left), meta)
    rarefies = right[0] > left[0] if family == 1 else right[0] < left[0]
    if rarefies:
        head, tail = lam(left), lam(right)
        return Wave(family, "rarefaction", left, right, head, tail, meta)
    dv = right[0] - left[0]
    dw = right[1] - left[1]
    s = -dw / dv
    return Wave(family, "shock", left, right, s, None, meta)


def _psystem_fan_state(gamma, wave, y):
    """State inside a p-system rarefaction fan at speed y."""
    sgn = -1.0 if wave.family == 1 else 1.0
    # lambda = sgn * c(v) = y  =>  v = (|y| / sqrt(gamma))^(-2/(gamma+1))
    v = (np.abs(y) / np.sqrt(gamma)) ** (-2.0 / (gamma + 1.0))
    fam = 1 if wave.family == 1 else 2
    states = [psystem_wave_family(gamma, fam, wave.left, vi) for vi in np.atleast_1d(v)]
    return np.asarray(states)


def _fan_from_waves(ul, ur, waves, flux_fn) -> RiemannFan:
    """Assemble an evaluator from ordered waves; self-check jump conditions."""
    states = [ul] + [w.right for w in waves]
    speeds = []
    for w in waves:
        if w.kind == "rarefaction":
            if not w.speed <= w.tail_speed + 1e-12:
                raise NoSolutionInBall("rarefaction fan ordering violated")
            speeds.extend([w.speed, w.tail_speed])
        else:
            jump = w.right - w.left
            rh = w.speed * jump - (flux_fn(w.right) - flux_fn(w.left))
            if np.abs(rh).max() > _RH_TOL * (1.0 + np.abs(jump).max()):
                raise NoSolutionInBall(f"Rankine-Hugoniot residual {np.abs(rh).max():.2e}")
            speeds.extend([w.speed, w.speed])
    if any(speeds[i] > speeds[i + 1] + 1e-12 for i in range(len(speeds) - 1)):
        raise NoSolutionInBall("wave speeds out of order (no classical solution)")

    def evaluate(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty((y.size, ul.size))
        out[:] = ul
        for idx, w in enumerate(waves):
            if w.kind == "rarefaction":
                mask_after = y >= w.tail_speed
                mask_fan = (y >= w.speed) & (y < w.tail_speed)
                out[mask_after] = states[idx + 1]
                if np.any(mask_fan):
                    out[mask_fan] = _rarefaction_states(w, y[mask_fan])
            else:
                out[y >= w.speed] = states[idx + 1]
        return out

    return RiemannFan(ul, ur, tuple(waves), evaluate)


def _rarefaction_states(wave, y):
    if wave.meta.get("model") == "shallow_water":
        g = wave.meta["gravity"]
        if wave.family == 1:
            c = (wave.meta["u_l"] + 2 * np.sqrt(g * wave.meta["h_l"]) - y) / 3.0
            h = c**2 / g
            u = y + c
        else:
            c = (y - wave.meta["u_r"] + 2 * np.sqrt(g * wave.meta["h_r"])) / 3.0
            h = c**2 / g
            u = y - c
        return np.stack([h, h * u], axis=-1)
    if wave.meta.get("model") == "p_system":
        return _psystem_fan_state(wave.meta["gamma"], wave, y)
    raise NotImplementedError(f"fan interior for {wave.meta}")


# ---------------------------------------------------------------------------
# shallow water


def make_shallow_water(
    gravity: float = 1.0,
    reference=(1.0, 0.0),
    radius: float = 0.15,
    domain_half_width: float = 2.0,
    pad: float = 0.03,
) -> ModelDescriptor:
    """Shallow water in (h, m): h_t + m_x = 0, m_t + (m^2/h + g h^2/2)_x = 0."""
    g = gravity
    href = float(reference[0])
    if href - radius <= 0:
        raise DomainViolation("admissible ball must keep depth positive")

    def _check_h(h):
        if np.any(h <= 0):
            raise DomainViolation("depth must stay positive")

    def jacobian(u):
        u = np.asarray(u, dtype=float)
        h, m = u[..., 0], u[..., 1]
        _check_h(h)
        out = np.zeros(u.shape[:-1] + (2, 2))
        out[..., 0, 1] = 1.0
        out[..., 1, 0] = -(m / h) ** 2 + g * h
        out[..., 1, 1] = 2.0 * m / h
        return out

    def flux(u):
        u = np.asarray(u, dtype=float)
        h, m = u[..., 0], u[..., 1]
        _check_h(h)
        return np.stack([m, m**2 / h + 0.5 * g * h**2], axis=-1)

    system = HyperbolicSystem(
        dimension=2,
        reference_state=np.asarray(reference, dtype=float),
        ball_radius=radius,
        jacobian=jacobian,
        flux=flux,
        domain_half_width=domain_half_width,
        name="shallow_water",
    )
    system = _with_bands(system, pad)

    # Energy pair U = m^2/(2h) + g h^2/2, F = m^3/(2 h^2) + g h m.
    def entropy(u):
        u = np.asarray(u, dtype=float)
        h, m = u[..., 0], u[..., 1]
        return 0.5 * m**2 / h + 0.5 * g * h**2

    def entropy_gradient(u):
        u = np.asarray(u, dtype=float)
        h, m = u[..., 0], u[..., 1]
        return np.stack([-0.5 * m**2 / h**2 + g * h, m / h], axis=-1)

    def entropy_hessian(u):
        u = np.asarray(u, dtype=float)
        h, m = u[..., 0], u[..., 1]
        out = np.empty(u.shape[:-1] + (2, 2))
        out[..., 0, 0] = m**2 / h**3 + g
        out[..., 0, 1] = -m / h**2
        out[..., 1, 0] = -m / h**2
        out[..., 1, 1] = 1.0 / h
        return out

    def entropy_flux(u):
        u = np.asarray(u, dtype=float)
        h, m = u[..., 0], u[..., 1]
        return 0.5 * m**3 / h**2 + g * h * m

    def entropy_flux_gradient(u):
        u = np.asarray(u, dtype=float)
        h, m = u[..., 0], u[..., 1]
        return np.stack(
            [-(m**3) / h**3 + g * m, 1.5 * m**2 / h**2 + g * h], axis=-1
        )

    pair = EntropyPair(
        entropy,
        entropy_gradient,
        entropy_hessian,
        entropy_flux,
        entropy_flux_gradient,
        name="energy",
    )
    return ModelDescriptor(
        name="shallow_water",
        params={"gravity": g, "reference": tuple(reference), "radius": radius},
        system=system,
        diffusion=make_diffusion("identity", 2),
        entropy_pairs=(pair,),
        exact_riemann=lambda ul, ur: shallow_water_riemann(g, ul, ur),
    )


def shallow_water_riemann(gravity, u_l, u_r) -> RiemannFan:
    """Classical exact solver: depth function intersection plus fan assembly."""
    g = gravity
    ul = np.asarray(u_l, dtype=float).reshape(2)
    ur = np.asarray(u_r, dtype=float).reshape(2)
    hl, hr = ul[0], ur[0]
    vl, vr = ul[1] / hl, ur[1] / hr
    if hl <= 0 or hr <= 0:
        raise DomainViolation("dry states not supported")

    def phi(h, hk):
        if h <= hk:
            return 2.0 * (np.sqrt(g * h) - np.sqrt(g * hk))
        return (h - hk) * np.sqrt(0.5 * g * (h + hk) / (h * hk))

    def depth_eq(h):
        return phi(h, hl) + phi(h, hr) + vr - vl

    hmin, hmax = 1e-9, 10.0 * max(hl, hr)
    if depth_eq(hmin) > 0:
        raise NoSolutionInBall("near-dry intermediate state (vacuum)")
    hm = brentq(depth_eq, hmin, hmax, xtol=1e-15, rtol=1e-15)
    vm = vl - phi(hm, hl)
    um = np.array([hm, hm * vm])

    def sw_flux(u):
        h, m = u[0], u[1]
        return np.array([m, m**2 / h + 0.5 * g * h**2])

    waves = []
    # 1-wave between ul and um
    if hm <= hl:  # rarefaction
        meta = {"model": "shallow_water", "gravity": g, "h_l": hl, "u_l": vl}
        w = Wave(
            1, "rarefaction", ul, um, vl - np.sqrt(g * hl), vm - np.sqrt(g * hm), meta
        )
    else:
        s = (um[1] - ul[1]) / (hm - hl)
        w = Wave(1, "shock", ul, um, s)
    waves.append(w)
    # 2-wave between um and ur
    if hm <= hr:  # rarefaction
        meta = {"model": "shallow_water", "gravity": g, "h_r": hr, "u_r": vr}
        w = Wave(
            2, "rarefaction", um, ur, vm + np.sqrt(g * hm), vr + np.sqrt(g * hr), meta
        )
    else:
        s = (ur[1] - um[1]) / (hr - hm)
        w = Wave(2, "shock", um, ur, s)
    waves.append(w)
    return _fan_from_waves(ul, ur, waves, sw_flux)


# ---------------------------------------------------------------------------
# nonconservative toy


def make_nonconservative_toy(
    coupling: float = 2.0,
    radius: float = 0.35,
    domain_half_width: float = 2.0,
    pad: float = 0.05,
) -> ModelDescriptor:
    """Symmetric 2x2 system with no flux for coupling != 1.

    A(u) = [[-1 + u1, s u2], [s u2, 1 + u1]]; its limit genuinely depends on
    the diffusion matrix, which is the demonstration target.
    """
    s = coupling

    def jacobian(u):
        u = np.asarray(u, dtype=float)
        out = np.empty(u.shape[:-1] + (2, 2))
        out[..., 0, 0] = -1.0 + u[..., 0]
        out[..., 0, 1] = s * u[..., 1]
        out[..., 1, 0] = s * u[..., 1]
        out[..., 1, 1] = 1.0 + u[..., 0]
        return out

    system = HyperbolicSystem(
        dimension=2,
        reference_state=np.zeros(2),
        ball_radius=radius,
        jacobian=jacobian,
        flux=None,
        domain_half_width=domain_half_width,
        name="nonconservative_toy",
    )
    try:
        system = _with_bands(system, pad)
    except BandsOverlap as exc:
        raise BandsOverlap(
            f"coupling {s} too strong for radius {radius}: {exc}"
        ) from exc
    return ModelDescriptor(
        name="nonconservative_toy",
        params={"coupling": s, "radius": radius},
        system=system,
        diffusion=make_diffusion("identity", 2),
    )


# ---------------------------------------------------------------------------
# registry


def _with_bands(system: HyperbolicSystem, pad: float) -> HyperbolicSystem:
    return replace(system, speed_bands=suggest_speed_bands(system, 9, pad))


MODEL_BUILDERS = {
    "burgers": make_burgers,
    "p_system": make_psystem,
    "shallow_water": make_shallow_water,
    "nonconservative_toy": make_nonconservative_toy,
}


def build_model(name: str, **params) -> ModelDescriptor:
    try:
        builder = MODEL_BUILDERS[name]
    except KeyError:
        raise KeyError(
            f"unknown model {name!r}; available: {sorted(MODEL_BUILDERS)}"
        ) from None
    return builder(**params)


def validate_model(model: ModelDescriptor, sample_count: int = 5):
    return validate_system(
        model.system, model.diffusion, model.entropy_pairs, sample_count
    )
