"""Run configuration: YAML loading, validation, canonical hashing."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from .bvp import ContinuationSchedule
from .errors import ConfigError
from .meshing import MeshPolicy
from .models import MODEL_BUILDERS, ModelDescriptor, build_model, make_diffusion


@dataclass
class AnalysisToggles:
    measures: bool = True
    interactions: bool = True
    entropy: bool = True
    limit: bool = True
    tv: bool = True


@dataclass
class WaveCurveConfig:
    family: int = 1
    m_values: tuple = ()
    cone_c: float = 0.1
    epsilon: float = 1e-3
    lipschitz: bool = False


@dataclass
class RunConfig:
    """Everything a command needs, parsed and validated from one YAML file."""

    model_name: str
    model_params: dict
    diffusion_name: str
    diffusion_params: dict
    data_left: Optional[np.ndarray]
    data_right: Optional[np.ndarray]
    data_ball_radius: Optional[float]
    schedule: ContinuationSchedule
    mesh: MeshPolicy
    analysis: AnalysisToggles
    wavecurve: WaveCurveConfig
    relaxation_a: float
    newton_tol: float
    seed: int
    workers: int
    output: str
    raw: dict = field(repr=False, default_factory=dict)

    def config_hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def build_model(self) -> ModelDescriptor:
        model = build_model(self.model_name, **self.model_params)
        if self.diffusion_name != "default":
            diffusion = make_diffusion(
                self.diffusion_name, model.system.dimension, **self.diffusion_params
            )
            from dataclasses import replace

            model = replace(model, diffusion=diffusion)
        return model


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def _as_vector(value, name):
    try:
        return np.asarray(value, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a numeric vector, got {value!r}") from exc


def _parse_schedule(spec) -> ContinuationSchedule:
    if spec is None:
        return ContinuationSchedule.from_values([1e-1, 3e-2, 1e-2, 3e-3, 1e-3])
    try:
        if isinstance(spec, dict) and "values" in spec:
            return ContinuationSchedule.from_values(spec["values"])
        if isinstance(spec, dict):
            return ContinuationSchedule.geometric(
                float(spec["start"]), float(spec["factor"]), float(spec["min"])
            )
        return ContinuationSchedule.from_values(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid schedule {spec!r}: {exc}") from exc


def _parse_m_values(spec):
    if spec is None:
        return tuple(np.linspace(-0.05, 0.05, 11))
    if isinstance(spec, dict):
        try:
            return tuple(
                np.linspace(float(spec["min"]), float(spec["max"]), int(spec["count"]))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid wavecurve m grid {spec!r}: {exc}") from exc
    return tuple(float(v) for v in spec)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    model_spec = raw.get("model") or {}
    _require(isinstance(model_spec, dict), "model section must be a mapping")
    name = model_spec.get("name")
    _require(name in MODEL_BUILDERS, f"unknown or missing model name {name!r}")
    params = model_spec.get("params") or {}
    _require(isinstance(params, dict), "model params must be a mapping")

    diff_spec = raw.get("diffusion") or {"name": "default"}
    diff_name = diff_spec.get("name", "default")
    _require(
        diff_name in ("default", "identity", "constant", "state"),
        f"unknown diffusion model {diff_name!r}",
    )
    diff_params = {k: v for k, v in diff_spec.items() if k != "name"}

    data = raw.get("data") or {}
    left = _as_vector(data["left"], "data.left") if "left" in data else None
    right = _as_vector(data["right"], "data.right") if "right" in data else None

    mesh_spec = raw.get("mesh") or {}
    try:
        mesh = MeshPolicy(**mesh_spec)
    except TypeError as exc:
        raise ConfigError(f"invalid mesh policy: {exc}") from exc

    analysis_spec = raw.get("analysis") or {}
    try:
        analysis = AnalysisToggles(**analysis_spec)
    except TypeError as exc:
        raise ConfigError(f"invalid analysis toggles: {exc}") from exc

    wc_spec = dict(raw.get("wavecurve") or {})
    wc_spec["m_values"] = _parse_m_values(wc_spec.pop("m_values", None))
    try:
        wavecurve = WaveCurveConfig(**wc_spec)
    except TypeError as exc:
        raise ConfigError(f"invalid wavecurve section: {exc}") from exc

    config = RunConfig(
        model_name=name,
        model_params=params,
        diffusion_name=diff_name,
        diffusion_params=diff_params,
        data_left=left,
        data_right=right,
        data_ball_radius=(
            float(raw["data_ball_radius"]) if "data_ball_radius" in raw else None
        ),
        schedule=_parse_schedule(raw.get("schedule")),
        mesh=mesh,
        analysis=analysis,
        wavecurve=wavecurve,
        relaxation_a=float((raw.get("relaxation") or {}).get("a", 2.0)),
        newton_tol=float(raw.get("newton_tol", 1e-10)),
        seed=int(raw.get("seed", 0)),
        workers=int(raw.get("workers", 1)),
        output=str(raw.get("output", "out")),
        raw=raw,
    )
    _validate_config(config)
    return config


def _validate_config(config: RunConfig):
    _require(config.workers >= 1, "workers must be >= 1")
    _require(config.newton_tol > 0, "newton_tol must be positive")
    try:
        model = config.build_model()
    except ConfigError:
        raise
    except Exception as exc:  # bad builder params are a configuration problem
        raise ConfigError(f"cannot build model {config.model_name!r}: {exc}") from exc
    n = model.system.dimension
    delta0 = model.system.ball_radius
    delta1 = config.data_ball_radius if config.data_ball_radius is not None else delta0
    _require(delta1 > 0, "data_ball_radius must be positive")
    ref = model.system.reference_state
    for tag, vec in (("left", config.data_left), ("right", config.data_right)):
        if vec is None:
            continue
        _require(
            vec.size == n, f"data.{tag} has dimension {vec.size}, expected {n}"
        )
        dist = float(np.linalg.norm(vec - ref))
        _require(
            dist <= delta1 * (1 + 1e-12),
            f"data.{tag} leaves the data ball (|u - u*| = {dist:.4g} > {delta1:.4g})",
        )
        _require(
            dist <= delta0 * (1 + 1e-12),
            f"data.{tag} leaves the admissible ball (|u - u*| = {dist:.4g} > {delta0:.4g})",
        )
    if config.data_left is not None and config.data_right is not None:
        jump = float(np.linalg.norm(config.data_right - config.data_left))
        _require(
            jump <= 2 * delta1 * (1 + 1e-12),
            f"|u_r - u_l| = {jump:.4g} exceeds 2 * data_ball_radius",
        )
