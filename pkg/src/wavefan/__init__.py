"""Self-similar diffusive, relaxation, and half-space regularizations of
Riemann problems for strictly hyperbolic systems, with wave-measure and
wave-curve diagnostics."""

from .analysis import (
    CharacteristicDecomposition,
    ComponentSystemCoefficients,
    InteractionCoefficients,
    LimitRiemannSolution,
    WaveMeasureSet,
    component_coefficients,
    component_mass,
    component_residual,
    decompose,
    entropy_residual,
    extract_limit,
    interaction_coefficients,
    l1_distance,
    l1_to_oracle,
    linearized_measures,
    plateau_flatness,
    profile_frames,
    total_variation,
    uncoupled_measures,
)
from .bvp import (
    ContinuationSchedule,
    NewtonReport,
    SelfSimilarSolution,
    diffusive_residual,
    interpolate_solution,
    relaxation_residual,
    solve_boundary_diffusive,
    solve_riemann_diffusive,
    solve_riemann_relaxation,
)
from .geneigen import GeneralizedSpectrum, frame_along_profile, generalized_eigen
from .meshing import Mesh, MeshPolicy
from .models import (
    MODEL_BUILDERS,
    ModelDescriptor,
    RiemannFan,
    build_model,
    make_burgers,
    make_diffusion,
    make_nonconservative_toy,
    make_psystem,
    make_shallow_water,
)
from .systems import (
    DiffusionModel,
    EigenFrame,
    EntropyPair,
    HyperbolicSystem,
    ValidationReport,
    eigendecompose,
    suggest_speed_bands,
    validate_system,
)
from .wavecurves import WaveCurve, cone_check, lipschitz_probe, trace_wave_curve

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
