"""Typed failure modes shared across the package."""


class WavefanError(Exception):
    """Base class for all library errors."""


class ConfigError(WavefanError):
    """Malformed or inconsistent run configuration."""


class SpectrumError(WavefanError):
    """Eigenstructure violates a standing hypothesis."""


class NonRealSpectrum(SpectrumError):
    """Complex eigenvalues detected; system is not hyperbolic at the state."""


class EigenvalueCollision(SpectrumError):
    """Eigenvalue gap below tolerance; strict hyperbolicity fails."""


class ComplexGeneralizedSpectrum(SpectrumError):
    """Pencil spectrum left the real line (diffusion too far from identity)."""


class DegenerateSpectrum(SpectrumError):
    """Pencil eigenvalue gap below tolerance."""


class BandsOverlap(WavefanError):
    """Padded speed bands overlap or leave the admissible window."""


class SolverError(WavefanError):
    """Failure while solving a boundary-value problem."""


class NewtonDiverged(SolverError):
    def __init__(self, message, *, epsilon=None, iterations=None, residual=None):
        super().__init__(message)
        self.epsilon = epsilon
        self.iterations = iterations
        self.residual = residual


class MeshBudgetExceeded(SolverError):
    """Refinement criteria still violated at the node budget."""


class StateOutOfBall(SolverError):
    """A converged state left the admissible ball around the reference state."""


class ResonanceSingular(SolverError):
    """a^2 B(u) - y^2 Id is (near) singular somewhere on the domain."""


class FlatnessUnachievable(SolverError):
    """Foreign-family flatness conditions could not be met on a wave curve."""

    def __init__(self, message, *, family=None):
        super().__init__(message)
        self.family = family


class MultipleZeroCrossings(WavefanError):
    """mu_i has several sign changes; single-crossing hypothesis violated."""


class SingularLinearSystem(WavefanError):
    """The linear collocation system for the coupled measures is singular."""


class OverflowGuard(WavefanError):
    """An interaction-coefficient exponent would overflow float range."""


class PlateauNotFlat(WavefanError):
    """A gap between speed bands carries more variation than tolerated."""

    def __init__(self, message, *, gap=None, variation=None):
        super().__init__(message)
        self.gap = gap
        self.variation = variation


class MissingFlux(WavefanError):
    """Operation requires a conservative system (flux function)."""


class NoSolutionInBall(WavefanError):
    """Exact Riemann construction leaves the admissible ball."""


class DomainViolation(WavefanError):
    """A state left the physical domain of the model (e.g. nonpositive depth)."""
