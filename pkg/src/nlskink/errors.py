"""Exception hierarchy for nlskink.

Every numerical failure mode raises a dedicated subclass of
:class:`NlskinkError` so callers (and the CLI, which maps them to exit
code 3) can distinguish input problems from runtime blow-ups.
"""


class NlskinkError(Exception):
    """Base class for all package errors."""


class NumericalBlowupError(NlskinkError):
    """Non-finite values appeared during time or space stepping."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class InteriorPoleError(NlskinkError):
    """Cauchy quadrature requested with the pole strictly inside the interval."""


class GammaPoleError(NlskinkError):
    """log-Gamma evaluated at a nonpositive integer."""


class DegenerateFitError(NlskinkError):
    """Power-law fit input with fewer than 2 samples or nonpositive values."""


class SpectralPointError(NlskinkError):
    """Spectral parameter inside an exclusion disk around -1, 0 or 1."""


class SpectralSingularityError(NlskinkError):
    """|s11| vanished on the real axis (non-generic input data)."""


class NonSimpleZeroError(NlskinkError):
    """s11' vanished at a discrete eigenvalue; the zero is not simple."""


class RegionError(NlskinkError):
    """Ray parameter outside the solitonless region |xi| > 1."""


class PhaseOriginError(NlskinkError):
    """Phase function evaluated at the essential singularity z = 0."""


class GeometryError(NlskinkError):
    """Stationary-point data violating the curvature sign invariants."""


class ReflectionBoundError(NlskinkError):
    """|r| >= 1 somewhere on the reflection grid."""


class QuadratureError(NlskinkError):
    """Tail or panel integration failed to produce a finite value."""


class InconsistentDataError(NlskinkError):
    """Mutually contradictory scattering inputs (e.g. v > 0 with r = 0)."""


class BackgroundMismatchError(NlskinkError):
    """Profile does not settle to -1/+1 at the domain ends."""


class CflError(NlskinkError):
    """Requested time step violates the dt <= stability_factor*dx^2 rule."""


class RayDomainError(NlskinkError):
    """Sampled ray leaves the trusted interior of the simulation domain."""


class EvalTooNearCutError(NlskinkError):
    """Trace-formula evaluation point too close to the real axis."""


class ConfigError(NlskinkError):
    """Invalid run configuration or input file (CLI exit code 2)."""


class KeyMismatchError(NlskinkError):
    """Comparison inputs do not share the same (xi, t) keys."""
