"""Phase-space classification and photon statistics of single-mode Gaussian states."""

from .errors import (
    DistributionValued,
    HypergeometricDivergence,
    Inconclusive,
    InvalidState,
    Marginal,
    NonConvergence,
    NotPositive,
    NumericalError,
    OverflowSignal,
    RegimeError,
    UncertaintyViolated,
    VacuumDegenerate,
    WignerClassError,
)
from .gaussian_state import (
    GMatrix,
    NoiseMatrix,
    NormalForm,
    PhysicalGaussianState,
    StateClass,
    StateKind,
    classify,
    mean_photon,
    validate,
)

__version__ = "0.1.0"
