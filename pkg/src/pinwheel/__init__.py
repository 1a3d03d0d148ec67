"""Exact pinwheel tilings, shell frequencies and radial diffraction."""

__version__ = "0.1.0"

from .exact import DistanceKey, ExactPoint, ExactScalar  # noqa: E402
from .substitution import Patch, PlacedTriangle, generate_patch, seed  # noqa: E402
from .stats import (  # noqa: E402
    DistanceHistogram,
    ShellFrequencyEstimator,
    control_points,
    eta_estimate,
    eta_exact_reference,
    histogram_from_patch,
    pair_histogram,
)
from .lattice import PowderModel, powder_rings, r2  # noqa: E402
from .diffraction import RadialDiffraction, RadialSpectrum, radial_intensity  # noqa: E402
from .kite_domino import pair_tiles  # noqa: E402

__all__ = [
    "__version__",
    "DistanceKey",
    "ExactPoint",
    "ExactScalar",
    "Patch",
    "PlacedTriangle",
    "generate_patch",
    "seed",
    "DistanceHistogram",
    "ShellFrequencyEstimator",
    "control_points",
    "eta_estimate",
    "eta_exact_reference",
    "histogram_from_patch",
    "pair_histogram",
    "PowderModel",
    "powder_rings",
    "r2",
    "RadialDiffraction",
    "RadialSpectrum",
    "radial_intensity",
    "pair_tiles",
]
