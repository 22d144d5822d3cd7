"""Integrability exponents and their sharpness for composition with
quasiconformal maps on fractional Sobolev spaces."""

__version__ = "0.1.0"

from .exponents import (  # noqa: E402
    QCRegularity,
    Regime,
    Rejection,
    interpolation_indices,
    lebesgue_q,
    planar_bounds,
    sobolev_q,
    target_q,
)
from .norms import FractionalNormSpec, NormEstimate, classify_membership  # noqa: E402
from .profiles import Membership, flat_power, membership_oracle, singular_power  # noqa: E402
from .radial_maps import Ball, RadialStretch  # noqa: E402
from .sharpness import build_witness, verify_witness_numerically  # noqa: E402

__all__ = [
    "__version__",
    "QCRegularity",
    "Regime",
    "Rejection",
    "interpolation_indices",
    "lebesgue_q",
    "planar_bounds",
    "sobolev_q",
    "target_q",
    "FractionalNormSpec",
    "NormEstimate",
    "classify_membership",
    "Membership",
    "flat_power",
    "membership_oracle",
    "singular_power",
    "Ball",
    "RadialStretch",
    "build_witness",
    "verify_witness_numerically",
]
