"""L1 influences, noise, and cut deviation on the Boolean hypercube."""

__version__ = "0.1.0"

from .cube import (
    CubeFunction,
    FourierExpansion,
    degree,
    fourier_transform,
    inverse_transform,
    norm,
    range_width,
)
from .influence import InfluenceProfile, influence_profile, total_l1, total_l2_via_fourier

__all__ = [
    "CubeFunction",
    "FourierExpansion",
    "InfluenceProfile",
    "degree",
    "fourier_transform",
    "influence_profile",
    "inverse_transform",
    "norm",
    "range_width",
    "total_l1",
    "total_l2_via_fourier",
]
