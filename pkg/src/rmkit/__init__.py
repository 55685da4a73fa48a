"""Radio-map outline extraction, synthetic propagation, and diffusion tools."""

__version__ = "0.1.0"

from .backend import backend_name
from .grids import (
    Boundary,
    BsConfig,
    ComplexField,
    EnvironmentMap,
    OutlineMask,
    ScalarField,
    ShapeMismatchError,
    UnitTag,
)

__all__ = [
    "Boundary",
    "BsConfig",
    "ComplexField",
    "EnvironmentMap",
    "OutlineMask",
    "ScalarField",
    "ShapeMismatchError",
    "UnitTag",
    "backend_name",
    "__version__",
]
