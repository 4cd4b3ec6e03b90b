"""Self-shrinking tori in C^2: construction, numerical identity checks and rigidity tests."""

from . import curves, geom, grid, tori, verify
from .errors import ShrinkToriError
from .tori import REGISTRY, build

__all__ = ["REGISTRY", "ShrinkToriError", "build", "curves", "geom", "grid", "tori", "verify"]
__version__ = "0.1.0"
