"""Equilibrium shapes of cornered voids in biaxially loaded elastic solids."""
from .params import PhysicalParams

__version__ = "0.1.0"
__all__ = ["PhysicalParams", "__version__"]
