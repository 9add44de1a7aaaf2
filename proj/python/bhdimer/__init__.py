"""Two-site Bose-Hubbard toolkit: exact spectra, Bethe roots, closed-form estimates."""

from ._core import *  # noqa: F401,F403
from ._core import BhdError, ReducedParams, PhysicalParams

__all__ = [name for name in dir() if not name.startswith("_")]
