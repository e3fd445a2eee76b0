"""Exact computations with quadratic, nonhomogeneous quadratic and curved DG rings."""
from __future__ import annotations

from .linalg import Field

__version__ = "0.1.0"

__all__ = ["Field", "__version__"]
