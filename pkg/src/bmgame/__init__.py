"""Effective Banach-Mazur games over strongly computable spaces.

Exact rational topology, effective Baire category witnesses, game sessions
with machine strategies (Liouville approximation, meager avoidance,
Poincare recurrence), plus a CLI and an HTTP service for live play.
"""

from .topology import BasicOpen, Space, euclidean_space, torus_space, unit_interval_space

__all__ = [
    "BasicOpen",
    "Space",
    "euclidean_space",
    "torus_space",
    "unit_interval_space",
]

__version__ = "0.1.0"
