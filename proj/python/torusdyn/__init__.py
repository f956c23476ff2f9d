"""Numerical tools for lifted torus homeomorphisms."""

from ._core import (
    Map,
    birkhoff_mean,
    bounded_deviation_orbit,
    count_crossings,
    drift_saddle,
    find_periodic,
    identity_map,
    rotation_hull,
    run,
    standard_map,
    translation_map,
    vertical_rotation_interval,
)

__all__ = [
    "Map",
    "birkhoff_mean",
    "bounded_deviation_orbit",
    "count_crossings",
    "drift_saddle",
    "find_periodic",
    "identity_map",
    "rotation_hull",
    "run",
    "standard_map",
    "translation_map",
    "vertical_rotation_interval",
]
__version__ = "0.1.0"
