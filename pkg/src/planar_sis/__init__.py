"""SIS epidemics on planar Poisson point processes with far-random-waypoint motion.

The package bundles an exact event-driven simulator on square tori, estimators
for infected fractions and pair correlation functions, a catalog of
third-moment closure heuristics, fixed-point solvers for the second-moment
integral-equation systems, plateau polynomial solvers, critical-value /
phase-diagram computations, and Boolean-model percolation quantities for the
no-motion case.
"""

from planar_sis.geometry import ModelParams, TorusDomain, torus_distance, sample_poisson
from planar_sis.geometry import CellIndex, build_cell_index, neighbors_within

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "TorusDomain",
    "torus_distance",
    "sample_poisson",
    "CellIndex",
    "build_cell_index",
    "neighbors_within",
    "__version__",
]
