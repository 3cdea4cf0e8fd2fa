"""Approximation algorithms for the rectangle and square escape problems."""

from .geometry import (DIRECTIONS, Boundary, BoundViolation, DensityReport, Direction,
                       EscapeAssignment, EscapeGrid, GeometryError, Rect, RepInstance, SepInstance,
                       build_escape_grid, check_disjoint, compute_density, compute_density_rep,
                       compute_density_sep, escape_path)
from .matching import solve_sep
from .mpc import MpcConfig, run_sep_mpc
from .oracle import solve_exact_rep, solve_exact_sep
from .peeling import build_escape_dag, peel, solve_peeling
from .rounding import deterministic_round, export_lp, import_fractional, randomized_round

__version__ = "0.1.0"
