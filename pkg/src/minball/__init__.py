"""Minimum covering Euclidean ball of balls.

Primal and dual active-set solvers whose search paths are rays or
planar conic sections of intersected coverage bisectors, plus
independent verification oracles and a small CLI.
"""

from .geometry import (
    Ball,
    CoveringBall,
    DEFAULT_TOL,
    Instance,
    KKTSolution,
    Tolerances,
    coverage_value,
    coverage_values,
    kkt_check,
    objective,
    preprocess_instance,
)
from .conics import (
    Bisector,
    ConicSection,
    EmptyIntersectionError,
    DegenerateGeometryError,
    build_bisector,
    build_pair_hyperplane,
    classify_hyperplane_conic,
    intersect_sequence,
    parametrize_2d,
    quadratic_form_residual,
    solve_cos_sin,
    solve_parabola_quadratic,
    solve_sec_tan,
)
from .primal import solve_primal
from .dual import solve_dual
from .oracle import Certificate, oracle_enumerate, oracle_subgradient, validate
from .harness import generate_instance, load_instance, save_instance, solve_instance

__all__ = [
    "Ball", "Instance", "CoveringBall", "KKTSolution", "Tolerances", "DEFAULT_TOL",
    "coverage_value", "coverage_values", "objective", "kkt_check",
    "preprocess_instance",
    "Bisector", "ConicSection", "EmptyIntersectionError", "DegenerateGeometryError",
    "build_bisector", "build_pair_hyperplane", "classify_hyperplane_conic",
    "intersect_sequence", "parametrize_2d", "quadratic_form_residual",
    "solve_sec_tan", "solve_cos_sin", "solve_parabola_quadratic",
    "solve_primal", "solve_dual",
    "Certificate", "oracle_subgradient", "oracle_enumerate", "validate",
    "generate_instance", "load_instance", "save_instance", "solve_instance",
]

__version__ = "0.1.0"
