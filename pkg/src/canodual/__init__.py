"""Canonical duality solver and verifier for double-well quartic optimization."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403,E402
from .problem import (QuarticProblem, SolverConfig, load_problem, normalize_beta, read_problem,  # noqa: E402
                      serialize_problem)
from .dual_solver import find_critical_points, newton_refine  # noqa: E402
from .triality import classify_pair, make_pair  # noqa: E402
from .report import Report, solve  # noqa: E402
from .perturbation import detect_degeneracy, perturb_and_solve  # noqa: E402
from .oracle import cross_validate, grid_scan, multistart_descent  # noqa: E402
from .bundled import load_example  # noqa: E402

__all__ = [
    "QuarticProblem",
    "SolverConfig",
    "Report",
    "classify_pair",
    "cross_validate",
    "detect_degeneracy",
    "find_critical_points",
    "grid_scan",
    "load_example",
    "load_problem",
    "make_pair",
    "multistart_descent",
    "newton_refine",
    "normalize_beta",
    "perturb_and_solve",
    "read_problem",
    "serialize_problem",
    "solve",
]
