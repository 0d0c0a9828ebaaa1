"""Linear perturbation for inputless or symmetric instances.

When f = 0 (or f respects a symmetry of the quartic terms) the dual may have
no critical point with G(sigma) >= 0. Adding a small forcing term breaks the
symmetry; which of the symmetric minimizers is recovered depends on the
direction of the perturbation.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionError, PreconditionViolated
from .problem import QuarticProblem, SolverConfig
from .report import Report, detect_degeneracy, solve

DEFAULT_MAGNITUDE = 1e-3

__all__ = ["perturb_and_solve", "detect_degeneracy", "default_perturbation"]


def default_perturbation(n: int, seed: int, magnitude: float = DEFAULT_MAGNITUDE) -> np.ndarray:
    """Seeded random direction scaled to ``magnitude`` in the max norm."""
    v = np.random.default_rng(seed).normal(size=n)
    return magnitude * v / np.max(np.abs(v))


def perturb_and_solve(p: QuarticProblem, f_pert, cfg: SolverConfig | None = None) -> Report:
    f_pert = np.atleast_1d(np.asarray(f_pert, dtype=float))
    if f_pert.shape != (p.n,):
        raise DimensionError(f"f_pert must have length {p.n}, got shape {f_pert.shape}")
    norm = float(np.max(np.abs(f_pert)))
    if not norm > 0:
        raise PreconditionViolated("perturbation must be nonzero")
    report = solve(p.with_f(p.f + f_pert), cfg)
    report.perturbation = {
        "f_pert": [float(a) for a in f_pert],
        "norm_inf": norm,
        "base_f": [float(a) for a in p.f],
    }
    return report
