"""Evaluators for the canonical duality framework of a quartic problem.

Primal side:   Pi(x), Lambda(x) = {1/2 x^T B_k x}, F(x) = [B_1 x, ..., B_m x]
Dual side:     G(s) = A + sum_k s_k B_k,
               Pi^d(s) = -1/2 f^T G(s)^+ f - 1/2 s^T s - s^T d
Mixed:         Xi(x, s) = 1/2 x^T G(s) x - (1/2 s^T s + s^T d) - x^T f

Dual-side functions assume unit weights (see ``problem.normalize_beta``).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError, DomainError, InfeasibleDual
from .linalg import DEFAULT_TOL, DefClass, classify_eigenvalues, symmetric_pinv, threshold
from .problem import QuarticProblem


class Region(str, Enum):
    SA_PLUS = "SaPlus"
    SA_MINUS = "SaMinus"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class XiValue:
    value: float
    grad_x: np.ndarray
    grad_s: np.ndarray


@dataclass(frozen=True)
class PrimalEval:
    value: float
    grad: np.ndarray
    hess: np.ndarray
    lam: np.ndarray


@dataclass(frozen=True)
class DualEval:
    value: float
    grad: np.ndarray
    hess: np.ndarray
    region: Region
    g_eigenvalues: np.ndarray
    x: np.ndarray
    feasible: bool
    residual: float


def _vec(v, size: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.shape != (size,):
        raise DimensionError(f"{name} must have length {size}, got shape {arr.shape}")
    return arr


def _require_unit_beta(p: QuarticProblem) -> None:
    if not p.unit_beta:
        raise DomainError("dual-side evaluation needs unit beta; call normalize_beta first")


def lambda_map(p: QuarticProblem, x) -> np.ndarray:
    x = _vec(x, p.n, "x")
    return 0.5 * np.einsum("i,kij,j->k", x, p.B, x)


def gmat(p: QuarticProblem, sigma) -> np.ndarray:
    sigma = _vec(sigma, p.m, "sigma")
    G = p.A + np.tensordot(sigma, p.B, axes=1)
    return 0.5 * (G + G.T)


def fmat(p: QuarticProblem, x) -> np.ndarray:
    x = _vec(x, p.n, "x")
    return (p.B @ x).T


def primal_eval(p: QuarticProblem, x) -> PrimalEval:
    x = _vec(x, p.n, "x")
    Bx = p.B @ x  # (m, n)
    lam = 0.5 * Bx @ x
    r = lam - p.d
    w = p.beta * r
    value = 0.5 * np.dot(w, r) + 0.5 * x @ p.A @ x - x @ p.f
    grad = w @ Bx + p.A @ x - p.f
    hess = p.A + np.tensordot(w, p.B, axes=1) + (Bx.T * p.beta) @ Bx
    return PrimalEval(float(value), grad, 0.5 * (hess + hess.T), lam)


def region_of(w: np.ndarray, thr: float) -> Region:
    cls = classify_eigenvalues(w, thr)
    if cls is DefClass.POS_DEF:
        return Region.SA_PLUS
    if cls is DefClass.NEG_DEF:
        return Region.SA_MINUS
    if cls is DefClass.INDEFINITE:
        return Region.OUTSIDE
    return Region.BOUNDARY


def feasibility_residual(G: np.ndarray, x: np.ndarray, f: np.ndarray) -> float:
    return float(np.max(np.abs(G @ x - f)) / (1.0 + np.max(np.abs(f)))) if f.size else 0.0


FEAS_TOL = 1e-8


def dual_eval(p: QuarticProblem, sigma, tol: float = DEFAULT_TOL) -> DualEval:
    """Value, gradient, Hessian and region of the canonical dual at ``sigma``.

    When f is outside the column space of a singular G(sigma) the value and
    derivatives are NaN and ``feasible`` is False; the region is still set.
    """
    _require_unit_beta(p)
    sigma = _vec(sigma, p.m, "sigma")
    G = gmat(p, sigma)
    w, V = np.linalg.eigh(G)
    region = region_of(w, threshold(G, tol))
    Gi, _ = symmetric_pinv(w, V, tol)
    x = Gi @ p.f
    res = feasibility_residual(G, x, p.f)
    if res > FEAS_TOL:
        nan_m = np.full(p.m, np.nan)
        return DualEval(np.nan, nan_m, np.full((p.m, p.m), np.nan), region, w, x, False, res)
    F = (p.B @ x).T
    value = -0.5 * p.f @ x - 0.5 * sigma @ sigma - sigma @ p.d
    grad = 0.5 * (p.B @ x) @ x - sigma - p.d
    hess = -F.T @ Gi @ F - np.eye(p.m)
    return DualEval(float(value), grad, 0.5 * (hess + hess.T), region, w, x, True, res)


def dual_grad_quadforms(p: QuarticProblem, sigma) -> np.ndarray:
    """Dual gradient written as the m quadratic forms 1/2 f^T G^-1 B_k G^-1 f - s_k - d_k."""
    _require_unit_beta(p)
    sigma = _vec(sigma, p.m, "sigma")
    Gi = np.linalg.pinv(gmat(p, sigma))
    return np.array([0.5 * p.f @ Gi @ Bk @ Gi @ p.f for Bk in p.B]) - sigma - p.d


def xi_eval(p: QuarticProblem, x, sigma) -> XiValue:
    _require_unit_beta(p)
    x = _vec(x, p.n, "x")
    sigma = _vec(sigma, p.m, "sigma")
    G = gmat(p, sigma)
    value = 0.5 * x @ G @ x - (0.5 * sigma @ sigma + sigma @ p.d) - x @ p.f
    return XiValue(float(value), G @ x - p.f, lambda_map(p, x) - sigma - p.d)


def gap_eval(p: QuarticProblem, x, sigma) -> float:
    """Complementary gap 1/2 x^T G(sigma) x."""
    x = _vec(x, p.n, "x")
    return float(0.5 * x @ gmat(p, sigma) @ x)


def recover_primal(p: QuarticProblem, sigma, tol: float = DEFAULT_TOL) -> np.ndarray:
    """x = G(sigma)^+ f, raising InfeasibleDual when G x != f."""
    sigma = _vec(sigma, p.m, "sigma")
    G = gmat(p, sigma)
    w, V = np.linalg.eigh(G)
    Gi, _ = symmetric_pinv(w, V, tol)
    x = Gi @ p.f
    res = feasibility_residual(G, x, p.f)
    if res > FEAS_TOL:
        raise InfeasibleDual(f"f is not in the column space of G(sigma) (residual {res:.3g})")
    return x
