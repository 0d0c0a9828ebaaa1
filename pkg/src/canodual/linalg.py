"""Dense symmetric linear algebra used by the duality machinery.

All sign decisions go through a single relative threshold
``tol * (1 + ||M||_inf)`` so that verdicts are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AsymmetricInput, PreconditionViolated, SchurPrecondition

DEFAULT_TOL = 1e-9


class DefClass(str, Enum):
    POS_DEF = "PosDef"
    POS_SEMIDEF = "PosSemiDef"
    NEG_DEF = "NegDef"
    NEG_SEMIDEF = "NegSemiDef"
    INDEFINITE = "Indefinite"
    ZERO = "Zero"


@dataclass(frozen=True)
class Definiteness:
    cls: DefClass
    eigenvalues: np.ndarray
    tol_used: float

    @property
    def inertia(self) -> tuple[int, int, int]:
        """(n_neg, n_zero, n_pos) under the threshold that produced ``cls``."""
        w = self.eigenvalues
        return (
            int(np.sum(w <= -self.tol_used)),
            int(np.sum(np.abs(w) < self.tol_used)),
            int(np.sum(w >= self.tol_used)),
        )

    @property
    def psd(self) -> bool:
        return self.cls in (DefClass.POS_DEF, DefClass.POS_SEMIDEF, DefClass.ZERO)

    @property
    def nsd(self) -> bool:
        return self.cls in (DefClass.NEG_DEF, DefClass.NEG_SEMIDEF, DefClass.ZERO)


@dataclass(frozen=True)
class SvdFactors:
    U: np.ndarray
    D: np.ndarray
    R: np.ndarray
    rank: int

    @property
    def singular_values(self) -> np.ndarray:
        k = min(self.D.shape)
        return np.diag(self.D)[:k] if k else np.zeros(0)


def threshold(M: np.ndarray, tol: float) -> float:
    norm = np.max(np.sum(np.abs(M), axis=1)) if M.size else 0.0
    return tol * (1.0 + norm)


def classify_eigenvalues(w: np.ndarray, thr: float) -> DefClass:
    neg = np.sum(w <= -thr)
    pos = np.sum(w >= thr)
    zero = w.size - neg - pos
    if neg and pos:
        return DefClass.INDEFINITE
    if zero == w.size:
        return DefClass.ZERO
    if pos:
        return DefClass.POS_DEF if zero == 0 else DefClass.POS_SEMIDEF
    return DefClass.NEG_DEF if zero == 0 else DefClass.NEG_SEMIDEF


def symmetric_eigh(M: np.ndarray, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise AsymmetricInput(f"expected a square matrix, got shape {M.shape}")
    if check:
        scale = 1.0 + np.max(np.abs(M)) if M.size else 1.0
        if M.size and np.max(np.abs(M - M.T)) > 1e-10 * scale:
            raise AsymmetricInput("matrix is not symmetric")
    return np.linalg.eigh(0.5 * (M + M.T))


def definiteness(M: np.ndarray, tol: float = DEFAULT_TOL) -> Definiteness:
    """Classify a symmetric matrix by the signs of its eigenvalues."""
    w, _ = symmetric_eigh(M)
    thr = threshold(np.asarray(M, dtype=float), tol)
    return Definiteness(classify_eigenvalues(w, thr), w, thr)


def pseudo_inverse(M: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Moore-Penrose inverse; singular values below ``tol * sigma_max`` are dropped."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return M.T.copy()
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    cutoff = tol * (s[0] if s.size else 0.0)
    keep = s > cutoff
    if not np.any(keep):
        return np.zeros(M.T.shape)
    return (Vt[keep].T / s[keep]) @ U[:, keep].T


def symmetric_pinv(w: np.ndarray, V: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Generalized inverse from an eigendecomposition; returns (inverse, kept mask)."""
    smax = np.max(np.abs(w)) if w.size else 0.0
    keep = np.abs(w) > tol * smax
    inv_w = np.zeros_like(w)
    inv_w[keep] = 1.0 / w[keep]
    return (V * inv_w) @ V.T, keep


def svd_decompose(M: np.ndarray, rank_tol: float = 1e-12) -> SvdFactors:
    """Full SVD ``M = U D R`` with U, R orthogonal and D rectangular-diagonal."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    U, s, Vt = np.linalg.svd(M, full_matrices=True)
    D = np.zeros(M.shape)
    D[: s.size, : s.size] = np.diag(s)
    rank = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    return SvdFactors(U=U, D=D, R=Vt, rank=rank)


def matrix_rank(M: np.ndarray, rel_tol: float = 1e-10) -> int:
    s = np.linalg.svd(np.atleast_2d(M), compute_uv=False)
    if not s.size or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def schur_psd_check(M: np.ndarray, split: int, tol: float = DEFAULT_TOL) -> tuple[bool, bool]:
    """Decide M >= 0 directly and via the Schur complement of the trailing block.

    ``split`` is the size of the leading block M11; M22 = M[split:, split:]
    must be positive definite.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if not 0 < split < n:
        raise SchurPrecondition(f"split must lie in (0, {n}), got {split}")
    M11, M12 = M[:split, :split], M[:split, split:]
    M22 = M[split:, split:]
    if definiteness(M22, tol).cls is not DefClass.POS_DEF:
        raise SchurPrecondition("trailing block M22 is not positive definite")
    S = M11 - M12 @ np.linalg.solve(M22, M12.T)
    direct = definiteness(M, tol).psd
    via_schur = definiteness(0.5 * (S + S.T), tol).psd
    return direct, via_schur


def inverse_order_check(G: np.ndarray, U: np.ndarray, tol: float = 1e-10) -> tuple[bool, bool]:
    """For positive definite G, U return (G - U >= 0, U^-1 - G^-1 >= 0)."""
    for name, M in (("G", G), ("U", U)):
        if definiteness(M, tol).cls is not DefClass.POS_DEF:
            raise PreconditionViolated(f"{name} must be positive definite")
    lhs = definiteness(G - U, tol).psd
    Ui, Gi = np.linalg.inv(U), np.linalg.inv(G)
    R = Ui - Gi
    rhs = definiteness(0.5 * (R + R.T), tol).psd
    return lhs, rhs


def lemma4_check(P: np.ndarray, U: np.ndarray, D: np.ndarray, r: int | None = None,
                 tol: float = DEFAULT_TOL) -> tuple[bool, bool]:
    """Evaluate both sides of  P + D U D^T <= 0  <=>  -D^T P^-1 D - U^-1 <= 0.

    P (n x n) negative definite, U (m x m) positive definite with zero
    off-diagonal blocks after the leading r x r block, and D bordered as
    [[D11, 0], [0, 0]] with D11 r x r nonsingular.
    """
    P, U, D = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (P, U, D))
    n, m = D.shape
    if P.shape != (n, n) or U.shape != (m, m):
        raise PreconditionViolated("inconsistent shapes for P, U, D")
    if r is None:
        r = matrix_rank(D) if np.any(D) else 0
    if definiteness(P, tol).cls is not DefClass.NEG_DEF:
        raise PreconditionViolated("P must be negative definite")
    if definiteness(U, tol).cls is not DefClass.POS_DEF:
        raise PreconditionViolated("U must be positive definite")
    if np.any(U[:r, r:]) or np.any(U[r:, :r]):
        raise PreconditionViolated("U must be block diagonal with leading block of size r")
    if np.any(D[r:, :]) or np.any(D[:, r:]):
        raise PreconditionViolated("D must vanish outside its leading r x r block")
    if r and matrix_rank(D[:r, :r]) < r:
        raise PreconditionViolated("leading block D11 must be nonsingular")
    L = P + D @ U @ D.T
    R = -D.T @ np.linalg.solve(P, D) - np.linalg.inv(U)
    lhs = definiteness(0.5 * (L + L.T), tol).nsd
    rhs = definiteness(0.5 * (R + R.T), tol).nsd
    return lhs, rhs


def sqrt_psd(M: np.ndarray) -> np.ndarray:
    """Symmetric square root of a positive semidefinite matrix."""
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T
