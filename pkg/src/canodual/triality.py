"""Triality verdicts for (dual critical point, recovered primal point) pairs.

Every verdict rests on Hessian inertia at the pair. For n = m the primal
and dual Hessians at an S_a^- pair are definite together; for n != m the
double-min correspondence only survives on a subspace, which is certified
by an explicit basis (P on the primal side when m < n, Q on the dual side
when m > n) and spot-checked by sampling the restricted function.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .canonical import DualEval, PrimalEval, Region, dual_eval, fmat, gmat, primal_eval, recover_primal
from .dual_solver import DualClass, DualCriticalPoint, hessian_class
from .errors import DegenerateInput, InvariantViolation, PreconditionViolated, RankDeficientF
from .kernels import primal_values
from .linalg import DefClass, definiteness, matrix_rank, sqrt_psd
from .problem import QuarticProblem, SolverConfig

PAIR_TOL = 1e-8
RANK_TOL = 1e-10


class VerdictKind(str, Enum):
    GLOBAL_MIN = "GlobalMin"
    LOCAL_MIN = "LocalMin"
    LOCAL_MAX = "LocalMax"
    SADDLE_PRIMAL = "SaddlePrimal"
    SADDLE_DUAL = "SaddleDual"
    WEAK_PRIMAL = "WeakDoubleMinPrimalRestricted"
    WEAK_DUAL = "WeakDoubleMinDualRestricted"
    UNCLASSIFIED = "Unclassified"


class Branch(str, Enum):
    MIN_MAX = "MinMax"
    DOUBLE_MAX = "DoubleMax"
    DOUBLE_MIN_STRONG = "DoubleMinStrong"
    DOUBLE_MIN_WEAK_M_LT_N = "DoubleMinWeak_mLTn"
    DOUBLE_MIN_WEAK_M_GT_N = "DoubleMinWeak_mGTn"
    EXCLUDED = "Excluded"


@dataclass(frozen=True)
class CriticalPair:
    x: np.ndarray
    sigma: np.ndarray
    primal: PrimalEval
    dual: DualEval
    gap_residual: float
    G: np.ndarray
    F: np.ndarray
    dual_class: DualClass
    diagnostics: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def m(self) -> int:
        return self.sigma.size


@dataclass(frozen=True)
class SubspaceCertificate:
    side: str  # "primal" (basis P, n x m) or "dual" (basis Q, m x n)
    basis: np.ndarray
    rank: int
    restricted_hessian_eigs: np.ndarray
    valid: bool


@dataclass(frozen=True)
class ProbeReport:
    radius: float
    samples: int
    center_value: float
    min_delta: float
    argmin_norm: float
    passed: bool


@dataclass(frozen=True)
class TrialityVerdict:
    kind: VerdictKind
    theorem_branch: Branch
    certificate: SubspaceCertificate | None = None
    notes: tuple[str, ...] = ()
    probe: ProbeReport | None = None


def make_pair(p: QuarticProblem, dcp: DualCriticalPoint, tol: float = 1e-9,
              strict: bool = False) -> CriticalPair:
    """Recover x = G(sigma)^+ f and check the pair invariants.

    Violations are collected in ``diagnostics``; with ``strict`` the first one
    raises InvariantViolation.
    """
    sigma = np.asarray(dcp.sigma, dtype=float)
    x = recover_primal(p, sigma, tol)
    primal = primal_eval(p, x)
    dual = dual_eval(p, sigma, tol)
    F = fmat(p, x)
    gap = abs(primal.value - dual.value)
    issues = []
    grad_tol = PAIR_TOL * (1.0 + float(np.max(np.abs(F))))
    checks = (
        ("primal gradient", float(np.max(np.abs(primal.grad))), grad_tol),
        ("dual gradient", float(np.max(np.abs(dual.grad))), PAIR_TOL),
        ("complementary gap", gap, PAIR_TOL * (1.0 + abs(primal.value))),
        ("sigma = Lambda(x) - d", float(np.max(np.abs(sigma - (primal.lam - p.d)))), PAIR_TOL),
    )
    for name, value, limit in checks:
        if not value <= limit:
            msg = f"{name} residual {value:.3g} exceeds {limit:.3g}"
            if strict:
                raise InvariantViolation(msg)
            issues.append(msg)
    dual_class, _ = hessian_class(dual.hess, tol)
    return CriticalPair(x, sigma, primal, dual, gap, gmat(p, sigma), F, dual_class, tuple(issues))


# ---------------------------------------------------------------------------
# subspace certificates


def subspace_P(G: np.ndarray, F: np.ndarray, H: np.ndarray, Hd: np.ndarray | None = None,
               tol: float = 1e-9) -> SubspaceCertificate:
    """Basis P (n x m, rank m) with P^T H P >= 0, for m < n, G < 0, Hd >= 0.

    With C = (-G)^{1/2} and T0 = C^{-1}, T0^T G T0 = -I. Diagonalizing
    T0^T F F^T T0 = W diag(a) W^T (a descending) gives T = T0 W and
    T^T H T = diag(a_i - 1); P is the first m columns of T.
    """
    n, m = F.shape
    if not m < n:
        raise PreconditionViolated(f"P certificate needs m < n, got n={n}, m={m}")
    if definiteness(G, tol).cls is not DefClass.NEG_DEF:
        raise PreconditionViolated("G(sigma) must be negative definite")
    if Hd is not None and not definiteness(Hd, tol).psd:
        raise PreconditionViolated("dual Hessian must be positive semidefinite")
    if matrix_rank(F, RANK_TOL) < m:
        raise RankDeficientF("rank F(x) < m, inconsistent with a dual local minimum")
    T0 = np.linalg.inv(sqrt_psd(-G))
    K = T0 @ F
    a, W = np.linalg.eigh(K @ K.T)
    W = W[:, ::-1]
    P = T0 @ W[:, :m]
    return _certificate("primal", P, H, m, tol)


def subspace_Q(G: np.ndarray, F: np.ndarray, H: np.ndarray, Hd: np.ndarray,
               tol: float = 1e-9) -> SubspaceCertificate:
    """Basis Q (m x n, rank n) with Q^T Hd Q >= 0, for m > n, G < 0, H >= 0.

    Hd = F^T (-G)^{-1} F - I. The top-n eigenvectors of F^T (-G)^{-1} F span
    range(F^T) and carry the eigenvalues a_i >= 1 exactly when H >= 0.
    """
    n, m = F.shape
    if not m > n:
        raise PreconditionViolated(f"Q certificate needs m > n, got n={n}, m={m}")
    if definiteness(G, tol).cls is not DefClass.NEG_DEF:
        raise PreconditionViolated("G(sigma) must be negative definite")
    if not definiteness(H, tol).psd:
        raise PreconditionViolated("primal Hessian must be positive semidefinite")
    if matrix_rank(F, RANK_TOL) < n:
        raise RankDeficientF("rank F(x) < n")
    M = F.T @ np.linalg.solve(-G, F)
    a, W = np.linalg.eigh(0.5 * (M + M.T))
    Q = W[:, ::-1][:, :n]
    return _certificate("dual", Q, Hd, n, tol)


def _certificate(side: str, basis: np.ndarray, hess: np.ndarray, want_rank: int,
                 tol: float) -> SubspaceCertificate:
    R = basis.T @ hess @ basis
    R = 0.5 * (R + R.T)
    eigs = np.linalg.eigvalsh(R)
    rank = matrix_rank(basis, RANK_TOL)
    limit = tol * (1.0 + float(np.max(np.sum(np.abs(R), axis=1))))
    valid = rank == want_rank and bool(np.all(eigs >= -limit))
    return SubspaceCertificate(side, basis, rank, eigs, valid)


def build_subspace_P(pair: CriticalPair, tol: float = 1e-9) -> SubspaceCertificate:
    return subspace_P(pair.G, pair.F, pair.primal.hess, pair.dual.hess, tol)


def build_subspace_Q(pair: CriticalPair, tol: float = 1e-9) -> SubspaceCertificate:
    return subspace_Q(pair.G, pair.F, pair.primal.hess, pair.dual.hess, tol)


# ---------------------------------------------------------------------------
# probes


def restricted_probe(p: QuarticProblem, pair: CriticalPair, cert: SubspaceCertificate,
                     cfg: SolverConfig, radius: float | None = None) -> ProbeReport:
    """Sample the restricted function in a ball of radius ``cfg.probe_radius``.

    Primal certificates probe phi(t) = Pi(x + P t); dual ones probe
    psi(v) = Pi^d(sigma + Q v). Passes when no sample falls below the centre
    value by more than rounding (1e-12 relative).
    """
    k = cert.basis.shape[1]
    r = float(cfg.probe_radius if radius is None else radius)
    rng = np.random.default_rng(cfg.rng_seed)
    count = int(cfg.probe_samples)
    dirs = rng.normal(size=(count, k))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = r * rng.uniform(0.0, 1.0, size=count) ** (1.0 / max(k, 1))
    axes = np.vstack([np.eye(k), -np.eye(k)]) * r
    T = np.vstack([axes, dirs * radii[:, None]])
    if cert.side == "primal":
        center = float(primal_values(p.A, p.B, p.beta, p.d, p.f, pair.x[None, :])[0])
        vals = primal_values(p.A, p.B, p.beta, p.d, p.f, pair.x + T @ cert.basis.T)
    else:
        center = dual_eval(p, pair.sigma).value
        vals = np.array([dual_eval(p, pair.sigma + cert.basis @ t).value for t in T])
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    i = int(np.argmin(vals))
    delta = float(vals[i] - center)
    passed = delta >= -1e-12 * (1.0 + abs(center))
    return ProbeReport(r, len(T), center, delta, float(np.linalg.norm(T[i])), bool(passed))


# ---------------------------------------------------------------------------
# classification


def classify_pair(pair: CriticalPair, cfg: SolverConfig,
                  p: QuarticProblem | None = None) -> TrialityVerdict:
    """Apply the tri-duality (n = m) / refined triality (n != m) rules.

    Weak double-min certificates are spot-checked by ``restricted_probe`` when
    the problem ``p`` is supplied.

    Raises DegenerateInput when either Hessian is singular within tolerance.
    """
    tol = cfg.definiteness_tol
    n, m = pair.n, pair.m
    pdef = definiteness(pair.primal.hess, tol)
    ddef = definiteness(pair.dual.hess, tol)
    gdef = definiteness(pair.G, tol)
    if pdef.inertia[1]:
        raise DegenerateInput("primal Hessian is singular at the critical point")
    if pair.dual_class is DualClass.DEGENERATE or ddef.inertia[1]:
        raise DegenerateInput("dual Hessian is singular at the critical point")
    notes = []
    region = pair.dual.region

    if region is Region.SA_PLUS or (region is Region.BOUNDARY and gdef.psd):
        if not pdef.psd:
            notes.append(f"primal Hessian is {pdef.cls.value} at a min-max pair")
        return TrialityVerdict(VerdictKind.GLOBAL_MIN, Branch.MIN_MAX, notes=tuple(notes))

    if region is not Region.SA_MINUS:
        why = "G(sigma) is indefinite" if region is Region.OUTSIDE else "G(sigma) is singular and not PSD"
        return TrialityVerdict(VerdictKind.UNCLASSIFIED, Branch.EXCLUDED,
                               notes=(f"{why}; outside the scope of the triality theorems",))

    if ddef.cls is DefClass.NEG_DEF:
        if not pdef.nsd:
            notes.append(f"primal Hessian is {pdef.cls.value}, expected NegDef")
        return TrialityVerdict(VerdictKind.LOCAL_MAX, Branch.DOUBLE_MAX, notes=tuple(notes))

    if ddef.cls is DefClass.POS_DEF:
        if n == m:
            if matrix_rank(pair.F, RANK_TOL) < n:
                notes.append("F(x) is singular at a dual local minimum")
                return TrialityVerdict(VerdictKind.UNCLASSIFIED, Branch.DOUBLE_MIN_STRONG, notes=tuple(notes))
            if pdef.cls is not DefClass.POS_DEF:
                notes.append(f"primal Hessian is {pdef.cls.value}, expected PosDef")
                return TrialityVerdict(VerdictKind.SADDLE_PRIMAL, Branch.DOUBLE_MIN_STRONG, notes=tuple(notes))
            return TrialityVerdict(VerdictKind.LOCAL_MIN, Branch.DOUBLE_MIN_STRONG)
        if m < n:
            cert = build_subspace_P(pair, tol)
            probe = (restricted_probe(p, pair, cert, cfg) if p is not None else None)
            if pdef.cls is not DefClass.INDEFINITE:
                notes.append(f"primal Hessian is {pdef.cls.value}, expected Indefinite")
            if not cert.valid:
                notes.append("P certificate failed its eigenvalue or rank check")
            return TrialityVerdict(VerdictKind.WEAK_PRIMAL, Branch.DOUBLE_MIN_WEAK_M_LT_N, cert,
                                   tuple(notes), probe)
        notes.append("dual local minimum with m > n contradicts rank F(x) <= n")
        return TrialityVerdict(VerdictKind.UNCLASSIFIED, Branch.EXCLUDED, notes=tuple(notes))

    # dual Hessian indefinite
    if m > n and pdef.cls is DefClass.POS_DEF:
        cert = build_subspace_Q(pair, tol)
        probe = (restricted_probe(p, pair, cert, cfg) if p is not None else None)
        if not cert.valid:
            notes.append("Q certificate failed its eigenvalue or rank check")
        return TrialityVerdict(VerdictKind.WEAK_DUAL, Branch.DOUBLE_MIN_WEAK_M_GT_N, cert, tuple(notes), probe)
    if pdef.cls is DefClass.INDEFINITE:
        return TrialityVerdict(VerdictKind.SADDLE_DUAL, Branch.EXCLUDED,
                               notes=("both Hessians indefinite; excluded from the triality statements",))
    if n == m:
        notes.append(f"dual saddle with {pdef.cls.value} primal Hessian contradicts n = m inertia matching")
    notes.append(f"dual Hessian indefinite with primal Hessian {pdef.cls.value}")
    return TrialityVerdict(VerdictKind.UNCLASSIFIED, Branch.EXCLUDED, notes=tuple(notes))
