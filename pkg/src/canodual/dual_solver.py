"""Locating and classifying critical points of the canonical dual.

The dual has poles on {det G(sigma) = 0}. Starts are stratified over pole
cells when that structure is computable (m = 1, or separable diagonal
data) and drawn at random otherwise. Each start is refined by a damped
Newton iteration that is never allowed to change the inertia of G, so an
iterate cannot jump across a pole.
"""
from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from .canonical import Region, dual_eval, lambda_map
from .errors import NoConvergence
from .linalg import pseudo_inverse, threshold
from .problem import QuarticProblem, SolverConfig

MAX_GRID_SEEDS = 4096
MAX_CORNER_SEEDS = 512
ORTHANT_SCALES = (0.01, 0.1, 1.0)
POLE_GUARD = 1e-12
STALL_ALPHA = 2.0**-10
BOUNDARY_FRACTION = 0.95
STALL_COUNT = 3
NEWTON_MIN_ALPHA = 2.0**-6
MERIT_MIN_ALPHA = 2.0**-12
NEWTON_MISSES = 4


class DualClass(str, Enum):
    LOCAL_MIN = "LocalMin"
    LOCAL_MAX = "LocalMax"
    SADDLE = "Saddle"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class DualCriticalPoint:
    sigma: np.ndarray
    region: Region
    dual_class: DualClass
    grad_norm: float
    hess_inertia: tuple[int, int, int]
    dual_value: float
    iterations: int = 0


@dataclass
class SearchStats:
    seeds_used: int = 0
    seeds_skipped: int = 0
    newton_failures: int = 0
    dedup_merges: int = 0
    outside_found: int = 0
    failure_reasons: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "seeds_used": self.seeds_used,
            "seeds_skipped": self.seeds_skipped,
            "newton_failures": self.newton_failures,
            "dedup_merges": self.dedup_merges,
            "outside_found": self.outside_found,
            "failure_reasons": dict(sorted(self.failure_reasons.items())),
        }


def hessian_class(hess: np.ndarray, tol: float) -> tuple[DualClass, tuple[int, int, int]]:
    w = np.linalg.eigvalsh(hess)
    thr = threshold(hess, tol)
    inertia = (int(np.sum(w <= -thr)), int(np.sum(np.abs(w) < thr)), int(np.sum(w >= thr)))
    if inertia[1]:
        return DualClass.DEGENERATE, inertia
    if inertia[0] == 0:
        return DualClass.LOCAL_MIN, inertia
    if inertia[2] == 0:
        return DualClass.LOCAL_MAX, inertia
    return DualClass.SADDLE, inertia


# ---------------------------------------------------------------------------
# seeds


def _is_diagonal(M: np.ndarray) -> bool:
    return not np.any(M - np.diag(np.diag(M)))


def axis_poles(p: QuarticProblem) -> list[np.ndarray] | None:
    """Per-axis pole locations when the pole set is a product of axis values.

    Handles m = 1 (generalized eigenvalues of the pencil (A, -B)) and the
    separable diagonal case where each diagonal entry of G depends on at
    most one sigma_k. Returns None otherwise.
    """
    if p.m == 1:
        with np.errstate(all="ignore"):
            ev = scipy.linalg.eigvals(p.A, -p.B[0])
        ev = ev[np.isfinite(ev)]
        real = ev.real[np.abs(ev.imag) <= 1e-9 * (1.0 + np.abs(ev.real))]
        return [np.unique(np.round(real, 14))]
    if not (_is_diagonal(p.A) and all(_is_diagonal(Bk) for Bk in p.B)):
        return None
    diagB = np.array([np.diag(Bk) for Bk in p.B])  # (m, n)
    if np.any(np.count_nonzero(diagB, axis=0) > 1):
        return None
    a = np.diag(p.A)
    poles = []
    for k in range(p.m):
        idx = np.nonzero(diagB[k])[0]
        poles.append(np.unique(-a[idx] / diagB[k, idx]))
    return poles


def _axis_samples(poles: np.ndarray, center: float, h: float) -> np.ndarray:
    if poles.size == 0:
        return np.array([center, center - 0.5 * h, center + 0.5 * h])
    scale = 1.0 + np.max(np.abs(poles)) + abs(center)
    offsets = scale * np.array([1e-3, 1e-2, 1e-1, 1.0, 10.0])
    pts = [poles[0] - offsets, poles[-1] + offsets]
    for lo, hi in zip(poles[:-1], poles[1:]):
        pts.append(lo + (hi - lo) * np.array([0.02, 0.25, 0.5, 0.75, 0.98]))
    return np.unique(np.concatenate(pts))


def seed_candidates(p: QuarticProblem, cfg: SolverConfig) -> list[np.ndarray]:
    """Deterministic list of Newton starts for the dual critical-point search.

    Order: structured points (sigma = Lambda(x0) - d for x0 = 0 and the
    pseudo-solution of A x = f), well-state corners offset at the scale of |f|,
    pole-cell grid, then random samples: a third
    uniform in the box -d + [-h, h]^m, the rest with log-uniform magnitudes
    in [1e-6 h, h] around -d and around 0.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    h = float(cfg.sample_box_halfwidth)
    center = -p.d
    seeds = [center.copy(), lambda_map(p, pseudo_inverse(p.A) @ p.f) - p.d]

    # Well-state corners: at a critical point each well term sits near its
    # bottom (sigma_k ~ 0) or its hump (sigma_k ~ -d_k). When A is small,
    # G(sigma) x = f with x of order one puts the offset at the scale of |f|.
    fscale = float(np.max(np.abs(p.f)))
    offsets = [0.0] + [sgn * t * fscale for t in ORTHANT_SCALES for sgn in (-1.0, 1.0)] if fscale > 0 else [0.0]
    per_axis = [np.unique([c + o for c in (0.0, -dk) for o in offsets]) for dk in p.d]
    total = int(np.prod([len(a) for a in per_axis]))
    cap = min(MAX_CORNER_SEEDS, 2 * int(cfg.multistart_count))
    if total <= cap:
        seeds.extend(np.array(c) for c in itertools.product(*per_axis))
    else:
        for _ in range(cap):
            seeds.append(np.array([a[rng.integers(len(a))] for a in per_axis]))

    poles = axis_poles(p)
    if poles is not None:
        axes = [_axis_samples(pk, c, max(h, 1.0)) for pk, c in zip(poles, center)]
        total = int(np.prod([len(a) for a in axes]))
        if total <= MAX_GRID_SEEDS:
            seeds.extend(np.array(s) for s in itertools.product(*axes))
        else:
            for _ in range(MAX_GRID_SEEDS):
                seeds.append(np.array([a[rng.integers(len(a))] for a in axes]))

    # a third uniform in the box, the rest at log-uniform scales around -d
    # and around 0 (weakly forced minimizers have sigma close to 0)
    count = int(cfg.multistart_count)
    n_uniform = (count + 2) // 3
    n_log = count - n_uniform
    seeds.extend(center + rng.uniform(-h, h, size=(n_uniform, p.m)))
    mags = h * 10.0 ** rng.uniform(-6.0, 0.0, size=(n_log, p.m))
    signs = rng.choice([-1.0, 1.0], size=mags.shape)
    origins = np.where(np.arange(n_log)[:, None] % 2 == 0, center, 0.0)
    seeds.extend(origins + signs * mags)

    unique, seen = [], set()
    for s in seeds:
        key = tuple(np.asarray(s, dtype=float).tolist())
        if key not in seen:
            seen.add(key)
            unique.append(np.asarray(s, dtype=float))
    return unique


# ---------------------------------------------------------------------------
# Newton refinement


class _Batch:
    """Dual gradient, Hessian and G spectrum for a stack of sigma values."""

    __slots__ = ("sigma", "grad", "hess", "n_neg", "ok", "w", "V")

    def __init__(self, p: QuarticProblem, S: np.ndarray):
        n, m = p.n, p.m
        G = (p.A.ravel() + S @ p.B.reshape(m, n * n)).reshape(-1, n, n)
        w, V = np.linalg.eigh(G)
        aw = np.abs(w)
        ok = aw.min(axis=1) > POLE_GUARD * (1.0 + aw.max(axis=1))
        with np.errstate(all="ignore"):
            x = np.einsum("kij,kj->ki", V, np.einsum("kji,j->ki", V, p.f) / w)
            Bx = np.einsum("mij,kj->kmi", p.B, x)  # rows B_l x for each seed
            grad = 0.5 * np.einsum("kmi,ki->km", Bx, x) - S - p.d
            VtF = np.einsum("kji,kmj->kim", V, Bx)  # V^T F
            hess = -np.einsum("kim,ki,kil->kml", VtF, 1.0 / w, VtF)
        hess[:, np.arange(m), np.arange(m)] -= 1.0
        hess = 0.5 * (hess + hess.transpose(0, 2, 1))
        ok &= np.isfinite(grad).all(axis=1) & np.isfinite(hess).all(axis=(1, 2))
        self.sigma, self.grad, self.hess = S, grad, hess
        self.n_neg = np.count_nonzero(w < 0, axis=1)
        self.ok, self.w, self.V = ok, w, V

    def take(self, idx, other: "_Batch", sub) -> None:
        for name in self.__slots__:
            getattr(self, name)[idx] = getattr(other, name)[sub]


def _pole_distance(p: QuarticProblem, st: _Batch, idx: np.ndarray, step: np.ndarray) -> np.ndarray:
    """Smallest alpha > 0 with det G(sigma + alpha * step) = 0, per row (inf if none).

    In the eigenbasis of G the question is when I + alpha diag(1/w) V^T dG V
    becomes singular, i.e. alpha = -1/mu for the real negative eigenvalues mu.
    """
    n = p.n
    dG = (step @ p.B.reshape(p.m, n * n)).reshape(-1, n, n)
    V, w = st.V[idx], st.w[idx]
    M = np.einsum("kji,kjl,kls->kis", V, dG, V) / w[:, :, None]
    mu = np.linalg.eigvals(M)
    real = (np.abs(mu.imag) <= 1e-12 * (1.0 + np.abs(mu.real))) & (mu.real < 0)
    with np.errstate(divide="ignore"):
        cand = np.where(real, -1.0 / np.where(real, mu.real, -1.0), np.inf)
    return cand.min(axis=1)


def _newton_steps(H: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Newton steps -H^-1 g per row, and a mask of rows where H is invertible."""
    h, Q = np.linalg.eigh(H)
    ah = np.abs(h)
    valid = ah.min(axis=1) > 1e-14 * np.maximum(ah.max(axis=1), 1e-300)
    with np.errstate(all="ignore"):
        step = -np.einsum("kij,kj->ki", Q, np.einsum("kji,kj->ki", Q, g) / h)
    valid &= np.isfinite(step).all(axis=1)
    return step, valid


def newton_batch(p: QuarticProblem, starts, cfg: SolverConfig) -> list:
    """Damped Newton on grad Pi^d = 0 from every start, in lockstep.

    Each iterate stays in the pole cell of its start: steps are cut to a
    fraction of the distance to the nearest pole and rejected if the inertia
    of G changes. The merit function is |grad|^2; when the Newton direction
    does not decrease it, steepest descent on the merit is tried. Returns one
    entry per start: a DualCriticalPoint or a failure message.
    """
    S = np.array(starts, dtype=float).reshape(-1, p.m)
    k = S.shape[0]
    out: list = [None] * k
    if k == 0:
        return out
    st = _Batch(p, S.copy())
    for i in np.flatnonzero(~st.ok):
        out[i] = "start lies on a pole of the dual"
    active = st.ok.copy()
    n_neg0 = st.n_neg.copy()
    stalled = np.zeros(k, dtype=int)
    misses = np.zeros(k, dtype=int)
    iters = np.zeros(k, dtype=int)
    max_iter = int(cfg.newton_max_iter)

    for it in range(max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        gnorm = np.abs(st.grad[idx]).max(axis=1)
        done = gnorm <= cfg.newton_tol
        iters[idx[done]] = it
        active[idx[done]] = False
        idx, gnorm = idx[~done], gnorm[~done]
        if idx.size == 0:
            break
        if it == max_iter:
            for i in idx:
                out[i] = f"no convergence within {max_iter} iterations"
            active[idx] = False
            break
        g, H = st.grad[idx], st.hess[idx]
        g2 = np.einsum("ki,ki->k", g, g)
        newton, valid = _newton_steps(H, g)
        merit = -np.einsum("kij,kj->ki", H, g)
        floor = 1e-15 * (1.0 + np.abs(st.sigma[idx]).max(axis=1))
        moved = np.zeros(idx.size, dtype=bool)
        alpha_used = np.zeros(idx.size)
        by_merit = np.zeros(idx.size, dtype=bool)
        for phase, (step, shrink) in enumerate(((newton, NEWTON_MIN_ALPHA), (merit, MERIT_MIN_ALPHA))):
            rows = np.flatnonzero(~moved & (valid if phase == 0 else True))
            if rows.size == 0:
                continue
            stp = step[rows]
            alpha = np.minimum(1.0, BOUNDARY_FRACTION * _pole_distance(p, st, idx[rows], stp))
            smax = np.abs(stp).max(axis=1)
            with np.errstate(divide="ignore"):
                a_min = np.maximum(floor[rows] / smax, alpha * shrink)
            search = alpha > a_min
            while np.any(search):
                r = np.flatnonzero(search)
                trial = _Batch(p, st.sigma[idx[rows[r]]] + alpha[r, None] * stp[r])
                t2 = np.einsum("ki,ki->k", trial.grad, trial.grad)
                acc = trial.ok & (trial.n_neg == n_neg0[idx[rows[r]]]) & (t2 <= (1.0 - 1e-4 * alpha[r]) * g2[rows[r]])
                if np.any(acc):
                    hit = r[acc]
                    st.take(idx[rows[hit]], trial, np.flatnonzero(acc))
                    moved[rows[hit]] = True
                    alpha_used[rows[hit]] = alpha[hit]
                    by_merit[rows[hit]] = phase == 1
                    search[hit] = False
                rest = r[~acc]
                alpha[rest] *= 0.5
                search[rest] = alpha[rest] > a_min[rest]
        for j in np.flatnonzero(~moved):
            out[idx[j]] = f"line search failed at iteration {it} (|grad| = {gnorm[j]:.3g})"
        active[idx[~moved]] = False
        # Newton keeps failing, or steps keep shrinking: a pole or a nonzero
        # local minimum of |grad| blocks progress
        mv = idx[moved]
        stalled[mv] = np.where(alpha_used[moved] <= STALL_ALPHA, stalled[mv] + 1, 0)
        misses[mv] = np.where(by_merit[moved], misses[mv] + 1, 0)
        stuck = moved & ((stalled[idx] >= STALL_COUNT) | (misses[idx] >= NEWTON_MISSES))
        for j in np.flatnonzero(stuck):
            out[idx[j]] = f"stalled at iteration {it} (|grad| = {gnorm[j]:.3g})"
        active[idx[stuck]] = False

    finished: list[DualCriticalPoint] = []
    for i in range(k):
        if out[i] is None:
            s = st.sigma[i].copy()
            # most starts converge to a point already seen; reuse its evaluation
            twin = next((q for q in finished if _same_point(q.sigma, s, cfg.dedup_tol)), None)
            if twin is not None:
                out[i] = dataclasses.replace(twin, sigma=s, iterations=int(iters[i]))
                continue
            ev = dual_eval(p, s, cfg.definiteness_tol)
            dual_class, inertia = hessian_class(ev.hess, cfg.definiteness_tol)
            out[i] = DualCriticalPoint(s, ev.region, dual_class, float(np.max(np.abs(ev.grad))),
                                       inertia, ev.value, int(iters[i]))
            finished.append(out[i])
    return out


def newton_refine(p: QuarticProblem, sigma0, cfg: SolverConfig) -> DualCriticalPoint:
    """Damped Newton from a single start (see ``newton_batch``).

    Raises NoConvergence when the iteration stalls, hits a pole, or exceeds
    ``cfg.newton_max_iter``.
    """
    res = newton_batch(p, [np.asarray(sigma0, dtype=float)], cfg)[0]
    if isinstance(res, str):
        raise NoConvergence(res)
    return res


# ---------------------------------------------------------------------------
# driver


def _same_point(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return float(np.max(np.abs(a - b))) <= tol * (1.0 + float(np.max(np.abs(a))))


def find_critical_points(p: QuarticProblem, cfg: SolverConfig, include_outside: bool = False,
                         stats: SearchStats | None = None) -> list[DualCriticalPoint]:
    """All dual critical points reachable from the seed set, deduplicated.

    Points where G(sigma) is indefinite (region Outside) are dropped unless
    ``include_outside``. Sorted by dual value, descending.
    """
    stats = stats if stats is not None else SearchStats()
    found: list[DualCriticalPoint] = []
    seeds = seed_candidates(p, cfg)
    for res in newton_batch(p, seeds, cfg):
        stats.seeds_used += 1
        if isinstance(res, str):
            reason = res.split(" at ")[0].split(" (")[0]
            if reason.startswith("start lies on a pole"):
                stats.seeds_skipped += 1
            else:
                stats.newton_failures += 1
            stats.failure_reasons[reason] = stats.failure_reasons.get(reason, 0) + 1
            continue
        pt = res
        if any(_same_point(q.sigma, pt.sigma, cfg.dedup_tol) for q in found):
            stats.dedup_merges += 1
            continue
        found.append(pt)
    stats.outside_found = sum(pt.region is Region.OUTSIDE for pt in found)
    if not include_outside:
        found = [pt for pt in found if pt.region is not Region.OUTSIDE]
    found.sort(key=lambda q: (-q.dual_value, tuple(q.sigma.tolist())))
    return found
