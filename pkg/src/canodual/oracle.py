"""Brute-force checks that do not share machinery with the dual pipeline.

Descent, grid scans and Hessian estimates here only touch the primal
objective through the value/gradient kernels. Only the final comparison in
``cross_validate`` looks at dual quantities, to explain a mismatch.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .canonical import dual_eval, gmat, lambda_map, primal_eval
from .errors import DimensionError, DimensionTooLarge
from .linalg import DefClass, classify_eigenvalues, threshold
from .problem import QuarticProblem, SolverConfig, normalize_beta

DESCENT_TOL = 1e-8
DESCENT_MAX_ITER = 20000
MATCH_TOL = 1e-5
GRID_SLACK = 1e-6
FD_HESS_TOL = 1e-6
GRID_RESOLUTION = {1: 4000, 2: 200, 3: 60}


@dataclass(frozen=True)
class GridResult:
    point: np.ndarray
    value: float
    grid_point: np.ndarray
    grid_value: float
    evaluations: int


@dataclass(frozen=True)
class Minimizer:
    x: np.ndarray
    value: float
    grad_norm: float
    hess_eigs: np.ndarray
    hits: int


# ---------------------------------------------------------------------------
# finite differences


def _fd_grad(fun, z: np.ndarray, h: float) -> np.ndarray:
    g = np.empty(z.size)
    for i in range(z.size):
        e = np.zeros(z.size)
        e[i] = h
        g[i] = (fun(z + e) - fun(z - e)) / (2 * h)
    return g


def _fd_jac(fun, z: np.ndarray, h: float) -> np.ndarray:
    cols = []
    for i in range(z.size):
        e = np.zeros(z.size)
        e[i] = h
        cols.append((fun(z + e) - fun(z - e)) / (2 * h))
    J = np.array(cols).T
    return 0.5 * (J + J.T)


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / (1.0 + np.max(np.abs(b))))


def fd_errors(p: QuarticProblem, point, side: str = "primal", h: float = 1e-5) -> tuple[float, float]:
    """(gradient error, Hessian error), relative to 1 + max |analytic|.

    The gradient is differenced from values, the Hessian from the analytic
    gradient.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    z = np.atleast_1d(np.asarray(point, dtype=float))
    side = side.lower()
    if side == "primal":
        ev = primal_eval(p, z)
        value = lambda y: primal_eval(p, y).value  # noqa: E731
        grad = lambda y: primal_eval(p, y).grad  # noqa: E731
    elif side == "dual":
        ev = dual_eval(p, z)
        value = lambda y: dual_eval(p, y).value  # noqa: E731
        grad = lambda y: dual_eval(p, y).grad  # noqa: E731
    else:
        raise ValueError(f"side must be 'primal' or 'dual', got {side!r}")
    return _rel(_fd_grad(value, z, h), ev.grad), _rel(_fd_jac(grad, z, h), ev.hess)


def fd_check(p: QuarticProblem, point, side: str = "primal", h: float = 1e-5) -> float:
    """Largest of the gradient and Hessian finite-difference errors."""
    return max(fd_errors(p, point, side, h))


def fd_hessian(p: QuarticProblem, x, h: float | None = None) -> np.ndarray:
    """Central-difference Hessian of the primal from the gradient kernel."""
    x = np.asarray(x, dtype=float)
    h = 1e-5 * (1.0 + float(np.max(np.abs(x)))) if h is None else h
    args = kernels.problem_args(p)
    return _fd_jac(lambda y: kernels.primal_value_grad(*args, y)[1], x, h)


def inertia_class(H: np.ndarray, tol: float = FD_HESS_TOL) -> DefClass:
    return classify_eigenvalues(np.linalg.eigvalsh(H), threshold(H, tol))


# ---------------------------------------------------------------------------
# grid scan


def grid_scan(p: QuarticProblem, box, resolution: int, refine_steps: int = 50) -> GridResult:
    """Minimum of Pi over a tensor grid, then a short descent from the best node.

    ``box`` is a list of (lo, hi) per axis; degenerate intervals give a single
    node on that axis.
    """
    if p.n > 3:
        raise DimensionTooLarge(f"grid scans are limited to n <= 3, got n = {p.n}")
    box = np.asarray(box, dtype=float).reshape(-1, 2)
    if box.shape[0] != p.n:
        raise DimensionError(f"box needs {p.n} intervals, got {box.shape[0]}")
    resolution = int(resolution)
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    axes = [np.array([lo]) if lo == hi or resolution == 1 else np.linspace(lo, hi, resolution)
            for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([m.ravel() for m in mesh], axis=1)
    args = kernels.problem_args(p)
    vals = kernels.primal_values(*args, X)
    i = int(np.argmin(vals))
    x0, v0 = X[i].copy(), float(vals[i])
    x, v = x0, v0
    if refine_steps > 0:
        x1, v1, _, _ = kernels.descend(*args, x0, DESCENT_TOL, int(refine_steps))
        if v1 <= v0:
            x, v = x1, v1
    return GridResult(x, float(v), x0, v0, int(X.shape[0]))


def default_box(p: QuarticProblem, points=()) -> np.ndarray:
    """Symmetric box padded around the given points (at least [-2, 2] per axis)."""
    r = 1.0
    for x in points:
        r = max(r, float(np.max(np.abs(x))))
    return np.tile([-(1.5 * r + 0.5), 1.5 * r + 0.5], (p.n, 1))


# ---------------------------------------------------------------------------
# multistart descent


def _primal_box(p: QuarticProblem) -> float:
    # beyond this radius the quartic terms dominate the quadratic ones
    lam = [np.max(np.abs(np.linalg.eigvalsh(Bk))) for Bk in p.B]
    scale = max(np.sqrt(2.0 * (abs(dk) + 1.0) / max(lk, 1e-12)) for dk, lk in zip(p.d, lam))
    return float(min(2.0 * scale + 1.0, 1e3))


def multistart_descent(p: QuarticProblem, cfg: SolverConfig, starts: int | None = None,
                       tol: float = DESCENT_TOL) -> list[Minimizer]:
    """Local minimizers reached by gradient descent from seeded random starts.

    Endpoints whose finite-difference Hessian is not PSD (saddles where the
    descent happened to stop) are dropped; the rest are deduplicated and
    sorted by value.
    """
    p = normalize_beta(p)
    rng = np.random.default_rng(cfg.rng_seed)
    count = int(starts if starts is not None else cfg.multistart_count)
    R = _primal_box(p)
    X0 = np.vstack([np.zeros(p.n), rng.uniform(-R, R, size=(count - 1, p.n))]) if count > 1 \
        else np.zeros((1, p.n))
    args = kernels.problem_args(p)
    found: list[Minimizer] = []
    for x0 in X0:
        x, v, gn, _ = kernels.descend(*args, x0, tol, DESCENT_MAX_ITER)
        if not gn <= tol * (1.0 + abs(v)):
            continue
        for j, q in enumerate(found):
            if np.max(np.abs(q.x - x)) <= MATCH_TOL * (1.0 + np.max(np.abs(x))):
                found[j] = Minimizer(q.x, q.value, q.grad_norm, q.hess_eigs, q.hits + 1)
                break
        else:
            H = fd_hessian(p, x)
            w = np.linalg.eigvalsh(H)
            if np.all(w >= -threshold(H, FD_HESS_TOL)):
                found.append(Minimizer(x, float(v), float(gn), w, 1))
    found.sort(key=lambda q: (q.value, tuple(q.x.tolist())))
    return found


# ---------------------------------------------------------------------------
# cross validation

_EXPECTED = {
    "GlobalMin": {DefClass.POS_DEF, DefClass.POS_SEMIDEF},
    "LocalMin": {DefClass.POS_DEF},
    "LocalMax": {DefClass.NEG_DEF, DefClass.NEG_SEMIDEF},
    "WeakDoubleMinPrimalRestricted": {DefClass.INDEFINITE},
    "WeakDoubleMinDualRestricted": {DefClass.POS_DEF},
    "SaddlePrimal": {DefClass.INDEFINITE},
    "SaddleDual": {DefClass.INDEFINITE},
}


def _singular_representation(p: QuarticProblem, x: np.ndarray, tol: float) -> bool:
    """x is critical with sigma = Lambda(x) - d on a singular G that pinv cannot reach."""
    G = gmat(p, lambda_map(p, x) - p.d)
    w = np.linalg.eigvalsh(G)
    singular = np.min(np.abs(w)) <= max(tol, 1e-6) * (1.0 + np.max(np.abs(w)))
    return bool(singular and np.max(np.abs(G @ x - p.f)) <= 1e-6 * (1.0 + np.max(np.abs(p.f))))


def cross_validate(report, p: QuarticProblem, cfg: SolverConfig | None = None,
                   grid_resolution: int | None = None, box=None) -> dict:
    """Compare a report with oracle evidence; always returns a summary dict.

    (a) every oracle local minimizer matches a recovered x within 1e-5;
    (b) every GlobalMin value is no worse than the grid best + 1e-6 (n <= 3);
    (c) every verdict kind agrees with the finite-difference Hessian inertia.
    Minimizers that sit on a singular G (so G^+ f cannot produce them) are
    listed under ``unrepresented`` rather than counted as mismatches.
    """
    p = normalize_beta(p)
    cfg = cfg if cfg is not None else SolverConfig.for_problem(p)
    records = list(report.pairs) + list(report.excluded)
    mismatches, unrepresented = [], []

    minimizers = multistart_descent(p, cfg)
    for q in minimizers:
        dist = min((float(np.max(np.abs(np.asarray(r.x) - q.x))) for r in records), default=np.inf)
        if dist <= MATCH_TOL:
            continue
        if _singular_representation(p, q.x, cfg.definiteness_tol):
            unrepresented.append({"x": [float(a) for a in q.x], "value": q.value})
            continue
        mismatches.append({
            "check": "a", "magnitude": dist,
            "detail": f"oracle minimizer {_fmt(q.x)} (Pi = {q.value:.10g}) has no recovered pair; "
                      f"nearest at distance {dist:.3g}",
        })

    grid_best = grid_point = None
    if p.n <= 3:
        pts = [r.x for r in records] + [q.x for q in minimizers]
        box = default_box(p, pts) if box is None else box
        res = grid_resolution if grid_resolution is not None else GRID_RESOLUTION[p.n]
        g = grid_scan(p, box, res)
        grid_best, grid_point = g.value, [float(a) for a in g.point]
        for r in report.pairs:
            if r.kind == "GlobalMin" and r.primal_value > g.value + GRID_SLACK:
                mismatches.append({
                    "check": "b", "magnitude": r.primal_value - g.value,
                    "detail": f"grid value {g.value:.10g} at {_fmt(g.point)} beats GlobalMin "
                              f"{r.primal_value:.10g}",
                })

    inertia_checked = 0
    for r in report.pairs:
        expected = _EXPECTED.get(r.kind)
        if expected is None:
            continue
        cls = inertia_class(fd_hessian(p, r.x))
        inertia_checked += 1
        if cls not in expected:
            mismatches.append({
                "check": "c", "magnitude": 1.0,
                "detail": f"{r.kind} at {_fmt(r.x)} but oracle Hessian is {cls.value}",
            })

    return {
        "oracle_minimizers": len(minimizers),
        "minimizers": [{"x": [float(a) for a in q.x], "value": q.value} for q in minimizers],
        "unrepresented": unrepresented,
        "grid_best": grid_best,
        "grid_point": grid_point,
        "inertia_checked": inertia_checked,
        "mismatches": mismatches,
        "passed": not mismatches,
    }


def _fmt(v) -> str:
    return "(" + ", ".join(f"{a:.8g}" for a in v) + ")"
