"""Pure NumPy primal kernels; the reference for the compiled ones."""
import numpy as np

ARMIJO_C = 1e-4
MAX_STEP = 1e6


def primal_values(A, B, beta, d, f, X):
    """Pi at every row of X (shape (N, n))."""
    X = np.ascontiguousarray(X, dtype=float)
    BX = np.einsum("kij,pj->pki", B, X)
    lam = 0.5 * np.einsum("pki,pi->pk", BX, X)
    r = lam - d
    quad = 0.5 * np.einsum("pi,ij,pj->p", X, A, X)
    return 0.5 * (r * r) @ beta + quad - X @ f


def primal_value_grad(A, B, beta, d, f, x):
    Bx = B @ x
    r = 0.5 * Bx @ x - d
    w = beta * r
    Ax = A @ x
    value = 0.5 * np.dot(w, r) + 0.5 * np.dot(x, Ax) - np.dot(x, f)
    return float(value), w @ Bx + Ax - f


def descend(A, B, beta, d, f, x0, tol, max_iter):
    """Gradient descent with Armijo backtracking until ||grad||_inf <= tol.

    Returns (x, value, grad_inf_norm, iterations).
    """
    x = np.array(x0, dtype=float)
    val, g = primal_value_grad(A, B, beta, d, f, x)
    gnorm = float(np.max(np.abs(g))) if g.size else 0.0
    t = 1.0
    it = 0
    while it < max_iter and gnorm > tol:
        g2 = float(g @ g)
        slack = 1e-15 * (1.0 + abs(val))
        accepted = False
        for bt in range(80):
            xn = x - t * g
            vn, gn = primal_value_grad(A, B, beta, d, f, xn)
            if vn <= val - ARMIJO_C * t * g2:
                accepted = True
            elif vn <= val + slack and gn @ gn < g2:
                # decrease is below rounding level; require a smaller gradient instead
                accepted = True
            if accepted:
                break
            t *= 0.5
        if not accepted:
            break
        x, val, g = xn, vn, gn
        gnorm = float(np.max(np.abs(g)))
        if bt == 0:
            t = min(2.0 * t, MAX_STEP)
        it += 1
    return x, float(val), gnorm, it
