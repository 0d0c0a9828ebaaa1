"""Random structured instances shared by the property and acceptance tests."""
import numpy as np


def spd(rng, n, lo=0.2, hi=3.0):
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return (Q * rng.uniform(lo, hi, size=n)) @ Q.T


def sym_with_signs(rng, n, positive: bool, margin=0.05):
    """Symmetric matrix whose eigenvalues are all >= margin, or have at least one <= -margin."""
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    w = rng.uniform(margin, 2.0, size=n)
    if not positive:
        k = int(rng.integers(1, n + 1))
        w[:k] = -rng.uniform(margin, 2.0, size=k)
    return (Q * w) @ Q.T


def order_instance(rng):
    """Positive definite G, U with G - U PSD about half of the time."""
    n = int(rng.integers(1, 6))
    G = spd(rng, n)
    w, V = np.linalg.eigh(G)
    Gh = (V * np.sqrt(w)) @ V.T
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    delta = rng.uniform(0.05, 0.9, size=n)
    if rng.random() < 0.5:
        k = int(rng.integers(1, n + 1))
        delta[:k] = -rng.uniform(0.05, 2.0, size=k)
    D = (Q * delta) @ Q.T
    U = Gh @ (np.eye(n) - D) @ Gh
    return G, 0.5 * (U + U.T)


def schur_instance(rng):
    """Symmetric M with PD trailing block; PSD about half of the time."""
    n = int(rng.integers(2, 6))
    split = int(rng.integers(1, n))
    M22 = spd(rng, n - split)
    M12 = rng.normal(size=(split, n - split))
    S = sym_with_signs(rng, split, positive=rng.random() < 0.5)
    M11 = S + M12 @ np.linalg.solve(M22, M12.T)
    M = np.block([[M11, M12], [M12.T, M22]])
    return 0.5 * (M + M.T), split


def bordered_instance(rng):
    """(P, U, D, r) in the bordered structure; the inequality holds about half of the time."""
    n, m = int(rng.integers(1, 6)), int(rng.integers(1, 6))
    r = int(rng.integers(0, min(n, m) + 1))
    P = -spd(rng, n)
    U = np.zeros((m, m))
    if r:
        U[:r, :r] = spd(rng, r)
    if m > r:
        U[r:, r:] = spd(rng, m - r)
    D = np.zeros((n, m))
    if r:
        while True:
            D11 = rng.normal(size=(r, r))
            if np.linalg.cond(D11) < 1e3:
                break
        D[:r, :r] = D11
    # rescale the coupled block so that P + D U D^T lands on either side
    if r:
        U[:r, :r] *= 10.0 ** rng.uniform(-1.5, 1.5)
    return P, U, D, r
