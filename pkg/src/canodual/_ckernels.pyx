# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled primal kernels; same signatures as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

cdef double ARMIJO_C = 1e-4
cdef double MAX_STEP = 1e6


cdef double _value_grad(const double[:, ::1] A, const double[:, :, ::1] B,
                        const double[::1] beta, const double[::1] d,
                        const double[::1] f, const double[::1] x,
                        double[:, ::1] Bx, double[::1] grad, bint want_grad) noexcept nogil:
    cdef Py_ssize_t m = B.shape[0], n = A.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double s, r, w, value = 0.0, ax
    for k in range(m):
        r = 0.0
        for i in range(n):
            s = 0.0
            for j in range(n):
                s = s + B[k, i, j] * x[j]
            Bx[k, i] = s
            r = r + x[i] * s
        r = 0.5 * r - d[k]
        w = beta[k] * r
        value = value + 0.5 * w * r
        if want_grad:
            # stash beta_k r_k in the spare slot of grad computation below
            Bx[k, n] = w
    for i in range(n):
        ax = 0.0
        for j in range(n):
            ax = ax + A[i, j] * x[j]
        value = value + 0.5 * x[i] * ax - x[i] * f[i]
        if want_grad:
            s = ax - f[i]
            for k in range(m):
                s = s + Bx[k, n] * Bx[k, i]
            grad[i] = s
    return value


def primal_values(A, B, beta, d, f, X):
    cdef const double[:, ::1] A_ = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, :, ::1] B_ = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[::1] beta_ = np.ascontiguousarray(beta, dtype=np.float64)
    cdef const double[::1] d_ = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[::1] f_ = np.ascontiguousarray(f, dtype=np.float64)
    cdef const double[:, ::1] X_ = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t N = X_.shape[0], n = A_.shape[0], m = B_.shape[0], p
    out = np.empty(N, dtype=np.float64)
    cdef double[::1] out_ = out
    cdef double[:, ::1] Bx = np.empty((m, n + 1), dtype=np.float64)
    cdef double[::1] grad = np.empty(n, dtype=np.float64)
    with nogil:
        for p in range(N):
            out_[p] = _value_grad(A_, B_, beta_, d_, f_, X_[p], Bx, grad, False)
    return out


def primal_value_grad(A, B, beta, d, f, x):
    cdef const double[:, ::1] A_ = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, :, ::1] B_ = np.ascontiguousarray(B, dtype=np.float64)
    cdef Py_ssize_t n = A_.shape[0], m = B_.shape[0]
    cdef double[:, ::1] Bx = np.empty((m, n + 1), dtype=np.float64)
    grad = np.empty(n, dtype=np.float64)
    cdef double value = _value_grad(A_, B_, np.ascontiguousarray(beta, dtype=np.float64),
                                    np.ascontiguousarray(d, dtype=np.float64),
                                    np.ascontiguousarray(f, dtype=np.float64),
                                    np.ascontiguousarray(x, dtype=np.float64), Bx, grad, True)
    return value, grad


def descend(A, B, beta, d, f, x0, double tol, long max_iter):
    cdef const double[:, ::1] A_ = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, :, ::1] B_ = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[::1] beta_ = np.ascontiguousarray(beta, dtype=np.float64)
    cdef const double[::1] d_ = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[::1] f_ = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t n = A_.shape[0], m = B_.shape[0], i, bt
    x = np.array(x0, dtype=np.float64)
    cdef double[::1] x_ = x
    cdef double[::1] xn = np.empty(n, dtype=np.float64)
    cdef double[::1] g = np.empty(n, dtype=np.float64)
    cdef double[::1] gn = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] Bx = np.empty((m, n + 1), dtype=np.float64)
    cdef double val, vn, g2, gn2, gnorm, t = 1.0, slack
    cdef long it = 0
    cdef bint accepted
    with nogil:
        val = _value_grad(A_, B_, beta_, d_, f_, x_, Bx, g, True)
        gnorm = 0.0
        for i in range(n):
            if fabs(g[i]) > gnorm:
                gnorm = fabs(g[i])
        while it < max_iter and gnorm > tol:
            g2 = 0.0
            for i in range(n):
                g2 = g2 + g[i] * g[i]
            slack = 1e-15 * (1.0 + fabs(val))
            accepted = False
            for bt in range(80):
                for i in range(n):
                    xn[i] = x_[i] - t * g[i]
                vn = _value_grad(A_, B_, beta_, d_, f_, xn, Bx, gn, True)
                if vn <= val - ARMIJO_C * t * g2:
                    accepted = True
                elif vn <= val + slack:
                    gn2 = 0.0
                    for i in range(n):
                        gn2 = gn2 + gn[i] * gn[i]
                    accepted = gn2 < g2
                if accepted:
                    break
                t = 0.5 * t
            if not accepted:
                break
            gnorm = 0.0
            for i in range(n):
                x_[i] = xn[i]
                g[i] = gn[i]
                if fabs(g[i]) > gnorm:
                    gnorm = fabs(g[i])
            val = vn
            if bt == 0:
                t = 2.0 * t
                if t > MAX_STEP:
                    t = MAX_STEP
            it += 1
    return x, val, gnorm, it
