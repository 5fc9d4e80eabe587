# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Lawson-Hanson NNLS, golden-section atom refinement and
cyclic Jacobi eigen-decomposition.  ``_kernels_py`` holds the numpy twin."""

import numpy as np

from libc.math cimport sqrt, fabs, copysign, INFINITY
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset

cdef double _GOLD = 0.5 * (3.0 - sqrt(5.0))
cdef double _RANK_TOL = 1e-13
cdef double _EPS = 2.220446049250313e-16


cdef int _lstsq(const double* A, int m, int n, const double* b,
                const int* idx, int p, double* z, double* R, double* c, double* v) nogil:
    """Householder least squares on columns ``idx[:p]`` of row-major ``A``.

    Writes the solution into ``z[:p]``; returns 1 if rank deficient.
    """
    cdef int i, j, k
    cdef double norm, alpha, vnorm2, dot, maxcol = 0.0, s
    if p > m:
        return 1
    for k in range(p):
        s = 0.0
        for i in range(m):
            R[i * p + k] = A[i * n + idx[k]]
            s += R[i * p + k] * R[i * p + k]
        if s > maxcol:
            maxcol = s
    maxcol = sqrt(maxcol)
    for i in range(m):
        c[i] = b[i]
    for k in range(p):
        norm = 0.0
        for i in range(k, m):
            norm += R[i * p + k] * R[i * p + k]
        norm = sqrt(norm)
        if norm <= _RANK_TOL * maxcol:
            return 1
        alpha = -copysign(norm, R[k * p + k])
        vnorm2 = 0.0
        for i in range(k, m):
            v[i] = R[i * p + k]
        v[k] -= alpha
        for i in range(k, m):
            vnorm2 += v[i] * v[i]
        if vnorm2 > 0.0:
            for j in range(k + 1, p):
                dot = 0.0
                for i in range(k, m):
                    dot += v[i] * R[i * p + j]
                dot = 2.0 * dot / vnorm2
                for i in range(k, m):
                    R[i * p + j] -= dot * v[i]
            dot = 0.0
            for i in range(k, m):
                dot += v[i] * c[i]
            dot = 2.0 * dot / vnorm2
            for i in range(k, m):
                c[i] -= dot * v[i]
        R[k * p + k] = alpha
        if fabs(alpha) <= _RANK_TOL * maxcol:
            return 1
    for k in range(p - 1, -1, -1):
        s = c[k]
        for j in range(k + 1, p):
            s -= R[k * p + j] * z[j]
        z[k] = s / R[k * p + k]
    return 0


cdef int _ls_full(const double* A, int m, int n, const double* b, const char* passive,
                  int* idx, double* zfull, double* zsub, double* R, double* c, double* v) nogil:
    cdef int j, p = 0
    for j in range(n):
        zfull[j] = 0.0
        if passive[j]:
            idx[p] = j
            p += 1
    if p == 0:
        return 0
    if _lstsq(A, m, n, b, idx, p, zsub, R, c, v):
        return 1
    for j in range(p):
        zfull[idx[j]] = zsub[j]
    return 0


cdef int _nnls_core(const double* A, int m, int n, const double* b, double* x,
                    int max_iter, double* rnorm) nogil:
    """Return 0 on success, 2 on iteration limit, 3 on internal rank failure."""
    cdef int i, j, jmax, it = 0, status = 0
    cdef int cap = m if m > n else n
    cdef double tol, colsum, best, s, alpha, ratio
    cdef char* passive = <char*> malloc(n)
    cdef char* blocked = <char*> malloc(n)
    cdef int* idx = <int*> malloc(n * sizeof(int))
    cdef double* z = <double*> malloc(n * sizeof(double))
    cdef double* w = <double*> malloc(n * sizeof(double))
    cdef double* zsub = <double*> malloc(n * sizeof(double))
    cdef double* resid = <double*> malloc(m * sizeof(double))
    cdef double* R = <double*> malloc(m * (m if m < n else n) * sizeof(double) + sizeof(double))
    cdef double* c = <double*> malloc(m * sizeof(double))
    cdef double* v = <double*> malloc(m * sizeof(double))
    memset(passive, 0, n)
    memset(blocked, 0, n)
    colsum = 1.0
    for j in range(n):
        x[j] = 0.0
        s = 0.0
        for i in range(m):
            s += fabs(A[i * n + j])
        if s > colsum:
            colsum = s
    tol = 10.0 * cap * _EPS * colsum
    while True:
        for i in range(m):
            s = b[i]
            for j in range(n):
                if x[j] != 0.0:
                    s -= A[i * n + j] * x[j]
            resid[i] = s
        jmax = -1
        best = -INFINITY
        for j in range(n):
            if passive[j] or blocked[j]:
                continue
            s = 0.0
            for i in range(m):
                s += A[i * n + j] * resid[i]
            if s > best:
                best = s
                jmax = j
        if jmax < 0 or not best > tol:
            break
        passive[jmax] = 1
        if _ls_full(A, m, n, b, passive, idx, z, zsub, R, c, v) or z[jmax] <= 0.0:
            passive[jmax] = 0
            blocked[jmax] = 1
            continue
        memset(blocked, 0, n)
        while True:
            it += 1
            if it > max_iter:
                status = 2
                break
            alpha = INFINITY
            for j in range(n):
                if passive[j] and z[j] <= 0.0:
                    ratio = x[j] / (x[j] - z[j])
                    if ratio < alpha:
                        alpha = ratio
            if alpha == INFINITY:
                memcpy(x, z, n * sizeof(double))
                break
            for j in range(n):
                x[j] = x[j] + alpha * (z[j] - x[j])
                if passive[j] and not x[j] > tol * 1e-3:
                    passive[j] = 0
                if not passive[j]:
                    x[j] = 0.0
            if _ls_full(A, m, n, b, passive, idx, z, zsub, R, c, v):
                status = 3
                break
        if status:
            break
    s = 0.0
    for i in range(m):
        alpha = b[i]
        for j in range(n):
            alpha -= A[i * n + j] * x[j]
        s += alpha * alpha
    rnorm[0] = sqrt(s)
    free(passive); free(blocked); free(idx); free(z); free(w); free(zsub)
    free(resid); free(R); free(c); free(v)
    return status


def nnls(A, b, max_iter=None):
    """Lawson-Hanson active-set solution of ``min ||Ax - b||`` s.t. ``x >= 0``.

    Ties in the entering-variable choice go to the lowest index.
    Returns ``(x, rnorm)``.
    """
    cdef double[:, ::1] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[::1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef int m = a.shape[0], n = a.shape[1]
    if bb.shape[0] != m:
        raise ValueError("incompatible dimensions")
    out = np.zeros(n)
    cdef double[::1] x = out
    cdef double rnorm = 0.0
    cdef int status
    cdef int iters = 3 * n if max_iter is None else max_iter
    if n == 0:
        return out, float(np.sqrt(np.dot(bb, bb)))
    with nogil:
        status = _nnls_core(&a[0, 0], m, n, &bb[0], &x[0], iters, &rnorm)
    if status == 2:
        raise RuntimeError("nnls: iteration limit reached")
    if status == 3:
        raise RuntimeError("nnls: passive set became rank deficient")
    return out, rnorm


cdef double _fit(const double* locs, int p, const double* mom, int m,
                 double* V, double* wts) nogil:
    cdef int i, r
    cdef double t, rn = 0.0
    for r in range(p):
        t = 1.0
        for i in range(m):
            V[i * p + r] = t
            t *= locs[r]
    if _nnls_core(V, m, p, mom, wts, 3 * p + 3 * m, &rn):
        return INFINITY
    return rn


def refine_atoms(locs, moments, double half_width, int sweeps=8, double xtol=1e-13):
    """Move each atom within ``[p - h, p + h]`` by golden-section search.

    The objective is the residual of the best nonnegative weights for the
    current locations.  Sweeps cycle over atoms in order.  Returns
    ``(locs, weights, rnorm)``.
    """
    out_locs = np.array(locs, dtype=np.float64)
    cdef double[::1] L = out_locs
    cdef double[::1] mom = np.ascontiguousarray(moments, dtype=np.float64)
    cdef int p = L.shape[0], m = mom.shape[0]
    out_w = np.zeros(p)
    cdef double[::1] W = out_w
    if p == 0:
        return out_locs, out_w, float(np.sqrt(np.dot(mom, mom)))
    cdef double* V = <double*> malloc(m * p * sizeof(double))
    cdef double* tmp = <double*> malloc(p * sizeof(double))
    cdef double best, start, lo, hi, a, cc, x1, x2, f1, f2, t, ft, fe, keep
    cdef int sweep, r, e
    with nogil:
        best = _fit(&L[0], p, &mom[0], m, V, tmp)
        for sweep in range(sweeps):
            start = best
            for r in range(p):
                keep = L[r]
                lo = keep - half_width
                if lo < 0.0:
                    lo = 0.0
                hi = keep + half_width
                if hi > 1.0:
                    hi = 1.0
                a = lo
                cc = hi
                x1 = a + _GOLD * (cc - a)
                x2 = cc - _GOLD * (cc - a)
                L[r] = x1
                f1 = _fit(&L[0], p, &mom[0], m, V, tmp)
                L[r] = x2
                f2 = _fit(&L[0], p, &mom[0], m, V, tmp)
                while cc - a > xtol:
                    if f1 <= f2:
                        cc = x2
                        x2 = x1
                        f2 = f1
                        x1 = a + _GOLD * (cc - a)
                        L[r] = x1
                        f1 = _fit(&L[0], p, &mom[0], m, V, tmp)
                    else:
                        a = x1
                        x1 = x2
                        f1 = f2
                        x2 = cc - _GOLD * (cc - a)
                        L[r] = x2
                        f2 = _fit(&L[0], p, &mom[0], m, V, tmp)
                if f1 <= f2:
                    t = x1
                    ft = f1
                else:
                    t = x2
                    ft = f2
                for e in range(2):
                    L[r] = lo if e == 0 else hi
                    fe = _fit(&L[0], p, &mom[0], m, V, tmp)
                    if fe < ft:
                        t = L[r]
                        ft = fe
                if ft < best:
                    L[r] = t
                    best = ft
                else:
                    L[r] = keep
            if best == 0.0 or best >= start * (1.0 - 1e-12):
                break
        best = _fit(&L[0], p, &mom[0], m, V, &W[0])
    free(V)
    free(tmp)
    return out_locs, out_w, best


def symmetric_eigen(A, int max_sweeps=100):
    """Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi."""
    out_a = np.array(A, dtype=np.float64, order="C")
    cdef double[:, ::1] a = out_a
    cdef int d = a.shape[0]
    out_v = np.eye(d)
    cdef double[:, ::1] v = out_v
    cdef int sweep, p, q, k
    cdef double norm = 0.0, off, apq, theta, t, c, s, x, y
    for p in range(d):
        for q in range(d):
            norm += a[p, q] * a[p, q]
    norm = sqrt(norm)
    if norm < 1e-300:
        norm = 1e-300
    with nogil:
        for sweep in range(max_sweeps):
            off = 0.0
            for p in range(d):
                for q in range(d):
                    if p != q:
                        off += a[p, q] * a[p, q]
            if sqrt(off) <= 1e-15 * norm:
                break
            for p in range(d - 1):
                for q in range(p + 1, d):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if theta != 0.0:
                        t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                    else:
                        t = 1.0
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for k in range(d):
                        x = a[k, p]
                        y = a[k, q]
                        a[k, p] = c * x - s * y
                        a[k, q] = s * x + c * y
                    for k in range(d):
                        x = a[p, k]
                        y = a[q, k]
                        a[p, k] = c * x - s * y
                        a[q, k] = s * x + c * y
                    for k in range(d):
                        x = v[k, p]
                        y = v[k, q]
                        v[k, p] = c * x - s * y
                        v[k, q] = s * x + c * y
    return np.diag(out_a).copy(), out_v
