"""Pure numpy kernels; same algorithms and signatures as ``_kernels.pyx``."""

import numpy as np

_GOLD = 0.5 * (3.0 - 5.0 ** 0.5)
_RANK_TOL = 1e-13


def nnls(A, b, max_iter=None):
    """Lawson-Hanson active-set solution of ``min ||Ax - b||`` s.t. ``x >= 0``.

    Ties in the entering-variable choice go to the lowest index.
    Returns ``(x, rnorm)``.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    m, n = A.shape
    if b.shape != (m,):
        raise ValueError("incompatible dimensions")
    if max_iter is None:
        max_iter = 3 * n
    tol = 10.0 * max(m, n) * np.finfo(float).eps * max(1.0, np.abs(A).sum(axis=0).max())
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    blocked = np.zeros(n, dtype=bool)
    it = 0
    while True:
        w = A.T @ (b - A @ x)
        cand = np.where(~passive & ~blocked, w, -np.inf)
        j = int(np.argmax(cand))
        if not cand[j] > tol:
            break
        passive[j] = True
        z = _ls_on(A, b, passive)
        if z is None or z[j] <= 0.0:
            # numerically dependent column; skip it for this round
            passive[j] = False
            blocked[j] = True
            continue
        blocked[:] = False
        while True:
            it += 1
            if it > max_iter:
                raise RuntimeError("nnls: iteration limit reached")
            neg = passive & (z <= 0.0)
            if not neg.any():
                x = z
                break
            ratio = x[neg] / (x[neg] - z[neg])
            alpha = ratio.min()
            x = x + alpha * (z - x)
            passive &= x > tol * 1e-3
            x[~passive] = 0.0
            z = _ls_on(A, b, passive)
            if z is None:
                raise RuntimeError("nnls: passive set became rank deficient")
    r = b - A @ x
    return x, float(np.sqrt(r @ r))


def _ls_on(A, b, passive):
    """Least squares on the passive columns via QR; ``None`` if rank deficient."""
    z = np.zeros(A.shape[1])
    idx = np.flatnonzero(passive)
    if idx.size == 0:
        return z
    if idx.size > A.shape[0]:
        return None
    sub = A[:, idx]
    q, r = np.linalg.qr(sub)
    diag = np.abs(np.diag(r))
    if diag.min() <= _RANK_TOL * np.sqrt((sub * sub).sum(axis=0)).max():
        return None
    z[idx] = np.linalg.solve(r, q.T @ b)
    return z


def _moment_matrix(locs, m_len):
    return np.vander(np.asarray(locs, dtype=np.float64), m_len, increasing=True).T


def _fit(locs, moments):
    V = _moment_matrix(locs, moments.shape[0])
    return nnls(V, moments)


def refine_atoms(locs, moments, half_width, sweeps=8, xtol=1e-13):
    """Move each atom within ``[p - h, p + h]`` by golden-section search.

    The objective is the residual of the best nonnegative weights for the
    current locations.  Sweeps cycle over atoms in order.  Returns
    ``(locs, weights, rnorm)``.
    """
    locs = np.array(locs, dtype=np.float64)
    moments = np.ascontiguousarray(moments, dtype=np.float64)
    weights, best = _fit(locs, moments)
    for _ in range(sweeps):
        start = best
        for r in range(locs.size):
            lo = max(0.0, locs[r] - half_width)
            hi = min(1.0, locs[r] + half_width)

            def f(t):
                trial = locs.copy()
                trial[r] = t
                return _fit(trial, moments)[1]

            a, c = lo, hi
            x1 = a + _GOLD * (c - a)
            x2 = c - _GOLD * (c - a)
            f1, f2 = f(x1), f(x2)
            while c - a > xtol:
                if f1 <= f2:
                    c, x2, f2 = x2, x1, f1
                    x1 = a + _GOLD * (c - a)
                    f1 = f(x1)
                else:
                    a, x1, f1 = x1, x2, f2
                    x2 = c - _GOLD * (c - a)
                    f2 = f(x2)
            t, ft = (x1, f1) if f1 <= f2 else (x2, f2)
            for edge in (lo, hi):
                fe = f(edge)
                if fe < ft:
                    t, ft = edge, fe
            if ft < best:
                locs[r] = t
                best = ft
        if best == 0.0 or best >= start * (1.0 - 1e-12):
            break
    weights, best = _fit(locs, moments)
    return locs, weights, best


def symmetric_eigen(A, max_sweeps=100):
    """Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi."""
    a = np.array(A, dtype=np.float64)
    d = a.shape[0]
    v = np.eye(d)
    norm = max(np.sqrt((a * a).sum()), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= 1e-15 * norm:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v
