"""Atomic solutions of the truncated Hausdorff moment problem on [0, 1].

Given moments ``m_0..m_n`` (``m_0 = 1`` for a probability measure) find
atoms ``(p_r, w_r)`` with ``sum_r w_r p_r^i = m_i``.  The representing
measure is usually not unique; the one returned is whatever the grid
search below settles on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from numbers import Rational
from typing import Sequence

import numpy as np

from . import kernels
from .errors import InfeasibleMoments

START_GRID = 256
MAX_GRID = 8192
PRUNE_WEIGHT = 1e-12
DEFAULT_TOL = 1e-9
_MERGE_GAPS = (0.05, 0.02, 0.005)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many ``(location, weight)`` pairs on [0, 1]."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((p, w) for p, w in self.atoms)
        for p, w in atoms:
            if not 0 <= p <= 1:
                raise ValueError(f"atom location {p} outside [0, 1]")
            if w < 0:
                raise ValueError(f"negative atom weight {w}")
        object.__setattr__(self, "atoms", atoms)

    @property
    def locations(self) -> tuple:
        return tuple(p for p, _ in self.atoms)

    @property
    def weights(self) -> tuple:
        return tuple(w for _, w in self.atoms)

    @property
    def mass(self):
        return sum(self.weights)

    def to_json(self) -> dict:
        return {"atoms": [{"p": _num(p), "w": _num(w)} for p, w in self.atoms]}

    @classmethod
    def from_json(cls, doc) -> AtomicMeasure:
        return cls(tuple((_parse_num(a["p"]), _parse_num(a["w"])) for a in doc["atoms"]))


def _num(v):
    return str(v) if isinstance(v, Fraction) else float(v)


def _parse_num(v):
    return Fraction(v) if isinstance(v, str) else float(v)


def moments_of(mu: AtomicMeasure, n: int) -> tuple:
    """``m_i = sum_r w_r p_r^i`` for ``i = 0..n`` (exact for rational atoms)."""
    return tuple(sum(w * p**i for p, w in mu.atoms) for i in range(n + 1))


def law_of(mu: AtomicMeasure, n: int):
    """Induced x-vector ``x_i = sum_r w_r p_r^(n-i) (1-p_r)^i``."""
    from .binary import BinaryLawX

    return BinaryLawX(tuple(sum(w * p ** (n - i) * (1 - p) ** i for p, w in mu.atoms) for i in range(n + 1)))


def _bernstein_rows(grid: np.ndarray, n: int) -> np.ndarray:
    return np.array([comb(n, i) * grid ** (n - i) * (1.0 - grid) ** i for i in range(n + 1)])


def _moments_to_bernstein(m: np.ndarray) -> np.ndarray:
    n = m.size - 1
    y = m[::-1]
    return np.array(
        [comb(n, i) * sum(comb(i, j) * (-1) ** (i + j) * y[j] for j in range(i + 1)) for i in range(n + 1)]
    )


def _residual(locs, wts, m) -> float:
    if len(locs) == 0:
        return float(np.max(np.abs(m)))
    V = np.vander(np.asarray(locs, dtype=float), m.size, increasing=True).T
    return float(np.max(np.abs(V @ np.asarray(wts, dtype=float) - m)))


def _merge(locs, wts, gap):
    """Single-linkage merge of atoms closer than ``gap``; weighted mean location."""
    order = np.argsort(locs)
    out_l, out_w = [], []
    cl, cw = [], []
    for idx in order:
        if cl and locs[idx] - cl[-1] > gap:
            out_w.append(sum(cw))
            out_l.append(float(np.dot(cl, cw) / sum(cw)))
            cl, cw = [], []
        cl.append(locs[idx])
        cw.append(wts[idx])
    if cl:
        out_w.append(sum(cw))
        out_l.append(float(np.dot(cl, cw) / sum(cw)))
    return np.array(out_l), np.array(out_w)


def _polish(locs, wts, m, iters=80):
    """Damped Gauss-Newton on locations and weights, minimum-norm steps."""
    p = np.array(locs, dtype=float)
    w = np.array(wts, dtype=float)
    k = m.size
    powers = np.arange(k)

    def resid(p, w):
        return np.vander(p, k, increasing=True).T @ w - m

    r = resid(p, w)
    cost = float(r @ r)
    lam = 1e-12
    for _ in range(iters):
        if cost == 0.0:
            break
        V = np.vander(p, k, increasing=True).T
        dV = np.zeros_like(V)
        dV[1:] = powers[1:, None] * np.vander(p, k - 1, increasing=True).T
        J = np.hstack([dV * w[None, :], V])
        JtJ = J.T @ J
        g = J.T @ r
        improved = False
        for _ in range(12):
            try:
                step = -np.linalg.lstsq(JtJ + lam * np.diag(np.diag(JtJ) + 1e-300), g, rcond=None)[0]
            except np.linalg.LinAlgError:
                break
            p_new = np.clip(p + step[: p.size], 0.0, 1.0)
            w_new = np.maximum(w + step[p.size:], 0.0)
            r_new = resid(p_new, w_new)
            c_new = float(r_new @ r_new)
            if c_new < cost:
                p, w, r, cost = p_new, w_new, r_new, c_new
                lam = max(lam / 10.0, 1e-15)
                improved = True
                break
            lam *= 10.0
        if not improved:
            break
    keep = w > 0
    return p[keep], w[keep]


def _as_float_moments(m: Sequence) -> np.ndarray:
    arr = np.array([float(v) for v in m], dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("moment vector must be a nonempty sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("moment vector has non-finite entries")
    return arr


def _exact_hankel(m: Sequence):
    """Exact Hankel pair of the moments; raises if it is not PSD."""
    from .binary import MomentVectorY, hankel_from_y
    from .semidefinite import is_psd_exact

    y = MomentVectorY(tuple(reversed([Fraction(v) for v in m])))
    pair = hankel_from_y(y)
    if not (is_psd_exact(pair.H) and is_psd_exact(pair.K)):
        raise InfeasibleMoments("moment vector fails the Hankel PSD conditions")
    return pair


def _boundary_candidates(pair) -> np.ndarray | None:
    """Support candidates when a Hankel matrix is singular.

    Each Hankel matrix is the Gram matrix of ``sum_a c_a t^a`` under
    ``mu`` weighted by one of ``1, t, 1-t, t(1-t)``.  A kernel vector ``c``
    therefore gives a polynomial vanishing on the support away from the
    endpoints, and the representing measure is unique.
    """
    from .semidefinite import null_vector

    for M in (pair.H, pair.K):
        if not M:
            continue
        c = null_vector(M)
        if c is None:
            continue
        coeffs = np.array([float(v) for v in reversed(c)])
        roots = np.roots(np.trim_zeros(coeffs, "f")) if np.any(coeffs[:-1]) else np.array([])
        real = roots[np.abs(roots.imag) <= 1e-7].real
        inside = np.clip(real[(real > -1e-9) & (real < 1 + 1e-9)], 0.0, 1.0)
        inner = [t for t in np.unique(inside) if 1e-9 < t < 1 - 1e-9]
        return np.array(sorted(set([0.0, 1.0] + inner)))
    return None


def recover_measure(m: Sequence, tol: float = DEFAULT_TOL) -> AtomicMeasure:
    """Atomic measure whose moments match ``m`` within ``tol`` (max abs).

    Grid nonnegative least squares (grid of G+1 points, G = 256 doubling to
    8192) gives a starting support; nearby atoms are merged, locations are
    refined by per-atom golden-section search, and a Gauss-Newton polish
    drives the residual to rounding level.  Rational input is first checked
    exactly for feasibility; when a Hankel matrix is singular the support is
    read off its kernel polynomial instead.

    Raises :class:`InfeasibleMoments` if no grid reaches ``tol``.
    """
    mom = _as_float_moments(m)
    n = mom.size - 1
    if all(isinstance(v, Rational) for v in m):
        cands = _boundary_candidates(_exact_hankel(m))
        if cands is not None:
            w, _ = kernels.nnls(np.vander(cands, n + 1, increasing=True).T, mom)
            l2, w2 = _polish(cands[w > 0], w[w > 0], mom)
            if _residual(l2, w2, mom) <= tol:
                return _finish(l2, w2)
    target = _moments_to_bernstein(mom)
    best = None
    G = START_GRID
    while G <= MAX_GRID:
        grid = np.linspace(0.0, 1.0, G + 1)
        x, _ = kernels.nnls(_bernstein_rows(grid, n), target)
        sel = x > PRUNE_WEIGHT
        locs, wts = grid[sel], x[sel]
        starts = [_merge(locs, wts, gap) for gap in _MERGE_GAPS if gap > 2.0 / G]
        starts.append((locs, wts))
        for l0, w0 in starts:
            l1, w1, _ = kernels.refine_atoms(l0, mom, 2.0 / G)
            if _residual(l1, w1, mom) > _residual(l0, w0, mom):
                l1, w1 = l0, w0
            l2, w2 = _polish(l1, w1, mom)
            res = _residual(l2, w2, mom)
            if best is None or res < best[0]:
                best = (res, l2, w2)
            if res <= tol:
                return _finish(l2, w2)
        G *= 2
    raise InfeasibleMoments(
        f"moment residual {best[0]:.3g} exceeds tol {tol:g} at the finest grid", residual=best[0]
    )


def _finish(locs, wts) -> AtomicMeasure:
    order = np.argsort(locs)
    atoms = [(float(locs[i]), float(wts[i])) for i in order if wts[i] > PRUNE_WEIGHT]
    return AtomicMeasure(tuple(atoms))
