"""Positive semidefiniteness tests and fraction-free exact linear algebra.

Matrices are plain nested sequences.  Exact routines take ints or
:class:`~fractions.Fraction` entries; row/column indices in certificates are
1-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels

DEFAULT_FLOAT_TOL = 1e-10


def _as_fraction_rows(M) -> list:
    rows = [[Fraction(v) for v in row] for row in M]
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise ValueError("matrix must be square")
    return rows


def check_symmetric(M) -> list:
    rows = _as_fraction_rows(M)
    d = len(rows)
    for i in range(d):
        for j in range(i + 1, d):
            if rows[i][j] != rows[j][i]:
                raise ValueError(f"matrix is not symmetric at ({i + 1}, {j + 1})")
    return rows


def _common_denominator(rows) -> int:
    den = 1
    for row in rows:
        for v in row:
            den = math.lcm(den, v.denominator)
    return den


def bareiss_det(A: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    a = [list(map(int, row)) for row in A]
    d = len(a)
    if d == 0:
        return 1
    sign, prev = 1, 1
    for k in range(d - 1):
        if a[k][k] == 0:
            for r in range(k + 1, d):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, d):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, d):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[d - 1][d - 1]


def det(M) -> Fraction:
    """Exact determinant of a rational matrix."""
    rows = _as_fraction_rows(M)
    if not rows:
        return Fraction(1)
    den = _common_denominator(rows)
    ints = [[int(v * den) for v in row] for row in rows]
    return Fraction(bareiss_det(ints), den ** len(rows))


def bareiss_solve(A, B) -> list:
    """Solve ``A X = B`` exactly for square nonsingular rational ``A``.

    ``B`` holds the right-hand sides as a ``d x r`` matrix.  Runs a
    fraction-free Gauss-Jordan elimination on integers (denominators cleared
    row by row); every division is exact.
    """
    rows_a = _as_fraction_rows(A)
    d = len(rows_a)
    rows_b = [[Fraction(v) for v in row] for row in B]
    if len(rows_b) != d:
        raise ValueError("right-hand side has the wrong number of rows")
    r = len(rows_b[0]) if rows_b else 0
    aug = []
    for ra, rb in zip(rows_a, rows_b):
        den = _common_denominator([ra + rb])
        aug.append([int(v * den) for v in ra + rb])
    width = d + r
    prev = 1
    for k in range(d):
        if aug[k][k] == 0:
            for s in range(k + 1, d):
                if aug[s][k] != 0:
                    aug[k], aug[s] = aug[s], aug[k]
                    break
            else:
                raise ZeroDivisionError("matrix is singular")
        row_k = aug[k]
        akk = row_k[k]
        for i in range(d):
            if i == k:
                continue
            row_i = aug[i]
            aik = row_i[k]
            for j in range(width):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return [[Fraction(aug[i][d + c], aug[i][i]) for c in range(r)] for i in range(d)]


def null_vector(M) -> list | None:
    """A nonzero exact vector ``v`` with ``M v = 0``, or ``None`` if nonsingular.

    Reduced row echelon form over the rationals; the first free column is
    set to 1.
    """
    rows = _as_fraction_rows(M)
    d = len(rows)
    pivot_cols = []
    r = 0
    for c in range(d):
        pivot = next((i for i in range(r, d) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(d):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
    free = [c for c in range(d) if c not in pivot_cols]
    if not free:
        return None
    f = free[0]
    v = [Fraction(0)] * d
    v[f] = Fraction(1)
    for i, c in enumerate(pivot_cols):
        v[c] = -rows[i][f]
    return v


def principal_minor_det(M, rows: Sequence[int]) -> Fraction:
    """Exact determinant of the principal submatrix on 1-based ``rows``."""
    full = _as_fraction_rows(M)
    d = len(full)
    idx = sorted(set(int(i) for i in rows))
    if len(idx) != len(rows) or any(not 1 <= i <= d for i in idx):
        raise IndexError(f"rows {tuple(rows)} out of range 1..{d}")
    return det([[full[i - 1][j - 1] for j in idx] for i in idx])


def principal_minors(M, leading_only: bool = False):
    """Yield ``(rows, det)`` by size, then lexicographically."""
    d = len(M)
    for size in range(1, d + 1):
        combos = [tuple(range(1, size + 1))] if leading_only else itertools.combinations(range(1, d + 1), size)
        for rows in combos:
            yield rows, principal_minor_det(M, rows)


def kron(A, B) -> list:
    """Kronecker product of two nested-sequence matrices, row-major order."""
    return [
        [a * b for a in ra for b in rb]
        for ra in A
        for rb in B
    ]


@dataclass(frozen=True)
class PsdVerdict:
    """Outcome of a PSD test.

    On failure either ``minor`` (1-based principal index set) with its
    negative ``minor_det`` or a ``vector`` with negative quadratic form is
    given.  On success ``pivots`` lists the elimination pivots.
    """

    is_psd: bool
    pivots: tuple = ()
    minor: tuple | None = None
    minor_det: Fraction | None = None
    vector: tuple | None = None
    quadratic_form: float | Fraction | None = None

    def __bool__(self):
        return self.is_psd


def is_psd_exact(M) -> PsdVerdict:
    """Exact PSD decision by symmetric Gaussian elimination.

    Each step eliminates on the first positive remaining diagonal entry.  A
    negative remaining diagonal entry, or a zero one with a nonzero entry in
    its row, ends the test; the certificate is the principal minor made of
    the pivot rows used so far plus the offending row(s).  Its determinant is
    the product of pivots times the Schur-complement entry (or 2x2 block),
    hence negative.
    """
    a = check_symmetric(M)
    d = len(a)
    remaining = list(range(d))
    pivots = []
    used = []
    while remaining:
        for i in remaining:
            if a[i][i] < 0:
                rows = tuple(sorted(used + [i]))
                return _fail(M, rows, tuple(pivots))
        for i in remaining:
            if a[i][i] == 0:
                for j in remaining:
                    if j != i and a[i][j] != 0:
                        rows = tuple(sorted(used + [i, j]))
                        return _fail(M, rows, tuple(pivots))
        positive = [i for i in remaining if a[i][i] > 0]
        if not positive:
            break
        p = positive[0]
        piv = a[p][p]
        remaining.remove(p)
        for i in remaining:
            f = a[i][p] / piv
            if f:
                row_i, row_p = a[i], a[p]
                for j in remaining:
                    row_i[j] -= f * row_p[j]
        pivots.append(piv)
        used.append(p)
    return PsdVerdict(True, pivots=tuple(pivots))


def _fail(M, rows0: tuple, pivots: tuple) -> PsdVerdict:
    rows = tuple(r + 1 for r in rows0)
    value = principal_minor_det(M, rows)
    if value >= 0:  # pragma: no cover - guarded by the Schur complement identity
        raise AssertionError(f"certificate minor {rows} has determinant {value}")
    return PsdVerdict(False, pivots=pivots, minor=rows, minor_det=value)


def is_psd_by_minors(M) -> PsdVerdict:
    """Brute-force check: every principal minor is nonnegative."""
    check_symmetric(M)
    for rows, value in principal_minors(M):
        if value < 0:
            return PsdVerdict(False, minor=rows, minor_det=value)
    return PsdVerdict(True)


def is_psd_float(M, tol: float = DEFAULT_FLOAT_TOL) -> PsdVerdict:
    """Approximate PSD test from the smallest eigenvalue (Jacobi sweeps).

    PSD iff ``lambda_min >= -tol * max(1, |lambda|_max)``.  On failure the
    eigenvector of ``lambda_min`` is returned as certificate.
    """
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if A.size == 0:
        return PsdVerdict(True)
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    A = 0.5 * (A + A.T)
    vals, vecs = kernels.symmetric_eigen(A)
    norm = max(1.0, float(np.max(np.abs(vals))))
    k = int(np.argmin(vals))
    if vals[k] >= -tol * norm:
        return PsdVerdict(True, pivots=tuple(float(v) for v in np.sort(vals)))
    v = vecs[:, k]
    return PsdVerdict(False, vector=tuple(float(t) for t in v), quadratic_form=float(v @ A @ v))
