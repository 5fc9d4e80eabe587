"""Exchangeable {0,1}-valued laws through the vector x_0..x_n.

``x[i]`` is the probability of one particular sequence with ``i`` zeros
followed by ``n - i`` ones; the whole law is determined by it.  ``y[i]``
is the ``(n - i)``-th moment of a (possibly signed) mixing measure on the
success probability, so ``y = x_to_y(x)`` and ``y[n] = 1`` for a law.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from ._rational import fmt, to_fraction
from .laws import ExchangeableLaw, PartitionSpec, StateSpace
from .semidefinite import PsdVerdict, is_psd_exact, principal_minors


@dataclass(frozen=True)
class BinaryLawX:
    """The vector ``(x_0, ..., x_n)``.

    The container does not validate; use :meth:`parse` for checked input.
    Entries may be rationals or floats (for laws induced by float measures).
    """

    x: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        if not self.x:
            raise ValueError("x needs at least one entry")

    @property
    def n(self) -> int:
        return len(self.x) - 1

    @property
    def total(self):
        return sum(comb(self.n, i) * v for i, v in enumerate(self.x))

    @property
    def negative_indices(self) -> tuple:
        return tuple(i for i, v in enumerate(self.x) if v < 0)

    @property
    def is_valid(self) -> bool:
        return not self.negative_indices and self.total == 1

    @classmethod
    def parse(cls, values: Sequence, n: int | None = None, normalize: bool = False) -> BinaryLawX:
        """Checked construction from ints / ``"p/q"`` strings.

        Unnormalized input is rejected (the message states the exact
        deficit) unless ``normalize`` is set.
        """
        x = tuple(to_fraction(v) for v in values)
        if n is not None and len(x) != n + 1:
            raise ValueError(f"expected {n + 1} entries for n={n}, got {len(x)}")
        if not x or len(x) < 2:
            raise ValueError("need n >= 1")
        law = cls(x)
        if law.negative_indices:
            raise ValueError(f"negative entries at indices {law.negative_indices}")
        total = law.total
        if total != 1:
            if not normalize:
                raise ValueError(
                    f"x is not normalized: sum binom(n,i) x_i = {fmt(total)} "
                    f"(deficit {fmt(1 - total)})"
                )
            if total == 0:
                raise ValueError("cannot normalize an all-zero vector")
            law = cls(tuple(v / total for v in x))
        return law


@dataclass(frozen=True)
class MomentVectorY:
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "y", tuple(self.y))

    @property
    def n(self) -> int:
        return len(self.y) - 1

    def moments(self) -> tuple:
        """``m_i = y_{n-i}``, the i-th moment of the mixing measure."""
        return tuple(reversed(self.y))


def x_to_y(law: BinaryLawX) -> MomentVectorY:
    x = law.x
    return MomentVectorY(tuple(sum(comb(i, j) * x[j] for j in range(i + 1)) for i in range(len(x))))


def y_to_x(y: MomentVectorY) -> BinaryLawX:
    v = y.y
    return BinaryLawX(
        tuple(sum(comb(i, j) * (-1) ** (i + j) * v[j] for j in range(i + 1)) for i in range(len(v)))
    )


def binomial_identity(n: int, j: int) -> tuple:
    """Both sides of ``sum_{i=j}^{n-1} C(n,i) C(i,j) (-1)^i = C(n,j) (-1)^(n-1)``."""
    if not 0 <= j <= n - 1:
        raise ValueError(f"need 0 <= j <= n-1, got n={n}, j={j}")
    lhs = sum(comb(n, i) * comb(i, j) * (-1) ** i for i in range(j, n))
    rhs = comb(n, j) * (-1) ** (n - 1)
    return lhs, rhs


@dataclass(frozen=True)
class HankelPair:
    H: tuple
    K: tuple
    n: int


def _hankel_dims(n: int) -> tuple:
    if n % 2 == 0:
        return (n + 2) // 2, n // 2
    return (n + 1) // 2, (n + 1) // 2


def hankel_from_x(law: BinaryLawX) -> HankelPair:
    """H and K straight from the binomial sums of x."""
    x, n = law.x, law.n
    dh, dk = _hankel_dims(n)
    shift_h = 2 if n % 2 == 0 else 1
    shift_k = 0 if n % 2 == 0 else 1

    def h(i, j):
        r = n + shift_h - i - j
        return sum(comb(r, k) * x[k] for k in range(r + 1))

    def kk(i, j):
        r = n + shift_k - i - j
        return sum(comb(r, k) * x[k + 1] for k in range(r + 1))

    H = tuple(tuple(h(i, j) for j in range(1, dh + 1)) for i in range(1, dh + 1))
    K = tuple(tuple(kk(i, j) for j in range(1, dk + 1)) for i in range(1, dk + 1))
    return HankelPair(H, K, n)


def hankel_from_y(y: MomentVectorY) -> HankelPair:
    """H and K as moment Hankel matrices and their first differences."""
    v, n = y.y, y.n
    dh, dk = _hankel_dims(n)
    if n % 2 == 0:
        H = tuple(tuple(v[n + 2 - i - j] for j in range(1, dh + 1)) for i in range(1, dh + 1))
        K = tuple(
            tuple(v[n + 1 - i - j] - v[n - i - j] for j in range(1, dk + 1)) for i in range(1, dk + 1)
        )
    else:
        H = tuple(tuple(v[n + 1 - i - j] for j in range(1, dh + 1)) for i in range(1, dh + 1))
        K = tuple(
            tuple(v[n + 2 - i - j] - v[n + 1 - i - j] for j in range(1, dk + 1))
            for i in range(1, dk + 1)
        )
    return HankelPair(H, K, n)


def hankel_pair(law: BinaryLawX) -> HankelPair:
    pair = hankel_from_x(law)
    other = hankel_from_y(x_to_y(law))
    if pair != other:  # pragma: no cover - the two constructions are identities
        raise AssertionError("Hankel constructions disagree")
    return pair


def preferred_witness(M) -> tuple | None:
    """Smallest failing leading principal minor, else smallest failing one.

    Returns ``(rows, det)`` or ``None`` when every principal minor is >= 0.
    """
    for rows, value in principal_minors(M, leading_only=True):
        if value < 0:
            return rows, value
    for rows, value in principal_minors(M):
        if value < 0:
            return rows, value
    return None


@dataclass(frozen=True)
class MixtureVerdict:
    verdict: bool
    hankel: HankelPair
    H_check: PsdVerdict
    K_check: PsdVerdict
    witness_matrix: str | None = None
    witness_minor: tuple | None = None
    witness_det: Fraction | None = None
    measure: object = None

    def __bool__(self):
        return self.verdict


def true_mixture_verdict(law: BinaryLawX, recover: bool = True, tol: float = 1e-9) -> MixtureVerdict:
    """Is the law a nonnegative mixture of i.i.d. Bernoulli laws?

    Exact: both Hankel matrices must be PSD.  A NO carries the preferred
    failing minor; a YES optionally carries a recovered mixing measure
    whose induced x differs from ``law.x`` by at most ``tol`` (the moment
    tolerance is ``tol / 2^n`` since x_i mixes moments with binomial
    coefficients summing to ``2^i``).
    """
    pair = hankel_pair(law)
    hc, kc = is_psd_exact(pair.H), is_psd_exact(pair.K)
    if hc and kc:
        measure = None
        if recover:
            from .hausdorff import recover_measure

            measure = recover_measure(x_to_y(law).moments(), tol=tol / 2**law.n)
        return MixtureVerdict(True, pair, hc, kc, measure=measure)
    name, M = ("H", pair.H) if not hc else ("K", pair.K)
    rows, value = preferred_witness(M)
    return MixtureVerdict(False, pair, hc, kc, name, rows, value)


def leading_minors_positive(law: BinaryLawX) -> bool:
    """Sufficient fast path: x > 0 and every leading minor of H, K is > 0.

    ``False`` does not mean NO; use :func:`true_mixture_verdict`.
    """
    if any(v <= 0 for v in law.x):
        return False
    pair = hankel_pair(law)
    return all(
        value > 0 for M in (pair.H, pair.K) for _, value in principal_minors(M, leading_only=True)
    )


def reinforcement_check(law: BinaryLawX) -> list:
    """``[(i, x_i^2 <= x_{i-1} x_{i+1}) for i in 1..n-1]``."""
    x = law.x
    return [(i, x[i] * x[i] <= x[i - 1] * x[i + 1]) for i in range(1, law.n)]


def n4_inequalities(law: BinaryLawX) -> tuple:
    """The eight polynomials in x whose joint nonnegativity decides n = 4."""
    if law.n != 4:
        raise ValueError(f"needs n = 4, got n = {law.n}")
    x0, x1, x2, x3, x4 = law.x
    return (
        x0 * x2 - x1**2,
        x1 * x3 - x2**2,
        2 * x0 * x2 - 2 * x1**2 - x2 * x1 + x0 * x3,
        x0 * x3 - x1**2 - x1 * x2 + x3 * x1 - x2**2 + x0 * x2,
        x0 * x4 * x2 - x4 * x1**2 + 2 * x1 * x2 * x3 - x2**3 - x0 * x3**2,
        4 * x0 * x3 - 4 * x1**2 - 4 * x1 * x2 - x2**2 + 4 * x0 * x2 + x0 * x4,
        2 * x0 * x2 + 3 * x0 * x3 - 3 * x1 * x2 + x0 * x4 + 2 * x1 * x3 + x1 * x4
        - x2 * x3 - 2 * x1**2 - 3 * x2**2,
        x0 * x2 + 2 * x0 * x3 - 2 * x1 * x2 + x0 * x4 + 2 * x1 * x3 + 2 * x1 * x4
        - 2 * x2 * x3 + x2 * x4 - x1**2 - 3 * x2**2 - x3**2,
    )


def counterexample(n: int) -> BinaryLawX:
    """``(9, 5, 3, ..., 3) / (3 * 2^n + 2n + 6)``: log-convex x but not a mixture."""
    if n < 4:
        raise ValueError("the reinforcement inequalities are sufficient for n <= 3; need n >= 4")
    den = 3 * 2**n + 2 * n + 6
    return BinaryLawX(tuple(Fraction(v, den) for v in (9, 5) + (3,) * (n - 1)))


# -- bridges to general laws ------------------------------------------------

BINARY_SPACE = StateSpace(("0", "1"))


def to_exchangeable_law(law: BinaryLawX) -> ExchangeableLaw:
    """Lift to a table on {0,1}^n with a single class."""
    n = law.n
    orbits = {((i, n - i),): comb(n, i) * v for i, v in enumerate(law.x)}
    return ExchangeableLaw.from_orbits(BINARY_SPACE, PartitionSpec.whole(n), orbits)


def from_exchangeable_law(law: ExchangeableLaw) -> BinaryLawX:
    """Read x off a single-class law on a two-state space (first label = 0)."""
    if law.partition.k != 1 or law.space.size != 2:
        raise ValueError("needs a single-class law on a two-state space")
    n = law.n
    zero, one = law.space.labels
    return BinaryLawX(tuple(law.prob((zero,) * i + (one,) * (n - i)) for i in range(n + 1)))


def binary_law_from_json(doc, normalize: bool = False) -> BinaryLawX:
    """Parse ``{"n": 4, "x": ["9/62", ...]}`` (``n`` optional)."""
    if not isinstance(doc, dict) or "x" not in doc:
        raise ValueError("binary law document needs 'x'")
    if not isinstance(doc["x"], list):
        raise ValueError("'x' must be a list")
    return BinaryLawX.parse(doc["x"], n=doc.get("n"), normalize=normalize)


def binary_law_to_json(law: BinaryLawX) -> dict:
    return {"n": law.n, "x": [fmt(v) for v in law.x]}
