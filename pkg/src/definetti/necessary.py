"""Necessary conditions for a law to be a true mixture of class-i.i.d. laws.

For each class ``j`` pick a half-order ``m_j``, a set ``A_j`` of states and
a tail event ``B_j`` on the remaining ``n_j - 2 m_j`` coordinates.  The
``(m_j+1) x (m_j+1)`` event matrix has entry ``(r, c)`` equal to
``A_j^{2m_j-r-c+2} x S^{r+c-2} x B_j``.  Per-class matrices are combined by
the box product (a Kronecker product whose entries are concatenated
events), then mapped through the law.  For a nonnegative mixture the
resulting probability matrix is PSD, so a failure certifies that no
nonnegative directing measure exists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import GuardExceeded
from .laws import EventBlock, ExchangeableLaw, ProductEvent, event_probability
from .semidefinite import PsdVerdict, check_symmetric, is_psd_exact

MAX_SPECS = 10**5


@dataclass(frozen=True)
class ClassSpec:
    """Half-order ``m``, head set ``A`` and tail ``B`` (``None`` = full space)."""

    m: int
    A: frozenset
    B: frozenset | None = None

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        object.__setattr__(self, "A", frozenset(str(s) for s in self.A))
        if self.B is not None:
            object.__setattr__(self, "B", frozenset(tuple(str(s) for s in t) for t in self.B))

    def tail_arity(self, nj: int) -> int:
        q = nj - 2 * self.m
        if q < 0:
            raise ValueError(f"2m = {2 * self.m} exceeds class size {nj}")
        return q

    def describe(self) -> dict:
        return {
            "m": self.m,
            "A": sorted(self.A),
            "B": "full" if self.B is None else [list(t) for t in sorted(self.B)],
        }


@dataclass(frozen=True)
class BoxTestSpec:
    classes: tuple

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))

    def check(self, law: ExchangeableLaw):
        partition = law.partition
        if len(self.classes) != partition.k:
            raise ValueError(f"spec has {len(self.classes)} classes, partition has {partition.k}")
        for cs, nj in zip(self.classes, partition.class_sizes):
            q = cs.tail_arity(nj)
            unknown = [s for s in cs.A if s not in law.space]
            if unknown:
                raise ValueError(f"unknown states in A: {unknown}")
            if cs.B is not None:
                for t in cs.B:
                    if len(t) != q:
                        raise ValueError(f"tail point {t} should have arity {q}")
                    if any(s not in law.space for s in t):
                        raise ValueError(f"tail point {t} uses unknown states")

    def describe(self) -> list:
        return [cs.describe() for cs in self.classes]


@dataclass(frozen=True)
class EventMatrix:
    """Square matrix of :class:`ProductEvent` entries."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(tuple(r) for r in self.entries)
        if any(len(r) != len(entries) for r in entries):
            raise ValueError("event matrix must be square")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return len(self.entries)


def class_event_matrix(nj: int, cs: ClassSpec) -> EventMatrix:
    """Single-class matrix with entry ``A^{2m-r-c+2} x S^{r+c-2} x B``."""
    q = cs.tail_arity(nj)
    d = cs.m + 1
    rows = []
    for r in range(1, d + 1):
        row = []
        for c in range(1, d + 1):
            block = EventBlock(cs.A, 2 * cs.m - r - c + 2, r + c - 2, q, cs.B)
            row.append(ProductEvent((block,)))
        rows.append(row)
    return EventMatrix(rows)


def box_product(mats: Sequence[EventMatrix]) -> EventMatrix:
    """Kronecker arrangement with per-class events concatenated, row-major."""
    mats = list(mats)
    if not mats:
        raise ValueError("box product needs at least one matrix")
    if len(mats) == 1:
        return mats[0]
    dims = [M.dim for M in mats]
    index = list(itertools.product(*(range(d) for d in dims)))
    rows = []
    for ri in index:
        row = []
        for ci in index:
            blocks = []
            for M, r, c in zip(mats, ri, ci):
                blocks.extend(M.entries[r][c].blocks)
            row.append(ProductEvent(tuple(blocks)))
        rows.append(row)
    return EventMatrix(rows)


def event_matrix(law: ExchangeableLaw, spec: BoxTestSpec) -> EventMatrix:
    spec.check(law)
    mats = [class_event_matrix(nj, cs) for cs, nj in zip(spec.classes, law.partition.class_sizes)]
    return box_product(mats)


def necessary_matrix(law: ExchangeableLaw, spec: BoxTestSpec) -> tuple:
    """Exact symmetric matrix of event probabilities."""
    E = event_matrix(law, spec)
    M = tuple(tuple(event_probability(law, ev) for ev in row) for row in E.entries)
    check_symmetric(M)
    return M


def necessary_condition_check(law: ExchangeableLaw, spec: BoxTestSpec) -> PsdVerdict:
    return is_psd_exact(necessary_matrix(law, spec))


def _class_options(labels: tuple, nj: int, max_tail_points: int) -> list:
    subsets = [frozenset(c) for r in range(len(labels) + 1) for c in itertools.combinations(labels, r)]
    options = []
    for m in range(nj // 2 + 1):
        q = nj - 2 * m
        tails = [None]
        if q > 0:
            points = list(itertools.product(labels, repeat=q))
            for size in range(1, min(max_tail_points, len(points) - 1) + 1):
                tails.extend(frozenset(c) for c in itertools.combinations(points, size))
        for A in subsets:
            for B in tails:
                options.append(ClassSpec(m, A, B))
    return options


def enumerate_specs(law: ExchangeableLaw, max_tail_points: int = 1, limit: int = MAX_SPECS) -> list:
    """All specs with ``A_j`` any subset and ``B_j`` full or a union of few points.

    Unions covering every tail point are skipped since they equal the
    full tail.  Order is deterministic.
    """
    if max_tail_points < 0:
        raise ValueError("max_tail_points must be nonnegative")
    per_class = [_class_options(law.space.labels, nj, max_tail_points) for nj in law.partition.class_sizes]
    total = 1
    for opts in per_class:
        total *= len(opts)
    if total > limit:
        raise GuardExceeded(f"{total} specs exceed the limit {limit}")
    return [BoxTestSpec(c) for c in itertools.product(*per_class)]


@dataclass(frozen=True)
class ScanResult:
    entries: tuple

    @property
    def any_failure(self) -> bool:
        return any(not v.is_psd for _, v in self.entries)

    @property
    def failures(self) -> tuple:
        return tuple((s, v) for s, v in self.entries if not v.is_psd)


def scan_specs(law: ExchangeableLaw, max_tail_points: int = 1, limit: int = MAX_SPECS) -> ScanResult:
    specs = enumerate_specs(law, max_tail_points, limit)
    return ScanResult(tuple((s, necessary_condition_check(law, s)) for s in specs))


@dataclass(frozen=True)
class ReinforcementResult:
    lhs: Fraction | None
    rhs: Fraction | None
    undefined: bool

    @property
    def holds(self) -> bool | None:
        if self.undefined:
            return None
        return self.lhs >= self.rhs


def conditional_reinforcement(law: ExchangeableLaw, A, B=None) -> ReinforcementResult:
    """``P(X_1 in A | X_2 in A, rest in B)`` against ``P(X_2 in A | rest in B)``."""
    if law.partition.k != 1:
        raise ValueError("conditional reinforcement needs a single class")
    n = law.n
    if n < 2:
        raise ValueError("need n >= 2")

    def prob(a, b):
        return event_probability(law, ProductEvent((EventBlock(A, a, b, n - 2, B),)))

    both = prob(2, 0)
    one = prob(1, 1)
    tail = prob(0, 2)
    if one == 0 or tail == 0:
        return ReinforcementResult(None if one == 0 else both / one, None if tail == 0 else one / tail, True)
    return ReinforcementResult(both / one, one / tail, False)


def parse_class_spec(m: int, A: str, B: str) -> ClassSpec:
    """CLI syntax: ``A`` is comma-separated states (empty for none); ``B`` is
    ``full`` or ``;``-separated comma-separated tail points."""
    a = frozenset(s.strip() for s in A.split(",") if s.strip())
    if B.strip().lower() == "full":
        tail = None
    else:
        tail = frozenset(tuple(v.strip() for v in p.split(",")) if p.strip() else () for p in B.split(";"))
    return ClassSpec(int(m), a, tail)
