"""Exact laws on a finite product space S^n with a coordinate partition.

A law is a table of exact rationals over S^n.  Coordinates are 1-based and
grouped into classes; the law is class-exchangeable when its value is
unchanged by any permutation of coordinates inside a class.  Points are
tuples of state labels.  Missing table entries are zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from ._rational import fmt, to_fraction
from .errors import GuardExceeded

MAX_TABLE_POINTS = 10**7

Point = tuple
# Per-class state counts, each inner tuple indexed like StateSpace.labels.
Composition = tuple


@dataclass(frozen=True)
class StateSpace:
    labels: tuple

    def __post_init__(self):
        labels = tuple(str(v) for v in self.labels)
        if not labels:
            raise ValueError("state space needs at least one state")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate state labels: {labels}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(labels)})

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"unknown state {label!r}") from None

    def __contains__(self, label):
        return label in self._index


@dataclass(frozen=True)
class PartitionSpec:
    """Disjoint classes of 1-based coordinates covering ``{1, ..., n}``."""

    classes: tuple

    def __post_init__(self):
        classes = tuple(tuple(sorted(int(i) for i in c)) for c in self.classes)
        if not classes or any(len(c) == 0 for c in classes):
            raise ValueError("partition classes must be nonempty")
        flat = [i for c in classes for i in c]
        n = len(flat)
        if sorted(flat) != list(range(1, n + 1)):
            raise ValueError(f"classes {classes} do not partition 1..{n}")
        object.__setattr__(self, "classes", classes)

    @classmethod
    def whole(cls, n: int) -> PartitionSpec:
        return cls((tuple(range(1, n + 1)),))

    @classmethod
    def singletons(cls, n: int) -> PartitionSpec:
        return cls(tuple((i,) for i in range(1, n + 1)))

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.classes)

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def class_sizes(self) -> tuple:
        return tuple(len(c) for c in self.classes)

    def split(self, point: Point) -> tuple:
        """Per-class sub-tuples of ``point``, each in coordinate order."""
        return tuple(tuple(point[i - 1] for i in c) for c in self.classes)

    def join(self, parts: Sequence[Sequence]) -> Point:
        out = [None] * self.n
        for c, part in zip(self.classes, parts):
            for i, v in zip(c, part):
                out[i - 1] = v
        return tuple(out)


def _check_table_size(space: StateSpace, n: int):
    if space.size**n > MAX_TABLE_POINTS:
        raise GuardExceeded(
            f"table has {space.size}^{n} points, above the {MAX_TABLE_POINTS} guard"
        )


def compositions_of(total: int, parts: int) -> Iterator[tuple]:
    """Weak compositions of ``total`` into ``parts``, first part largest first."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions_of(total - first, parts - 1):
            yield (first,) + rest


def multinomial(counts: Sequence[int]) -> int:
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def orbit_statistic(point: Point, partition: PartitionSpec, space: StateSpace) -> Composition:
    """Per-class state counts of ``point``."""
    if len(point) != partition.n:
        raise ValueError(f"point has arity {len(point)}, expected {partition.n}")
    out = []
    for c in partition.classes:
        counts = [0] * space.size
        for i in c:
            counts[space.index(point[i - 1])] += 1
        out.append(tuple(counts))
    return tuple(out)


def orbit_size(composition: Composition) -> int:
    """Number of points sharing this per-class composition."""
    return math.prod(multinomial(c) for c in composition)


def _multiset_permutations(items: list) -> Iterator[tuple]:
    items = sorted(items)
    n = len(items)
    used = [False] * n
    cur = []

    def rec():
        if len(cur) == n:
            yield tuple(cur)
            return
        prev = object()
        for i in range(n):
            if used[i] or items[i] == prev:
                continue
            prev = items[i]
            used[i] = True
            cur.append(items[i])
            yield from rec()
            cur.pop()
            used[i] = False

    yield from rec()


def orbit_points(composition: Composition, partition: PartitionSpec, space: StateSpace):
    """All points whose orbit statistic equals ``composition``."""
    per_class = []
    for counts in composition:
        multiset = [lab for lab, c in zip(space.labels, counts) for _ in range(c)]
        per_class.append(list(_multiset_permutations(multiset)))
    for parts in itertools.product(*per_class):
        yield partition.join(parts)


@dataclass(frozen=True, eq=False)
class ExchangeableLaw:
    """Exact probability table over S^n; absent points have probability 0."""

    space: StateSpace
    partition: PartitionSpec
    table: Mapping
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = self.partition.n
        _check_table_size(self.space, n)
        clean = {}
        for point, value in self.table.items():
            point = tuple(str(v) for v in point)
            if len(point) != n:
                raise ValueError(f"point {point} has arity {len(point)}, expected {n}")
            for lab in point:
                self.space.index(lab)
            value = to_fraction(value)
            if value != 0:
                clean[point] = value
        object.__setattr__(self, "table", clean)

    @property
    def n(self) -> int:
        return self.partition.n

    def prob(self, point: Point) -> Fraction:
        return self.table.get(tuple(point), Fraction(0))

    def points(self) -> Iterator[Point]:
        return itertools.product(self.space.labels, repeat=self.n)

    @classmethod
    def from_orbits(cls, space, partition, orbits: Mapping) -> ExchangeableLaw:
        """Expand orbit probabilities uniformly over each orbit."""
        _check_table_size(space, partition.n)
        table = {}
        for comp, p in orbits.items():
            comp = tuple(tuple(int(v) for v in c) for c in comp)
            if len(comp) != partition.k or any(
                len(c) != space.size or sum(c) != nj or min(c) < 0
                for c, nj in zip(comp, partition.class_sizes)
            ):
                raise ValueError(f"composition {comp} does not fit the partition")
            p = to_fraction(p)
            if p == 0:
                continue
            share = p / orbit_size(comp)
            for point in orbit_points(comp, partition, space):
                table[point] = share
        return cls(space, partition, table)

    def orbit_probabilities(self) -> dict:
        """Total probability of each orbit with nonzero mass."""
        if "orbits" not in self._cache:
            out = {}
            for point, value in self.table.items():
                comp = orbit_statistic(point, self.partition, self.space)
                out[comp] = out.get(comp, Fraction(0)) + value
            self._cache["orbits"] = out
        return self._cache["orbits"]

    def __eq__(self, other):
        if not isinstance(other, ExchangeableLaw):
            return NotImplemented
        return (
            self.space == other.space
            and self.partition == other.partition
            and self.table == other.table
        )

    __hash__ = None


@dataclass(frozen=True)
class OrbitViolation:
    class_index: int  # 1-based
    coordinates: tuple  # the transposed pair, 1-based
    point: Point
    swapped: Point
    value: Fraction
    swapped_value: Fraction


@dataclass(frozen=True)
class ValidationReport:
    total: Fraction
    negative: tuple
    orbit_violations: tuple

    @property
    def normalized(self) -> bool:
        return self.total == 1

    @property
    def valid(self) -> bool:
        return self.normalized and not self.negative and not self.orbit_violations


def validate(law: ExchangeableLaw) -> ValidationReport:
    """Report negativity, normalization and within-class symmetry violations.

    Symmetry is checked with adjacent transpositions inside each class, which
    generate the product of symmetric groups.
    """
    negative = tuple(sorted((p, v) for p, v in law.table.items() if v < 0))
    total = sum(law.table.values(), Fraction(0))
    seen = set()
    violations = []
    for point in sorted(law.table):
        for j, cls in enumerate(law.partition.classes, start=1):
            for a, b in zip(cls, cls[1:]):
                if point[a - 1] == point[b - 1]:
                    continue
                swapped = list(point)
                swapped[a - 1], swapped[b - 1] = swapped[b - 1], swapped[a - 1]
                swapped = tuple(swapped)
                v, w = law.prob(point), law.prob(swapped)
                key = (a, b, frozenset((point, swapped)))
                if v != w and key not in seen:
                    seen.add(key)
                    violations.append(OrbitViolation(j, (a, b), point, swapped, v, w))
    return ValidationReport(total, negative, tuple(violations))


@dataclass(frozen=True)
class EventBlock:
    """Event on one class: ``a`` coordinates in ``head``, ``b`` free, ``q`` in ``tail``.

    ``tail=None`` stands for the full space S^q.  Coordinates are taken in
    class order: head block first, then the free block, then the tail.
    """

    head: frozenset
    a: int
    b: int
    q: int
    tail: frozenset | None = None

    def __post_init__(self):
        object.__setattr__(self, "head", frozenset(str(s) for s in self.head))
        if min(self.a, self.b, self.q) < 0:
            raise ValueError("event exponents must be nonnegative")
        if self.tail is not None:
            tail = frozenset(tuple(str(s) for s in t) for t in self.tail)
            if any(len(t) != self.q for t in tail):
                raise ValueError(f"tail points must have arity {self.q}")
            object.__setattr__(self, "tail", tail)

    @property
    def arity(self) -> int:
        return self.a + self.b + self.q

    def contains(self, sub: tuple) -> bool:
        a, b = self.a, self.b
        if any(s not in self.head for s in sub[:a]):
            return False
        return self.tail is None or sub[a + b:] in self.tail


@dataclass(frozen=True)
class ProductEvent:
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))

    def check(self, partition: PartitionSpec):
        if len(self.blocks) != partition.k:
            raise ValueError(f"event has {len(self.blocks)} blocks for {partition.k} classes")
        for blk, nj in zip(self.blocks, partition.class_sizes):
            if blk.arity != nj:
                raise ValueError(f"event block arity {blk.arity} does not match class size {nj}")

    def contains(self, point: Point, partition: PartitionSpec) -> bool:
        return all(b.contains(sub) for b, sub in zip(self.blocks, partition.split(point)))


@lru_cache(maxsize=4096)
def _block_members(labels: tuple, block: EventBlock) -> frozenset:
    return frozenset(
        sub for sub in itertools.product(labels, repeat=block.arity) if block.contains(sub)
    )


def event_probability(law: ExchangeableLaw, event: ProductEvent) -> Fraction:
    """Exact probability of a product event."""
    event.check(law.partition)
    cache = law._cache.setdefault("events", {})
    if event in cache:
        return cache[event]
    if "split" not in law._cache:
        law._cache["split"] = [(law.partition.split(p), v) for p, v in law.table.items()]
    members = [_block_members(law.space.labels, b) for b in event.blocks]
    total = Fraction(0)
    for parts, value in law._cache["split"]:
        if all(sub in m for sub, m in zip(parts, members)):
            total += value
    cache[event] = total
    return total


# -- JSON -------------------------------------------------------------------

def composition_key(comp: Composition) -> str:
    return "|".join(",".join(str(c) for c in counts) for counts in comp)


def parse_composition_key(key: str) -> Composition:
    return tuple(tuple(int(v) for v in part.split(",")) for part in key.split("|"))


def point_key(point: Point) -> str:
    return ",".join(point)


def law_from_json(doc: Mapping) -> ExchangeableLaw:
    """Build a law from ``{"states", "partition", "orbits" | "table"}``."""
    if not isinstance(doc, Mapping):
        raise ValueError("law document must be a JSON object")
    if "states" not in doc:
        raise ValueError("law document needs 'states'")
    space = StateSpace(tuple(doc["states"]))
    if ("orbits" in doc) == ("table" in doc):
        raise ValueError("law document needs exactly one of 'orbits' or 'table'")
    partition = doc.get("partition")
    if "orbits" in doc:
        orbits = {parse_composition_key(k): v for k, v in doc["orbits"].items()}
        if partition is None:
            if not orbits:
                raise ValueError("cannot infer n from empty orbits; give 'partition'")
            comp = next(iter(orbits))
            if len(comp) != 1:
                raise ValueError("multi-class orbits need an explicit 'partition'")
            partition = PartitionSpec.whole(sum(comp[0]))
        else:
            partition = PartitionSpec(tuple(tuple(c) for c in partition))
        return ExchangeableLaw.from_orbits(space, partition, orbits)
    table = {tuple(k.split(",")) if k else (): v for k, v in doc["table"].items()}
    if partition is None:
        if not table:
            raise ValueError("cannot infer n from an empty table; give 'partition'")
        partition = PartitionSpec.whole(len(next(iter(table))))
    else:
        partition = PartitionSpec(tuple(tuple(c) for c in partition))
    return ExchangeableLaw(space, partition, table)


def law_to_json(law: ExchangeableLaw, orbits: bool = True) -> dict:
    doc = {
        "states": list(law.space.labels),
        "partition": [list(c) for c in law.partition.classes],
    }
    if orbits:
        probs = law.orbit_probabilities()
        doc["orbits"] = {composition_key(c): fmt(probs[c]) for c in sorted(probs, reverse=True)}
    else:
        doc["table"] = {point_key(p): fmt(v) for p, v in sorted(law.table.items())}
    return doc
