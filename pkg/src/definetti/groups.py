"""Orbit partitions and product-of-symmetric-groups classification.

Permutations are image tuples on ``{1, ..., n}``: ``perm[i - 1]`` is the
image of ``i``.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .laws import PartitionSpec

DEFAULT_CAP = 10**6

_CYCLE = re.compile(r"\(([^()]*)\)")


def check_permutation(image: Sequence[int]) -> tuple:
    image = tuple(int(v) for v in image)
    if sorted(image) != list(range(1, len(image) + 1)):
        raise ValueError(f"not a permutation of 1..{len(image)}: {image}")
    return image


def parse_cycles(text: str, n: int) -> tuple:
    """Parse cycle notation such as ``"(1 2)(3 4)"`` into image form.

    Entries inside a cycle may be separated by spaces or commas.  ``"()"``
    and the empty string give the identity.
    """
    stripped = _CYCLE.sub("", text).strip()
    if stripped:
        raise ValueError(f"invalid cycle syntax: {text!r}")
    image = list(range(1, n + 1))
    touched = set()
    for body in _CYCLE.findall(text):
        items = [int(v) for v in re.split(r"[\s,]+", body.strip()) if v]
        if any(not 1 <= v <= n for v in items):
            raise ValueError(f"cycle entry out of range 1..{n}: {text!r}")
        if len(set(items)) != len(items) or touched & set(items):
            raise ValueError(f"cycles must be disjoint with distinct entries: {text!r}")
        touched.update(items)
        for a, b in zip(items, items[1:] + items[:1]):
            image[a - 1] = b
    return tuple(image)


def compose(p: tuple, q: tuple) -> tuple:
    """``p`` after ``q``."""
    return tuple(p[q[i] - 1] for i in range(len(q)))


def _arity(gens, n):
    if n is None:
        if not gens:
            raise ValueError("n is required when there are no generators")
        n = len(gens[0])
    for g in gens:
        if len(g) != n:
            raise ValueError(f"generator {g} does not act on 1..{n}")
    return n


@dataclass(frozen=True)
class GroupClosure:
    elements: frozenset | None
    overflow: bool

    @property
    def order(self) -> int | None:
        return None if self.elements is None else len(self.elements)


def generate_group(gens: Sequence[Sequence[int]], n: int | None = None, cap: int = DEFAULT_CAP) -> GroupClosure:
    """Breadth-first closure of ``gens`` under composition.

    Stops with ``overflow=True`` as soon as more than ``cap`` elements exist.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    gens = [check_permutation(g) for g in gens]
    n = _arity(gens, n)
    identity = tuple(range(1, n + 1))
    seen = {identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = compose(s, g)
            if h not in seen:
                seen.add(h)
                if len(seen) > cap:
                    return GroupClosure(None, True)
                queue.append(h)
    return GroupClosure(frozenset(seen), False)


def orbit_partition(gens: Sequence[Sequence[int]], n: int | None = None) -> PartitionSpec:
    """Orbits of the generated group, classes sorted by least element."""
    gens = [check_permutation(g) for g in gens]
    n = _arity(gens, n)
    parent = list(range(n + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in gens:
        for i, gi in enumerate(g, start=1):
            ri, rj = find(i), find(gi)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    classes = {}
    for i in range(1, n + 1):
        classes.setdefault(find(i), []).append(i)
    return PartitionSpec(tuple(tuple(c) for _, c in sorted(classes.items())))


@dataclass(frozen=True)
class GroupReport:
    group_order: int | None
    orbit_partition: PartitionSpec
    is_product: bool | None
    overflow: bool = False

    @property
    def product_order(self) -> int:
        return math.prod(math.factorial(s) for s in self.orbit_partition.class_sizes)


def classify(gens: Sequence[Sequence[int]], n: int | None = None, cap: int = DEFAULT_CAP) -> GroupReport:
    """Decide whether ``<gens>`` is the full product of symmetric groups on its orbits.

    The generated group always sits inside that product, so comparing orders
    decides equality.  If the closure overflows ``cap`` the answer is unknown
    and ``overflow`` is set.
    """
    gens = [check_permutation(g) for g in gens]
    n = _arity(gens, n)
    parts = orbit_partition(gens, n)
    target = math.prod(math.factorial(s) for s in parts.class_sizes)
    closure = generate_group(gens, n, cap=cap)
    if closure.overflow:
        return GroupReport(None, parts, None, overflow=True)
    return GroupReport(closure.order, parts, closure.order == target)
