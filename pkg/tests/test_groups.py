import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from definetti.groups import (
    check_permutation,
    classify,
    compose,
    generate_group,
    orbit_partition,
    parse_cycles,
)
from definetti.laws import PartitionSpec


def brute_orbits(gens, n):
    """Orbits by repeated application until stable."""
    seen, classes = set(), []
    for i in range(1, n + 1):
        if i in seen:
            continue
        orbit, frontier = {i}, [i]
        while frontier:
            j = frontier.pop()
            for g in gens:
                if g[j - 1] not in orbit:
                    orbit.add(g[j - 1])
                    frontier.append(g[j - 1])
        seen |= orbit
        classes.append(tuple(sorted(orbit)))
    return PartitionSpec(tuple(classes))


class TestParsing:
    def test_cycles(self):
        assert parse_cycles("(1 2)(3 4)", 4) == (2, 1, 4, 3)
        assert parse_cycles("(1,3,2)", 3) == (3, 1, 2)
        assert parse_cycles("()", 2) == (1, 2)
        assert parse_cycles("", 2) == (1, 2)

    @pytest.mark.parametrize("text", ["(1 2", "1 2", "(1 5)", "(1 1)", "(1 2)(2 3)", "(a b)"])
    def test_bad_syntax(self, text):
        with pytest.raises(ValueError):
            parse_cycles(text, 3)

    def test_check_permutation(self):
        with pytest.raises(ValueError):
            check_permutation((1, 1, 2))

    def test_compose_order(self):
        p, q = parse_cycles("(1 2)", 3), parse_cycles("(2 3)", 3)
        # q first: 1 -> 1 -> 2
        assert compose(p, q)[0] == 2


class TestClosure:
    def test_symmetric_group(self):
        gens = [parse_cycles("(1 2)", 4), parse_cycles("(1 2 3 4)", 4)]
        assert generate_group(gens).order == 24

    def test_identity_only(self):
        assert generate_group([], n=3).order == 1

    def test_overflow(self):
        gens = [parse_cycles("(1 2)", 8), parse_cycles("(1 2 3 4 5 6 7 8)", 8)]
        assert generate_group(gens, cap=100).overflow
        report = classify(gens, cap=100)
        assert report.overflow and report.is_product is None and report.group_order is None
        assert report.product_order == math.factorial(8)

    def test_needs_arity(self):
        with pytest.raises(ValueError):
            generate_group([])


class TestClassify:
    def test_product_of_transpositions(self):
        r = classify([parse_cycles("(1 2)", 4), parse_cycles("(3 4)", 4)])
        assert r.orbit_partition == PartitionSpec(((1, 2), (3, 4)))
        assert r.is_product and r.group_order == 4

    def test_cyclic_not_product(self):
        r = classify([parse_cycles("(1 2 3)", 3)])
        assert r.group_order == 3 and r.is_product is False

    def test_trivial_group_is_product_of_singletons(self):
        r = classify([], n=3)
        assert r.orbit_partition == PartitionSpec.singletons(3)
        assert r.is_product

    def test_fixed_points_are_singletons(self):
        r = classify([parse_cycles("(2 4)", 5)])
        assert r.orbit_partition.classes == ((1,), (2, 4), (3,), (5,))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.data())
def test_partition_and_order_match_brute_force(n, data):
    k = data.draw(st.integers(0, 3))
    gens = [tuple(data.draw(st.permutations(range(1, n + 1)))) for _ in range(k)]
    report = classify(gens, n)
    assert report.orbit_partition == orbit_partition(gens, n) == brute_orbits(gens, n)
    # membership by exhaustive words of bounded length equals the BFS closure
    identity = tuple(range(1, n + 1))
    words = {identity}
    for _ in range(math.factorial(n)):
        grown = words | {compose(g, w) for g in gens for w in words}
        if grown == words:
            break
        words = grown
    assert report.group_order == len(words)
    assert report.is_product == (len(words) == report.product_order)
    assert words <= set(itertools.permutations(range(1, n + 1)))
