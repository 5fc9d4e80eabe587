import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from definetti import necessary
from definetti.binary import BinaryLawX, from_exchangeable_law, true_mixture_verdict
from definetti.errors import GuardExceeded
from definetti.laws import EventBlock, ExchangeableLaw, PartitionSpec, ProductEvent, StateSpace
from definetti.necessary import (
    BoxTestSpec,
    ClassSpec,
    EventMatrix,
    box_product,
    class_event_matrix,
    conditional_reinforcement,
    enumerate_specs,
    necessary_condition_check,
    necessary_matrix,
    parse_class_spec,
    scan_specs,
)
from definetti.semidefinite import kron

from lawgen import labels, product_mixture_law, random_exchangeable_law, random_partition, random_product_mixture, rng_for

BIN = StateSpace(("0", "1"))
ANTI = ExchangeableLaw(BIN, PartitionSpec.whole(2), {("0", "1"): F(1, 2), ("1", "0"): F(1, 2)})


def iid(p, partition):
    return product_mixture_law(BIN, partition, [(tuple((1 - p, p) for _ in partition.classes), F(1))])


def mixture(atoms, n):
    return product_mixture_law(BIN, PartitionSpec.whole(n), [(((1 - p, p),), w) for p, w in atoms])


M1 = ClassSpec(1, {"1"})


class TestMatrices:
    def test_fair_coin(self):
        law = iid(F(1, 2), PartitionSpec.whole(2))
        assert necessary_matrix(law, BoxTestSpec([M1])) == ((F(1, 4), F(1, 2)), (F(1, 2), 1))

    def test_two_classes_is_kronecker_square(self):
        law = iid(F(1, 2), PartitionSpec(((1, 2), (3, 4))))
        M = necessary_matrix(law, BoxTestSpec([M1, M1]))
        base = [[F(1, 4), F(1, 2)], [F(1, 2), F(1)]]
        assert [list(r) for r in M] == kron(base, base)
        assert necessary_condition_check(law, BoxTestSpec([M1, M1]))

    def test_antithetic(self):
        spec = BoxTestSpec([M1])
        assert necessary_matrix(ANTI, spec) == ((0, F(1, 2)), (F(1, 2), 1))
        v = necessary_condition_check(ANTI, spec)
        assert not v and v.minor_det == F(-1, 4)

    def test_trivial_spec(self):
        rng = rng_for(50)
        law = random_exchangeable_law(rng, labels(3), PartitionSpec(((1, 3), (2,))))
        spec = BoxTestSpec([ClassSpec(0, set()), ClassSpec(0, {"2"})])
        assert necessary_matrix(law, spec) == ((1,),)
        assert necessary_condition_check(law, spec)

    def test_spec_mismatch(self):
        with pytest.raises(ValueError):
            necessary_matrix(ANTI, BoxTestSpec([M1, M1]))
        with pytest.raises(ValueError):
            necessary_matrix(ANTI, BoxTestSpec([ClassSpec(2, {"1"})]))
        with pytest.raises(ValueError):
            necessary_matrix(ANTI, BoxTestSpec([ClassSpec(1, {"7"})]))
        with pytest.raises(ValueError):
            necessary_matrix(ANTI, BoxTestSpec([ClassSpec(0, {"1"}, {("1",)})]))
        with pytest.raises(ValueError):
            ClassSpec(-1, set())


class TestBoxProduct:
    def test_single_class_is_identity(self):
        E = class_event_matrix(2, M1)
        assert box_product([E]) is E

    def test_index_bookkeeping(self):
        E1 = class_event_matrix(2, M1)
        E2 = class_event_matrix(3, ClassSpec(1, {"0"}, {("1",)}))
        P = box_product([E1, E2])
        assert P.dim == 4
        # composite index (1,2) -> row 1, (2,1) -> column 2 (zero based: 1, 2)
        assert P.entries[1][2].blocks == E1.entries[0][1].blocks + E2.entries[1][0].blocks

    def test_row_major_shape(self):
        E2 = class_event_matrix(2, M1)
        E3 = class_event_matrix(4, ClassSpec(2, {"1"}))
        P = box_product([E2, E3])
        assert P.dim == 6
        for r, c in itertools.product(range(6), repeat=2):
            assert P.entries[r][c].blocks == E2.entries[r // 3][c // 3].blocks + E3.entries[r % 3][c % 3].blocks

    def test_entry_exponents(self):
        E = class_event_matrix(5, ClassSpec(2, {"1"}))
        for r, c in itertools.product(range(3), repeat=2):
            (blk,) = E.entries[r][c].blocks
            assert (blk.a, blk.b, blk.q) == (4 - r - c, r + c, 1)

    def test_errors(self):
        with pytest.raises(ValueError):
            box_product([])
        with pytest.raises(ValueError):
            EventMatrix(((1, 2),))


def shuffled_probability(law, block, positions):
    """Brute-force event probability with the head block at ``positions``."""
    n = law.n
    rest = [i for i in range(n) if i not in positions]
    order = list(positions) + rest
    total = F(0)
    for point, value in law.table.items():
        if block.contains(tuple(point[i] for i in order)):
            total += value
    return total


class TestInvariance:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_head_positions_immaterial(self, seed):
        rng = rng_for(seed)
        n = rng.randint(2, 4)
        law = random_exchangeable_law(rng, labels(2), PartitionSpec.whole(n))
        a = rng.randint(0, n)
        b = rng.randint(0, n - a)
        q = n - a - b
        tail = None
        if q and rng.random() < 0.5:
            tail = {tuple(rng.choice("01") for _ in range(q))}
        block = EventBlock({"1"}, a, b, q, tail)
        base = necessary.event_probability(law, ProductEvent((block,)))
        for _ in range(3):
            perm = list(range(n))
            rng.shuffle(perm)
            assert shuffled_probability(law, block, perm[: a + b]) == base

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6))
    def test_always_symmetric(self, seed):
        rng = rng_for(seed)
        n = rng.randint(2, 5)
        part = random_partition(rng, n, rng.randint(1, 2))
        law = random_exchangeable_law(rng, labels(2), part)
        specs = enumerate_specs(law)
        for spec in rng.sample(specs, min(20, len(specs))):
            M = necessary_matrix(law, spec)
            assert all(M[i][j] == M[j][i] for i in range(len(M)) for j in range(len(M)))


class TestScan:
    def test_iid_third(self):
        assert not scan_specs(iid(F(1, 3), PartitionSpec.whole(3))).any_failure

    def test_two_point_mixture(self):
        law = mixture([(F(1, 5), F(1, 2)), (F(4, 5), F(1, 2))], 3)
        assert not scan_specs(law, max_tail_points=2).any_failure

    def test_antithetic(self):
        res = scan_specs(ANTI)
        assert res.any_failure
        assert any(s == BoxTestSpec([M1]) and v.minor_det == F(-1, 4) for s, v in res.failures)

    def test_enumeration_counts(self):
        # n=3, s=2: m=0 gives 4 subsets x (full + 8 points); m=1 gives 4 x (full + 2)
        assert len(enumerate_specs(iid(F(1, 2), PartitionSpec.whole(3)))) == 4 * 9 + 4 * 3
        # unions that cover every tail point are skipped
        specs = enumerate_specs(iid(F(1, 2), PartitionSpec.whole(3)), max_tail_points=8)
        assert len(specs) == 4 * (1 + 2**8 - 2) + 4 * (1 + 2)

    def test_deterministic_order(self):
        law = iid(F(1, 2), PartitionSpec(((1, 2), (3,))))
        assert enumerate_specs(law) == enumerate_specs(law)

    def test_guard(self, monkeypatch):
        with pytest.raises(GuardExceeded):
            enumerate_specs(iid(F(1, 2), PartitionSpec.whole(4)), limit=10)
        with pytest.raises(ValueError):
            enumerate_specs(ANTI, max_tail_points=-1)

    def test_mixtures_pass(self):
        rng = rng_for(51)
        for _ in range(15):
            n = rng.randint(2, 4)
            part = random_partition(rng, n, rng.randint(1, 2))
            law, _ = random_product_mixture(rng, BIN, part)
            assert not scan_specs(law).any_failure

    def test_scan_failure_implies_binary_no(self):
        rng = rng_for(52)
        failures = 0
        for _ in range(60):
            n = rng.randint(2, 5)
            law = random_exchangeable_law(rng, BIN, PartitionSpec.whole(n))
            if scan_specs(law).any_failure:
                failures += 1
                assert not true_mixture_verdict(from_exchangeable_law(law), recover=False)
        assert failures > 5

    def test_two_by_two_minors_cauchy_schwarz(self):
        rng = rng_for(53)
        for _ in range(20):
            law, _ = random_product_mixture(rng, BIN, PartitionSpec.whole(4))
            for spec in enumerate_specs(law):
                if spec.classes[0].m == 1:
                    (a, b), (_, d) = necessary_matrix(law, spec)
                    assert a * d - b * b >= 0

    def test_float_eigenvalues_agree(self):
        rng = rng_for(54)
        for _ in range(10):
            law, _ = random_product_mixture(rng, BIN, PartitionSpec(((1, 2), (3, 4))))
            for spec, _ in scan_specs(law).entries[:50]:
                M = np.array(necessary_matrix(law, spec), dtype=float)
                assert np.linalg.eigvalsh(M).min() >= -1e-12


class TestReinforcement:
    def test_iid_equality(self):
        r = conditional_reinforcement(iid(F(1, 2), PartitionSpec.whole(2)), {"1"})
        assert (r.lhs, r.rhs, r.holds) == (F(1, 2), F(1, 2), True)

    def test_two_deltas(self):
        law = mixture([(F(0), F(1, 2)), (F(1), F(1, 2))], 2)
        r = conditional_reinforcement(law, {"1"})
        assert (r.lhs, r.rhs, r.holds) == (1, F(1, 2), True)

    def test_antithetic(self):
        r = conditional_reinforcement(ANTI, {"1"})
        assert (r.lhs, r.rhs, r.holds) == (0, F(1, 2), False)

    def test_undefined(self):
        law = iid(F(0), PartitionSpec.whole(3))
        r = conditional_reinforcement(law, {"1"}, {("1",)})
        assert r.undefined and r.holds is None

    def test_errors(self):
        with pytest.raises(ValueError):
            conditional_reinforcement(iid(F(1, 2), PartitionSpec.singletons(2)), {"1"})
        with pytest.raises(ValueError):
            conditional_reinforcement(iid(F(1, 2), PartitionSpec.whole(1)), {"1"})

    def test_true_mixtures_reinforce(self):
        rng = rng_for(55)
        for _ in range(40):
            law, _ = random_product_mixture(rng, BIN, PartitionSpec.whole(rng.randint(2, 4)))
            q = law.n - 2
            for B in [None] + [{t} for t in itertools.product("01", repeat=q) if q]:
                r = conditional_reinforcement(law, {"1"}, B)
                assert r.holds in (True, None)


class TestParse:
    def test_full(self):
        assert parse_class_spec(1, "1", "full") == ClassSpec(1, {"1"})

    def test_points(self):
        cs = parse_class_spec(0, "0,1", "0,1;1,1")
        assert cs.A == {"0", "1"} and cs.B == {("0", "1"), ("1", "1")}

    def test_empty_head(self):
        assert parse_class_spec(0, "", "FULL") == ClassSpec(0, set())

    def test_binary_counterpart(self):
        # the same failure seen through the binary module
        assert not true_mixture_verdict(BinaryLawX((0, F(1, 2), 0)), recover=False)
