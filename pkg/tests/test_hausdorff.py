from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from definetti import kernels
from definetti.errors import InfeasibleMoments
from definetti.hausdorff import AtomicMeasure, law_of, moments_of, recover_measure

TWO = AtomicMeasure(((0.2, 0.5), (0.7, 0.5)))


def max_moment_error(mu, m):
    got = moments_of(mu, len(m) - 1)
    return max(abs(float(a) - float(b)) for a, b in zip(got, m))


@pytest.fixture(params=sorted(kernels.implementations()))
def backend(request, monkeypatch):
    impl = kernels.implementations()[request.param]
    monkeypatch.setattr(kernels, "nnls", impl.nnls)
    monkeypatch.setattr(kernels, "refine_atoms", impl.refine_atoms)
    return request.param


class TestAtomicMeasure:
    def test_invariants(self):
        with pytest.raises(ValueError):
            AtomicMeasure(((1.5, 1.0),))
        with pytest.raises(ValueError):
            AtomicMeasure(((0.5, -0.1),))

    def test_json_roundtrip(self):
        assert AtomicMeasure.from_json(TWO.to_json()) == TWO
        exact = AtomicMeasure(((F(1, 3), F(1)),))
        assert exact.to_json() == {"atoms": [{"p": "1/3", "w": "1"}]}
        assert AtomicMeasure.from_json(exact.to_json()) == exact


class TestForward:
    def test_moments_examples(self):
        assert moments_of(AtomicMeasure(((F(1, 2), F(1)),)), 2) == (1, F(1, 2), F(1, 4))
        half = AtomicMeasure(((F(0), F(1, 2)), (F(1), F(1, 2))))
        assert moments_of(half, 3) == (1, F(1, 2), F(1, 2), F(1, 2))
        np.testing.assert_allclose(moments_of(TWO, 2), (1, 0.45, 0.265))

    def test_law_examples(self):
        assert law_of(AtomicMeasure(((F(1, 2), F(1)),)), 2).x == (F(1, 4),) * 3
        assert law_of(AtomicMeasure(((F(1), F(1)),)), 3).x == (1, 0, 0, 0)
        np.testing.assert_allclose(law_of(TWO, 2).x, (0.265, 0.185, 0.365))


class TestRecover:
    def test_delta_third(self, backend):
        mu = recover_measure([3.0**-i for i in range(6)])
        assert len(mu.atoms) == 1
        assert mu.atoms[0][0] == pytest.approx(1 / 3, abs=1e-6)
        assert mu.atoms[0][1] == pytest.approx(1.0, abs=1e-9)

    def test_two_atoms_float_input(self, backend):
        m = moments_of(TWO, 6)
        mu = recover_measure(m)
        assert len(mu.atoms) == 2
        np.testing.assert_allclose(mu.locations, (0.2, 0.7), atol=1e-6)
        np.testing.assert_allclose(mu.weights, (0.5, 0.5), atol=1e-6)

    def test_delta_one(self, backend):
        mu = recover_measure([1.0] * 5)
        assert mu.atoms == ((1.0, 1.0),) or (
            len(mu.atoms) == 1 and mu.atoms[0][0] == pytest.approx(1.0) and mu.atoms[0][1] == pytest.approx(1.0)
        )

    def test_rational_boundary_close_atoms(self):
        # unique representing measure, atoms 1/40 apart
        mu0 = AtomicMeasure(((F(19, 40), F(3, 5)), (F(9, 20), F(2, 5))))
        m = moments_of(mu0, 6)
        mu = recover_measure(m, tol=1e-12)
        np.testing.assert_allclose(sorted(mu.locations), (0.45, 0.475), atol=1e-8)
        assert max_moment_error(mu, m) <= 1e-12

    def test_interior_point(self):
        # three atoms with n = 6: both Hankel matrices are nonsingular
        mu0 = AtomicMeasure(((F(1, 10), F(1, 3)), (F(1, 2), F(1, 3)), (F(9, 10), F(1, 3))))
        for extra in (F(3, 10), F(7, 10)):
            mu1 = AtomicMeasure(tuple((p, w * F(3, 4)) for p, w in mu0.atoms) + ((extra, F(1, 4)),))
            m = moments_of(mu1, 6)
            mu = recover_measure(m)
            assert max_moment_error(mu, m) <= 1e-9

    def test_infeasible_rational(self):
        with pytest.raises(InfeasibleMoments):
            recover_measure([F(1), F(1, 2), F(0)])

    def test_infeasible_float(self):
        with pytest.raises(InfeasibleMoments) as info:
            recover_measure([1.0, 0.5, 0.0])
        assert info.value.residual > 1e-9

    def test_bad_input(self):
        with pytest.raises(ValueError):
            recover_measure([])
        with pytest.raises(ValueError):
            recover_measure([1.0, float("nan")])

    def test_atom_count_bounded(self):
        m = moments_of(TWO, 4)
        assert len(recover_measure(m).atoms) <= 5


atom_st = st.tuples(st.integers(0, 40), st.integers(1, 9))


@settings(max_examples=60, deadline=None)
@given(st.lists(atom_st, min_size=1, max_size=4), st.booleans(), st.integers(0, 2))
def test_round_trip(atoms, exact, extra):
    tot = sum(w for _, w in atoms)
    mu0 = AtomicMeasure(tuple((F(p, 40), F(w, tot)) for p, w in atoms))
    n = 2 * len(atoms) + extra
    m = moments_of(mu0, n)
    if not exact:
        m = [float(v) for v in m]
    try:
        mu = recover_measure(m)
    except InfeasibleMoments:
        # float input on the boundary of the moment cone with nearly
        # coincident atoms can be out of reach of the grid search
        assert not exact
        ps = sorted({p for p, _ in atoms})
        assert any(b - a <= 2 for a, b in zip(ps, ps[1:]))
        return
    assert max_moment_error(mu, m) <= 1e-9
    assert all(w >= 0 for w in mu.weights)
    assert abs(sum(mu.weights) - 1) <= 1e-9
