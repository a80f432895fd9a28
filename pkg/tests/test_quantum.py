import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrvlab.distribution import DiscreteDistribution
from qrvlab.linalg import State, expectation, tensor_product
from qrvlab.quantum import (
    correlation_term,
    marginal_distribution,
    observable_distribution,
    qm_distribution_of_function,
    qm_free_particle_variance,
    qm_moment,
    schmidt,
    schmidt_qm_distribution,
)
from qrvlab.scenarios import (
    SIGMA_Z,
    bell_state,
    build_fock_xp,
    coherent_state,
    correlated_state,
    vacuum,
)
from qrvlab.spectral import PRODUCT, SUM, assemble_operator, decompose, joint_function_projectors

from conftest import random_hermitian, random_observable, random_state

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestObservableDistribution:
    def test_eigenvector(self, rng):
        a = random_hermitian(rng, 5)
        vals, vecs = np.linalg.eigh(a)
        d = observable_distribution(State.from_vector(vecs[:, 2]), decompose(a))
        assert d.pairs() == [(pytest.approx(vals[2]), pytest.approx(1.0))]

    def test_equal_superposition(self):
        d = observable_distribution(State.from_vector([1, 1]), decompose(SIGMA_Z))
        np.testing.assert_allclose(d.support, [-1, 1])
        np.testing.assert_allclose(d.weights, [0.5, 0.5])

    def test_bell_zz(self):
        # <Bell| diag(1,-1,-1,1) |Bell> weight on +1 is (1 + 1)/2
        d = observable_distribution(bell_state(), decompose(tensor_product(SIGMA_Z, SIGMA_Z)))
        np.testing.assert_allclose(d.support, [1.0])
        np.testing.assert_allclose(d.weights, [1.0])

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError):
            observable_distribution(random_state(rng, 3), decompose(SIGMA_Z))

    def test_vacuum_position_is_gauss_hermite(self):
        # eigenvalues of the truncated X are Gauss-Hermite nodes, vacuum weights w_k / sqrt(pi)
        n = 40
        x, _ = build_fock_xp(n)
        d = observable_distribution(vacuum(n), decompose(x))
        nodes, w = np.polynomial.hermite.hermgauss(n)
        w = w / math.sqrt(math.pi)
        keep = w >= 1e-12
        np.testing.assert_allclose(d.support, nodes[keep], atol=1e-10)
        np.testing.assert_allclose(d.weights, w[keep], atol=1e-13)


class TestFunctionDistribution:
    def test_identity(self, rng):
        d = qm_distribution_of_function(random_state(rng, 4), np.eye(4))
        assert d.pairs() == [(1.0, pytest.approx(1.0))]

    def test_vacuum_energy(self):
        n = 64
        x, p = build_fock_xp(n)
        d = qm_distribution_of_function(vacuum(n), x @ x + p @ p)
        assert len(d) == 1
        assert d.support[0] == pytest.approx(1.0, abs=1e-10)

    def test_coherent_poisson(self):
        n, alpha = 64, 1.0
        x, p = build_fock_xp(n)
        d = qm_distribution_of_function(coherent_state(n, alpha), x @ x + p @ p)
        for k in range(12):
            poisson = math.exp(-alpha ** 2) * alpha ** (2 * k) / math.factorial(k)
            assert d.weight_at(2 * k + 1, 1e-6) == pytest.approx(poisson, abs=1e-12)

    def test_rejects_non_hermitian(self, rng):
        with pytest.raises(ValueError):
            qm_distribution_of_function(random_state(rng, 2), np.array([[0, 1], [0, 0]]))


class TestMarginals:
    def test_product_state(self, rng):
        chi = rng.normal(size=3) + 1j * rng.normal(size=3)
        zeta = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi = State.product(chi, zeta)
        a, b = random_hermitian(rng, 3), random_hermitian(rng, 2)
        da, db = decompose(a), decompose(b)
        m1 = marginal_distribution(psi, da, 1)
        m2 = marginal_distribution(psi, db, 2)
        r1 = observable_distribution(State.from_vector(chi), da)
        r2 = observable_distribution(State.from_vector(zeta), db)
        np.testing.assert_allclose(m1.weights, r1.weights, atol=1e-14)
        np.testing.assert_allclose(m2.weights, r2.weights, atol=1e-14)

    @pytest.mark.parametrize("which", [1, 2])
    def test_bell(self, which):
        d = marginal_distribution(bell_state(), decompose(SIGMA_Z), which)
        np.testing.assert_allclose(d.support, [-1, 1])
        np.testing.assert_allclose(d.weights, [0.5, 0.5], atol=1e-15)

    def test_matches_full_space(self, rng):
        psi = random_state(rng, 12, (3, 4))
        a, b = random_hermitian(rng, 3), random_hermitian(rng, 4)
        full_a = observable_distribution(psi, decompose(tensor_product(a, np.eye(4))))
        full_b = observable_distribution(psi, decompose(tensor_product(np.eye(3), b)))
        np.testing.assert_allclose(marginal_distribution(psi, decompose(a), 1).weights, full_a.weights, atol=1e-12)
        np.testing.assert_allclose(marginal_distribution(psi, decompose(b), 2).weights, full_b.weights, atol=1e-12)

    def test_requires_structure(self, rng):
        with pytest.raises(ValueError):
            marginal_distribution(random_state(rng, 4), decompose(SIGMA_Z), 1)

    @settings(max_examples=20, deadline=None)
    @given(seed=seeds, d1=st.integers(1, 5), d2=st.integers(1, 5))
    def test_schmidt_form(self, seed, d1, d2):
        rng = np.random.default_rng(seed)
        psi = random_state(rng, d1 * d2, (d1, d2))
        sd = schmidt(psi)
        da = decompose(random_observable(rng, d1, levels=1))
        m = marginal_distribution(psi, da, 1)
        for a, w in m.pairs():
            pa = da.projector_for(a)
            via_schmidt = sum(al ** 2 * np.vdot(chi, pa @ chi).real for al, chi in zip(sd.coefficients, sd.left.T))
            assert w == pytest.approx(via_schmidt, abs=1e-9)


class TestSchmidt:
    def test_product(self, rng):
        psi = State.product(rng.normal(size=3), rng.normal(size=4) + 1j)
        assert schmidt(psi).rank == 1

    def test_bell(self):
        sd = schmidt(bell_state())
        assert sd.rank == 2
        np.testing.assert_allclose(sd.coefficients, [2 ** -0.5, 2 ** -0.5], atol=1e-15)

    def test_partial(self):
        sd = schmidt(State.from_vector([2, 0, 0, 1], (2, 2)))
        np.testing.assert_allclose(sd.coefficients, [2 / math.sqrt(5), 1 / math.sqrt(5)], atol=1e-15)

    def test_requires_structure(self):
        with pytest.raises(ValueError):
            schmidt(State.from_vector([1, 0, 0, 1]))

    @settings(max_examples=25, deadline=None)
    @given(seed=seeds, d1=st.integers(1, 6), d2=st.integers(1, 6))
    def test_invariants(self, seed, d1, d2):
        psi = random_state(np.random.default_rng(seed), d1 * d2, (d1, d2))
        sd = schmidt(psi)
        assert np.sum(sd.coefficients ** 2) == pytest.approx(1.0, abs=1e-10)
        assert np.all(np.diff(sd.coefficients) <= 0) and np.all(sd.coefficients > 0)
        np.testing.assert_allclose(sd.left.conj().T @ sd.left, np.eye(sd.rank), atol=1e-10)
        np.testing.assert_allclose(sd.right.conj().T @ sd.right, np.eye(sd.rank), atol=1e-10)
        assert np.max(np.abs(sd.reconstruct() - psi.amplitudes)) <= 1e-9


class TestMoments:
    def test_zeroth(self, rng):
        assert qm_moment(random_state(rng, 5), random_hermitian(rng, 5), 0) == pytest.approx(1.0)

    def test_free_particle_vacuum(self):
        x, p = build_fock_xp(32)
        r = 0.7
        c = x + r * p
        assert qm_moment(vacuum(32), c, 1) == pytest.approx(0.0, abs=1e-15)
        assert qm_moment(vacuum(32), c, 2) == pytest.approx(0.5 * (1 + r ** 2), abs=1e-14)

    def test_order_cap(self, rng):
        with pytest.raises(ValueError):
            qm_moment(random_state(rng, 2), SIGMA_Z, 9)

    @settings(max_examples=20, deadline=None)
    @given(seed=seeds, dim=st.integers(1, 64))
    def test_consistency_with_distribution(self, seed, dim):
        rng = np.random.default_rng(seed)
        c = random_hermitian(rng, dim)
        psi = random_state(rng, dim)
        sigma = qm_distribution_of_function(psi, c)
        for n in range(5):
            e = qm_moment(psi, c, n)
            assert abs(e - np.dot(sigma.support ** n, sigma.weights)) <= 1e-9 * max(1.0, abs(e))

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds, dim=st.integers(2, 16))
    def test_completeness_insertion(self, seed, dim):
        rng = np.random.default_rng(seed)
        a, b, c = (random_observable(rng, dim, levels=2) for _ in range(3))
        psi = random_state(rng, dim)
        da, db = decompose(a), decompose(b)
        for n in range(4):
            cn = np.linalg.matrix_power(c, n)
            total = sum(np.vdot(psi.amplitudes, pa @ cn @ pb @ psi.amplitudes) for pa in da.projectors for pb in db.projectors)
            assert abs(total - qm_moment(psi, c, n)) <= 1e-9 * max(1.0, abs(total))


class TestFreeParticleVariance:
    def test_no_evolution(self, rng):
        x, p = build_fock_xp(24)
        psi = random_state(rng, 24)
        dx2 = expectation(psi, x @ x).real - expectation(psi, x).real ** 2
        assert qm_free_particle_variance(psi, x, p, t=0.0) == pytest.approx(dx2, rel=1e-12)

    def test_vacuum(self):
        x, p = build_fock_xp(24)
        r = 1.3
        assert qm_free_particle_variance(vacuum(24), x, p, t=r) == pytest.approx(0.5 + 0.5 * r ** 2, rel=1e-14)

    def test_correlation_excess(self):
        n = 64
        x, p = build_fock_xp(n)
        psi = correlated_state(x, p, vacuum(n), 0.3, math.pi / 8)
        ev = lambda op: expectation(psi, op).real
        kappa = ev(x @ p + p @ x) - 2 * ev(x) * ev(p)
        assert abs(kappa) > 0.1
        assert correlation_term(psi, x, p) == pytest.approx(kappa, rel=1e-14)
        t, m = 2.0, 1.6
        r = t / m
        eq14 = ev(x @ x) - ev(x) ** 2 + r ** 2 * (ev(p @ p) - ev(p) ** 2)
        assert qm_free_particle_variance(psi, x, p, t, m) - eq14 == pytest.approx(r * kappa, rel=1e-12)
        # closed form agrees with the numerical spread of X + (t/m) P
        c = x + r * p
        var = qm_moment(psi, c, 2) - qm_moment(psi, c, 1) ** 2
        assert qm_free_particle_variance(psi, x, p, t, m) == pytest.approx(var, rel=1e-9)

    def test_zero_mass(self, rng):
        x, p = build_fock_xp(4)
        with pytest.raises(ValueError):
            qm_free_particle_variance(random_state(rng, 4), x, p, m=0.0)


@settings(max_examples=15, deadline=None)
@given(seed=seeds, d1=st.integers(1, 4), d2=st.integers(1, 4), f=st.sampled_from([SUM, PRODUCT]))
def test_commuting_tensor_two_routes(seed, d1, d2, f):
    rng = np.random.default_rng(seed)
    da = decompose(random_observable(rng, d1, levels=2))
    db = decompose(random_observable(rng, d2, levels=2))
    psi = random_state(rng, d1 * d2, (d1, d2))
    via_c = qm_distribution_of_function(psi, assemble_operator(da, db, f))
    via_joint = observable_distribution(psi, joint_function_projectors(da, db, f))
    via_schmidt = schmidt_qm_distribution(schmidt(psi), da, db, f)
    for other in (via_joint, via_schmidt):
        np.testing.assert_allclose(via_c.support, other.support, atol=1e-9)
        np.testing.assert_allclose(via_c.weights, other.weights, atol=1e-9)


def test_distribution_invariants():
    with pytest.raises(ValueError):
        DiscreteDistribution(np.array([0.0, 1.0]), np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        DiscreteDistribution(np.array([1.0, 0.0]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        DiscreteDistribution(np.array([0.0, 1.0]), np.array([-1e-6, 1.0]))
    d = DiscreteDistribution(np.array([0.0, 1.0]), np.array([-1e-13, 1.0]))
    assert d.weights[0] == 0.0
    merged = DiscreteDistribution.from_points([1.0, 0.0, 1.0 + 1e-12, 5.0], [0.25, 0.25, 0.5, 1e-13])
    assert merged.pairs() == [(0.0, 0.25), (pytest.approx(1.0), 0.75)]
