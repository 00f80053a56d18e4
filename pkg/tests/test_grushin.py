import numpy as np
import pytest

from conftest import crandn
from grushinlab.errors import DimensionMismatch, EffectiveHamiltonianSingular, IllPosed
from grushinlab.grushin import (
    GrushinInverse,
    assemble,
    effective_hamiltonian,
    invert_grushin,
    recover_inverse,
)

ROT = np.array([[0, 1], [-1, 0]])
B2 = np.array([[0], [1]])


def s2_problem(lam):
    return assemble(lam * np.eye(2) - ROT, B2, B2.T)


def closed_form_resolvent(lam):
    return np.array([[lam, 1], [-1, lam]]) / (lam**2 + 1)


class TestAssemble:
    def test_s2_layout(self):
        np.testing.assert_array_equal(
            s2_problem(1).matrix, [[1, -1, 0], [1, 1, 1], [0, 1, 0]]
        )

    def test_scalar(self):
        np.testing.assert_array_equal(assemble([[1]], [[1]], [[1]], [[0]]).matrix, [[1, 1], [1, 0]])

    @pytest.mark.parametrize(
        "p, rm, rp, corner",
        [
            (np.eye(2), np.ones((3, 1)), np.ones((1, 2)), None),
            (np.eye(2), np.ones((2, 1)), np.ones((1, 3)), None),
            (np.eye(2), np.ones((2, 1)), np.ones((1, 2)), np.zeros((2, 2))),
            (np.ones((2, 3)), np.ones((2, 1)), np.ones((1, 3)), None),
        ],
    )
    def test_incompatible_shapes(self, p, rm, rp, corner):
        with pytest.raises(DimensionMismatch):
            assemble(p, rm, rp, corner)

    def test_non_square_accepted_but_not_inverted(self):
        prob = assemble(np.eye(2), np.ones((2, 2)), np.ones((1, 2)))
        assert prob.matrix.shape == (3, 4)
        assert prob.index == 1
        with pytest.raises(DimensionMismatch):
            invert_grushin(prob)


class TestInvert:
    def test_s2_at_one(self):
        inv = invert_grushin(s2_problem(1))
        oracle = np.linalg.inv(np.array([[1, -1, 0], [1, 1, 1], [0, 1, 0]], dtype=float))
        np.testing.assert_allclose(inv.as_matrix(), oracle, atol=1e-14)
        np.testing.assert_allclose(inv.e, [[1, 0], [0, 0]], atol=1e-14)
        np.testing.assert_allclose(inv.e_plus, [[1], [1]], atol=1e-14)
        np.testing.assert_allclose(inv.e_minus, [[-1, 1]], atol=1e-14)
        np.testing.assert_allclose(inv.e_minus_plus, [[-2]], atol=1e-14)

    def test_scalar(self):
        inv = invert_grushin(assemble([[1]], [[1]], [[1]]))
        np.testing.assert_allclose(inv.as_matrix(), [[0, 1], [1, -1]], atol=1e-15)

    def test_s2_at_zero_is_ill_posed(self):
        # rows 1 and 3 of [[0,-1,0],[1,0,1],[0,1,0]] are parallel
        with pytest.raises(IllPosed):
            invert_grushin(s2_problem(0))

    def test_well_posedness_witness(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 8))
            m = int(rng.integers(1, n + 1))  # m > n forces a rank-deficient border
            prob = assemble(crandn(rng, n, n), crandn(rng, n, m), crandn(rng, m, n))
            inv = invert_grushin(prob)
            resid = np.linalg.norm(prob.matrix @ inv.as_matrix() - np.eye(n + m), 2)
            assert resid <= 1e-9 * np.linalg.cond(prob.matrix)


class TestEffectiveHamiltonian:
    @pytest.mark.parametrize("lam, expected", [(1.0, -2.0), (2.0, -2.5)])
    def test_s2(self, lam, expected):
        h = lam / (lam**2 + 1)
        assert expected == pytest.approx(-1 / h)
        np.testing.assert_allclose(effective_hamiltonian(s2_problem(lam)), [[expected]], atol=1e-14)

    def test_scalar_integrator(self):
        np.testing.assert_allclose(effective_hamiltonian(assemble([[1]], [[1]], [[1]])), [[-1]])

    def test_ill_posed(self):
        with pytest.raises(IllPosed):
            effective_hamiltonian(s2_problem(0))


class TestRecoverInverse:
    def test_s2(self):
        got = recover_inverse(invert_grushin(s2_problem(1)))
        np.testing.assert_allclose(got, [[0.5, 0.5], [-0.5, 0.5]], atol=1e-14)
        np.testing.assert_allclose(got, closed_form_resolvent(1.0), atol=1e-14)

    def test_scalar(self):
        np.testing.assert_allclose(recover_inverse(invert_grushin(assemble([[1]], [[1]], [[1]]))), [[1]])

    def test_singular_effective_hamiltonian(self):
        blocks = GrushinInverse(np.eye(1), np.eye(1), np.eye(1), np.zeros((1, 1)))
        with pytest.raises(EffectiveHamiltonianSingular):
            recover_inverse(blocks)


class TestSchurDictionary:
    def test_random_trials(self, rng):
        for _ in range(500):
            n, m = int(rng.integers(1, 9)), int(rng.integers(1, 9))
            p = crandn(rng, n, n) + 3 * np.eye(n)
            prob = assemble(p, crandn(rng, n, m), crandn(rng, m, n), crandn(rng, m, m))
            try:
                inv = invert_grushin(prob)
            except IllPosed:
                continue
            cond_p = np.linalg.cond(p)
            got = recover_inverse(inv)
            direct = np.linalg.inv(p)
            assert np.linalg.norm(got - direct, 2) <= 1e-8 * cond_p * max(np.linalg.norm(direct, 2), 1)

    def test_singular_p_with_well_posed_problem(self):
        # P = diag(1, 0) is singular but bordering with e_2 makes it invertible
        prob = assemble(np.diag([1.0, 0.0]), [[0], [1]], [[0, 1]])
        inv = invert_grushin(prob)
        np.testing.assert_allclose(inv.e_minus_plus, [[0]], atol=1e-15)
        with pytest.raises(EffectiveHamiltonianSingular):
            recover_inverse(inv)

    def test_singular_p_corner_corrected(self):
        # with a corner d, E_-+ = 1/d and the D-formula has no P^{-1} to invert
        prob = assemble(np.diag([1.0, 0.0]), [[0], [1]], [[0, 1]], [[2.0]])
        inv = invert_grushin(prob)
        np.testing.assert_allclose(inv.e_minus_plus, [[0]], atol=1e-15)

    def test_corner_identity(self, rng):
        for _ in range(200):
            n, m = int(rng.integers(1, 7)), int(rng.integers(1, 4))
            p = crandn(rng, n, n) + 3 * np.eye(n)
            rm, rp, d = crandn(rng, n, m), crandn(rng, m, n), crandn(rng, m, m)
            schur = d - rp @ np.linalg.solve(p, rm)
            if np.linalg.cond(schur) > 1e6:
                continue
            emp = invert_grushin(assemble(p, rm, rp, d)).e_minus_plus
            err = np.linalg.norm(np.linalg.inv(emp) - schur, 2)
            assert err <= 1e-9 * np.linalg.cond(schur) * max(1, np.linalg.norm(schur, 2))

    def test_derivative_identity(self, rng):
        h = 1e-5
        for _ in range(50):
            n, m = int(rng.integers(2, 7)), int(rng.integers(1, 3))
            a, b = crandn(rng, n, n), crandn(rng, n, m)
            lam = complex(*rng.normal(size=2)) * 3

            def blocks(z):
                return invert_grushin(assemble(z * np.eye(n) - a, b, b.conj().T))

            try:
                here = blocks(lam)
                fwd, bwd = blocks(lam + h), blocks(lam - h)
            except IllPosed:
                continue
            if np.linalg.cond(np.block([[lam * np.eye(n) - a, b], [b.conj().T, np.zeros((m, m))]])) > 1e4:
                continue
            deriv = (fwd.e_minus_plus - bwd.e_minus_plus) / (2 * h)
            product = -here.e_minus @ here.e_plus
            assert np.linalg.norm(deriv - product) <= 1e-6 * np.linalg.norm(product)
