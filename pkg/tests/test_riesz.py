import math

import numpy as np
import pytest

from conftest import crandn
from grushinlab.analysis import gramian
from grushinlab.errors import DegenerateMode, NonDiagonalizable
from grushinlab.lti import StateSpaceSystem, dual_system, observation_map
from grushinlab.riesz import (
    ModalSystem,
    exp_integral,
    modal_from_system,
    moment_gram,
    reachable_weights,
)


def modal(lams, bpsi):
    n = len(lams)
    return ModalSystem(np.asarray(lams, complex), np.eye(n), np.eye(n), np.asarray(bpsi, complex).reshape(n, -1))


def fourier():
    return modal([-1j, -2j], [1, 1])


class TestExpIntegral:
    def test_zero(self):
        assert exp_integral(np.array([0j]), 2.5)[0] == 2.5

    def test_series_branch_is_continuous(self):
        s = np.array([1e-7 + 1e-7j, 2e-6 + 0j])
        exact = np.array([(1 - np.exp(-x * 3.0)) / x for x in s.astype(np.clongdouble)])
        np.testing.assert_allclose(exp_integral(s, 3.0), exact.astype(complex), rtol=1e-12)


class TestMomentGram:
    def test_fourier_orthogonality(self):
        np.testing.assert_allclose(moment_gram(fourier(), 2 * math.pi), 2 * math.pi * np.eye(2), atol=1e-12)

    def test_constant_function(self):
        np.testing.assert_allclose(moment_gram(modal([0], [1]), 1.7), [[1.7]])

    def test_zero_control_row(self):
        g = moment_gram(modal([-1j, -2j], [1, 0]), 1.0)
        assert np.all(g[1] == 0) and np.all(g[:, 1] == 0)

    def test_quadrature_oracle(self, rng):
        lams = crandn(rng, 3)
        bpsi = crandn(rng, 3, 2)
        t = np.linspace(0, 1.3, 20001)
        fam = np.exp(-np.conj(lams)[:, None] * t[None, :])[:, :, None] * bpsi[:, None, :]
        gram = np.empty((3, 3), complex)
        for m in range(3):
            for n in range(3):
                gram[m, n] = np.trapezoid(np.sum(fam[n] * fam[m].conj(), axis=1), t)
        np.testing.assert_allclose(moment_gram(modal(lams, bpsi), 1.3), gram, rtol=1e-7)


class TestReachableWeights:
    def test_fourier(self):
        desc = reachable_weights(fourier(), 2 * math.pi)
        np.testing.assert_allclose(desc.weights, [2 * math.pi] * 2, atol=1e-10)
        assert desc.frame_lower == pytest.approx(1, abs=1e-10)
        assert desc.frame_upper == pytest.approx(1, abs=1e-10)

    def test_clustered(self):
        desc = reachable_weights(modal([-1j, -1.01j], [1, 1]), 1.0)
        # normalized Gram [[1, g], [conj g, 1]] with g = I(-0.01i, 1)
        g = abs((1 - np.exp(0.01j)) / (-0.01j))
        assert desc.frame_lower == pytest.approx(1 - g, rel=1e-6)
        assert desc.frame_upper == pytest.approx(1 + g, rel=1e-12)
        assert desc.frame_lower < 1e-3

    def test_degenerate(self):
        with pytest.raises(DegenerateMode):
            reachable_weights(modal([-1j, -2j], [0, 1]), 1.0)


class TestModalFromSystem:
    def test_sign_convention(self, s2):
        ms = modal_from_system(s2)
        np.testing.assert_allclose(
            s2.a @ ms.basis, ms.basis * (-ms.eigenvalues)[None, :], atol=1e-12
        )
        np.testing.assert_allclose(ms.biorthogonal.conj().T @ ms.basis, np.eye(2), atol=1e-12)

    def test_jordan_block(self):
        with pytest.raises(NonDiagonalizable):
            modal_from_system(StateSpaceSystem([[0, 1], [0, 0]], [[0], [1]]))

    def test_adjoint_norm_identity(self, rng):
        a = np.diag([-0.5 + 1j, -0.2 - 2j, 0.1 + 0.5j])
        v = crandn(rng, 3, 3) + 3 * np.eye(3)
        sys_ = StateSpaceSystem(v @ a @ np.linalg.inv(v), crandn(rng, 3, 2))
        ms = modal_from_system(sys_)
        w = reachable_weights(ms, 1.0).weights
        psi_map = observation_map(dual_system(sys_), 1.0, 1e-4, scaled=True)
        for n in range(3):
            assert np.linalg.norm(psi_map @ ms.biorthogonal[:, n]) ** 2 == pytest.approx(w[n], rel=1e-3)

    def test_gram_equals_modal_gramian(self, rng):
        # <W_c psi_n, psi_m> = <E_n, E_m> : the Gram matrix is W_c in modal coordinates
        v = crandn(rng, 4, 4) + 3 * np.eye(4)
        sys_ = StateSpaceSystem(v @ np.diag(crandn(rng, 4)) @ np.linalg.inv(v), crandn(rng, 4, 2))
        ms = modal_from_system(sys_)
        wc = gramian(sys_, "controllability", 1.2)
        modal_wc = ms.biorthogonal.conj().T @ wc @ ms.biorthogonal
        np.testing.assert_allclose(moment_gram(ms, 1.2), modal_wc, rtol=1e-9, atol=1e-10)

    def test_weighted_ball_inclusion(self, rng):
        for _ in range(20):
            n = 4
            q, _ = np.linalg.qr(crandn(rng, n, n))
            sys_ = StateSpaceSystem(q @ np.diag(crandn(rng, n)) @ q.conj().T, crandn(rng, n, 2))
            ms = modal_from_system(sys_)
            desc = reachable_weights(ms, 1.0)
            wc_inv = np.linalg.inv(gramian(sys_, "controllability", 1.0))
            for _ in range(10):
                coeffs = crandn(rng, n)
                x = ms.basis @ coeffs
                weighted = np.sum(np.abs(coeffs) ** 2 / desc.weights)
                form = np.real(x.conj() @ wc_inv @ x)
                assert weighted / desc.frame_upper * (1 - 1e-8) <= form <= weighted / desc.frame_lower * (1 + 1e-8)
