import numpy as np
import pytest
import scipy.linalg

from conftest import crandn
from grushinlab.errors import ContourThroughSpectrum
from grushinlab.lti import StateSpaceSystem
from grushinlab.spectral import ContourSpec, spectral_projection, trace_counts


def invariant_zeros(a, b):
    """Finite eigenvalues of the pencil lam*diag(I, 0) - [[A, -B], [-B*, 0]]."""
    n, m = b.shape
    big = np.block([[a, -b], [-b.conj().T, np.zeros((m, m))]])
    mass = np.zeros((n + m, n + m))
    mass[:n, :n] = np.eye(n)
    vals = scipy.linalg.eigvals(big, mass)
    return vals[np.isfinite(vals)]


def residue_oracle_rhs(center, radius):
    """Sum of residues of (lam**2 - 1) / (lam (lam**2 + 1)) inside the circle."""
    residues = {0: -1.0, 1j: 1.0, -1j: 1.0}
    return sum(r for p, r in residues.items() if abs(p - center) < radius)


class TestContourSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            ContourSpec(0, 0.0)
        with pytest.raises(ValueError):
            ContourSpec(0, 1.0, nodes=8)

    def test_weights_integrate_one_over_z(self):
        nodes, weights = ContourSpec(0.3, 2.0, 64).points()
        assert np.sum(weights / (nodes - 0.3)) == pytest.approx(1.0)


class TestSpectralProjection:
    def test_single_eigenvalue(self, s2):
        proj = spectral_projection(s2, ContourSpec(1j, 0.5))
        np.testing.assert_allclose(proj, 0.5 * np.array([[1, -1j], [1j, 1]]), atol=1e-12)
        assert np.linalg.norm(proj @ proj - proj) <= 1e-8

    def test_empty(self, s2):
        assert np.linalg.norm(spectral_projection(s2, ContourSpec(3, 0.5))) <= 1e-10

    def test_everything(self, s2):
        np.testing.assert_allclose(spectral_projection(s2, ContourSpec(0, 2)), np.eye(2), atol=1e-12)

    def test_through_spectrum(self, s2):
        with pytest.raises(ContourThroughSpectrum):
            spectral_projection(s2, ContourSpec(0, 1.0))

    def test_additivity(self, rng):
        for _ in range(20):
            eig = np.concatenate([crandn(rng, 3) * 0.3 - 2, crandn(rng, 3) * 0.3 + 2])
            v = crandn(rng, 6, 6) + 4 * np.eye(6)
            a = v @ np.diag(eig) @ np.linalg.inv(v)
            sys_ = StateSpaceSystem(a, np.zeros((6, 1)))
            left = spectral_projection(sys_, ContourSpec(-2, 1.5))
            right = spectral_projection(sys_, ContourSpec(2, 1.5))
            both = spectral_projection(sys_, ContourSpec(0, 4.5))
            assert np.linalg.norm(left + right - both) <= 1e-8 * np.linalg.norm(both)
            assert np.trace(left).real == pytest.approx(3, abs=1e-8)


class TestTraceCounts:
    def test_single_eigenvalue(self, s2):
        rep = trace_counts(s2, ContourSpec(1j, 0.5))
        assert residue_oracle_rhs(1j, 0.5) == 1
        assert abs(rep.lhs_count - 1) < 1e-8 and abs(rep.rhs_count - 1) < 1e-8
        assert (rep.eig_inside, rep.eh_poles_inside) == (1, 0)
        assert rep.identity_holds

    def test_pole_of_effective_hamiltonian(self, s2):
        rep = trace_counts(s2, ContourSpec(0, 2))
        assert residue_oracle_rhs(0, 2) == 1
        assert abs(rep.lhs_count - 2) < 1e-8 and abs(rep.rhs_count - 1) < 1e-8
        assert (rep.eig_inside, rep.eh_poles_inside) == (2, 1)
        assert not rep.identity_holds

    def test_weighted(self, s2):
        rep = trace_counts(s2, ContourSpec(1j, 0.5), [0, 1])
        assert abs(rep.lhs_count - 1j) < 1e-8 and abs(rep.rhs_count - 1j) < 1e-8

    def test_spectral_convergence(self, s2):
        errs = [abs(trace_counts(s2, ContourSpec(1j, 0.5, n)).lhs_count - 1) for n in (16, 32, 64)]
        # error ~ (0.5 / 1.5)**n for the nearest outside pole at -i
        assert errs[1] < errs[0] * 1e-3 or errs[1] < 1e-14
        assert trace_counts(s2, ContourSpec(1j, 0.5, 256)).lhs_count == pytest.approx(1, abs=1e-8)

    def test_requires_collocated(self):
        sys_ = StateSpaceSystem(np.eye(2), [[1], [0]], [[0, 1]])
        with pytest.raises(ValueError):
            trace_counts(sys_, ContourSpec(0, 2))

    def test_zero_pole_accounting_random(self, rng):
        done = 0
        while done < 40:
            n = int(rng.integers(2, 7))
            m = int(rng.integers(1, n))
            a = np.diag(crandn(rng, n)) + 0.3 * crandn(rng, n, n)
            b = crandn(rng, n, m)
            contour = ContourSpec(complex(*rng.normal(size=2)) * 0.5, rng.uniform(0.8, 2.0))
            eig = np.linalg.eigvals(a)
            zeros = invariant_zeros(a, b)
            dist = np.abs(np.abs(np.concatenate([eig, zeros]) - contour.center) - contour.radius)
            if dist.min() < 0.15 * contour.radius:
                continue
            rep = trace_counts(StateSpaceSystem(a, b), contour)
            assert rep.eh_poles_inside == int(np.sum(contour.inside(zeros)))
            assert rep.eig_inside == int(np.sum(contour.inside(eig)))
            assert round(rep.rhs_count.real) == rep.eig_inside - rep.eh_poles_inside
            assert abs(rep.lhs_count - rep.rhs_count - rep.eh_winding) < 1e-8
            done += 1
