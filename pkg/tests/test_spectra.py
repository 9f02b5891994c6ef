import numpy as np
import pytest

from xynet.errors import ParameterError, PreconditionError
from xynet.network import TopologySpec, topology_to_couplings
from xynet.numerics import herm_eig
from xynet.spectra import (
    closed_form_amplitude,
    closed_form_fidelity,
    cluster_spectrum,
    cluster_transfer_probability,
    engineered_levels,
    engineered_spectrum,
    optimal_transfer_time,
    weak_link_spectrum,
)
from xynet.transfer import transition_amplitude

FS = [1.1, 2.0, 5.0, 10.0]


def numeric(variant, N, f=5.0, x=1.0):
    return herm_eig(topology_to_couplings(TopologySpec(variant, x=x, f=f), N).J)


class TestCluster:
    @pytest.mark.parametrize("N", [2, 3, 6, 10])
    def test_levels(self, N):
        d = cluster_spectrum(N, 0.7)
        np.testing.assert_allclose(d.eigenvalues, [-0.7] * (N - 1) + [0.7 * (N - 1)], atol=1e-14)
        assert d.residual < 1e-13
        V = d.eigenvectors
        np.testing.assert_allclose(V.conj().T @ V, np.eye(N), atol=1e-13)

    def test_transfer_law_n3(self):
        assert cluster_transfer_probability(3, np.pi / 3) == pytest.approx(4 / 9, abs=1e-15)

    def test_rejects(self):
        with pytest.raises(PreconditionError):
            cluster_spectrum(1, 1.0)
        with pytest.raises(ParameterError):
            cluster_spectrum(3, 0.0)


class TestEngineered:
    def test_n3_frozen_levels(self):
        lv = engineered_levels(3, 1.0, 5.0)
        assert lv.eps_anti == -0.2
        assert lv.eps_sym[0] == pytest.approx(-1.31774468787578252, abs=1e-14)
        assert lv.eps_sym[1] == pytest.approx(1.51774468787578252, abs=1e-14)
        assert lv.eps_degenerate is None

    @pytest.mark.parametrize("N", range(3, 11))
    @pytest.mark.parametrize("f", FS)
    def test_matches_numeric(self, N, f):
        a = engineered_spectrum(N, 1.0, f)
        np.testing.assert_allclose(a.eigenvalues, numeric("engineered", N, f).eigenvalues, atol=1e-9)
        assert a.residual < 1e-10
        V = a.eigenvectors
        np.testing.assert_allclose(V.conj().T @ V, np.eye(N), atol=1e-10)

    @pytest.mark.parametrize("N", range(4, 11))
    def test_degenerate_level_and_large_f_limit(self, N):
        lv = engineered_levels(N, 1.0, 5.0)
        assert lv.eps_degenerate == -5.0
        # the + branch carries the vanishing weight
        big = engineered_levels(N, 1.0, 1e4)
        assert big.norms[0] < 1e-3 < big.norms[1]

    def test_x_scaling(self):
        a = engineered_spectrum(6, 2.5, 5.0).eigenvalues
        b = engineered_spectrum(6, 1.0, 5.0).eigenvalues
        np.testing.assert_allclose(a, 2.5 * b, atol=1e-12)

    @pytest.mark.parametrize("N", [3, 4, 7, 10])
    @pytest.mark.parametrize("f", [1.1, 5.0])
    def test_closed_form_amplitude_vs_propagator(self, N, f):
        tau = np.linspace(0, 60, 401)
        a_num = transition_amplitude(numeric("engineered", N, f), 1, N, tau)
        np.testing.assert_allclose(closed_form_amplitude(tau, 1.0, f, N), a_num, atol=1e-10)
        np.testing.assert_allclose(closed_form_fidelity(tau, 1.0, f, N), np.abs(a_num) ** 2, atol=1e-10)

    def test_rejects(self):
        with pytest.raises(PreconditionError):
            engineered_levels(2, 1.0, 5.0)
        with pytest.raises(ParameterError):
            engineered_levels(4, 1.0, 1.0)


class TestWeakLink:
    @pytest.mark.parametrize("N", range(3, 11))
    @pytest.mark.parametrize("f", FS)
    def test_matches_numeric(self, N, f):
        a = weak_link_spectrum(N, 1.0, f)
        np.testing.assert_allclose(a.eigenvalues, numeric("weak_link", N, f).eigenvalues, atol=1e-9)
        assert a.residual < 1e-10


class TestOptimalTime:
    def test_frozen(self):
        assert optimal_transfer_time(10.0) == pytest.approx(2.22005436843249, abs=1e-13)
        assert optimal_transfer_time(5.0) == pytest.approx(2.21590860502314, abs=1e-13)
        assert optimal_transfer_time(np.inf) == pytest.approx(2.22144146907918, abs=1e-13)

    def test_rejects(self):
        with pytest.raises(ParameterError):
            optimal_transfer_time(0.9)
