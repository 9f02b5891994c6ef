"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from oracles import evolve, reduced_state, register_hamiltonian, register_state
from xynet.dissipation import LindbladParams, dissipative_transfer
from xynet.fullmodel import adiabatic_scaling
from xynet.network import TopologySpec, topology_to_couplings
from xynet.numerics import herm_eig
from xynet.spectra import (
    cluster_transfer_probability,
    engineered_levels,
    engineered_spectrum,
    optimal_transfer_time,
)
from xynet.transfer import (
    InputState,
    average_fidelity,
    bloch_average_quadrature,
    oscillation_metrics,
    receiver_state,
    required_steps,
    transfer_trace,
    transition_amplitude,
)

pytestmark = pytest.mark.acceptance


def network(variant, N, f=5.0, x=1.0):
    return herm_eig(topology_to_couplings(TopologySpec(variant, x=x, f=f), N).J)


def test_c01_cluster_law(criterion):
    tau = np.linspace(0, 2 * np.pi, 2001)
    worst = 0.0
    for N in range(3, 11):
        F = np.abs(transition_amplitude(network("cluster", N), 1, N, tau)) ** 2
        worst = max(worst, float(np.max(np.abs(F - cluster_transfer_probability(N, tau)))))
    ok = criterion(1, worst <= 1e-10, f"cluster law max error {worst:.2e} (tol 1e-10)")
    assert ok


@pytest.mark.parametrize("f, target", [(10.0, 0.973), (5.0, 0.898)])
def test_c02_engineered_n3_at_optimal_time(criterion, f, target):
    tau_star = optimal_transfer_time(f)
    F = abs(transition_amplitude(network("engineered", 3, f), 1, 3, tau_star)) ** 2
    ok = abs(F - target) <= 0.002
    criterion(2, ok, f"f={f:g}: F(0,1) at tau*={tau_star:.5f} is {F:.5f} "
                       f"(target {target} +- 0.002)")
    assert ok


def test_c02_info_local_peak_f5():
    """Not a criterion: the local maximum nearest tau* for f = 5."""
    d = network("engineered", 3, 5.0)
    res = minimize_scalar(lambda t: -abs(transition_amplitude(d, 1, 3, t)) ** 2,
                          bounds=(1.9, 2.4), method="bounded", options={"xatol": 1e-10})
    assert -res.fun == pytest.approx(0.8976, abs=1e-3)
    assert res.x == pytest.approx(2.150, abs=0.01)


def test_c03_spectrum_oracle(criterion):
    worst = 0.0
    for x in (1.0, 0.37):
        for N in range(3, 11):
            for f in (1.1, 5.0, 10.0):
                a = engineered_spectrum(N, x, f).eigenvalues
                n = network("engineered", N, f, x).eigenvalues
                worst = max(worst, float(np.max(np.abs(a - n))) / x)
    ok = criterion(3, worst <= 1e-9, f"analytic vs Jacobi max |diff|/x {worst:.2e} (tol 1e-9)")
    assert ok


def test_c04_large_f_limit(criterion):
    d = network("engineered", 3, 1e6)
    res = minimize_scalar(lambda t: -abs(transition_amplitude(d, 1, 3, t)) ** 2,
                          bounds=(2.0, 2.4), method="bounded", options={"xatol": 1e-12})
    peak, t_peak = -res.fun, res.x
    dt = abs(t_peak - np.pi / np.sqrt(2))
    ok = peak >= 0.999999 and dt <= 1e-4
    criterion(4, ok, f"f=1e6 peak {peak:.12f} at tau={t_peak:.8f} (|tau - pi/sqrt2| = {dt:.1e})")
    assert ok


def test_c05_cluster_classical_bound(criterion):
    tau = np.linspace(0, 2 * np.pi, 20001)
    tr = transfer_trace(network("cluster", 4), 1, 4, tau, mode="raw")
    best = float(np.max(tr.Fbar_raw))
    ok = abs(best - 2 / 3) <= 0.02
    criterion(5, ok, f"cluster N=4 max raw Fbar {best:.5f} (target 2/3 +- 0.02)")
    assert ok


def _first_slow_period(N, f):
    """Trace over the first slow period, sampled at 20 points per fast period."""
    lv = engineered_levels(N, 1.0, f)
    T = 2 * np.pi / lv.slow_beat
    tau = np.linspace(0, T, required_steps(lv.fast_beat, T, 20))
    tr = transfer_trace(network("engineered", N, f), 1, N, tau)
    return oscillation_metrics(tr, slow_window=(0.0, T))


def test_c06_sweep_trends(criterion):
    failures = []
    rows = {}
    for f in (5.0, 1.1):
        for N in range(4, 11):
            rows[f, N] = _first_slow_period(N, f)
    for N in range(4, 11):
        m = rows[5.0, N]
        if m.F_m < 0.9:
            failures.append(f"f=5 N={N} F_m={m.F_m:.4f}<0.9")
        if m.envelope_peak > 60:
            failures.append(f"f=5 N={N} peak tau={m.envelope_peak:.1f}>60")
    for N in range(5, 10):
        m = rows[1.1, N]
        if m.F_m < 0.7:
            failures.append(f"f=1.1 N={N} F_m={m.F_m:.4f}<0.7")
    for f in (5.0, 1.1):
        A = [rows[f, N].A for N in range(4, 11)]
        if not np.all(np.diff(A) < 0):
            failures.append(f"f={f:g} A not decreasing: {np.round(A, 4).tolist()}")
    detail = "; ".join(failures) if failures else "all F_m, peak-time and A-trend checks hold"
    ok = criterion(6, not failures, detail)
    assert ok, detail


def test_c07_bloch_average_oracle(criterion):
    rng = np.random.default_rng(2024)
    r = np.sqrt(rng.uniform(0, 1, 100))
    a = r * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
    worst = max(abs(average_fidelity(z) - bloch_average_quadrature(z, 64, 64)) for z in a)
    ok = criterion(7, worst <= 1e-6, f"closed form vs quadrature max diff {worst:.2e} (tol 1e-6)")
    assert ok


def test_c08_adiabatic_validation(criterion):
    tau = np.linspace(0, 2 * np.pi, 4001)
    sc = adiabatic_scaling(np.ones(3), tau, (0.1, 0.05))
    photon_ok = all(r.photon_max <= r.photon_bound for r in sc.reports)
    ok = abs(sc.exponent - 2) <= 1 and photon_ok
    photons = ", ".join(f"{r.photon_max:.2e}<={r.photon_bound:.2e}" for r in sc.reports)
    criterion(8, ok, f"exponent {sc.exponent:.3f} (2 +- 1); photon {photons}")
    assert ok


LAB_RATES = LindbladParams.from_times(2 * np.pi * 5e6, T1=50e-6, T_phi=1e-6)
WINDOW_TAU = np.linspace(0, 30, 601)
# peak dissipative F(0,1), fixed at the first verified run
FROZEN_PEAK = {4: 0.792469028185, 5: 0.719545596848, 6: 0.656435557831}
REGRESSION_BAND = 1e-6


def test_c09_dissipative_sanity(criterion):
    problems = []
    J = topology_to_couplings(TopologySpec("engineered", f=5.0), 5)
    zero = dissipative_transfer(J, LindbladParams(), WINDOW_TAU)
    unitary = np.abs(transition_amplitude(herm_eig(J.J), 1, 5, WINDOW_TAU)) ** 2
    dz = float(np.max(np.abs(zero.F01 - unitary)))
    if dz > 1e-6:
        problems.append(f"zero-rate diff {dz:.1e}")
    peaks = []
    for N in (4, 5, 6):
        J = topology_to_couplings(TopologySpec("engineered", f=5.0), N)
        tr = dissipative_transfer(J, LAB_RATES, WINDOW_TAU)
        if np.max(np.abs(tr.trace - 1)) > 1e-9:
            problems.append(f"N={N} trace")
        if np.min(tr.min_eig) < -1e-8:
            problems.append(f"N={N} positivity")
        peak = float(np.max(tr.F01))
        peaks.append(f"{peak:.6f}")
        if abs(peak - FROZEN_PEAK[N]) > REGRESSION_BAND:
            problems.append(f"N={N} peak {peak:.9f} outside band")
    detail = (f"zero-rate diff {dz:.1e}; peaks N=4,5,6 {', '.join(peaks)}"
              + ("" if not problems else "; " + "; ".join(problems)))
    ok = criterion(9, not problems, detail)
    assert ok, detail


def test_c10_brute_force_equivalence(criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    for N in (2, 3, 4):
        variant = "cluster" if N == 2 else "engineered"
        J = topology_to_couplings(TopologySpec(variant, f=5.0), N)
        d = herm_eig(J.J)
        H = register_hamiltonian(J.J)
        for _ in range(5):
            theta, phi = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
            s = InputState.from_bloch(theta, phi)
            t = rng.uniform(0, 20)
            psi = evolve(H, register_state(N, s.beta, s.gamma), t)
            ref = reduced_state(psi, N - 1, N)
            rho = receiver_state(transition_amplitude(d, 1, N, t), s).rho
            worst = max(worst, float(np.max(np.abs(rho - ref))))
    ok = criterion(10, worst <= 1e-10, f"sector vs 2^N partial trace max diff {worst:.2e} (tol 1e-10)")
    assert ok
