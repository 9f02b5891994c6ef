"""Qubits plus a single boson mode, restricted to at most one excitation.

Used to check that eliminating the cavity reproduces the XY dynamics. The
total excitation number is conserved under the rotating-wave approximation,
so the space ``{|vac,0>, |vac,i> (i = 1..N), |1ph,0>}`` of dimension
``N + 2`` is exact for a single excitation.

Eliminating the photon to second order gives a hopping element
``-Omega_i Omega_j / delta = -2 x_ij`` between qubits, with ``x_ij`` from
:func:`xynet.network.effective_couplings`, and a level shift
``-Omega_i^2 / delta_i`` on each qubit. Dimensionless times here are measured
in that hopping unit, ``tau = 2 x_ref t`` with ``x_ref = max_j x_1j``, so the
effective trace coincides with the dimensionless network model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .network import PhysicalParams, effective_couplings
from .numerics import herm_eig

PHOTON_BOUND_MARGIN = 1.5


@dataclass(frozen=True)
class DispersiveSector1:
    N: int
    H: np.ndarray
    params: PhysicalParams
    lamb_compensation: bool = False

    @property
    def dim(self) -> int:
        return self.N + 2

    @property
    def photon_index(self) -> int:
        return self.N + 1

    def qubit_index(self, site: int) -> int:
        if not 1 <= site <= self.N:
            raise PreconditionError(f"site {site} outside [1, {self.N}]")
        return site


def build_dispersive_sector1(params: PhysicalParams,
                             lamb_compensation: bool = False) -> DispersiveSector1:
    """Hamiltonian in the frame rotating at the cavity frequency.

    With ``lamb_compensation`` each qubit level is offset by ``+Omega_i^2/delta_i``,
    cancelling its second-order dispersive shift.
    """
    N = params.N
    H = np.zeros((N + 2, N + 2), dtype=complex)
    for i in range(N):
        k = i + 1
        H[k, k] = -params.delta[i]
        if lamb_compensation:
            H[k, k] += params.Omega[i] ** 2 / params.delta[i]
        H[k, N + 1] = H[N + 1, k] = params.Omega[i]
    return DispersiveSector1(N, H, params, lamb_compensation)


def effective_hamiltonian(params: PhysicalParams) -> np.ndarray:
    """Second-order hopping matrix ``-Omega_i Omega_j / delta`` over ``|1>..|N>``."""
    return -2.0 * np.array(effective_couplings(params).J, dtype=complex)


def reference_coupling(params: PhysicalParams) -> float:
    return float(np.max(np.abs(effective_couplings(params).J[0, 1:])))


def dispersive_params(profile, ratio: float, x: float = 1.0,
                      omega_a: float | None = None) -> PhysicalParams:
    """Physical parameters with Rabi frequencies ``W * profile`` (``profile[0] = 1``).

    ``ratio = W / delta`` sets how deep in the dispersive regime the system is,
    while the sender's strongest coupling ``x_1j`` is held at ``x``.
    """
    w = np.asarray(profile, dtype=float)
    w = w / w[0]
    delta = 2.0 * x / (np.max(w[1:]) * ratio**2)
    W = ratio * delta
    if omega_a is None:
        omega_a = 10.0 * delta
    return PhysicalParams.from_detunings(omega_a, delta, W * w)


@dataclass(frozen=True)
class DeviationReport:
    tau: np.ndarray
    F01_full: np.ndarray
    F01_eff: np.ndarray
    abs_dev: np.ndarray
    photon_population: np.ndarray
    norm_error: float
    dispersive_ratio: float
    dispersive_warning: bool
    lamb_compensation: bool

    @property
    def max_dev(self) -> float:
        return float(np.max(self.abs_dev))

    @property
    def photon_max(self) -> float:
        return float(np.max(self.photon_population))

    @property
    def photon_bound(self) -> float:
        return PHOTON_BOUND_MARGIN * self.dispersive_ratio**2

    def summary(self) -> dict:
        return {
            "max_dev": self.max_dev,
            "photon_max": self.photon_max,
            "photon_bound": self.photon_bound,
            "norm_error": self.norm_error,
            "dispersive_ratio": self.dispersive_ratio,
            "dispersive_warning": self.dispersive_warning,
            "lamb_compensation": self.lamb_compensation,
        }


def _evolve(decomp, psi0, t):
    V = decomp.eigenvectors
    c = V.conj().T @ psi0
    return V @ (c[:, None] * np.exp(-1j * np.outer(decomp.eigenvalues, t)))


def compare_effective_vs_full(params: PhysicalParams, tau_grid, lamb_compensation: bool = False,
                              initial: str = "dressed", N: int | None = None) -> DeviationReport:
    """Compare ``F(0,1)`` of the full sector model with the eliminated XY model.

    ``initial="dressed"`` starts from ``|vac,1>`` carrying its first-order
    virtual-photon admixture (an adiabatically switched-on coupling);
    ``"bare"`` starts from ``|vac,1>`` itself, which additionally excites
    photon oscillations at the detuning frequency. Only populations are
    compared, so global phases dropped by the elimination do not matter.
    """
    if N is not None and N != params.N:
        raise PreconditionError(f"params describe N={params.N} qubits, request was N={N}")
    if params.N < 2:
        raise PreconditionError("comparison needs N >= 2")
    if initial not in ("dressed", "bare"):
        raise PreconditionError(f"initial must be 'dressed' or 'bare', got {initial!r}")
    tau = np.asarray(tau_grid, dtype=float)
    t = tau / (2.0 * reference_coupling(params))
    sector = build_dispersive_sector1(params, lamb_compensation)
    n = params.N

    psi0 = np.zeros(n + 2, dtype=complex)
    psi0[1] = 1.0
    if initial == "dressed":
        psi0[n + 1] = -params.Omega[0] / params.delta[0]
        psi0 /= np.linalg.norm(psi0)
    psi = _evolve(herm_eig(sector.H), psi0, t)
    F_full = np.abs(psi[n]) ** 2
    photon = np.abs(psi[n + 1]) ** 2
    norm_err = float(np.max(np.abs(np.sum(np.abs(psi) ** 2, axis=0) - 1.0)))

    e1 = np.zeros(n, dtype=complex)
    e1[0] = 1.0
    F_eff = np.abs(_evolve(herm_eig(effective_hamiltonian(params)), e1, t)[n - 1]) ** 2

    return DeviationReport(
        tau=tau,
        F01_full=F_full,
        F01_eff=F_eff,
        abs_dev=np.abs(F_full - F_eff),
        photon_population=photon,
        norm_error=norm_err,
        dispersive_ratio=params.dispersive_ratio,
        dispersive_warning=params.dispersive_warning,
        lamb_compensation=lamb_compensation,
    )


@dataclass(frozen=True)
class ScalingReport:
    ratios: tuple
    reports: tuple
    exponent: float

    @property
    def max_devs(self) -> tuple:
        return tuple(r.max_dev for r in self.reports)


def adiabatic_scaling(profile, tau_grid, ratios=(0.1, 0.05), x: float = 1.0,
                      lamb_compensation: bool = False, initial: str = "dressed") -> ScalingReport:
    """Fit ``max_dev ~ ratio^p`` between the first and last ratio at fixed coupling ``x``."""
    if len(ratios) < 2:
        raise PreconditionError("need at least two ratios")
    reports = tuple(
        compare_effective_vs_full(dispersive_params(profile, r, x), tau_grid,
                                  lamb_compensation, initial)
        for r in ratios
    )
    d0, d1 = reports[0].max_dev, reports[-1].max_dev
    p = float(np.log(d0 / d1) / np.log(ratios[0] / ratios[-1]))
    return ScalingReport(tuple(ratios), reports, p)
