"""Lindblad evolution of the network and of the cavity sector model.

Collapse channels: cavity decay ``a`` (rate ``kappa``), qubit relaxation
``sigma_i^-`` (``gamma_relax``) and pure dephasing ``sigma_i^z`` (rate
``gamma_phi / 2``, so coherences decay at ``gamma_phi``).

The network is simulated on the ``ell <= 1`` space ``{|0>, |1>, ..., |N>}``;
relaxation maps ``|i>`` to ``|0>`` and dephasing is diagonal, so no other
states are reachable from a single excitation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, ParameterError, PreconditionError
from .fullmodel import DispersiveSector1
from .network import CouplingMatrix, PhysicalParams

TRACE_TOL = 1e-9
MIN_EIG_TOL = 1e-8
HERM_TOL = 1e-10
MAX_STEP_FACTOR = 0.05
DEFAULT_STEP_FACTOR = 0.01


@dataclass(frozen=True)
class LindbladParams:
    """Decay rates, in the same units as the Hamiltonian they accompany."""

    kappa: float = 0.0
    gamma_relax: float = 0.0
    gamma_phi: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "gamma_relax", "gamma_phi"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")

    @classmethod
    def from_times(cls, coupling: float, T1: float | None = None, T_phi: float | None = None,
                   kappa: float = 0.0) -> "LindbladParams":
        """Dimensionless rates from lifetimes (s) given the coupling unit (rad/s)."""
        return cls(
            kappa=kappa / coupling,
            gamma_relax=0.0 if T1 is None else 1.0 / (T1 * coupling),
            gamma_phi=0.0 if T_phi is None else 1.0 / (T_phi * coupling),
        )


def validate_density_matrix(rho: np.ndarray, time: float | None = None) -> dict:
    """Check trace, hermiticity and positivity; return the diagnostics."""
    tr = np.trace(rho)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    where = "" if time is None else f" at t={time:.6g}"
    if abs(tr - 1.0) > TRACE_TOL:
        raise IntegrationError(f"trace {tr.real:.12g} deviates from 1{where}", time)
    if herm > HERM_TOL:
        raise IntegrationError(f"state not Hermitian (dev {herm:.3e}){where}", time)
    if min_eig < -MIN_EIG_TOL:
        raise IntegrationError(f"negative eigenvalue {min_eig:.3e}{where}", time)
    return {"trace": float(tr.real), "min_eig": min_eig,
            "purity": float(np.real(np.trace(rho @ rho)))}


def _check_ops(H, collapse_ops):
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    ops = []
    for rate, C in collapse_ops:
        C = np.asarray(C, dtype=complex)
        if C.shape != (d, d):
            raise PreconditionError(f"collapse operator shape {C.shape} does not match {H.shape}")
        if rate < 0:
            raise ParameterError("collapse rates must be >= 0")
        ops.append((float(rate), C))
    return H, ops


def lindblad_rhs(rho, H, collapse_ops) -> np.ndarray:
    """``-i[H, rho] + sum_c rate_c (C rho C^+ - {C^+ C, rho}/2)``."""
    H, ops = _check_ops(H, collapse_ops)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != H.shape:
        raise PreconditionError(f"rho shape {rho.shape} does not match H {H.shape}")
    out = -1j * (H @ rho - rho @ H)
    for rate, C in ops:
        if rate == 0:
            continue
        Cd = C.conj().T
        CdC = Cd @ C
        out += rate * (C @ rho @ Cd - 0.5 * (CdC @ rho + rho @ CdC))
    return out


def lindblad_superoperator(H, collapse_ops) -> np.ndarray:
    """Matrix ``L`` with ``vec(drho/dt) = L vec(rho)`` for row-major ``vec``."""
    H, ops = _check_ops(H, collapse_ops)
    d = H.shape[0]
    eye = np.eye(d)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for rate, C in ops:
        if rate == 0:
            continue
        CdC = C.conj().T @ C
        L += rate * (np.kron(C, C.conj()) - 0.5 * (np.kron(CdC, eye) + np.kron(eye, CdC.T)))
    return L


def rate_scale(H, collapse_ops) -> float:
    H, ops = _check_ops(H, collapse_ops)
    s = float(np.linalg.norm(H, 2))
    s = max(s, sum(rate * float(np.linalg.norm(C, 2)) ** 2 for rate, C in ops))
    return s


@dataclass(frozen=True)
class MasterEquationResult:
    times: np.ndarray
    states: np.ndarray
    step: float
    diagnostics: tuple
    halving_distance: float | None = None

    @property
    def trace(self) -> np.ndarray:
        return np.array([d["trace"] for d in self.diagnostics])

    @property
    def purity(self) -> np.ndarray:
        return np.array([d["purity"] for d in self.diagnostics])

    @property
    def min_eig(self) -> np.ndarray:
        return np.array([d["min_eig"] for d in self.diagnostics])


def _rk4_matrix(L: np.ndarray, h: float) -> np.ndarray:
    # RK4 applied to a linear ODE is exactly this degree-4 Taylor polynomial
    hL = h * L
    M = np.eye(L.shape[0], dtype=complex)
    term = np.eye(L.shape[0], dtype=complex)
    for k in range(1, 5):
        term = term @ hL / k
        M = M + term
    return M


def _integrate(L, rho0, times, step, validate=True):
    d = rho0.shape[0]
    y = rho0.reshape(-1).astype(complex)
    states = [rho0.copy()]
    diags = [validate_density_matrix(rho0, float(times[0])) if validate else {}]
    cache = {}
    for t0, t1 in zip(times[:-1], times[1:]):
        n = max(1, int(np.ceil((t1 - t0) / step - 1e-9)))
        h = (t1 - t0) / n
        key = round(h, 15)
        if key not in cache:
            cache[key] = _rk4_matrix(L, h)
        M = cache[key]
        for _ in range(n):
            y = M @ y
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at t={t1:.6g}", float(t1))
        rho = y.reshape(d, d)
        states.append(rho.copy())
        if validate:
            diags.append(validate_density_matrix(rho, float(t1)))
    return np.array(states), diags


def trace_distance(rho, sigma) -> float:
    D = rho - sigma
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (D + D.conj().T)))))


def evolve_master_equation(rho0, H, collapse_ops, t_grid, step: float | None = None,
                           check_halving: bool = True) -> MasterEquationResult:
    """Fixed-step RK4 integration of the Lindblad equation.

    Snapshots are taken at ``t_grid``; each is checked for unit trace,
    hermiticity and positivity. The step defaults to ``0.01 / s`` where ``s``
    bounds the generator (spectral norm of ``H`` or the total decay rate) and
    must not exceed ``0.05 / s``. With ``check_halving`` the run is repeated at
    half the step and the largest trace distance between the two is reported.
    """
    H, ops = _check_ops(H, collapse_ops)
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != H.shape:
        raise PreconditionError(f"rho0 shape {rho0.shape} does not match H {H.shape}")
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) <= 0):
        raise PreconditionError("time grid must be strictly ascending")
    scale = rate_scale(H, ops)
    if step is None:
        step = DEFAULT_STEP_FACTOR / scale if scale > 0 else float(times[-1] - times[0]) or 1.0
    elif scale > 0 and step > MAX_STEP_FACTOR / scale * (1 + 1e-12):
        raise PreconditionError(
            f"step {step:.4g} too large; must be <= {MAX_STEP_FACTOR / scale:.4g}"
        )
    L = lindblad_superoperator(H, ops)
    states, diags = _integrate(L, rho0, times, step)
    dist = None
    if check_halving:
        half, _ = _integrate(L, rho0, times, step / 2, validate=False)
        dist = max(trace_distance(a, b) for a, b in zip(states, half))
    return MasterEquationResult(times, states, step, tuple(diags), dist)


def network_space_hamiltonian(J: CouplingMatrix) -> np.ndarray:
    """Hopping Hamiltonian on ``{|0>, |1>, ..., |N>}``."""
    H = np.zeros((J.N + 1, J.N + 1), dtype=complex)
    H[1:, 1:] = J.J
    return H


def network_collapse_ops(N: int, rates: LindbladParams) -> list:
    d = N + 1
    ops = []
    for i in range(1, N + 1):
        lower = np.zeros((d, d))
        lower[0, i] = 1.0
        ops.append((rates.gamma_relax, lower))
        z = -np.eye(d)
        z[i, i] = 1.0
        ops.append((rates.gamma_phi / 2.0, z))
    return ops


def sector_collapse_ops(sector: DispersiveSector1, rates: LindbladParams) -> list:
    """Cavity and qubit channels on the ``N + 2`` dimensional sector model."""
    N, d = sector.N, sector.dim
    a = np.zeros((d, d))
    a[0, sector.photon_index] = 1.0
    ops = [(rates.kappa, a)]
    for i in range(1, N + 1):
        lower = np.zeros((d, d))
        lower[0, i] = 1.0
        ops.append((rates.gamma_relax, lower))
        z = -np.eye(d)
        z[i, i] = 1.0
        ops.append((rates.gamma_phi / 2.0, z))
    return ops


@dataclass(frozen=True)
class DissipativeTrace:
    tau: np.ndarray
    F01: np.ndarray
    trace: np.ndarray
    purity: np.ndarray
    min_eig: np.ndarray
    halving_distance: float | None
    step: float


def dissipative_transfer(J: CouplingMatrix, rates: LindbladParams, tau_grid,
                         step: float | None = None, receiver: int | None = None,
                         check_halving: bool = True) -> DissipativeTrace:
    """Receiver excitation ``F(0,1)`` for an excitation injected at qubit 1."""
    N = J.N
    j = N if receiver is None else receiver
    if not 1 <= j <= N:
        raise PreconditionError(f"receiver {j} outside [1, {N}]")
    H = network_space_hamiltonian(J)
    rho0 = np.zeros_like(H)
    rho0[1, 1] = 1.0
    res = evolve_master_equation(rho0, H, network_collapse_ops(N, rates), tau_grid,
                                 step, check_halving)
    return DissipativeTrace(
        tau=res.times,
        F01=np.real(res.states[:, j, j]),
        trace=res.trace,
        purity=res.purity,
        min_eig=res.min_eig,
        halving_distance=res.halving_distance,
        step=res.step,
    )


def purcell_lifetime(params: PhysicalParams, Q: float) -> float:
    """Order-of-magnitude qubit lifetime ``(delta/Omega)^2 / kappa`` with ``kappa = omega_a/Q``.

    Returns the shortest lifetime over the qubits.
    """
    if not Q > 0:
        raise ParameterError("Q must be positive")
    if np.isinf(Q):
        return np.inf
    kappa = params.omega_a / Q
    return float(np.min((params.delta / params.Omega) ** 2) / kappa)


def measure_purcell_rate(sector: DispersiveSector1, kappa: float, t_max: float,
                         n_points: int = 201, step: float | None = None) -> float:
    """Per-qubit decay rate extracted from a cavity-only master-equation run.

    Requires identical Rabi frequencies and detunings: an excitation starting
    on qubit 1 then has weight ``1/N`` on the one bright mode, and the qubit
    population ``P`` obeys ``N P - (N - 1) = exp(-N Gamma t)``.
    """
    p = sector.params
    if not (np.allclose(p.Omega, p.Omega[0]) and np.allclose(p.delta, p.delta[0])):
        raise PreconditionError("measure_purcell_rate needs identical qubits")
    N = sector.N
    rho0 = np.zeros((sector.dim, sector.dim), dtype=complex)
    rho0[1, 1] = 1.0
    t = np.linspace(0.0, t_max, n_points)
    res = evolve_master_equation(rho0, sector.H,
                                 sector_collapse_ops(sector, LindbladParams(kappa=kappa)),
                                 t, step, check_halving=False)
    P = np.real(np.einsum("tii->t", res.states[:, 1:N + 1, 1:N + 1]))
    y = np.log(N * P - (N - 1))
    slope = np.polyfit(t, y, 1)[0]
    return float(-slope / N)
