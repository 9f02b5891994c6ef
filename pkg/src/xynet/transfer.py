"""Transfer amplitudes, receiver states and fidelity figures of merit.

Sites are 1-based. A sender prepared in ``beta|-> + gamma|+>`` with every
other qubit in ``|->`` keeps its ``|0>`` component frozen (the all-down state
has zero energy), so everything about the receiver follows from the single
complex amplitude ``a = <j|U(t)|1>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, PreconditionError, ResolutionError
from .numerics import SpectralDecomposition

CLASSICAL_BOUND = 2.0 / 3.0
AMPLITUDE_TOL = 1e-12
MODES = ("raw", "phase_optimized")


@dataclass(frozen=True)
class InputState:
    beta: complex
    gamma: complex

    def __post_init__(self):
        norm = abs(self.beta) ** 2 + abs(self.gamma) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise PreconditionError(f"input state not normalised: |beta|^2+|gamma|^2 = {norm}")

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "InputState":
        """``cos(theta/2)|+> + exp(i phi) sin(theta/2)|->``."""
        return cls(np.exp(1j * phi) * np.sin(theta / 2), complex(np.cos(theta / 2)))

    @property
    def vector(self) -> np.ndarray:
        """Components over ``(|->, |+>)``."""
        return np.array([self.beta, self.gamma], dtype=complex)


@dataclass(frozen=True)
class ReceiverState:
    """2x2 density matrix of the receiver over ``(|->, |+>)``."""

    rho: np.ndarray


def _site(decomp: SpectralDecomposition, site: int) -> int:
    if not 1 <= site <= decomp.dim:
        raise PreconditionError(f"site {site} outside [1, {decomp.dim}]")
    return site - 1


def transfer_weights(decomp: SpectralDecomposition, from_site: int, to_site: int) -> np.ndarray:
    """``<j|v_k><v_k|i>`` for every eigenvector ``v_k``."""
    i, j = _site(decomp, from_site), _site(decomp, to_site)
    V = decomp.eigenvectors
    return V[j, :] * V[i, :].conj()


def transition_amplitude(decomp: SpectralDecomposition, from_site: int, to_site: int, t):
    """``<to|U(t)|from> = sum_k exp(-i e_k t) <to|v_k><v_k|from>``; ``t`` may be an array."""
    w = transfer_weights(decomp, from_site, to_site)
    t = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(t, decomp.eigenvalues))
    return phases @ w


def receiver_state(a: complex, state: InputState) -> ReceiverState:
    """Reduced state of the receiver given the transfer amplitude ``a``."""
    if abs(a) > 1.0 + AMPLITUDE_TOL:
        raise ConsistencyError(f"|a| = {abs(a)} exceeds 1")
    pp = abs(state.gamma) ** 2 * abs(a) ** 2
    pm = state.gamma * a * np.conj(state.beta)
    rho = np.array([[1.0 - pp, np.conj(pm)], [pm, pp]], dtype=complex)
    return ReceiverState(rho)


def fidelity(state: InputState, receiver: ReceiverState) -> float:
    psi = state.vector
    return float(np.real(psi.conj() @ receiver.rho @ psi))


def average_fidelity(a, mode: str = "raw"):
    """Bloch-sphere average of the transfer fidelity for amplitude ``a``.

    ``raw`` keeps the phase of ``a``; ``phase_optimized`` assumes the
    receiver undoes it with a known local z-rotation.
    """
    a = np.asarray(a)
    if np.any(np.abs(a) > 1.0 + AMPLITUDE_TOL):
        raise ConsistencyError("amplitude modulus exceeds 1")
    if mode == "raw":
        coherent = np.real(a)
    elif mode == "phase_optimized":
        coherent = np.abs(a)
    else:
        raise PreconditionError(f"mode must be one of {MODES}, got {mode!r}")
    return 0.5 + np.abs(a) ** 2 / 6.0 + coherent / 3.0


def bloch_average_quadrature(a: complex, n_theta: int = 64, n_phi: int = 64) -> float:
    """Average of :func:`fidelity` over input states by direct quadrature.

    Gauss-Legendre in ``cos(theta)`` times a uniform rule in ``phi``; serves as
    an independent check of :func:`average_fidelity`.
    """
    z, wz = np.polynomial.legendre.leggauss(n_theta)
    phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
    total = 0.0
    for zk, wk in zip(z, wz):
        theta = np.arccos(zk)
        acc = 0.0
        for phi in phis:
            s = InputState.from_bloch(theta, phi)
            acc += fidelity(s, receiver_state(a, s))
        total += wk * acc / n_phi
    return total / 2.0


@dataclass(frozen=True)
class TransferTrace:
    """Transfer observables sampled on a grid of dimensionless times."""

    tau: np.ndarray
    amplitude: np.ndarray
    F01: np.ndarray
    Fbar_raw: np.ndarray
    Fbar_phase_opt: np.ndarray
    sender: int
    receiver: int
    fast_beat: float
    mode: str = "raw"

    @property
    def Fbar(self) -> np.ndarray:
        return self.Fbar_raw if self.mode == "raw" else self.Fbar_phase_opt

    @property
    def above_classical(self) -> np.ndarray:
        return self.Fbar > CLASSICAL_BOUND

    def classical_crossings(self) -> list[float]:
        """Times where ``Fbar`` crosses 2/3 (linear interpolation between samples)."""
        above = self.above_classical
        idx = np.flatnonzero(above[1:] != above[:-1])
        out = []
        g = self.Fbar - CLASSICAL_BOUND
        for k in idx:
            t0, t1, g0, g1 = self.tau[k], self.tau[k + 1], g[k], g[k + 1]
            out.append(float(t0 - g0 * (t1 - t0) / (g1 - g0)) if g1 != g0 else float(t0))
        return out

    def peak(self):
        k = int(np.argmax(self.F01))
        return float(self.F01[k]), float(self.tau[k])


def _fast_beat(decomp, from_site, to_site) -> float:
    w = transfer_weights(decomp, from_site, to_site)
    ev = decomp.eigenvalues[np.abs(w) > 1e-12]
    return float(ev.max() - ev.min()) if ev.size else 0.0


def transfer_trace(decomp: SpectralDecomposition, from_site: int, to_site: int,
                   tau_grid, mode: str = "raw") -> TransferTrace:
    if mode not in MODES:
        raise PreconditionError(f"mode must be one of {MODES}, got {mode!r}")
    tau = np.asarray(tau_grid, dtype=float)
    if tau.ndim != 1 or tau.size < 2 or np.any(np.diff(tau) <= 0):
        raise PreconditionError("tau grid must be strictly ascending with >= 2 points")
    a = transition_amplitude(decomp, from_site, to_site, tau)
    # |a| can overshoot 1 by rounding only
    a = np.where(np.abs(a) > 1.0, a / np.abs(a), a)
    return TransferTrace(
        tau=tau,
        amplitude=a,
        F01=np.abs(a) ** 2,
        Fbar_raw=average_fidelity(a, "raw"),
        Fbar_phase_opt=average_fidelity(a, "phase_optimized"),
        sender=from_site,
        receiver=to_site,
        fast_beat=_fast_beat(decomp, from_site, to_site),
        mode=mode,
    )


def intermediate_transfer(decomp: SpectralDecomposition, j: int, tau_grid,
                          mode: str = "raw") -> TransferTrace:
    """Trace for the ``1 -> j`` process on the same network."""
    if not 2 <= j <= decomp.dim:
        raise PreconditionError(f"receiver {j} outside [2, {decomp.dim}]")
    return transfer_trace(decomp, 1, j, tau_grid, mode)


@dataclass(frozen=True)
class OscillationMetrics:
    F_m: float
    A: float
    window: tuple
    envelope_peak: float


def required_steps(fast_beat: float, tau_max: float, points_per_period: int = 20) -> int:
    """Grid size on ``[0, tau_max]`` giving ``points_per_period`` samples per fast period."""
    if fast_beat <= 0:
        return 2
    period = 2.0 * np.pi / fast_beat
    return int(np.ceil(points_per_period * tau_max / period)) + 1


def oscillation_metrics(trace: TransferTrace, slow_window=None,
                        points_per_period: int = 20) -> OscillationMetrics:
    """Midpoint and semi-amplitude of the fast oscillations of ``F(0,1)``.

    The slow envelope is a moving average of ``F01`` over one fast period;
    its maximum inside ``slow_window`` (default: the whole trace) fixes a
    one-period window in which ``F_m = (max + min)/2`` and ``A = (max - min)/2``.
    """
    tau, F = trace.tau, trace.F01
    if trace.fast_beat <= 0:
        return OscillationMetrics(float(F.mean()), 0.0, (float(tau[0]), float(tau[-1])),
                                  float(tau[0]))
    period = 2.0 * np.pi / trace.fast_beat
    step = float(np.max(np.diff(tau)))
    if step > period / points_per_period * (1 + 1e-9):
        raise ResolutionError(
            f"grid step {step:.4g} too coarse; need <= {period / points_per_period:.4g} "
            f"({points_per_period} points per fast period {period:.4g})"
        )
    m = max(1, int(round(period / float(np.median(np.diff(tau))))))
    if m > F.size:
        raise ResolutionError(f"trace shorter than one fast period ({period:.4g})")
    h = m // 2
    env = np.convolve(F, np.ones(m) / m, mode="valid")
    centers = np.arange(env.size) + h
    lo, hi = slow_window if slow_window is not None else (tau[0], tau[-1])
    ok = (tau[centers] >= lo) & (tau[centers] <= hi)
    if not np.any(ok):
        raise ResolutionError(f"slow window {(lo, hi)} contains no full fast period")
    k = centers[ok][np.argmax(env[ok])]
    seg = F[max(0, k - h): k + h + 1]
    fmax, fmin = float(seg.max()), float(seg.min())
    return OscillationMetrics(
        F_m=0.5 * (fmax + fmin),
        A=0.5 * (fmax - fmin),
        window=(float(tau[max(0, k - h)]), float(tau[min(F.size - 1, k + h)])),
        envelope_peak=float(tau[k]),
    )
