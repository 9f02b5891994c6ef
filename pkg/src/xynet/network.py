"""Coupling matrices and excitation-sector Hamiltonians of the XY network.

Conventions
-----------
* Sites are labelled ``1..N`` in user-facing arguments; arrays are 0-based.
* ``J[i, j]`` is the single-excitation hopping matrix element between
  ``|i>`` and ``|j>``; spectra and times are quoted in units of a reference
  coupling ``x`` (``tau = x t``).
* Qubit states are ``|->`` (ground, bit 0) and ``|+>`` (excited, bit 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .errors import ParameterError, PreconditionError, SizeError

DISPERSIVE_WARN_RATIO = 0.2
SECTOR_SIZE_CAP = 4096


@dataclass(frozen=True)
class PhysicalParams:
    """Cavity frequency, qubit energies and Rabi frequencies (rad/s, hbar = 1)."""

    omega_a: float
    E_q: np.ndarray
    Omega: np.ndarray

    def __post_init__(self):
        E_q = np.atleast_1d(np.asarray(self.E_q, dtype=float))
        Omega = np.atleast_1d(np.asarray(self.Omega, dtype=float))
        if E_q.shape != Omega.shape or E_q.ndim != 1:
            raise PreconditionError("E_q and Omega must be 1-D of equal length")
        if np.any(Omega <= 0):
            raise PreconditionError("all Rabi frequencies must be positive")
        delta = self.omega_a - E_q
        if np.any(delta == 0):
            raise PreconditionError("detunings must be nonzero")
        if np.any(np.sign(delta) != np.sign(delta[0])):
            raise PreconditionError("detunings must share one sign")
        object.__setattr__(self, "E_q", E_q)
        object.__setattr__(self, "Omega", Omega)

    @classmethod
    def from_detunings(cls, omega_a, delta, Omega):
        delta = np.broadcast_to(np.asarray(delta, dtype=float), np.shape(Omega))
        return cls(omega_a, omega_a - delta, Omega)

    @property
    def N(self) -> int:
        return len(self.Omega)

    @property
    def delta(self) -> np.ndarray:
        return self.omega_a - self.E_q

    @property
    def dispersive_ratio(self) -> float:
        return float(np.max(self.Omega / np.abs(self.delta)))

    @property
    def dispersive_warning(self) -> bool:
        return self.dispersive_ratio > DISPERSIVE_WARN_RATIO


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric zero-diagonal matrix of XY couplings.

    ``report`` lists pairs left uncoupled by :func:`effective_couplings`
    because their detunings differ.
    """

    J: np.ndarray
    report: tuple = field(default=(), compare=False)

    def __post_init__(self):
        J = np.array(self.J, dtype=float)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise PreconditionError(f"coupling matrix must be square, got {J.shape}")
        if J.shape[0] < 2:
            raise PreconditionError("coupling matrix needs N >= 2")
        if not np.allclose(J, J.T, rtol=0, atol=1e-12 * max(1.0, np.abs(J).max())):
            raise PreconditionError("coupling matrix must be symmetric")
        if np.any(np.diag(J) != 0):
            raise PreconditionError("coupling matrix must have zero diagonal")
        J.setflags(write=False)
        object.__setattr__(self, "J", J)

    @property
    def N(self) -> int:
        return self.J.shape[0]

    def scaled(self, x: float) -> "CouplingMatrix":
        """Express the couplings in units of ``x``."""
        return CouplingMatrix(self.J / x, self.report)


@dataclass(frozen=True)
class TopologySpec:
    """Direct description of a coupling graph.

    Variants:
        ``cluster``: every pair coupled with ``x``.
        ``engineered``: the sender-receiver link weakened to ``x/f``, the
            sender and receiver coupled to each intermediate qubit with ``x``,
            intermediate qubits coupled among themselves with ``f x``. This is
            the pattern produced by Rabi frequencies ``(W, fW, ..., fW, W)``
            and the one whose spectrum has a closed form (see
            :mod:`xynet.spectra`). For ``N = 3`` it is the weak-link triangle.
        ``weak_link``: every pair coupled with ``x`` except ``J_1N = x/f``.
        ``custom``: an explicit matrix ``J``.
    """

    variant: str
    x: float = 1.0
    f: float = 5.0
    J: np.ndarray | None = None

    VARIANTS = ("cluster", "engineered", "weak_link", "custom")

    def __post_init__(self):
        if self.variant not in self.VARIANTS:
            raise ParameterError(
                f"unknown topology variant {self.variant!r}; expected one of {self.VARIANTS}"
            )
        if self.variant in ("engineered", "weak_link") and not self.f > 1:
            raise ParameterError(f"f must exceed 1, got {self.f}")
        if self.variant == "custom" and self.J is None:
            raise ParameterError("custom topology requires J")


def effective_couplings(params: PhysicalParams, tolerance: float = 1e-3) -> CouplingMatrix:
    """Dispersive couplings ``x_ij = Omega_i Omega_j / (2 delta)``.

    Pairs whose detunings differ by more than ``tolerance`` (relative) are
    left uncoupled and listed in the returned matrix's ``report``.
    """
    if params.N < 2:
        raise PreconditionError("effective couplings need N >= 2")
    W, d = params.Omega, params.delta
    N = params.N
    J = np.zeros((N, N))
    report = []
    for i, j in combinations(range(N), 2):
        if abs(d[i] - d[j]) <= tolerance * max(abs(d[i]), abs(d[j])):
            # common detunings: 2 * mean(delta_i, delta_j) = delta_i + delta_j
            J[i, j] = J[j, i] = W[i] * W[j] / (d[i] + d[j])
        else:
            report.append((i + 1, j + 1, f"detunings {d[i]:.6g} and {d[j]:.6g} differ"))
    return CouplingMatrix(J, tuple(report))


def engineered_rabi_profile(N: int, f: float) -> np.ndarray:
    """Relative Rabi frequencies ``(1, f, ..., f, 1)`` realising the engineered topology."""
    if N < 2:
        raise PreconditionError("N must be >= 2")
    w = np.full(N, float(f))
    w[0] = w[-1] = 1.0
    return w


def topology_to_couplings(spec: TopologySpec, N: int) -> CouplingMatrix:
    if N < 2:
        raise PreconditionError(f"N must be >= 2, got {N}")
    x = spec.x
    if spec.variant == "custom":
        cm = CouplingMatrix(spec.J)
        if cm.N != N:
            raise PreconditionError(f"custom J has N={cm.N}, expected {N}")
        return cm
    J = x * (np.ones((N, N)) - np.eye(N))
    if spec.variant == "engineered":
        J[1:-1, 1:-1] *= spec.f
        J[0, -1] = J[-1, 0] = x / spec.f
    elif spec.variant == "weak_link":
        J[0, -1] = J[-1, 0] = x / spec.f
    return CouplingMatrix(J)


def single_excitation_hamiltonian(J: CouplingMatrix) -> np.ndarray:
    """Hopping Hamiltonian in the basis ``|1>, ..., |N>`` (one excited qubit)."""
    return np.array(J.J, dtype=complex)


def sector_basis(N: int, ell: int) -> list[tuple[int, ...]]:
    """Excited-site tuples (0-based) spanning the sector, in lexicographic order."""
    return list(combinations(range(N), ell))


def sector_hamiltonian(J: CouplingMatrix, ell: int, cap: int = SECTOR_SIZE_CAP) -> np.ndarray:
    """Restriction of the XY Hamiltonian to states with ``ell`` excited qubits.

    The basis is :func:`sector_basis`; the element between two configurations
    related by moving one excitation from site ``i`` to site ``j`` is ``J_ij``.
    """
    N = J.N
    if not 0 <= ell <= N:
        raise PreconditionError(f"ell must lie in [0, {N}], got {ell}")
    dim = comb(N, ell)
    if dim > cap:
        raise SizeError(f"sector dimension {dim} exceeds cap {cap}")
    basis = sector_basis(N, ell)
    index = {cfg: k for k, cfg in enumerate(basis)}
    H = np.zeros((dim, dim), dtype=complex)
    for k, cfg in enumerate(basis):
        occ = set(cfg)
        for i in cfg:
            for j in range(N):
                if j in occ or J.J[i, j] == 0:
                    continue
                target = tuple(sorted((occ - {i}) | {j}))
                H[index[target], k] += J.J[i, j]
    return H


def sector_permutation(N: int) -> list[int]:
    """Register indices (qubit 1 = most significant bit) ordered sector by sector."""
    perm = []
    for ell in range(N + 1):
        for cfg in sector_basis(N, ell):
            perm.append(sum(1 << (N - 1 - i) for i in cfg))
    return perm
