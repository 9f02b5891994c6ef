"""Closed-form spectra and transfer fidelities of the cluster and engineered networks.

These are analytic oracles for the numeric path in :mod:`xynet.numerics`.
All energies are in units of the coupling ``x`` passed in; times ``t`` are in
the inverse of those units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PreconditionError
from .network import CouplingMatrix, TopologySpec, topology_to_couplings
from .numerics import SpectralDecomposition, gram_schmidt


def _basis(N: int, i: int) -> np.ndarray:
    e = np.zeros(N, dtype=complex)
    e[i] = 1.0
    return e


def _assemble(pairs, J: CouplingMatrix) -> SpectralDecomposition:
    pairs = sorted(pairs, key=lambda p: p[0])
    ev = np.array([p[0] for p in pairs], dtype=float)
    V = np.column_stack([p[1] for p in pairs]).astype(complex)
    R = J.J @ V - V * ev
    return SpectralDecomposition(ev, V, float(np.max(np.linalg.norm(R, axis=0))))


def cluster_spectrum(N: int, x: float) -> SpectralDecomposition:
    """Spectrum of ``N`` equally coupled qubits: ``-x`` (N-1 fold) and ``(N-1) x``."""
    if N < 2:
        raise PreconditionError(f"N must be >= 2, got {N}")
    if x == 0:
        raise ParameterError("x must be nonzero")
    degenerate, _ = gram_schmidt([_basis(N, i) - _basis(N, 0) for i in range(1, N)])
    pairs = [(-x, v) for v in degenerate]
    pairs.append(((N - 1) * x, np.ones(N, dtype=complex) / np.sqrt(N)))
    return _assemble(pairs, topology_to_couplings(TopologySpec("cluster", x=x), N))


def cluster_transfer_probability(N: int, tau):
    """``|<N|U|1>|^2 = (2/N^2)(1 - cos(N tau))`` for the equal-coupling cluster."""
    if N < 2:
        raise PreconditionError(f"N must be >= 2, got {N}")
    return 2.0 / N**2 * (1.0 - np.cos(N * np.asarray(tau)))


@dataclass(frozen=True)
class EngineeredLevels:
    """Labelled closed-form levels relevant to ``1 -> N`` transfer.

    ``eps_anti`` belongs to ``(-|1> + |N>)/sqrt(2)``; ``eps_sym`` holds the
    two symmetric levels ``(e_{N-1}, e_{N-2})`` (``(e_1, e_2)`` when N = 3)
    with normalisations ``norms``. ``eps_degenerate`` is the (N-3)-fold level
    of states that do not touch the sender or receiver.
    """

    N: int
    x: float
    f: float
    eps_anti: float
    eps_sym: tuple
    norms: tuple
    eps_degenerate: float | None

    @property
    def fast_beat(self) -> float:
        return abs(self.eps_sym[0] - self.eps_sym[1])

    @property
    def slow_beat(self) -> float:
        """Smallest gap between the antisymmetric level and a symmetric one."""
        return min(abs(e - self.eps_anti) for e in self.eps_sym)


def engineered_levels(N: int, x: float, f: float) -> EngineeredLevels:
    if N < 3:
        raise PreconditionError(f"engineered spectrum needs N >= 3, got {N}")
    if not f > 1:
        raise ParameterError(f"f must exceed 1, got {f}")
    eps_anti = -x / f
    if N == 3:
        root = np.sqrt(1.0 + 8.0 * f * f)
        e1 = x / (2.0 * f) * (1.0 - root)
        e2 = x / (2.0 * f) * (1.0 + root)
        # the |2> coefficient of psi_1 is -e2/x, hence the swapped index
        n1 = x / np.sqrt(2.0 * x * x + e2 * e2)
        n2 = x / np.sqrt(2.0 * x * x + e1 * e1)
        return EngineeredLevels(N, x, f, eps_anti, (e1, e2), (n1, n2), None)
    a = 1.0 + (N - 3) * f * f
    root = np.sqrt(1.0 + 4.0 * (N - 1) * f * f / a**2)
    # k = 1 takes the + branch so that its normalisation vanishes as f grows
    eps = (a / (2.0 * f) * (1.0 + root) * x, a / (2.0 * f) * (1.0 - root) * x)
    norms = tuple(
        x * (N - 2) / np.sqrt(2.0 * (N - 2) ** 2 * x * x + (eps_anti + e) ** 2 * (N - 2))
        for e in eps
    )
    return EngineeredLevels(N, x, f, eps_anti, eps, norms, -f * x)


def engineered_spectrum(N: int, x: float, f: float) -> SpectralDecomposition:
    """Full closed-form decomposition for the ``engineered`` topology.

    The N-3 degenerate eigenvectors (supported on the intermediate qubits,
    orthogonal to their uniform combination) are filled in by Gram-Schmidt.
    """
    lv = engineered_levels(N, x, f)
    first, last = _basis(N, 0), _basis(N, N - 1)
    pairs = [(lv.eps_anti, (last - first) / np.sqrt(2.0))]
    if N == 3:
        e1, e2 = lv.eps_sym
        for e, other, nrm in ((e1, e2, lv.norms[0]), (e2, e1, lv.norms[1])):
            pairs.append((e, nrm * (first - (other / x) * _basis(N, 1) + last)))
    else:
        middle = sum(_basis(N, i) for i in range(1, N - 1))
        for e, nrm in zip(lv.eps_sym, lv.norms):
            c = (lv.eps_anti + e) / (x * (N - 2))
            pairs.append((e, nrm * (first + last + c * middle)))
        degenerate, _ = gram_schmidt(
            [_basis(N, i) - _basis(N, 1) for i in range(2, N - 1)]
        )
        pairs.extend((lv.eps_degenerate, v) for v in degenerate)
    spec = TopologySpec("engineered", x=x, f=f)
    return _assemble(pairs, topology_to_couplings(spec, N))


def weak_link_spectrum(N: int, x: float, f: float) -> SpectralDecomposition:
    """Closed-form decomposition for the ``weak_link`` topology.

    Symmetric levels solve ``(e - x/f)(e - (N-3) x) = 2 (N-2) x^2``; the
    degenerate level is ``-x``.
    """
    if N < 3:
        raise PreconditionError(f"weak-link spectrum needs N >= 3, got {N}")
    if not f > 1:
        raise ParameterError(f"f must exceed 1, got {f}")
    b = (N - 3) + 1.0 / f
    c0 = (N - 3) / f - 2.0 * (N - 2)
    disc = np.sqrt(b * b - 4.0 * c0)
    first, last = _basis(N, 0), _basis(N, N - 1)
    middle = sum(_basis(N, i) for i in range(1, N - 1))
    pairs = [(-x / f, (last - first) / np.sqrt(2.0))]
    for e in (0.5 * (b - disc) * x, 0.5 * (b + disc) * x):
        v = first + last + (e - x / f) / (x * (N - 2)) * middle
        pairs.append((e, v / np.linalg.norm(v)))
    degenerate, _ = gram_schmidt([_basis(N, i) - _basis(N, 1) for i in range(2, N - 1)])
    pairs.extend((-x, v) for v in degenerate)
    spec = TopologySpec("weak_link", x=x, f=f)
    return _assemble(pairs, topology_to_couplings(spec, N))


def closed_form_amplitude(t, x: float, f: float, N: int = 3):
    """``<N|U(t)|1>`` for the engineered network from its three contributing levels."""
    lv = engineered_levels(N, x, f)
    t = np.asarray(t, dtype=float)
    (e1, e2), (n1, n2) = lv.eps_sym, lv.norms
    return (
        -0.5 * np.exp(-1j * lv.eps_anti * t)
        + n1**2 * np.exp(-1j * e1 * t)
        + n2**2 * np.exp(-1j * e2 * t)
    )


def closed_form_fidelity(t, x: float, f: float, N: int = 3):
    """``F(0,1)`` as an interference sum over the three contributing levels."""
    lv = engineered_levels(N, x, f)
    t = np.asarray(t, dtype=float)
    (e1, e2), (n1, n2) = lv.eps_sym, lv.norms
    e0 = lv.eps_anti
    return (
        0.25
        + 2.0 * n1**2 * n2**2 * np.cos((e2 - e1) * t)
        + n1**4 - n1**2 * np.cos((e1 - e0) * t)
        + n2**4 - n2**2 * np.cos((e2 - e0) * t)
    )


def closed_form_fidelity_n3(t, x: float, f: float):
    return closed_form_fidelity(t, x, f, N=3)


def optimal_transfer_time(f: float) -> float:
    """Dimensionless time ``2 f pi / sqrt(1 + 8 f^2)`` of the first N = 3 transfer peak."""
    if not f > 1:
        raise ParameterError(f"f must exceed 1, got {f}")
    if np.isinf(f):
        return np.pi / np.sqrt(2.0)
    return 2.0 * f * np.pi / np.sqrt(1.0 + 8.0 * f * f)
