"""Dense Hermitian eigensolver, spectral propagators and small ODE helpers.

Everything here works on plain ``numpy`` arrays. Matrices are assumed small
(a few dozen rows); the eigensolver is a cyclic complex Jacobi iteration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, NumericError, PreconditionError

HERMITIAN_RTOL = 1e-12
PHASE_TOL = 1e-8
DEGENERACY_RTOL = 1e-8


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-pairs of a Hermitian matrix.

    Attributes:
        eigenvalues: real eigenvalues in ascending order.
        eigenvectors: unitary matrix whose columns are the eigenvectors.
        residual: ``max_k ||H v_k - e_k v_k||_2`` measured on the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def hermitian_deviation(A: np.ndarray) -> float:
    A = np.asarray(A)
    return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0


def check_hermitian(A, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a complex square array, raising if it is not Hermitian."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] < 1:
        raise PreconditionError(f"{name} must have dimension >= 1")
    dev = hermitian_deviation(A)
    scale = max(1.0, float(np.max(np.abs(A))))
    if dev > HERMITIAN_RTOL * scale:
        raise PreconditionError(
            f"{name} is not Hermitian: max|A - A^H| = {dev:.3e}"
        )
    return A


def normalize_phase(v: np.ndarray, tol: float = PHASE_TOL) -> np.ndarray:
    """Rotate ``v`` so that its first entry with modulus above ``tol`` is real positive."""
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return v
    z = v[idx[0]]
    return v * (abs(z) / z)


def _lex_key(v: np.ndarray):
    return tuple(
        x for z in v for x in (round(float(z.real), 10), round(float(z.imag), 10))
    )


def group_degenerate(eigenvalues: Sequence[float], rtol: float = DEGENERACY_RTOL):
    """Split ascending eigenvalues into multiplets.

    Returns a list of index lists; neighbours closer than
    ``rtol * max(1, spread)`` share a multiplet.
    """
    ev = np.asarray(eigenvalues, dtype=float)
    if ev.size == 0:
        return []
    tol = rtol * max(1.0, float(ev.max() - ev.min()))
    groups = [[0]]
    for k in range(1, ev.size):
        if ev[k] - ev[groups[-1][-1]] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def herm_eig(H, max_sweeps: int = 100, tol: float = 1e-14) -> SpectralDecomposition:
    """Diagonalise a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``A[p, q]`` and then
    applies a real Jacobi rotation, so the iterate stays Hermitian with a real
    diagonal. Iteration stops once the off-diagonal Frobenius norm drops below
    ``tol * ||H||_F``.

    Output ordering is deterministic: ascending eigenvalues, ties (within the
    degeneracy tolerance) broken lexicographically on the phase-normalised
    eigenvectors.

    Raises:
        PreconditionError: if ``H`` is not Hermitian.
        ConvergenceError: if ``max_sweeps`` sweeps do not reach the threshold.
    """
    H = check_hermitian(H)
    n = H.shape[0]
    A = H.copy()
    V = np.eye(n, dtype=complex)
    norm_f = float(np.linalg.norm(A))
    thresh = tol * norm_f
    offdiag = ~np.eye(n, dtype=bool)

    def off_norm() -> float:
        return float(np.sqrt(np.sum(np.abs(A[offdiag]) ** 2))) if n > 1 else 0.0

    converged = off_norm() <= thresh
    sweep = 0
    while not converged and sweep < max_sweeps:
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                app, aqq = A[p, p].real, A[q, q].real
                zeta = (aqq - app) / (2.0 * r)
                t = 1.0 / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                if zeta < 0:
                    t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ph = np.conj(apq / r)
                G = np.array([[c, s], [-s * ph, c * ph]])
                cols = [p, q]
                A[:, cols] = A[:, cols] @ G
                A[cols, :] = G.conj().T @ A[cols, :]
                V[:, cols] = V[:, cols] @ G
                A[p, q] = A[q, p] = 0.0
                A[p, p] = app - t * r
                A[q, q] = aqq + t * r
        converged = off_norm() <= thresh

    eigenvalues = np.real(np.diag(A)).copy()
    if not converged:
        res = _residual(H, eigenvalues, V)
        raise ConvergenceError(
            f"Jacobi did not converge in {max_sweeps} sweeps "
            f"(off-diagonal norm {off_norm():.3e}, residual {res:.3e})",
            residual=res,
        )

    V = np.column_stack([normalize_phase(V[:, k]) for k in range(n)])
    order = list(np.argsort(eigenvalues, kind="stable"))
    eigenvalues, V = eigenvalues[order], V[:, order]
    order = []
    for grp in group_degenerate(eigenvalues):
        order.extend(sorted(grp, key=lambda k: _lex_key(V[:, k])))
    eigenvalues, V = eigenvalues[order], V[:, order]
    return SpectralDecomposition(eigenvalues, V, _residual(H, eigenvalues, V))


def _residual(H, eigenvalues, V) -> float:
    R = H @ V - V * eigenvalues
    return float(np.max(np.linalg.norm(R, axis=0))) if R.size else 0.0


def unitary_evolution(decomp: SpectralDecomposition, t: float) -> np.ndarray:
    """Return ``U(t) = sum_k exp(-i e_k t) |v_k><v_k|``."""
    V = decomp.eigenvectors
    return (V * np.exp(-1j * decomp.eigenvalues * t)) @ V.conj().T


def gram_schmidt(vectors, tol: float = 1e-12):
    """Orthonormalise ``vectors`` (modified Gram-Schmidt, two passes).

    Vectors whose norm after projection falls below ``tol`` are dropped.

    Returns:
        ``(basis, n_dropped)`` where ``basis`` is a list of 1-D complex arrays.
    """
    vectors = [np.asarray(v, dtype=complex) for v in vectors]
    if not vectors:
        return [], 0
    dim = vectors[0].shape
    if any(v.shape != dim for v in vectors):
        raise PreconditionError("gram_schmidt: vectors must share one dimension")
    basis: list[np.ndarray] = []
    dropped = 0
    for v in vectors:
        w = v.copy()
        for _ in range(2):
            for b in basis:
                w = w - np.vdot(b, w) * b
        nrm = np.linalg.norm(w)
        if nrm < tol:
            dropped += 1
            continue
        basis.append(w / nrm)
    return basis, dropped


def rk4_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of ``y' = f(y)``."""
    if not h > 0:
        raise PreconditionError(f"rk4_step: step must be positive, got {h}")

    def call(z):
        k = f(z)
        if not np.all(np.isfinite(k)):
            raise NumericError("rk4_step: derivative returned non-finite values")
        return k

    k1 = call(y)
    k2 = call(y + 0.5 * h * k1)
    k3 = call(y + 0.5 * h * k2)
    k4 = call(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
