"""Dense Hermitian linear algebra on small matrices.

Eigenvalues are always reported in non-increasing order and every
eigenvector column carries a fixed phase: its largest-modulus entry is real
and positive (ties go to the lowest index).  This makes eigenvectors, and
everything built from them, reproducible across runs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateEigenvalue,
    EigenConvergenceError,
    IndexOutOfRange,
    NotAProjection,
)

SIMPLICITY_RTOL = 1e-8
PROJECTION_TOL = 1e-10
_PHASE_TIE_TOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigendecomposition of a Hermitian matrix.

    ``eigenvalues[j]`` pairs with column ``eigenvectors[:, j]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    norm: float

    @property
    def dim(self):
        return len(self.eigenvalues)

    def reconstruct(self):
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def gap(self, j):
        """Distance from eigenvalue ``j`` (1-based) to its nearest neighbour."""
        lam = self.eigenvalues
        k = j - 1
        gaps = []
        if k > 0:
            gaps.append(lam[k - 1] - lam[k])
        if k < len(lam) - 1:
            gaps.append(lam[k] - lam[k + 1])
        return min(gaps) if gaps else np.inf

    def is_simple(self, j):
        return self.gap(j) > SIMPLICITY_RTOL * max(1.0, self.norm)


def hermitize(A):
    A = np.asarray(A)
    return 0.5 * (A + A.conj().T)


def fix_phases(U):
    """Rotate each column so its largest-modulus entry is real positive."""
    U = np.array(U, copy=True)
    for j in range(U.shape[1]):
        col = U[:, j]
        mod = np.abs(col)
        top = mod.max()
        if top == 0:
            continue
        k = int(np.flatnonzero(mod >= top - _PHASE_TIE_TOL * top)[0])
        phase = col[k] / mod[k]
        U[:, j] = col / phase
        if np.isrealobj(U):
            continue
        U[k, j] = abs(U[k, j])
    return U


def eig_hermitian(A):
    """Eigendecomposition with non-increasing eigenvalues.

    Real symmetric input (no imaginary part at all) is diagonalised in real
    arithmetic so that degenerate eigenspaces also get real bases.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    A = hermitize(A)
    if np.iscomplexobj(A) and not np.any(A.imag):
        A = A.real
    try:
        lam, U = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(A) if np.all(np.isfinite(A)) else np.inf
        raise EigenConvergenceError(
            f"Hermitian eigensolver did not converge: {exc}",
            condition_number=cond,
            norm=float(np.linalg.norm(A)),
        ) from exc
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    U = fix_phases(U[:, order])
    norm = float(np.max(np.abs(lam))) if len(lam) else 0.0
    return Spectrum(lam, U, norm)


def spectral_projection(s: Spectrum, j: int) -> np.ndarray:
    """Orthogonal projection onto the eigenline of eigenvalue ``j`` (1-based)."""
    if not 1 <= j <= s.dim:
        raise IndexOutOfRange(f"eigenvalue index {j} outside 1..{s.dim}")
    if not s.is_simple(j):
        raise DegenerateEigenvalue(
            f"eigenvalue {j} is not simple (gap {s.gap(j):.3e})",
            index=j,
            gap=s.gap(j),
        )
    u = s.eigenvectors[:, j - 1]
    return np.outer(u, u.conj())


def unitary_exp_projection(E, t):
    """exp(i t E) for a projection E, in closed form I + (e^{it} - 1) E."""
    E = np.asarray(E, dtype=complex)
    d = E.shape[0]
    if np.linalg.norm(E @ E - E) > PROJECTION_TOL * max(1.0, np.linalg.norm(E)):
        raise NotAProjection("matrix is not idempotent")
    return np.eye(d, dtype=complex) + (np.exp(1j * t) - 1.0) * E


def commutator(X, Y):
    return X @ Y - Y @ X


def hermitian_basis(d):
    """Orthonormal basis of d x d Hermitian matrices for <X, Y> = Re Tr(XY)."""
    basis = []
    for a in range(d):
        B = np.zeros((d, d), dtype=complex)
        B[a, a] = 1.0
        basis.append(B)
    s = 1.0 / np.sqrt(2.0)
    for a in range(d):
        for b in range(a + 1, d):
            B = np.zeros((d, d), dtype=complex)
            B[a, b] = B[b, a] = s
            basis.append(B)
            C = np.zeros((d, d), dtype=complex)
            C[a, b] = 1j * s
            C[b, a] = -1j * s
            basis.append(C)
    return np.array(basis)


def traceless_hermitian_basis(d):
    """Orthonormal basis of the (d^2 - 1)-dimensional traceless Hermitian space."""
    full = hermitian_basis(d)
    # Replace the diagonal units by an orthonormal basis of traceless diagonals.
    diag = []
    for k in range(1, d):
        v = np.zeros(d)
        v[:k] = 1.0
        v[k] = -k
        v /= np.linalg.norm(v)
        diag.append(np.diag(v).astype(complex))
    return np.array(diag + list(full[d:])).reshape(-1, d, d)


def random_unitary(d, rng):
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])
