"""Grassmannian side of the polygon space, and Hitchin Hamiltonians for m = 1.

A polygon is the (m+1) x n matrix N whose columns are ``sqrt(r_j) w_j``.
Then ``N N^*`` is the sum of the sides, and the leading k x k block of
``N^* N`` has the same nonzero eigenvalues as the diagonal A_{k-1}.

For m = 1 a traceless 2 x 2 Hermitian matrix is a vector in R^3:

    hat(x) = 1/2 [[x1, x2 + i x3], [x2 - i x3, -x1]]

so that ``x . y = 2 tr(hat(x) hat(y))`` and ``hat(x cross y) = i [hat(x), hat(y)]``
hold.  Sides of a closed polygon become a closed polygon in R^3.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .linalg import eig_hermitian
from .polygon import Polygon


def polygon_to_matrix(p: Polygon) -> np.ndarray:
    return (np.sqrt(p.r)[:, None] * p.w).T


def gt_block_values(N) -> list:
    """Eigenvalues (non-increasing) of the leading k x k blocks of N^* N, k = 1..n."""
    N = np.asarray(N)
    G = N.conj().T @ N
    return [eig_hermitian(G[:k, :k]).eigenvalues for k in range(1, G.shape[0] + 1)]


def compare_blocks_with_pattern(N, pattern):
    """Largest mismatch between block eigenvalues and the diagonal eigenvalues.

    Block k (size k) is compared with row k-1 after padding the shorter
    vector with zeros.
    """
    rows = pattern.as_array()
    worst = 0.0
    for k, gamma in enumerate(gt_block_values(N), start=1):
        lam = rows[k - 1]
        size = max(len(gamma), len(lam))
        a = np.zeros(size)
        b = np.zeros(size)
        a[: len(gamma)] = gamma
        b[: len(lam)] = lam
        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst


# --- the m = 1 Euclidean model ----------------------------------------------


def hat(x):
    x1, x2, x3 = (float(v) for v in x)
    return 0.5 * np.array([[x1, x2 + 1j * x3], [x2 - 1j * x3, -x1]])


def unhat(X):
    X = np.asarray(X)
    return np.array([2 * X[0, 0].real, 2 * X[0, 1].real, 2 * X[0, 1].imag])


@dataclass
class EuclideanPolygon:
    """n vectors in R^3; ``vectors`` has shape (n, 3)."""

    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        if self.vectors.ndim != 2 or self.vectors.shape[1] != 3:
            raise InvalidInput("expected an (n, 3) array of vectors")

    @property
    def n(self):
        return len(self.vectors)

    @property
    def lengths(self):
        return np.linalg.norm(self.vectors, axis=1)

    def closure_defect(self):
        return float(np.linalg.norm(self.vectors.sum(axis=0)))

    def to_json(self):
        return {"vectors": self.vectors.tolist()}


def to_euclidean(p: Polygon) -> EuclideanPolygon:
    """Traceless parts of the sides of an m = 1 polygon, as vectors."""
    if p.m != 1:
        raise InvalidInput("the Euclidean model needs m = 1")
    vecs = [unhat(e - 0.5 * np.trace(e).real * np.eye(2)) for e in p.edges()]
    return EuclideanPolygon(np.array(vecs))


def from_euclidean(ep: EuclideanPolygon) -> Polygon:
    """Rank-one sides r w w^* with r = |x| and traceless part hat(x)."""
    r = ep.lengths
    if np.any(r <= 0):
        raise InvalidInput("zero-length side has no direction")
    w = []
    for x, length in zip(ep.vectors, r):
        e = hat(x) + 0.5 * length * np.eye(2)
        spec = eig_hermitian(e)
        w.append(spec.eigenvectors[:, 0])
    return Polygon(1, r, np.array(w))


def random_closed_euclidean(n, rng, min_triple=None):
    """Random closed polygon in R^3 with unit-scale sides.

    If ``min_triple`` is given, redraw until |(e2 x e1) . e5| >= min_triple.
    """
    while True:
        v = rng.standard_normal((n, 3))
        v -= v.mean(axis=0)
        ep = EuclideanPolygon(v)
        if min_triple is None or abs(triple_product(ep)) >= min_triple:
            return ep


def triple_product(ep: EuclideanPolygon):
    e = ep.vectors
    return float(np.dot(np.cross(e[1], e[0]), e[4]))


def hitchin_hamiltonians(ep: EuclideanPolygon, alphas) -> np.ndarray:
    """H_j = sum_{i != j} e_i . e_j / (alpha_i - alpha_j)."""
    e = ep.vectors
    a = np.asarray(alphas, dtype=float)
    if len(a) != ep.n:
        raise InvalidInput("need one spectral point per side")
    G = e @ e.T
    H = np.zeros(ep.n)
    for j in range(ep.n):
        for i in range(ep.n):
            if i == j:
                continue
            if a[i] == a[j]:
                raise InvalidInput(
                    f"alpha_{i + 1} = alpha_{j + 1}; use the matrix polynomial instead"
                )
            H[j] += G[i, j] / (a[i] - a[j])
    return H


def hitchin_matrix(ep: EuclideanPolygon, alphas, z) -> np.ndarray:
    """A(z) = sum_i hat(e_i) prod_{k != i} (z - alpha_k), a polynomial in z."""
    a = np.asarray(alphas, dtype=float)
    out = np.zeros((2, 2), dtype=complex)
    for i, x in enumerate(ep.vectors):
        coeff = np.prod([z - a[k] for k in range(ep.n) if k != i])
        out = out + coeff * hat(x)
    return out


def bending_derivative_r3(ep: EuclideanPolygon, d) -> np.ndarray:
    """Velocity of each side under bending about the diagonal e_1 + ... + e_d."""
    e = ep.vectors
    if not 1 <= d <= ep.n:
        raise InvalidInput(f"diagonal length {d} outside 1..{ep.n}")
    axis = e[:d].sum(axis=0)
    out = np.zeros_like(e)
    out[:d] = np.cross(axis, e[:d])
    return out


def hamiltonian_rates(ep: EuclideanPolygon, alphas, d) -> np.ndarray:
    """dH_j/dt along the bend about e_1 + ... + e_d, by the chain rule.

    Pairs with equal alpha contribute nothing (their term is absent).
    """
    e = ep.vectors
    v = bending_derivative_r3(ep, d)
    a = np.asarray(alphas, dtype=float)
    n = ep.n
    rates = np.zeros(n)
    for j in range(n):
        for i in range(n):
            if i == j or a[i] == a[j]:
                continue
            rates[j] += (np.dot(v[i], e[j]) + np.dot(e[i], v[j])) / (a[i] - a[j])
    return rates


def rotate_about(ep: EuclideanPolygon, d, t) -> EuclideanPolygon:
    """Exact bending: rotate e_1..e_d about their sum by angle t |sum|."""
    e = ep.vectors.copy()
    axis = e[:d].sum(axis=0)
    norm = np.linalg.norm(axis)
    if norm == 0:
        return EuclideanPolygon(e)
    k = axis / norm
    theta = t * norm
    c, s = np.cos(theta), np.sin(theta)
    for idx in range(d):
        x = e[idx]
        e[idx] = x * c + np.cross(k, x) * s + k * np.dot(k, x) * (1 - c)
    return EuclideanPolygon(e)


def hitchin_invariance_report(ep: EuclideanPolygon, alphas) -> dict:
    """dH_j/dt along the two bends of a pentagon (diagonals e1+e2 and e1+e2+e3)."""
    if ep.n != 5:
        raise InvalidInput("the invariance report is for pentagons")
    table = {}
    for label, d in (("first_diagonal", 2), ("second_diagonal", 3)):
        table[label] = hamiltonian_rates(ep, alphas, d).tolist()
    return {
        "alphas": [float(x) for x in alphas],
        "triple_product": triple_product(ep),
        "rates": table,
    }
