"""Bending flows, angle variables and finite-difference Poisson brackets.

Bending along the j-th eigenline of the diagonal A_i rotates the first i+1
sides by ``exp(i t E_j(A_i))`` and leaves the others alone.  The angle
conjugate to it is the argument of a four-point function of the two sides
meeting at that diagonal and two neighbouring eigenvectors.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, StrictInterlacingViolation, ZeroVector
from .linalg import SIMPLICITY_RTOL, eig_hermitian, hermitian_basis, spectral_projection, unitary_exp_projection
from .polygon import Polygon, closure_defect
from .spectral import action_index_set, action_values, diagonals, mu_values

__all__ = [
    "FlowSpec",
    "AngleSet",
    "bend",
    "four_point",
    "angle_values",
    "mu_values",
    "wrap_angle",
    "poisson_bracket_fd",
    "gradients_fd",
    "bracket_from_gradients",
    "bracket_table",
    "ActionAngleObservables",
    "flow_trajectory",
    "trajectory_csv",
]


@dataclass(frozen=True)
class FlowSpec:
    """Bend along eigenvalue j (1-based) of diagonal i, for time t."""

    i: int
    j: int
    t: float


def _check_flow_index(n, m, i, j):
    if not 1 <= i <= n - 3:
        raise IndexOutOfRange(f"diagonal index i={i} outside 1..{n - 3}")
    if not 1 <= j <= m + 1:
        raise IndexOutOfRange(f"eigenvalue index j={j} outside 1..{m + 1}")


def bend(p: Polygon, flow: FlowSpec) -> Polygon:
    """Apply the bending flow; sides past i+1 are copied bit for bit."""
    _check_flow_index(p.n, p.m, flow.i, flow.j)
    A = diagonals(p)[flow.i]
    E = spectral_projection(eig_hermitian(A), flow.j)
    U = unitary_exp_projection(E, flow.t)
    w = p.w.copy()
    k = flow.i + 1
    w[:k] = w[:k] @ U.T
    return Polygon(p.m, p.r.copy(), w)


def wrap_angle(x):
    """Map angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


def four_point(a, b, c, d):
    """(a,b)(b,c)(c,d)(d,a) / (|a|^2 |b|^2 |c|^2 |d|^2) with (x,y) = y^* x."""
    vecs = [np.asarray(v, dtype=complex) for v in (a, b, c, d)]
    norms = [np.vdot(v, v).real for v in vecs]
    if min(norms) == 0:
        raise ZeroVector("four-point function needs nonzero vectors")
    a, b, c, d = vecs
    num = np.vdot(b, a) * np.vdot(c, b) * np.vdot(d, c) * np.vdot(a, d)
    return complex(num / np.prod(norms))


@dataclass
class AngleSet:
    theta: dict
    beta: dict

    def to_json(self):
        return {
            "theta": [{"i": i, "j": j, "value": float(v)} for (i, j), v in sorted(self.theta.items())],
            "beta": [
                {"i": i, "j": j, "re": float(v.real), "im": float(v.imag)}
                for (i, j), v in sorted(self.beta.items())
            ],
        }


def _betas(A_list, w, index_set, check=True):
    """Four-point values for each (i, j), from diagonals and side directions."""
    out = {}
    cache = {}
    for i, j in index_set:
        if i not in cache:
            cache[i] = eig_hermitian(A_list[i]) if check else _fast_eig(A_list[i])
        spec = cache[i]
        if check:
            for jj in (j, j + 1):
                if not spec.is_simple(jj):
                    raise StrictInterlacingViolation(
                        f"eigenvalue {jj} of diagonal {i} is not simple",
                        i=i,
                        j=j,
                        gap=spec.gap(jj),
                    )
        U = spec.eigenvectors
        out[(i, j)] = four_point(w[i], U[:, j - 1], w[i + 1], U[:, j])
    return out


class _Eig:
    __slots__ = ("eigenvalues", "eigenvectors")

    def __init__(self, lam, U):
        self.eigenvalues = lam
        self.eigenvectors = U


def _fast_eig(A):
    lam, U = np.linalg.eigh(A)
    return _Eig(lam[::-1], U[:, ::-1])


def angle_values(p: Polygon, index_set=None) -> AngleSet:
    """theta_ij = arg beta_ij over the action index set."""
    if index_set is None:
        index_set = action_index_set(p.n, p.m)
    beta = _betas(diagonals(p), p.w, index_set)
    for (i, j), b in beta.items():
        if abs(b) <= SIMPLICITY_RTOL:
            raise StrictInterlacingViolation(f"four-point value at ({i},{j}) vanishes", i=i, j=j)
    theta = {k: float(np.angle(b)) for k, b in beta.items()}
    # np.angle returns -pi for a negative real with a -0.0 imaginary part
    theta = {k: float(wrap_angle(v)) for k, v in theta.items()}
    return AngleSet(theta, beta)


# --- finite-difference brackets -------------------------------------------


def _top_vectors(E):
    """Unit vectors spanning the (possibly perturbed) rank-one sides."""
    _, U = np.linalg.eigh(E)
    return U[..., :, -1]


class ActionAngleObservables:
    """Vector-valued observable: lambda_ij, mu_ij and theta_ij over an index set.

    Works on arbitrary stacks of Hermitian side matrices so that it can be
    probed off the constraint set.
    """

    def __init__(self, n, m, index_set=None):
        self.n, self.m = n, m
        self.index_set = list(index_set) if index_set is not None else action_index_set(n, m)
        k = len(self.index_set)
        self.labels = (
            [("lambda", i, j) for i, j in self.index_set]
            + [("mu", i, j) for i, j in self.index_set]
            + [("theta", i, j) for i, j in self.index_set]
        )
        self.periodic = np.array([False] * (2 * k) + [True] * k)

    def __call__(self, E):
        A = np.cumsum(E, axis=0)
        rows = sorted({i for i, _ in self.index_set})
        lam = {i: np.linalg.eigvalsh(A[i])[::-1] for i in rows}
        lam_vals = [lam[i][j - 1] for i, j in self.index_set]
        mu_vals = [lam[i][:j].sum() for i, j in self.index_set]
        w = _top_vectors(E)
        beta = _betas(A, w, self.index_set, check=False)
        theta_vals = [np.angle(beta[k]) for k in self.index_set]
        return np.array(lam_vals + mu_vals + theta_vals)

    def index(self, kind, i, j):
        return self.labels.index((kind, i, j))


def default_step(p: Polygon):
    return 1e-5 * max(1.0, p.Lambda)


def gradients_fd(obs, E, h, periodic=None, order=4):
    """Hermitian gradients of a vector observable with respect to each side.

    Returns an array of shape (k, n, d, d): for each observable component
    and side, the Hermitian matrix G with df = Re Tr(G dE) to first order.
    Central differences of step h along an orthonormal basis of Hermitian
    matrices; ``order`` 4 uses the five-point stencil, 2 the three-point one.
    """
    E = np.asarray(E, dtype=complex)
    n, d, _ = E.shape
    basis = hermitian_basis(d)
    f0 = np.atleast_1d(obs(E))
    if periodic is None:
        periodic = np.zeros(len(f0), dtype=bool)
    periodic = np.asarray(periodic, dtype=bool)

    def delta(k, B, step):
        Ep = E.copy()
        Em = E.copy()
        Ep[k] += step * B
        Em[k] -= step * B
        diff = np.atleast_1d(obs(Ep)) - np.atleast_1d(obs(Em))
        return np.where(periodic, wrap_angle(diff), diff)

    G = np.zeros((len(f0), n, d, d), dtype=complex)
    for k in range(n):
        for B in basis:
            if order == 2:
                slope = delta(k, B, h) / (2 * h)
            elif order == 4:
                slope = (8 * delta(k, B, h) - delta(k, B, 2 * h)) / (12 * h)
            else:
                raise ValueError(f"unsupported stencil order {order}")
            G[:, k] += slope[:, None, None] * B
    return G


def bracket_from_gradients(E, Gf, Gg):
    """sum_k Im Tr(e_k [Gf_k, Gg_k]) for per-side Hermitian gradients."""
    C = Gf @ Gg - Gg @ Gf
    return float(np.trace(E @ C, axis1=-2, axis2=-1).imag.sum())


def bracket_table(obs, p: Polygon, h=None, order=4):
    """All pairwise brackets of the components of a vector observable."""
    if h is None:
        h = default_step(p)
    E = p.edges()
    G = gradients_fd(obs, E, h, getattr(obs, "periodic", None), order)
    k = G.shape[0]
    out = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            out[a, b] = bracket_from_gradients(E, G[a], G[b])
            out[b, a] = -out[a, b]
    return out


def poisson_bracket_fd(f, g, p, h=None, periodic=(False, False), order=4):
    """Lie-Poisson bracket {f, g} of two scalar observables of the side stack.

    Its value is the derivative of g along the Hamiltonian flow of f, so
    the bracket of lambda_ij with its own angle is +1.
    """
    E = p.edges() if isinstance(p, Polygon) else np.asarray(p)
    if h is None:
        scale = float(np.trace(E.sum(axis=0)).real) / E.shape[1]
        h = 1e-5 * max(1.0, scale)
    Gf = gradients_fd(f, E, h, [periodic[0]], order)[0]
    Gg = Gf if g is f else gradients_fd(g, E, h, [periodic[1]], order)[0]
    return bracket_from_gradients(E, Gf, Gg)


# --- trajectories -----------------------------------------------------------


def flow_trajectory(p: Polygon, i, j, times):
    """Rows of (t, closure defect, lambda values, theta values) along a bend."""
    index_set = action_index_set(p.n, p.m)
    header = (
        ["t", "closure_defect"]
        + [f"lambda_{a}_{b}" for a, b in index_set]
        + [f"theta_{a}_{b}" for a, b in index_set]
    )
    rows = []
    for t in times:
        q = bend(p, FlowSpec(i, j, float(t)))
        pat = action_values(q)
        ang = angle_values(q, index_set)
        rows.append(
            [float(t), closure_defect(q)]
            + [float(pat.entry(a, b)) for a, b in index_set]
            + [ang.theta[k] for k in index_set]
        )
    return header, rows


def trajectory_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(x, ".17g") for x in row])
    return buf.getvalue()
