"""Polygons whose sides are rank-one Hermitian matrices.

A side of length r pointing along the unit vector w is the matrix
``r * w w^*``; a polygon with n sides in (m+1) x (m+1) matrices is closed when
the sides add up to ``Lambda * I`` with ``Lambda = sum(r) / (m + 1)``.

Side-length combinatorics (triangle inequalities, walls) work in exact
rational arithmetic whenever every length is an int or a Fraction.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from numbers import Rational

import numpy as np

from .errors import InvalidInput, SizeLimit
from .linalg import commutator, matrix_from_json, traceless_hermitian_basis

CLOSURE_RTOL = 1e-9
MAX_WALL_N = 20
MAX_SEMISTABLE_N = 16
RANK_RTOL = 1e-8


def parse_number(token):
    """Parse "3", "0.5" or "p/q"; integers and ratios stay exact."""
    if isinstance(token, (int, Fraction)):
        return Fraction(token)
    if isinstance(token, float):
        return token
    token = str(token).strip()
    if "/" in token:
        return Fraction(token)
    try:
        return Fraction(int(token))
    except ValueError:
        return float(token)


def parse_lengths(text):
    """Parse a comma separated list such as ``"1,1,3/2"``."""
    return tuple(parse_number(t) for t in str(text).split(",") if t.strip())


@dataclass(frozen=True)
class SideLengths:
    m: int
    r: tuple

    def __post_init__(self):
        r = tuple(parse_number(x) if isinstance(x, str) else x for x in self.r)
        object.__setattr__(self, "r", r)
        if self.m < 1:
            raise InvalidInput(f"m must be >= 1, got {self.m}")
        if len(r) < 3:
            raise InvalidInput(f"need at least 3 sides, got {len(r)}")
        if any(x <= 0 for x in r):
            raise InvalidInput("side lengths must be positive", r=list(r))

    @property
    def n(self):
        return len(self.r)

    @property
    def exact(self):
        return all(isinstance(x, Rational) for x in self.r)

    @property
    def rho(self):
        return sum(self.r) if self.exact else float(sum(self.r))

    @property
    def Lambda(self):
        if self.exact:
            return Fraction(self.rho) / (self.m + 1)
        return self.rho / (self.m + 1)

    def as_float(self):
        return np.array([float(x) for x in self.r])

    def to_json(self):
        return {"m": self.m, "r": [_number_to_json(x) for x in self.r]}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["m"]), tuple(parse_number(x) for x in obj["r"]))


def _number_to_json(x):
    if isinstance(x, Rational) and not isinstance(x, int):
        x = Fraction(x)
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x if isinstance(x, int) else float(x)


@dataclass
class Polygon:
    """n sides ``r[k] * w[k] w[k]^*`` in (m+1) x (m+1) Hermitian matrices.

    ``w`` has shape (n, m+1); rows are unit vectors.
    """

    m: int
    r: np.ndarray
    w: np.ndarray
    _edges: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.w = np.asarray(self.w, dtype=complex)
        if self.w.ndim != 2 or self.w.shape != (len(self.r), self.m + 1):
            raise InvalidInput(
                f"w must have shape (n, m+1) = ({len(self.r)}, {self.m + 1}), got {self.w.shape}"
            )
        if len(self.r) < 3:
            raise InvalidInput(f"need at least 3 sides, got {len(self.r)}")
        if np.any(self.r <= 0):
            raise InvalidInput("side lengths must be positive")
        norms = np.linalg.norm(self.w, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise InvalidInput("edge vectors must be unit vectors", norms=norms.tolist())
        # leave rows that are already unit to the last bit untouched
        off = np.abs(norms - 1.0) > 1e-15
        if np.any(off):
            self.w = self.w.copy()
            self.w[off] /= norms[off, None]

    @property
    def n(self):
        return len(self.r)

    @property
    def dim(self):
        return self.m + 1

    @property
    def Lambda(self):
        return float(np.sum(self.r)) / (self.m + 1)

    def edges(self):
        """Edge matrices, shape (n, m+1, m+1)."""
        if self._edges is None:
            self._edges = self.r[:, None, None] * np.einsum("ka,kb->kab", self.w, self.w.conj())
        return self._edges

    def side_lengths(self):
        return SideLengths(self.m, tuple(float(x) for x in self.r))

    def conjugate(self, U):
        """The polygon with every side conjugated by the unitary U."""
        return Polygon(self.m, self.r.copy(), self.w @ np.asarray(U).T)

    def copy(self):
        return Polygon(self.m, self.r.copy(), self.w.copy())

    def to_json(self):
        return {
            "m": self.m,
            "edges": [
                {"r": float(r), "w": [[float(z.real), float(z.imag)] for z in w]}
                for r, w in zip(self.r, self.w)
            ],
        }

    @classmethod
    def from_json(cls, obj):
        edges = obj["edges"]
        r = [float(e["r"]) for e in edges]
        w = matrix_from_json([e["w"] for e in edges])
        return cls(int(obj["m"]), np.array(r), w)


@dataclass(frozen=True)
class TriangleVerdict:
    satisfied: bool
    violated: tuple = ()

    def to_json(self):
        return {"satisfied": self.satisfied, "violated": list(self.violated)}


def check_triangle_inequalities(s: SideLengths, tol=None) -> TriangleVerdict:
    """m * r_i <= sum of the other sides, for every i (indices reported 1-based)."""
    if tol is None:
        tol = 0 if s.exact else 1e-12 * s.rho
    rho = s.rho
    bad = tuple(i + 1 for i, x in enumerate(s.r) if s.m * x - (rho - x) > tol)
    return TriangleVerdict(not bad, bad)


def strictly_admissible(s: SideLengths) -> bool:
    """All strong triangle inequalities hold strictly."""
    rho = s.rho
    return all(s.m * x < rho - x for x in s.r)


def closure_defect(p) -> float:
    """Frobenius norm of ``sum(e_i) - Lambda * I``.

    Accepts a :class:`Polygon` or a raw stack of edge matrices, in which case
    Lambda is taken from the traces.
    """
    E = p.edges() if isinstance(p, Polygon) else np.asarray(p)
    total = E.sum(axis=0)
    d = total.shape[0]
    Lam = np.trace(total).real / d
    return float(np.linalg.norm(total - Lam * np.eye(d)))


@dataclass(frozen=True, order=True)
class WallId:
    """A wall k * rho_I = (m - k + 1) * rho_J; indices are 1-based."""

    I: tuple
    J: tuple
    k: int

    def to_json(self):
        return {"I": list(self.I), "J": list(self.J), "k": self.k}


def enumerate_walls(s: SideLengths, tol=None) -> list:
    """All walls whose hyperplane contains r.

    Each unordered partition is visited once, with I the block containing
    side 1; the mirror label (J, I, m - k + 1) describes the same hyperplane
    and is not reported.
    """
    n, m = s.n, s.m
    if n > MAX_WALL_N:
        raise SizeLimit(f"wall enumeration is exhaustive; n={n} exceeds {MAX_WALL_N}")
    if tol is None:
        tol = 0 if s.exact else 1e-12 * s.rho
    r = s.r
    rho = s.rho
    rest = list(range(1, n))
    walls = []
    for size in range(0, n - 1):
        for extra in combinations(rest, size):
            I = (0,) + extra
            rho_I = sum(r[i] for i in I)
            rho_J = rho - rho_I
            J = tuple(j for j in range(n) if j not in I)
            for k in range(1, m + 1):
                if abs(k * rho_I - (m - k + 1) * rho_J) <= tol:
                    walls.append(WallId(tuple(i + 1 for i in I), tuple(j + 1 for j in J), k))
    return sorted(walls)


def is_on_wall(s: SideLengths, tol=None) -> bool:
    return bool(enumerate_walls(s, tol))


def in_cone(s: SideLengths) -> bool:
    """Whether r lies in the cone cut out by the strong triangle inequalities."""
    return check_triangle_inequalities(s).satisfied


def moduli_dimension(n: int, m: int) -> int:
    """Real dimension 2m(n - m - 2) of the moduli space off the walls."""
    if n < m + 2:
        raise InvalidInput(f"n={n} sides cannot close up generically in dimension m+1={m + 1}")
    return 2 * m * (n - m - 2)


def centralizer_dimension(p, tol=1e-8) -> int:
    """Dimension of the traceless Hermitian matrices commuting with every side.

    Positive exactly when the polygon is decomposable.
    """
    E = p.edges() if isinstance(p, Polygon) else np.asarray(p)
    d = E.shape[1]
    basis = traceless_hermitian_basis(d)
    cols = []
    for X in basis:
        C = np.array([commutator(X, e) for e in E])
        cols.append(np.concatenate([C.real.ravel(), C.imag.ravel()]))
    M = np.array(cols).T
    sv = np.linalg.svd(M, compute_uv=False)
    scale = max(1.0, max(float(np.trace(e).real) for e in E))
    return int(np.sum(sv <= tol * scale)) + (basis.shape[0] - len(sv))


def _normalized(points):
    P = np.atleast_2d(np.asarray(points, dtype=complex))
    norms = np.linalg.norm(P, axis=1)
    if np.any(norms == 0):
        raise InvalidInput("points in projective space must be nonzero vectors")
    return P / norms[:, None]


def _rank(P, tol=RANK_RTOL):
    if len(P) == 0:
        return 0
    sv = np.linalg.svd(P, compute_uv=False)
    return int(np.sum(sv > tol * max(1.0, sv[0])))


@dataclass(frozen=True)
class SemistabilityVerdict:
    semistable: bool
    violations: tuple = ()

    def to_json(self):
        return {
            "semistable": self.semistable,
            "violations": [
                {"points": list(pts), "projective_dim": dim, "mass": float(mass), "bound": float(bound)}
                for pts, dim, mass, bound in self.violations
            ],
        }


def check_semistable(points, s: SideLengths, tol=RANK_RTOL) -> SemistabilityVerdict:
    """Weighted semistability of a configuration of n points in CP^m.

    For the projective span L of every subset, the total weight of all points
    lying in L may not exceed (dim L + 1) * rho / (m + 1).
    """
    P = _normalized(points)
    n = len(P)
    if n != s.n:
        raise InvalidInput(f"{n} points but {s.n} side lengths")
    if P.shape[1] != s.m + 1:
        raise InvalidInput(f"points must live in C^{s.m + 1}")
    if n > MAX_SEMISTABLE_N:
        raise SizeLimit(f"semistability check enumerates subsets; n={n} exceeds {MAX_SEMISTABLE_N}")
    exact = s.exact
    rho, m = s.rho, s.m
    slack = 0 if exact else 1e-12 * rho
    seen = set()
    violations = []
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        S = P[idx]
        U, sv, _ = np.linalg.svd(S.T, full_matrices=False)
        rank = int(np.sum(sv > tol * sv[0]))
        Q = U[:, :rank]
        resid = np.linalg.norm(P.T - Q @ (Q.conj().T @ P.T), axis=0)
        members = tuple(int(i) for i in np.flatnonzero(resid <= tol))
        if members in seen:
            continue
        seen.add(members)
        mass = sum(s.r[i] for i in members)
        bound = Fraction(rank, m + 1) * rho if exact else rank * rho / (m + 1)
        if mass - bound > slack:
            violations.append((tuple(i + 1 for i in members), rank - 1, mass, bound))
    return SemistabilityVerdict(not violations, tuple(violations))


def is_general_position(points, tol=RANK_RTOL) -> bool:
    """At most k+1 of the points lie in any projective k-plane."""
    P = _normalized(points)
    n, d = P.shape
    size = min(n, d)
    return all(_rank(P[list(c)], tol) == size for c in combinations(range(n), size))
