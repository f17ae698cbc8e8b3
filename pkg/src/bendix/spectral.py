"""Diagonals, action values and Gel'fand-Tsetlin patterns.

The i-th diagonal of a polygon is ``A_i = e_1 + ... + e_{i+1}``; its
eigenvalues, sorted non-increasingly, form row i of the pattern.  Rows are
stored with the full length m+1.  Some entries are pinned by structure rather
than by the particular polygon:

* row i has rank at most i+1, so entries past position i+1 are 0;
* ``Lambda*I - A_i`` is a sum of n-i-1 rank-one terms, so the first
  ``m+i+2-n`` entries equal Lambda.

These pinned entries are written exactly; the rest are "free".  Index
conventions: ``i`` is the diagonal index (row 0 is ``A_0 = e_1``) and ``j``
is the 1-based position in the row.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    ClosureViolation,
    InterlacingViolation,
    InvalidInput,
    PoleEvaluation,
    RepeatedEigenvalue,
)
from .linalg import eig_hermitian
from .polygon import CLOSURE_RTOL, Polygon, closure_defect

INTERLACE_TOL = 1e-9
FORCED_LAMBDA_RTOL = 1e-8
WEIGHT_CLIP = 1e-10


def forced_lambda_count(i, n, m):
    """Number of leading entries of row i pinned to Lambda."""
    return max(0, m + i + 2 - n)


def forced_zero_count(i, m):
    """Number of trailing entries of row i pinned to 0."""
    return max(0, m - i)


def free_positions(i, n, m):
    """1-based positions of the entries of row i that are not pinned."""
    a = forced_lambda_count(i, n, m)
    z = forced_zero_count(i, m)
    return list(range(a + 1, m + 2 - z))


def polytope_dimension(n, m):
    if n < m + 2:
        raise InvalidInput(f"no polygons with interior patterns for n={n}, m={m}")
    return (n - m - 2) * m


def action_index_set(n, m):
    """Pairs (i, j) labelling an independent set of action variables.

    Rows 1..n-3, free positions, minus the right-most free position per row
    (the row sum determines it).
    """
    out = []
    for i in range(1, n - 2):
        out.extend((i, j) for j in free_positions(i, n, m)[:-1])
    return out


def free_index_set(n, m):
    """Every free (i, j) in rows 1..n-3, including the right-most one."""
    return [(i, j) for i in range(1, n - 2) for j in free_positions(i, n, m)]


@dataclass
class GTsPattern:
    """Triangular eigenvalue array, stored as an (n, m+1) table.

    ``rows[i][j-1]`` is the j-th largest eigenvalue of the diagonal A_i.
    Entries may be floats or Fractions.
    """

    n: int
    m: int
    rows: list
    r: tuple

    def __post_init__(self):
        self.rows = [list(row) for row in self.rows]
        self.r = tuple(self.r)
        if len(self.rows) != self.n or any(len(row) != self.m + 1 for row in self.rows):
            raise InvalidInput(f"pattern must have {self.n} rows of length {self.m + 1}")
        if len(self.r) != self.n:
            raise InvalidInput("need one side length per row")

    @property
    def Lambda(self):
        return sum(self.r) / (self.m + 1)

    @property
    def exact(self):
        return all(isinstance(x, (int, Fraction)) for row in self.rows for x in row)

    def as_array(self):
        return np.array([[float(x) for x in row] for row in self.rows])

    def entry(self, i, j):
        return self.rows[i][j - 1]

    def violations(self, tol=INTERLACE_TOL):
        """Human-readable list of broken pattern constraints (empty when valid)."""
        n, m = self.n, self.m
        Lam = self.Lambda
        rho = sum(self.r)
        scale = max(1.0, abs(float(rho)))
        out = []
        prefix = 0
        for i, row in enumerate(self.rows):
            prefix += self.r[i]
            if abs(sum(row) - prefix) > tol * scale:
                out.append(f"row {i} sums to {sum(row)}, expected {prefix}")
            for j in range(1, m + 1):
                if row[j] - row[j - 1] > tol * scale:
                    out.append(f"row {i} not non-increasing at {j}")
            for j in range(m + 2 - forced_zero_count(i, m), m + 2):
                if row[j - 1] != 0:
                    out.append(f"row {i} entry {j} should be a structural zero")
        if any(abs(x - Lam) > tol * scale for x in self.rows[-1]):
            out.append("top row must be all Lambda")
        for i in range(1, n):
            up, down = self.rows[i], self.rows[i - 1]
            for j in range(m + 1):
                nxt = up[j + 1] if j + 1 <= m else 0
                if down[j] - up[j] > tol * scale or nxt - down[j] > tol * scale:
                    out.append(f"rows {i - 1},{i} fail to interlace at {j + 1}")
        return out

    def is_valid(self, tol=INTERLACE_TOL):
        return not self.violations(tol)

    def to_json(self):
        def num(x):
            if isinstance(x, Fraction):
                return str(x) if x.denominator != 1 else int(x)
            return x if isinstance(x, int) else float(x)

        return {
            "n": self.n,
            "m": self.m,
            "rows": [[num(x) for x in row] for row in self.rows],
            "r": [num(x) for x in self.r],
        }

    @classmethod
    def from_json(cls, obj):
        from .polygon import parse_number

        n, m = int(obj["n"]), int(obj["m"])
        rows = [[parse_number(x) if isinstance(x, str) else x for x in row] for row in obj["rows"]]
        if "r" in obj:
            r = [parse_number(x) if isinstance(x, str) else x for x in obj["r"]]
        else:
            sums = [sum(row) for row in rows]
            r = [sums[0]] + [sums[i] - sums[i - 1] for i in range(1, n)]
        return cls(n, m, rows, tuple(r))


def diagonals(p: Polygon):
    """Partial sums A_0 .. A_{n-1} of the sides, shape (n, m+1, m+1)."""
    return np.cumsum(p.edges(), axis=0)


def action_values(p: Polygon, closure_rtol=CLOSURE_RTOL) -> GTsPattern:
    """Gel'fand-Tsetlin pattern of a closed polygon, pinned entries exact."""
    defect = closure_defect(p)
    Lam = p.Lambda
    if defect > closure_rtol * Lam:
        raise ClosureViolation(
            f"polygon is not closed: defect {defect:.3e} > {closure_rtol:g} * Lambda",
            defect=defect,
        )
    n, m = p.n, p.m
    rows = []
    for i, A in enumerate(diagonals(p)):
        lam = eig_hermitian(A).eigenvalues.copy()
        z = forced_zero_count(i, m)
        if z:
            lam[m + 1 - z:] = 0.0
        for j in range(forced_lambda_count(i, n, m)):
            if abs(lam[j] - Lam) <= FORCED_LAMBDA_RTOL * Lam:
                lam[j] = Lam
        rows.append([float(x) for x in lam])
    rows[0] = [float(p.r[0])] + [0.0] * m
    rows[-1] = [Lam] * (m + 1)
    return GTsPattern(n, m, rows, tuple(float(x) for x in p.r))


def mu_values(pattern: GTsPattern, index_set=None):
    """Cumulative actions mu_ij = lambda_i1 + ... + lambda_ij."""
    if index_set is None:
        index_set = action_index_set(pattern.n, pattern.m)
    return {(i, j): sum(pattern.rows[i][:j]) for i, j in index_set}


def wa_char_ratio(lam, weights, r, z):
    """1 - r * sum_j weights_j / (z - lam_j), the determinant ratio of a rank-one update."""
    lam = np.asarray(lam, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if np.isinf(z):
        return 1.0 + 0j
    diff = z - lam
    if np.any(np.abs(diff) == 0):
        raise PoleEvaluation(f"z={z} coincides with an eigenvalue")
    return complex(1.0 - r * np.sum(weights / diff))


def check_interlacing(lam, nu, sign=1, tol=INTERLACE_TOL):
    """nu_1 >= lam_1 >= nu_2 >= ... >= nu_p >= lam_p for sign > 0 (roles swap for sign < 0)."""
    lam = [float(x) for x in lam]
    nu = [float(x) for x in nu]
    if len(lam) != len(nu):
        return False
    hi, lo = (nu, lam) if sign > 0 else (lam, nu)
    scale = max([1.0] + [abs(x) for x in lam + nu])
    for k in range(len(hi)):
        if lo[k] - hi[k] > tol * scale:
            return False
        if k + 1 < len(hi) and hi[k + 1] - lo[k] > tol * scale:
            return False
    return True


def wa_weights(lam, nu, r, tol=INTERLACE_TOL):
    """Squared overlaps |<w, u_j>|^2 recovered from the spectra before and after A -> A + r w w^*.

    ``lam`` must be free of repeats: forced coincidences between the two
    spectra have to be cancelled by the caller first.
    """
    lam = np.asarray(lam, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if len(lam) != len(nu):
        raise InvalidInput("spectra must have equal length")
    if r == 0:
        raise InvalidInput("rank-one weight r must be nonzero")
    if not check_interlacing(lam, nu, np.sign(r), tol):
        raise InterlacingViolation("spectra do not interlace", lam=lam.tolist(), nu=nu.tolist())
    scale = max(1.0, float(np.max(np.abs(np.concatenate([lam, nu])))))
    for a in range(len(lam)):
        for b in range(a + 1, len(lam)):
            if abs(lam[a] - lam[b]) <= 1e-12 * scale:
                raise RepeatedEigenvalue(
                    "repeated eigenvalue survives cancellation", value=float(lam[a])
                )
    out = np.empty(len(lam))
    for j, lj in enumerate(lam):
        num = np.prod(lj - nu)
        den = r * np.prod([lj - lk for k, lk in enumerate(lam) if k != j])
        out[j] = -num / den
    if np.any(out < -WEIGHT_CLIP * scale):
        raise InterlacingViolation("negative squared overlap", weights=out.tolist())
    return np.clip(out, 0.0, None)


def pinned_value(i, j, n, m, Lam):
    """Value forced on entry (i, j) by structure, or None if it is free."""
    if i == n - 1:
        return Lam
    if j > m + 1 - forced_zero_count(i, m):
        return 0
    if j <= forced_lambda_count(i, n, m):
        return Lam
    return None


def interlacing_pairs(n, m):
    """Every inequality ``hi >= lo`` of the pattern polytope.

    Entries are (i, j) pairs; ``None`` stands for the implicit 0 that
    follows the last entry of a row.
    """
    pairs = []
    for i in range(1, n):
        for j in range(1, m + 2):
            pairs.append(((i, j), (i - 1, j)))
            pairs.append(((i - 1, j), (i, j + 1) if j < m + 1 else None))
    return pairs


def unforced_pairs(n, m):
    """Inequalities with at least one side not pinned by structure."""
    Lam = object()
    out = []
    for hi, lo in interlacing_pairs(n, m):
        vh = pinned_value(*hi, n, m, Lam)
        vl = 0 if lo is None else pinned_value(*lo, n, m, Lam)
        if vh is None or vl is None:
            out.append((hi, lo))
    return out


def pattern_slacks(pattern: GTsPattern):
    """Slack hi - lo of every unforced inequality, keyed by the pair."""
    rows = pattern.rows

    def val(e):
        return 0 if e is None else rows[e[0]][e[1] - 1]

    return {(hi, lo): val(hi) - val(lo) for hi, lo in unforced_pairs(pattern.n, pattern.m)}


@dataclass
class PatternConstraints:
    """The pattern polytope as ``A_eq x = b_eq``, ``slack(x) = h - G x >= 0``.

    ``x`` lists the unpinned entries in the order of ``variables``; the rows
    of G follow ``pairs`` (the unforced inequalities).
    """

    n: int
    m: int
    Lam: float
    variables: list
    A_eq: np.ndarray
    b_eq: np.ndarray
    G: np.ndarray
    h: np.ndarray
    pairs: list

    def to_pattern(self, x, r):
        rows = [[0.0] * (self.m + 1) for _ in range(self.n)]
        for i in range(self.n):
            for j in range(1, self.m + 2):
                v = pinned_value(i, j, self.n, self.m, self.Lam)
                rows[i][j - 1] = float(v) if v is not None else 0.0
        for (i, j), value in zip(self.variables, x):
            rows[i][j - 1] = float(value)
        return GTsPattern(self.n, self.m, rows, tuple(r))


def pattern_constraints(n, m, r) -> PatternConstraints:
    r = [float(x) for x in r]
    Lam = sum(r) / (m + 1)
    variables = [
        (i, j) for i in range(n) for j in range(1, m + 2) if pinned_value(i, j, n, m, Lam) is None
    ]
    index = {e: k for k, e in enumerate(variables)}
    nv = len(variables)

    def affine(e):
        coef = np.zeros(nv)
        if e is None:
            return coef, 0.0
        if e in index:
            coef[index[e]] = 1.0
            return coef, 0.0
        return coef, float(pinned_value(*e, n, m, Lam))

    A_eq, b_eq = [], []
    prefix = 0.0
    for i in range(n - 1):
        prefix += r[i]
        coef = np.zeros(nv)
        const = 0.0
        for j in range(1, m + 2):
            c, k = affine((i, j))
            coef += c
            const += k
        A_eq.append(coef)
        b_eq.append(prefix - const)
    pairs = unforced_pairs(n, m)
    G, h = [], []
    for hi, lo in pairs:
        ch, kh = affine(hi)
        cl, kl = affine(lo)
        # slack = (ch x + kh) - (cl x + kl) = h - G x
        G.append(cl - ch)
        h.append(kh - kl)
    return PatternConstraints(
        n, m, Lam, variables, np.array(A_eq), np.array(b_eq), np.array(G), np.array(h), pairs
    )


def implicit_equalities(n, m, r):
    """Unforced inequalities that are nevertheless tight on all of the polytope.

    This happens when r sits on the boundary of the admissible cone, e.g. the
    degenerate triangle (1, 1, 2).  Found by maximising each slack with a
    small linear program.
    """
    from scipy.optimize import linprog

    pc = pattern_constraints(n, m, r)
    tight = set()
    scale = max(1.0, pc.Lam)
    bounds = [(None, None)] * len(pc.variables)
    for idx, pair in enumerate(pc.pairs):
        res = linprog(
            pc.G[idx],
            A_ub=pc.G,
            b_ub=pc.h,
            A_eq=pc.A_eq,
            b_eq=pc.b_eq,
            bounds=bounds,
            method="highs",
        )
        # the objective G x is smallest where the slack h - G x is largest
        if res.status == 0 and pc.h[idx] - res.fun <= 1e-9 * scale:
            tight.add(pair)
    return tight


def chebyshev_point(pc: PatternConstraints):
    """Feasible point maximising the smallest slack, and that slack."""
    from scipy.optimize import linprog

    nv = len(pc.variables)
    c = np.zeros(nv + 1)
    c[-1] = -1.0
    A_ub = np.hstack([pc.G, np.ones((len(pc.G), 1))])
    A_eq = np.hstack([pc.A_eq, np.zeros((len(pc.A_eq), 1))])
    bounds = [(None, None)] * nv + [(None, max(1.0, pc.Lam))]
    res = linprog(c, A_ub=A_ub, b_ub=pc.h, A_eq=A_eq, b_eq=pc.b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return None, -np.inf
    return res.x[:-1], float(res.x[-1])


def snap_pattern(pattern: GTsPattern, r, denominator=10**9) -> GTsPattern:
    """Round a floating pattern onto exact rationals over side lengths r.

    Pinned entries become exact 0 / Lambda.  In each row every free entry
    but the last is rounded to the grid 1/denominator and the last one is
    solved from the exact row sum, so row sums hold exactly.
    """
    n, m = pattern.n, pattern.m
    r = tuple(Fraction(x) for x in r)
    Lam = Fraction(sum(r), m + 1)
    rows = []
    prefix = Fraction(0)
    for i in range(n):
        prefix += r[i]
        row = []
        free = []
        for j in range(1, m + 2):
            v = pinned_value(i, j, n, m, Lam)
            if v is None:
                free.append(j)
                v = Fraction(round(float(pattern.rows[i][j - 1]) * denominator), denominator)
            row.append(Fraction(v))
        if free:
            last = free[-1] - 1
            row[last] = prefix - (sum(row) - row[last])
        rows.append(row)
    return GTsPattern(n, m, rows, r)


@dataclass(frozen=True)
class Polytope:
    """The convex polytope of patterns with prescribed side lengths r.

    Membership is decided in exact rational arithmetic.
    """

    n: int
    m: int
    r: tuple

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(Fraction(x) for x in self.r))
        if len(self.r) != self.n:
            raise InvalidInput("need one side length per row")

    @property
    def Lambda(self):
        return Fraction(sum(self.r), self.m + 1)

    @property
    def dimension(self):
        return polytope_dimension(self.n, self.m)

    def contains(self, pattern: GTsPattern) -> bool:
        if (pattern.n, pattern.m) != (self.n, self.m):
            return False
        if not pattern.exact:
            pattern = snap_pattern(pattern, self.r)
        rows = [[Fraction(x) for x in row] for row in pattern.rows]
        Lam = self.Lambda
        prefix = Fraction(0)
        for i, row in enumerate(rows):
            prefix += self.r[i]
            if sum(row) != prefix:
                return False
            for j in range(1, self.m + 2):
                v = pinned_value(i, j, self.n, self.m, Lam)
                if v is not None and row[j - 1] != v:
                    return False
        for hi, lo in interlacing_pairs(self.n, self.m):
            vh = rows[hi[0]][hi[1] - 1]
            vl = 0 if lo is None else rows[lo[0]][lo[1] - 1]
            if vh < vl:
                return False
        return True
