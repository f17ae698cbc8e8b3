"""Closed polygons with a prescribed eigenvalue pattern.

Sides are added one at a time.  Going from A_{k-1} to A_k the new unit
vector is expanded in the eigenbasis of A_{k-1}; the moduli of its
coefficients are fixed by the two spectra and the phases are free.
"""

import numpy as np

from .errors import (
    BoundaryPattern,
    EmptyInterior,
    InvalidInput,
    NormDefect,
    TriangleInequalityViolation,
)
from .linalg import eig_hermitian, random_unitary
from .polygon import Polygon, SideLengths, check_triangle_inequalities, strictly_admissible
from .spectral import (
    GTsPattern,
    forced_lambda_count,
    forced_zero_count,
    free_positions,
    chebyshev_point,
    implicit_equalities,
    pattern_constraints,
    pattern_slacks,
    wa_weights,
)

BOUNDARY_TOL = 1e-10
NORM_TOL = 1e-6
REJECTION_TRIES = 2000
HIT_AND_RUN_STEPS = 200
_INTERIOR_MARGIN = 1e-9


def _check_interior(pattern: GTsPattern):
    problems = pattern.violations()
    if problems:
        raise InvalidInput("not a valid pattern: " + "; ".join(problems[:3]), problems=problems)
    scale = max(1.0, float(pattern.Lambda))
    tight = [pair for pair, s in pattern_slacks(pattern).items() if s <= BOUNDARY_TOL * scale]
    if not tight:
        return
    allowed = implicit_equalities(pattern.n, pattern.m, pattern.r)
    tight = [pair for pair in tight if pair not in allowed]
    if tight:
        hi, lo = tight[0]
        raise BoundaryPattern(
            f"pattern lies on the boundary: entry {hi} equals {lo if lo else 0}",
            tight=[[list(h), list(l) if l else None] for h, l in tight],
        )


def reconstruct(pattern: GTsPattern, phases=None) -> Polygon:
    """A closed polygon whose diagonals have the given eigenvalues.

    ``phases`` maps (edge k, eigen index j) to the phase attached to the
    coefficient of edge k along the j-th eigenvector of A_{k-2}; both
    indices are 1-based and missing keys mean phase 0.  With no phases the
    result is real.
    """
    _check_interior(pattern)
    n, m = pattern.n, pattern.m
    phases = phases or {}
    r = [float(x) for x in pattern.r]
    rows = pattern.as_array()
    d = m + 1
    real = not any(phases.values())
    dtype = float if real else complex

    w = np.zeros((n, d), dtype=dtype)
    w[0, 0] = 1.0
    A = r[0] * np.outer(w[0], w[0].conj())
    for k in range(1, n):
        spec = eig_hermitian(A)
        keep_lam = min(forced_lambda_count(k - 1, n, m), forced_lambda_count(k, n, m))
        keep_zero = min(forced_zero_count(k - 1, m), forced_zero_count(k, m))
        live = slice(keep_lam, d - keep_zero)
        weights = wa_weights(rows[k - 1, live], rows[k, live], r[k])
        vec = np.zeros(d, dtype=dtype)
        for offset, wt in enumerate(weights):
            j = keep_lam + offset
            coef = np.sqrt(wt)
            theta = phases.get((k + 1, j + 1), 0.0)
            if theta:
                coef = coef * np.exp(1j * theta)
            vec = vec + coef * spec.eigenvectors[:, j]
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > NORM_TOL:
            raise NormDefect(
                f"side {k + 1} has norm {norm:.9f}; row sums are inconsistent",
                side=k + 1,
                norm=norm,
            )
        w[k] = vec / norm
        A = A + r[k] * np.outer(w[k], w[k].conj())
    return Polygon(m, np.array(r), w)


def _row_bounds(prev, i, j, n, m, Lam, r):
    """Interval allowed for entry (i, j) given the row below and the fixed top rows."""
    lo = prev[j - 1]
    hi = prev[j - 2] if j >= 2 else Lam
    hi = min(hi, Lam)
    if j == m + 1 and i < n - 2:
        hi = min(hi, Lam - r[-1])
    return lo, hi


def random_interior_pattern(s: SideLengths, seed=None) -> GTsPattern:
    """Random point strictly inside the pattern polytope.

    Rows are drawn bottom-up: each row's free entries, except the last, are
    uniform in their interlacing intervals and the last is solved from the
    row sum; a row that cannot be completed restarts the pattern.  Thin
    polytopes (r close to a wall of the admissible cone) defeat rejection,
    so after a fixed number of tries the sampler switches to a hit-and-run
    walk started from the point of largest slack.
    """
    if not strictly_admissible(s):
        verdict = check_triangle_inequalities(s)
        raise EmptyInterior(
            "side lengths must satisfy the strong triangle inequalities strictly",
            violated=list(verdict.violated),
        )
    rng = np.random.default_rng(seed)
    n, m = s.n, s.m
    r = [float(x) for x in s.r]
    Lam = sum(r) / (m + 1)
    margin = _INTERIOR_MARGIN * max(1.0, Lam)
    for _ in range(REJECTION_TRIES):
        rows = _draw_rows(rng, n, m, r, Lam, margin)
        if rows is None:
            continue
        pattern = GTsPattern(n, m, rows, tuple(s.r))
        if min(pattern_slacks(pattern).values(), default=1.0) > margin:
            return pattern
    return _hit_and_run(s, rng, margin)


def _hit_and_run(s, rng, margin):
    pc = pattern_constraints(s.n, s.m, s.r)
    x, radius = chebyshev_point(pc)
    if x is None or radius <= margin:
        raise EmptyInterior("the pattern polytope has empty interior", r=[float(v) for v in s.r])
    # directions inside the row-sum subspace
    _, sv, Vt = np.linalg.svd(pc.A_eq)
    rank = int(np.sum(sv > 1e-12 * sv[0]))
    null = Vt[rank:].T
    for _ in range(HIT_AND_RUN_STEPS):
        d = null @ rng.standard_normal(null.shape[1])
        slack = pc.h - pc.G @ x
        rate = pc.G @ d
        # slack - s * rate >= 0 for every row
        with np.errstate(divide="ignore"):
            steps = slack / rate
        upper = np.min(steps[rate > 0], initial=np.inf)
        lower = np.max(steps[rate < 0], initial=-np.inf)
        x = x + rng.uniform(lower, upper) * d
    pattern = pc.to_pattern(x, s.r)
    if min(pattern_slacks(pattern).values(), default=1.0) <= margin:
        raise EmptyInterior("hit-and-run walk left the interior", r=[float(v) for v in s.r])
    return pattern


def _draw_rows(rng, n, m, r, Lam, margin):
    rows = [[r[0]] + [0.0] * m]
    prefix = r[0]
    for i in range(1, n - 1):
        prefix += r[i]
        prev = rows[-1]
        row = [0.0] * (m + 1)
        for j in range(1, forced_lambda_count(i, n, m) + 1):
            row[j - 1] = Lam
        free = free_positions(i, n, m)
        for j in free[:-1]:
            lo, hi = _row_bounds(prev, i, j, n, m, Lam, r)
            if hi - lo <= 2 * margin:
                return None
            row[j - 1] = rng.uniform(lo, hi)
        last = free[-1]
        row[last - 1] = prefix - sum(row)
        lo, hi = _row_bounds(prev, i, last, n, m, Lam, r)
        if not lo + margin < row[last - 1] < hi - margin:
            return None
        rows.append(row)
    rows.append([Lam] * (m + 1))
    return rows


def random_phases(n, m, rng):
    """Uniform phases in (-pi, pi] for every (edge, eigen index) slot."""
    return {
        (k, j): float(rng.uniform(-np.pi, np.pi))
        for k in range(2, n + 1)
        for j in range(1, m + 2)
    }


def sample_polygon(s: SideLengths, seed=None) -> Polygon:
    """Random closed polygon: random interior pattern, random torus phases, random frame."""
    verdict = check_triangle_inequalities(s)
    if not verdict.satisfied:
        raise TriangleInequalityViolation(
            "no closed polygon has these side lengths",
            violated=list(verdict.violated),
        )
    rng = np.random.default_rng(seed)
    pattern = random_interior_pattern(s, rng)
    p = reconstruct(pattern, random_phases(s.n, s.m, rng))
    return p.conjugate(random_unitary(s.m + 1, rng))

