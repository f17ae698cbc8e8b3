"""Reproducible numerical checks of the main claims, one function per criterion.

Each check returns a :class:`CheckResult`; ``run_all`` runs them in order
(optionally in worker processes) and is what ``bendix verify-all`` and the
acceptance tests call.
"""

import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bending import ActionAngleObservables, FlowSpec, angle_values, bend, bracket_table, wrap_angle
from .combinatorics import multiplicity_report
from .duality import (
    compare_blocks_with_pattern,
    hamiltonian_rates,
    hitchin_matrix,
    polygon_to_matrix,
    random_closed_euclidean,
    to_euclidean,
)
from .errors import TriangleInequalityViolation
from .linalg import random_unitary
from .polygon import (
    SideLengths,
    check_semistable,
    check_triangle_inequalities,
    closure_defect,
    is_general_position,
    moduli_dimension,
    strictly_admissible,
)
from .reconstruction import random_interior_pattern, random_phases, reconstruct, sample_polygon
from .spectral import action_values, free_index_set, free_positions, polytope_dimension

FLOW_GRID = [(1, 5), (1, 6), (2, 6), (2, 7), (3, 8)]
PATTERN_GRID = [(1, 4), (1, 5), (1, 6), (2, 5), (2, 6), (2, 7), (3, 8)]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        summary = ", ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return f"[{status}] {self.number:2d} {self.name}: {summary} ({self.seconds:.2f}s)"

    def to_json(self):
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "seconds": self.seconds,
            "details": {k: _plain(v) for k, v in self.details.items()},
        }


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def seeded_lengths(m, n, seed, low=1.0, high=1.5):
    """Side lengths uniform in [low, high]; strictly admissible on the test grids."""
    rng = np.random.default_rng([seed, m, n])
    return SideLengths(m, tuple(float(x) for x in rng.uniform(low, high, n)))


def seeded_polygon(m, n, seed):
    return sample_polygon(seeded_lengths(m, n, seed), [seed, m, n, 1])


def _timed(number, name, fn):
    start = time.perf_counter()
    passed, details = fn()
    return CheckResult(number, name, bool(passed), details, time.perf_counter() - start)


# 1 -------------------------------------------------------------------------


def check_flow_exactness(count=20):
    closure_change = drift = period = 0.0
    flows = 0
    for m, n in FLOW_GRID:
        for seed in range(count):
            p = seeded_polygon(m, n, seed)
            base_defect = closure_defect(p)
            base = action_values(p).as_array()
            for i in range(1, n - 2):
                for j in free_positions(i, n, m)[:-1]:
                    for t in (0.3, 1.7, np.pi):
                        q = bend(p, FlowSpec(i, j, t))
                        closure_change = max(closure_change, abs(closure_defect(q) - base_defect))
                        drift = max(drift, float(np.max(np.abs(action_values(q).as_array() - base))))
                    q = bend(p, FlowSpec(i, j, 2 * np.pi))
                    period = max(period, float(np.max(np.linalg.norm(q.edges() - p.edges(), axis=(1, 2)))))
                    flows += 1
    ok = closure_change <= 1e-10 and drift <= 1e-9 and period <= 1e-9
    return ok, {"flows": flows, "closure_change": closure_change, "pattern_drift": drift, "period_error": period}


# 2 and 3 -------------------------------------------------------------------


def _bracket_blocks(p, m, n, h):
    obs = ActionAngleObservables(n, m)
    k = len(obs.index_set)
    T = bracket_table(obs, p, h)
    return T[:k, :k], T[k : 2 * k, 2 * k :], T[2 * k :, 2 * k :]


def check_involutivity(count=5, h=1e-5):
    worst = 0.0
    pairs = 0
    for m, n in FLOW_GRID:
        for seed in range(count):
            L, _, _ = _bracket_blocks(seeded_polygon(m, n, seed), m, n, h)
            worst = max(worst, float(np.max(np.abs(L))))
            pairs += L.size
    return worst <= 5e-5, {"pairs": pairs, "max_lambda_bracket": worst}


def check_action_angle(count=5, h=1e-5):
    conj = theta = shift = 0.0
    for m, n in FLOW_GRID:
        for seed in range(count):
            p = seeded_polygon(m, n, seed)
            _, MT, TT = _bracket_blocks(p, m, n, h)
            conj = max(conj, float(np.max(np.abs(MT - np.eye(len(MT))))))
            theta = max(theta, float(np.max(np.abs(TT))))
            shift = max(shift, _angle_shift_error(p, m, n))
    ok = conj <= 5e-4 and theta <= 5e-4 and shift <= 1e-8
    return ok, {"mu_theta_error": conj, "theta_theta": theta, "angle_shift_error": shift}


def _angle_shift_error(p, m, n, t=0.7):
    before = angle_values(p).theta
    worst = 0.0
    for i in range(1, n - 2):
        for l in free_positions(i, n, m):
            after = angle_values(bend(p, FlowSpec(i, l, t))).theta
            for (k, j), th in before.items():
                expected = 0.0
                if k == i and l == j:
                    expected = t
                elif k == i and l == j + 1:
                    expected = -t
                err = abs(float(wrap_angle(after[(k, j)] - th - expected)))
                worst = max(worst, err)
    return worst


# 4 -------------------------------------------------------------------------


def check_reconstruction(count=50):
    roundtrip = imag = 0.0
    for seed in range(count):
        m, n = PATTERN_GRID[seed % len(PATTERN_GRID)]
        s = seeded_lengths(m, n, seed)
        rng = np.random.default_rng([seed, 4])
        pattern = random_interior_pattern(s, rng)
        want = pattern.as_array()
        p = reconstruct(pattern, random_phases(n, m, rng))
        roundtrip = max(roundtrip, float(np.max(np.abs(action_values(p).as_array() - want))))
        q = reconstruct(pattern)
        roundtrip = max(roundtrip, float(np.max(np.abs(action_values(q).as_array() - want))))
        imag = max(imag, float(np.max(np.abs(q.edges().imag))))
    return roundtrip <= 1e-8 and imag <= 1e-10, {"patterns": count, "roundtrip_error": roundtrip, "max_imag": imag}


# 5 -------------------------------------------------------------------------


def multiplicity_cases():
    for m in (1, 2):
        for n in range(3, 7):
            for r in itertools.product(range(1, 5), repeat=n):
                if sum(r) % (m + 1) == 0:
                    yield m, r


def check_multiplicities():
    cases = 0
    mismatches = []
    for m, r in multiplicity_cases():
        rep = multiplicity_report(m, r)
        cases += 1
        if not rep.all_equal:
            mismatches.append((m, r))
    anchor = multiplicity_report(1, (1, 1, 1, 1))
    anchor_ok = anchor.all_equal and anchor.lattice_count == 2
    return not mismatches and anchor_ok, {"cases": cases, "mismatches": len(mismatches), "anchor_count": anchor.lattice_count}


# 6 -------------------------------------------------------------------------


def affine_rank(points, rtol=1e-9):
    X = np.asarray(points, dtype=float)
    X = X - X.mean(axis=0)
    sv = np.linalg.svd(X, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def check_dimensions():
    details = {"moduli_dim_6_2": moduli_dimension(6, 2)}
    ok = details["moduli_dim_6_2"] == 8
    for m, n in [(1, 4), (1, 5), (2, 6), (2, 5)]:
        expected = polytope_dimension(n, m)
        s = seeded_lengths(m, n, 0)
        coords = free_index_set(n, m)
        pts = []
        for seed in range(3 * expected + 5):
            pat = random_interior_pattern(s, [seed, 6])
            pts.append([float(pat.entry(i, j)) for i, j in coords])
        got = affine_rank(pts)
        details[f"rank_{m}_{n}"] = got
        ok = ok and got == expected
    return ok, details


# 7 -------------------------------------------------------------------------


def check_duality(count=20):
    worst = 0.0
    for seed in range(count):
        m, n = [(1, 5), (2, 6), (2, 7)][seed % 3]
        p = seeded_polygon(m, n, seed)
        worst = max(worst, compare_blocks_with_pattern(polygon_to_matrix(p), action_values(p)))
    return worst <= 1e-9, {"polygons": count, "max_mismatch": worst}


# 8 -------------------------------------------------------------------------


def check_hitchin(seed=0):
    rng = np.random.default_rng([seed, 8])
    ep = random_closed_euclidean(5, rng, min_triple=1e-3)
    generic = abs(hamiltonian_rates(ep, (0, 1, 2, 3, 4), 2)[4])
    coincident = abs(hamiltonian_rates(ep, (0, 0, 2, 3, 4), 2)[4])
    worst_A = 0.0
    for k in range(5):
        q = to_euclidean(seeded_polygon(1, 5, k))
        for z in np.linspace(-2.0, 2.0, 9):
            worst_A = max(worst_A, float(np.linalg.norm(hitchin_matrix(q, (0.5,) * 5, z))))
    ok = generic >= 1e-3 and coincident <= 1e-12 and worst_A <= 1e-12
    return ok, {"dH5_generic": generic, "dH5_equal_alpha12": coincident, "max_A_equal_alpha": worst_A}


# 9 -------------------------------------------------------------------------


def check_existence(count=60):
    sampled = rejected = failures = 0
    for seed in range(count):
        m, n = PATTERN_GRID[seed % len(PATTERN_GRID)]
        rng = np.random.default_rng([seed, 9])
        s = SideLengths(m, tuple(float(x) for x in rng.uniform(0.2, 3.0, n)))
        try:
            p = sample_polygon(s, [seed, 9, 1])
        except TriangleInequalityViolation:
            rejected += 1
            if check_triangle_inequalities(s).satisfied:
                failures += 1
            continue
        if not strictly_admissible(s):
            continue
        sampled += 1
        Lam = p.Lambda
        if closure_defect(p) > 1e-9 * Lam or not check_triangle_inequalities(p.side_lengths()).satisfied:
            failures += 1
    ok = failures == 0 and sampled > 0 and rejected > 0
    return ok, {"sampled": sampled, "rejected": rejected, "failures": failures}


# 10 ------------------------------------------------------------------------


def check_semistability(count=50):
    passed = 0
    skipped = 0
    for seed in range(count):
        m, n = [(1, 4), (1, 5), (2, 5), (2, 6), (3, 7)][seed % 5]
        rng = np.random.default_rng([seed, 10])
        s = seeded_lengths(m, n, seed + 1000)
        pts = rng.standard_normal((n, m + 1)) + 1j * rng.standard_normal((n, m + 1))
        pts = pts @ random_unitary(m + 1, rng)
        if not is_general_position(pts):
            skipped += 1
            continue
        if check_semistable(pts, s).semistable:
            passed += 1
    return passed == count - skipped and skipped == 0, {"configurations": count, "semistable": passed}


CHECKS = [
    (1, "flow exactness", check_flow_exactness),
    (2, "involutivity", check_involutivity),
    (3, "action-angle structure", check_action_angle),
    (4, "reconstruction round trip", check_reconstruction),
    (5, "multiplicity four-way equality", check_multiplicities),
    (6, "dimension formulas", check_dimensions),
    (7, "duality", check_duality),
    (8, "Hitchin non-coincidence", check_hitchin),
    (9, "existence iff triangle inequalities", check_existence),
    (10, "semistability of general position", check_semistability),
]


def run_check(number):
    for num, name, fn in CHECKS:
        if num == number:
            return _timed(num, name, fn)
    raise KeyError(number)


def worker_count():
    try:
        return max(1, int(os.environ.get("BENDIX_THREADS", "1")))
    except ValueError:
        return 1


def run_all(numbers=None, workers=None):
    numbers = [num for num, _, _ in CHECKS] if numbers is None else list(numbers)
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [run_check(k) for k in numbers]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_check, numbers))
