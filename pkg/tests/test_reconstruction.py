from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bendix import reconstruction
from bendix.errors import (
    BoundaryPattern,
    EmptyInterior,
    InvalidInput,
    NormDefect,
    TriangleInequalityViolation,
)
from bendix.polygon import SideLengths, closure_defect
from bendix.reconstruction import (
    random_interior_pattern,
    random_phases,
    reconstruct,
    sample_polygon,
)
from bendix.spectral import GTsPattern, Polytope, action_values, pattern_slacks

from conftest import GRID


def _lengths(m, n, seed):
    rng = np.random.default_rng([seed, m, n])
    return SideLengths(m, tuple(float(x) for x in rng.uniform(1.0, 1.5, n)))


def test_square_example():
    pattern = GTsPattern(4, 1, [[1, 0], [1.5, 0.5], [2, 1], [2, 2]], (1, 1, 1, 1))
    p = reconstruct(pattern)
    assert closure_defect(p) < 1e-12
    assert np.abs(p.edges().imag).max() == 0
    assert np.allclose(action_values(p).as_array(), pattern.as_array(), atol=1e-12)
    # tr A_1^2 = 1 + 1 + 2 |<w1, w2>|^2 = 1.5^2 + 0.5^2
    assert abs(np.vdot(p.w[0], p.w[1])) ** 2 == pytest.approx(0.25)


def test_rigid_triangle():
    pattern = GTsPattern(3, 1, [[1, 0], [2, 0], [2, 2]], (1, 1, 2))
    p = reconstruct(pattern)
    assert closure_defect(p) < 1e-12
    assert abs(np.vdot(p.w[0], p.w[1])) == pytest.approx(1)


def test_boundary_pattern_rejected():
    pattern = GTsPattern(4, 1, [[1, 0], [2, 0], [2, 1], [2, 2]], (1, 1, 1, 1))
    with pytest.raises(BoundaryPattern):
        reconstruct(pattern)


def test_invalid_pattern_rejected():
    pattern = GTsPattern(4, 1, [[1, 0], [2.5, -0.5], [2, 1], [2, 2]], (1, 1, 1, 1))
    with pytest.raises(InvalidInput):
        reconstruct(pattern)


def test_norm_defect(monkeypatch):
    # weights that do not sum to one point to inconsistent row sums
    real = reconstruction.wa_weights
    monkeypatch.setattr(reconstruction, "wa_weights", lambda *a: 0.9 * real(*a))
    pattern = GTsPattern(4, 1, [[1, 0], [1.5, 0.5], [2, 1], [2, 2]], (1, 1, 1, 1))
    with pytest.raises(NormDefect):
        reconstruct(pattern)


@given(st.sampled_from(GRID), st.integers(0, 10**6))
def test_round_trip_with_phases(mn, seed):
    m, n = mn
    rng = np.random.default_rng(seed)
    pattern = random_interior_pattern(_lengths(m, n, seed), rng)
    p = reconstruct(pattern, random_phases(n, m, rng))
    assert closure_defect(p) <= 1e-10 * p.Lambda
    assert np.allclose(action_values(p).as_array(), pattern.as_array(), atol=1e-8)
    q = reconstruct(pattern)
    assert np.abs(q.edges().imag).max() <= 1e-10


@given(st.sampled_from(GRID), st.integers(0, 10**6))
def test_sampled_patterns_are_interior(mn, seed):
    m, n = mn
    s = _lengths(m, n, seed)
    pattern = random_interior_pattern(s, seed)
    assert pattern.is_valid()
    assert min(pattern_slacks(pattern).values()) > 0
    r = tuple(Fraction(x) for x in s.r)
    assert Polytope(n, m, r).contains(pattern)


def test_sampling_is_deterministic():
    s = _lengths(2, 6, 5)
    a = sample_polygon(s, 42)
    b = sample_polygon(s, 42)
    assert np.array_equal(a.w, b.w)
    c = sample_polygon(s, 43)
    assert not np.array_equal(a.w, c.w)


def test_thin_polytope_falls_back(monkeypatch):
    # r close to a wall: rejection almost never succeeds
    s = SideLengths(1, (1.0, 1.0, 1.0, 2.999))
    monkeypatch.setattr(reconstruction, "REJECTION_TRIES", 0)
    pattern = random_interior_pattern(s, 1)
    assert min(pattern_slacks(pattern).values()) > 0
    p = reconstruct(pattern, random_phases(4, 1, np.random.default_rng(0)))
    assert np.allclose(action_values(p).as_array(), pattern.as_array(), atol=1e-8)


def test_empty_interior():
    with pytest.raises(EmptyInterior):
        random_interior_pattern(SideLengths(1, (1, 1, 2)), 0)
    with pytest.raises(EmptyInterior):
        random_interior_pattern(SideLengths(1, (1, 1, 1, 3)), 0)


def test_sample_rejects_bad_lengths():
    with pytest.raises(TriangleInequalityViolation):
        sample_polygon(SideLengths(1, (1, 1, 5)), 0)


def test_phase_keys_change_the_polygon():
    pattern = GTsPattern(5, 1, [[1, 0], [1.5, 0.5], [2, 1], [2.5, 1.5], [2.5, 2.5]], (1, 1, 1, 1, 1))
    base = reconstruct(pattern)
    moved = reconstruct(pattern, {(3, 2): 0.8})
    assert np.allclose(base.w[:2], moved.w[:2], atol=1e-15)
    assert not np.allclose(base.w[2], moved.w[2])
    assert np.allclose(action_values(moved).as_array(), pattern.as_array(), atol=1e-12)
