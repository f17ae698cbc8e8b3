import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bendix.bending import (
    ActionAngleObservables,
    FlowSpec,
    angle_values,
    bend,
    bracket_table,
    flow_trajectory,
    four_point,
    poisson_bracket_fd,
    trajectory_csv,
    wrap_angle,
)
from bendix.errors import DegenerateEigenvalue, IndexOutOfRange, StrictInterlacingViolation, ZeroVector
from bendix.linalg import random_unitary
from bendix.polygon import closure_defect
from bendix.reconstruction import reconstruct
from bendix.spectral import GTsPattern, action_values, diagonals, free_positions

from conftest import grid_polygons, polygon_for, random_unit

flows = st.tuples(st.integers(0, 10**6), st.floats(-7, 7))


def _any_flow(p, seed):
    rng = np.random.default_rng(seed)
    i = int(rng.integers(1, p.n - 2))
    free = free_positions(i, p.n, p.m)
    return i, int(free[rng.integers(len(free))])


def test_zero_time_is_identity():
    p = polygon_for(2, 6, 3)
    q = bend(p, FlowSpec(2, 1, 0.0))
    assert np.allclose(q.edges(), p.edges(), atol=1e-15)


@given(grid_polygons(), flows)
def test_flow_preserves_closure_and_pattern(p, flow):
    seed, t = flow
    i, j = _any_flow(p, seed)
    q = bend(p, FlowSpec(i, j, t))
    assert abs(closure_defect(q) - closure_defect(p)) <= 1e-10
    assert np.allclose(action_values(q).as_array(), action_values(p).as_array(), atol=1e-9)
    assert np.array_equal(q.r, p.r)


@given(grid_polygons(), st.integers(0, 10**6))
def test_full_turn(p, seed):
    i, j = _any_flow(p, seed)
    q = bend(p, FlowSpec(i, j, 2 * np.pi))
    assert np.max(np.linalg.norm(q.edges() - p.edges(), axis=(1, 2))) <= 1e-9


@given(grid_polygons(), st.integers(0, 10**6))
def test_later_sides_untouched(p, seed):
    i, j = _any_flow(p, seed)
    q = bend(p, FlowSpec(i, j, 1.3))
    assert np.array_equal(q.w[i + 1 :], p.w[i + 1 :])


@given(grid_polygons(), st.integers(0, 10**6), st.floats(-3, 3), st.floats(-3, 3))
def test_group_law(p, seed, s, t):
    i, j = _any_flow(p, seed)
    once = bend(p, FlowSpec(i, j, s + t))
    twice = bend(bend(p, FlowSpec(i, j, s)), FlowSpec(i, j, t))
    assert np.allclose(once.edges(), twice.edges(), atol=1e-10)


@given(grid_polygons(), st.integers(0, 10**6))
def test_flows_commute(p, seed):
    a = FlowSpec(*_any_flow(p, seed), 0.9)
    b = FlowSpec(*_any_flow(p, seed + 1), -1.4)
    ab = bend(bend(p, a), b)
    ba = bend(bend(p, b), a)
    assert np.allclose(ab.edges(), ba.edges(), atol=1e-9)


def test_forced_eigenvalue_is_degenerate():
    p = polygon_for(3, 8, 1)
    # diagonal 5 has Lambda twice
    with pytest.raises(DegenerateEigenvalue):
        bend(p, FlowSpec(5, 1, 0.4))


def test_flow_index_checks():
    p = polygon_for(1, 5, 0)
    for i, j in [(0, 1), (3, 1), (1, 0), (1, 3)]:
        with pytest.raises(IndexOutOfRange):
            bend(p, FlowSpec(i, j, 0.1))


def test_wrap_angle():
    assert wrap_angle(np.pi) == pytest.approx(np.pi)
    assert wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert wrap_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)
    assert wrap_angle(0.25) == pytest.approx(0.25)


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_four_point_symmetries(seed, d):
    rng = np.random.default_rng(seed)
    a, b, c, e = (random_unit(d, rng) for _ in range(4))
    val = four_point(a, b, c, e)
    # cyclic shift and reversal conjugate
    assert four_point(b, c, e, a) == pytest.approx(val)
    assert four_point(e, c, b, a) == pytest.approx(np.conj(val))
    # independent of phases and scale of each vector
    ph = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    assert four_point(3 * ph[0] * a, ph[1] * b, 0.5 * ph[2] * c, ph[3] * e) == pytest.approx(val)
    U = random_unitary(d, rng)
    assert four_point(U @ a, U @ b, U @ c, U @ e) == pytest.approx(val)
    assert abs(val) <= 1 + 1e-12


def test_four_point_zero_vector():
    with pytest.raises(ZeroVector):
        four_point([1, 0], [0, 0], [0, 1], [1, 1])


def test_real_polygon_has_trivial_angles():
    pattern = GTsPattern(5, 1, [[1, 0], [1.5, 0.5], [2, 1], [2.5, 1.5], [2.5, 2.5]], (1, 1, 1, 1, 1))
    angles = angle_values(reconstruct(pattern))
    for v in angles.theta.values():
        assert abs(wrap_angle(v)) < 1e-9 or abs(abs(v) - np.pi) < 1e-9


@given(grid_polygons(), st.integers(0, 10**6))
def test_angles_are_conjugation_invariant(p, seed):
    U = random_unitary(p.m + 1, np.random.default_rng(seed))
    a = angle_values(p).theta
    b = angle_values(p.conjugate(U)).theta
    for k in a:
        assert abs(wrap_angle(a[k] - b[k])) < 1e-9


@given(grid_polygons(), st.integers(0, 10**6), st.floats(-2, 2))
def test_angle_shift_under_bending(p, seed, t):
    i, l = _any_flow(p, seed)
    before = angle_values(p).theta
    after = angle_values(bend(p, FlowSpec(i, l, t))).theta
    for (k, j), th in before.items():
        expected = t if (k, j) == (i, l) else -t if (k, j + 1) == (i, l) else 0.0
        assert abs(wrap_angle(after[(k, j)] - th - expected)) < 1e-8


def test_degenerate_diagonal_rejected():
    from bendix.polygon import Polygon

    # first two sides parallel: the four-point value at (1, 1) vanishes
    w = np.array([[1, 0], [1, 0], [0, 1], [0, 1], [0, 1]], dtype=complex)
    p = Polygon(1, [1.5, 1.5, 1, 1, 1], w)
    with pytest.raises(StrictInterlacingViolation):
        angle_values(p)


def _bracket(p, f, g, pf=False, pg=False):
    return poisson_bracket_fd(f, g, p, periodic=(pf, pg))


def test_bracket_sign_and_antisymmetry():
    p = polygon_for(1, 5, 4)
    obs = ActionAngleObservables(5, 1)
    lam = lambda E: obs(E)[obs.index("lambda", 1, 1)]
    theta = lambda E: obs(E)[obs.index("theta", 1, 1)]
    assert _bracket(p, lam, theta, False, True) == pytest.approx(1, abs=1e-5)
    assert _bracket(p, theta, lam, True, False) == pytest.approx(-1, abs=1e-5)
    assert _bracket(p, lam, lam) == pytest.approx(0, abs=1e-12)


@settings(max_examples=6)
@given(grid_polygons(grid=[(1, 5), (2, 6), (1, 6)]))
def test_bracket_table_blocks(p):
    obs = ActionAngleObservables(p.n, p.m)
    k = len(obs.index_set)
    T = bracket_table(obs, p)
    assert np.allclose(T, -T.T)
    assert np.max(np.abs(T[:k, :k])) < 5e-5
    assert np.max(np.abs(T[:k, k : 2 * k])) < 5e-5
    assert np.max(np.abs(T[k : 2 * k, 2 * k :] - np.eye(k))) < 5e-4
    assert np.max(np.abs(T[2 * k :, 2 * k :])) < 5e-4


def test_lambda_generates_bending():
    # the derivative of any function along the bend equals its bracket with lambda
    p = polygon_for(2, 6, 9)
    obs = ActionAngleObservables(6, 2)
    lam = lambda E: obs(E)[obs.index("lambda", 2, 1)]
    probe = lambda E: float(np.real(E[0, 0, 1] + 2 * E[1, 1, 2]))
    t = 1e-4
    plus = bend(p, FlowSpec(2, 1, t)).edges()
    minus = bend(p, FlowSpec(2, 1, -t)).edges()
    rate = (probe(plus) - probe(minus)) / (2 * t)
    assert _bracket(p, lam, probe) == pytest.approx(rate, abs=1e-6)


def test_trajectory_csv():
    p = polygon_for(1, 5, 2)
    header, rows = flow_trajectory(p, 1, 1, np.linspace(0, 1, 4))
    assert header[:2] == ["t", "closure_defect"]
    assert len(rows) == 4 and all(len(r) == len(header) for r in rows)
    text = trajectory_csv(header, rows)
    lines = text.strip().split("\n")
    assert len(lines) == 5
    back = [float(x) for x in lines[2].split(",")]
    assert back == rows[1]
    # lambda columns stay put, theta_1_1 moves linearly
    col = header.index("theta_1_1")
    steps = np.diff([r[col] for r in rows])
    assert np.allclose(wrap_angle(steps), 1 / 3, atol=1e-9)
