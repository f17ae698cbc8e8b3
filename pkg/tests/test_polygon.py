from fractions import Fraction
from itertools import permutations, product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bendix.errors import InvalidInput, SizeLimit
from bendix.linalg import random_unitary
from bendix.polygon import (
    Polygon,
    SideLengths,
    WallId,
    centralizer_dimension,
    check_semistable,
    check_triangle_inequalities,
    closure_defect,
    enumerate_walls,
    in_cone,
    is_general_position,
    is_on_wall,
    moduli_dimension,
    parse_lengths,
)

from conftest import grid_polygons, polygon_for


def test_triangle_inequality_examples():
    assert check_triangle_inequalities(SideLengths(1, (1, 1, 1))).satisfied
    bad = check_triangle_inequalities(SideLengths(1, (3, 1, 1)))
    assert not bad.satisfied and bad.violated == (1,)
    assert check_triangle_inequalities(SideLengths(2, (1,) * 6)).satisfied


def test_triangle_inequality_equivalent_form():
    s = SideLengths(2, (Fraction(5, 2), 1, 1, 1, 1, 1))
    # r_1 = 5/2 vs rho/(m+1) = 15/6: boundary, still satisfied
    assert check_triangle_inequalities(s).satisfied
    s = SideLengths(2, (Fraction(26, 10), 1, 1, 1, 1, 1))
    assert check_triangle_inequalities(s).violated == (1,)


def _hat_by_hand(x):
    return 0.5 * np.array([[x[0], x[1] + 1j * x[2]], [x[1] - 1j * x[2], -x[0]]])


def test_equilateral_triangle_is_closed():
    angles = [0, 2 * np.pi / 3, 4 * np.pi / 3]
    edges = np.array([_hat_by_hand((np.cos(a), np.sin(a), 0.0)) + 0.5 * np.eye(2) for a in angles])
    assert closure_defect(edges) <= 1e-12


def test_single_edge_defect():
    e = np.array([np.diag([2.0, 0.0])])
    # e - (2/2) I = diag(1, -1)
    assert closure_defect(e) == pytest.approx(np.sqrt(2))


def test_construction_rejects_bad_input():
    with pytest.raises(InvalidInput):
        SideLengths(1, (1, 1))
    with pytest.raises(InvalidInput):
        SideLengths(1, (1, -1, 1))
    with pytest.raises(InvalidInput):
        Polygon(1, [1, 1], np.eye(2))
    with pytest.raises(InvalidInput):
        Polygon(1, [1, 1, 1], np.array([[1, 0], [0, 1], [2, 0]]))


def test_parse_lengths_keeps_rationals_exact():
    r = parse_lengths("1, 3/2, 0.25")
    assert r[0] == 1 and isinstance(r[0], Fraction)
    assert r[1] == Fraction(3, 2)
    assert isinstance(r[2], float)
    assert SideLengths(1, r[:2] + (Fraction(1),)).exact


def _walls_oracle(m, r):
    """All ordered (I, J, k) solutions, then keep the label with side 1 in I."""
    n = len(r)
    found = set()
    for mask in product([0, 1], repeat=n):
        if all(mask) or not any(mask):
            continue
        I = tuple(i + 1 for i in range(n) if mask[i])
        J = tuple(i + 1 for i in range(n) if not mask[i])
        for k in range(1, m + 1):
            lhs = k * sum(r[i - 1] for i in I)
            rhs = (m - k + 1) * sum(r[j - 1] for j in J)
            if lhs == rhs:
                found.add((I, J, k) if 1 in I else (J, I, m - k + 1))
    return found


def test_square_wall():
    walls = enumerate_walls(SideLengths(1, (1, 1, 1, 1)))
    assert WallId((1, 2), (3, 4), 1) in walls
    assert is_on_wall(SideLengths(1, (1, 1, 1, 1)))


def test_triangle_has_no_walls():
    assert enumerate_walls(SideLengths(1, (1, 1, 1))) == []
    assert not is_on_wall(SideLengths(1, (1, 1, 1)))


def test_walls_against_brute_force():
    r = (2, 1, 1, 1, 1)
    got = {(w.I, w.J, w.k) for w in enumerate_walls(SideLengths(2, r))}
    assert got == _walls_oracle(2, r)
    assert got


def test_slightly_off_wall():
    r = (1.0, 1.0, 1.0, 1.0 + 1e-3 * np.sqrt(2))
    assert not is_on_wall(SideLengths(1, r))


def test_wall_size_limit():
    with pytest.raises(SizeLimit):
        enumerate_walls(SideLengths(1, (1,) * 21))


small_rationals = st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=4)


@given(st.integers(1, 3), st.lists(small_rationals, min_size=3, max_size=7))
def test_exact_and_float_walls_agree(m, r):
    exact = enumerate_walls(SideLengths(m, tuple(r)), tol=0)
    s_float = SideLengths(m, tuple(float(x) for x in r))
    assert exact == enumerate_walls(s_float, tol=1e-12 * s_float.rho)
    assert {(w.I, w.J, w.k) for w in exact} == _walls_oracle(m, r)


@given(st.integers(1, 2), st.lists(st.integers(1, 4), min_size=3, max_size=6), st.randoms())
def test_wall_membership_is_permutation_invariant(m, r, rnd):
    shuffled = list(r)
    rnd.shuffle(shuffled)
    assert is_on_wall(SideLengths(m, tuple(r))) == is_on_wall(SideLengths(m, tuple(shuffled)))


def test_in_cone_reported_separately():
    s = SideLengths(1, (5, 1, 1, 1))
    assert not in_cone(s) and enumerate_walls(s) == []
    # outside the cone yet on the hyperplane 7 + 3 = 2 * (1 + 1 + 1 + 2)
    s = SideLengths(2, (7, 1, 1, 1, 2, 3))
    assert not in_cone(s)
    assert WallId((1, 6), (2, 3, 4, 5), 1) in enumerate_walls(s)


def test_moduli_dimension():
    assert moduli_dimension(6, 2) == 8
    assert moduli_dimension(4, 1) == 2
    assert moduli_dimension(5, 1) == 4
    with pytest.raises(InvalidInput):
        moduli_dimension(3, 2)


def test_block_polygon_is_decomposable():
    # two closed polygons in orthogonal subspaces: a 2x2 triangle and a 1x1 pair
    angles = [0, 2 * np.pi / 3, 4 * np.pi / 3]
    w = []
    for a in angles:
        v = np.array([np.cos(a / 2), np.sin(a / 2), 0.0])
        w.append(v)
    w += [np.array([0, 0, 1.0]), np.array([0, 0, 1.0])]
    # 2x2 block: three unit sides along the real half-angle vectors sum to (3/2) I_2
    p = Polygon(2, [1, 1, 1, 0.75, 0.75], np.array(w))
    assert closure_defect(p) <= 1e-12
    assert centralizer_dimension(p) >= 1


def test_triangle_centralizer_is_trivial():
    angles = [0, 2 * np.pi / 3, 4 * np.pi / 3]
    w = np.array([[np.cos(a / 2), np.sin(a / 2)] for a in angles])
    p = Polygon(1, [1, 1, 1], w)
    assert closure_defect(p) <= 1e-12
    assert centralizer_dimension(p) == 0


@given(grid_polygons(), st.integers(0, 1000))
def test_generic_centralizer_trivial_and_conjugation_invariant(p, seed):
    assert centralizer_dimension(p) == 0
    U = random_unitary(p.m + 1, np.random.default_rng(seed))
    assert centralizer_dimension(p.conjugate(U)) == 0


def test_centralizer_conjugation_invariant_for_block_polygon():
    # sides along the coordinate axes: traceless diagonals commute with all of them
    w = np.array([[1, 0, 0], [1, 0, 0], [0, 1, 0], [0, 1, 0], [0, 0, 1], [0, 0, 1]], dtype=float)
    p = Polygon(2, [1] * 6, w)
    U = random_unitary(3, np.random.default_rng(5))
    assert centralizer_dimension(p) == centralizer_dimension(p.conjugate(U)) == 2


@given(grid_polygons())
def test_closed_polygons_satisfy_triangle_inequalities(p):
    assert closure_defect(p) <= 1e-9 * p.Lambda
    assert check_triangle_inequalities(p.side_lengths()).satisfied


def _semistable_oracle(points, r, m):
    P = np.array(points, dtype=complex)
    P /= np.linalg.norm(P, axis=1)[:, None]
    rho = sum(r)
    n = len(P)
    for mask in range(1, 1 << n):
        S = P[[i for i in range(n) if mask >> i & 1]]
        rank = np.linalg.matrix_rank(S, tol=1e-8)
        basis = np.linalg.svd(S)[2][:rank].conj().T
        inside = [i for i in range(n) if np.linalg.norm(P[i] - basis @ (basis.conj().T @ P[i])) < 1e-8]
        if sum(r[i] for i in inside) > rank * rho / (m + 1) + 1e-12:
            return False
    return True


def test_semistability_examples():
    pts = [[1, 0], [0, 1], [1, 1]]
    assert check_semistable(pts, SideLengths(1, (1, 1, 1))).semistable
    assert _semistable_oracle(pts, (1, 1, 1), 1)
    pts = [[1, 0], [1j, 0], [0, 1]]
    verdict = check_semistable(pts, SideLengths(1, (2, 1, 1)))
    assert not verdict.semistable
    assert verdict.violations[0][0] == (1, 2)
    assert not _semistable_oracle(pts, (2, 1, 1), 1)


@given(st.integers(0, 10**6), st.sampled_from([(1, 4), (2, 5), (2, 4)]))
def test_semistability_matches_oracle(seed, mn):
    m, n = mn
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, m + 1)) + 0j
    if rng.random() < 0.5:
        pts[1] = pts[0] * 1j
    r = tuple(int(x) for x in rng.integers(1, 4, n))
    assert check_semistable(pts, SideLengths(m, r)).semistable == _semistable_oracle(pts, r, m)


def test_general_position_examples():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    assert is_general_position(pts)
    assert not is_general_position([[1, 0, 0], [1, 0, 0], [0, 1, 0]])
    frame = np.vstack([np.eye(3), np.ones(3)])
    assert is_general_position(frame)


def test_general_position_rank_oracle():
    frame = np.vstack([np.eye(3), np.ones(3)])
    for rows in permutations(range(4), 3):
        assert np.linalg.matrix_rank(frame[list(rows)]) == 3


def test_json_round_trips(rng):
    p = polygon_for(2, 6, 3)
    q = Polygon.from_json(p.to_json())
    assert np.array_equal(q.w, p.w) and np.array_equal(q.r, p.r)
    s = SideLengths(1, (Fraction(3, 2), 1, 1))
    assert SideLengths.from_json(s.to_json()) == s
    assert s.to_json()["r"][0] == "3/2"
