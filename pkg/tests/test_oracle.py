import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rcm.errors import DegenerateMeans, DimensionTooLarge, InvalidParameter, NotSPD, TooLarge
from rcm.instances import two_blobs
from rcm.oracle import (capped_simplex_grid, capped_simplex_vertices, fda_closed_form,
                        fisher_ratio, grid_nearest_point, grid_sphere_solve,
                        mpm_kappa_closed_form, sphere_grid)
from rcm.solver_convex import eta_max, nearest_point
from rcm.uncertainty import ClassMoments, ConvexHull, Family, Pair, support_min_pair

from conftest import symmetric_moments


# ---- sphere grid


def test_sphere_grid_shapes():
    assert sphere_grid(1, 10).tolist() == [[1.0], [-1.0]]
    assert np.allclose(np.linalg.norm(sphere_grid(2, 400), axis=1), 1.0)
    F = sphere_grid(3, 2000)
    assert F.shape == (2000, 3) and np.allclose(np.linalg.norm(F, axis=1), 1.0)
    with pytest.raises(DimensionTooLarge):
        sphere_grid(4, 100)


def test_grid_solve_points():
    pair = Pair(ConvexHull(np.array([[1.0, 0.0]])), ConvexHull(np.array([[-1.0, 0.0]])))
    res = grid_sphere_solve(pair)
    assert np.allclose(res.w_best, [1.0, 0.0], atol=2 * np.pi / 1e4)
    assert res.value == pytest.approx(2.0, abs=1e-6)
    assert res.value == support_min_pair(pair, res.w_best).value


def test_grid_solve_ball(ball):
    res = grid_sphere_solve(ball)
    assert res.value == pytest.approx(-0.5, abs=1e-6)
    assert np.allclose(res.w_best, [1.0, 0.0], atol=1e-3)


def test_grid_solve_one_dimensional():
    pair = Pair(ConvexHull(np.array([[-1.0], [3.0]])), ConvexHull(np.array([[-3.0], [1.0]])))
    res = grid_sphere_solve(pair)
    assert res.w_best.tolist() == [1.0] and res.value == -2.0


def test_grid_solve_resolution_floor(ball):
    with pytest.raises(InvalidParameter):
        grid_sphere_solve(ball, resolution=100)


# ---- weight grids


def test_capped_simplex_grid():
    G = capped_simplex_grid(3, 0.5, 0.1)
    assert np.allclose(G.sum(axis=1), 1.0)
    assert G.max() <= 0.5 + 1e-12
    assert len(capped_simplex_grid(2, 1.0, 0.25)) == 5


def test_capped_simplex_vertices():
    V = capped_simplex_vertices(3, 0.4)
    assert np.allclose(V.sum(axis=1), 1.0)
    assert {tuple(sorted(v)) for v in V} == {(0.2, 0.4, 0.4)}
    assert len(V) == 3


def test_grid_nearest_instance_a(instance_a):
    d, xp, xm = grid_nearest_point(Family.from_data(instance_a, "ch").pair(0.0))
    assert d == pytest.approx(2.0, abs=2 * 0.02 * np.sqrt(10))
    assert np.allclose(xp, [1, 0]) and np.allclose(xm, [-1, 0])


def test_grid_nearest_coincident():
    P = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert grid_nearest_point(Pair(ConvexHull(P), ConvexHull(P)))[0] == 0.0


def test_grid_nearest_rch(overlap_1d):
    fam = Family.from_data(overlap_1d, "rch")
    d, _, _ = grid_nearest_point(fam.pair(fam.from_native(0.8)))
    assert d == pytest.approx(1.0, abs=2 * 0.02 * 6.0)


def test_grid_nearest_limits():
    P = np.zeros((4, 2))
    with pytest.raises(TooLarge):
        grid_nearest_point(Pair(ConvexHull(P), ConvexHull(P[:2])))
    with pytest.raises(InvalidParameter):
        grid_nearest_point(Pair(ConvexHull(P[:2]), ConvexHull(P[:2])), step=0.1)


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_grid_nearest_bounds_solver(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((3, 2)) + [2.5, 0]
    B = rng.standard_normal((3, 2))
    pair = Pair(ConvexHull(A), ConvexHull(B))
    exact = nearest_point(pair).distance
    grid = grid_nearest_point(pair)[0]
    diam = np.max(np.linalg.norm(np.vstack([A, B])[:, None] - np.vstack([A, B])[None], axis=2))
    assert exact <= grid + 1e-9
    assert grid - exact <= 2 * 0.02 * diam


# ---- closed forms


def test_fda_symmetric():
    w, zeta = fda_closed_form(*symmetric_moments(0.5))
    assert np.allclose(w, [1.0, 0.0]) and zeta == pytest.approx(2.0, abs=1e-12)


def test_fda_equal_means():
    m = ClassMoments.from_cov([0.3, 0.1], np.eye(2))
    assert fda_closed_form(m, m)[1] == 0.0


def test_fda_diagonal():
    mp = ClassMoments.from_cov([1.0, 0.0], np.diag([1.0, 4.0]))
    mm = ClassMoments.from_cov([-1.0, 0.0], np.diag([1.0, 4.0]))
    w, zeta = fda_closed_form(mp, mm)
    assert np.allclose(w, [1.0, 0.0]) and zeta == pytest.approx(np.sqrt(2), abs=1e-12)


def test_fda_singular():
    m = ClassMoments.from_cov([1.0, 0.0], np.diag([1.0, 0.0]))
    with pytest.raises(NotSPD):
        fda_closed_form(m, m)


@given(st.integers(0, 10_000))
def test_fda_direction_beats_random(seed):
    rng = np.random.default_rng(seed)
    fam = Family.from_data(two_blobs(seed, 1.0), "fda")
    mp, mm = fam.moments_plus, fam.moments_minus
    w, _ = fda_closed_form(mp, mm)
    W = rng.standard_normal((1000, 2))
    best = max(fisher_ratio(mp, mm, v / np.linalg.norm(v)) for v in W)
    assert fisher_ratio(mp, mm, w) >= best - 1e-12


@pytest.mark.parametrize("var,gap,kappa", [(1.0, 1.0, 1.0), (0.25, 1.0, 2.0), (1.0, 2.5, 2.5)])
def test_mpm_closed_form_examples(var, gap, kappa):
    assert mpm_kappa_closed_form(*symmetric_moments(var, gap)) == pytest.approx(kappa, abs=1e-6)


def test_mpm_degenerate_means():
    m = ClassMoments.from_cov([0.0, 0.0], np.eye(2))
    with pytest.raises(DegenerateMeans):
        mpm_kappa_closed_form(m, m)


@pytest.mark.parametrize("seed", range(20))
def test_mpm_matches_bisection(seed):
    fam = Family.from_data(two_blobs(seed, 2.0), "ellipsoid")
    ref = mpm_kappa_closed_form(fam.moments_plus, fam.moments_minus)
    assert eta_max(fam).eta_max == pytest.approx(ref, abs=1e-3)
