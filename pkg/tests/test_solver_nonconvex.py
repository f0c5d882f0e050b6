import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rcm.errors import InvalidDirection, InvalidParameter, NotDifferentiable, SubproblemUnbounded
from rcm.instances import overlapping_instance
from rcm.linalg import psd_sqrt
from rcm.solver_nonconvex import (LocalSearchConfig, hessian_g, initial_direction,
                                  linearized_subproblem, local_optimality_check, local_search,
                                  sample_cap, tangent_max_eigenvalue)
from rcm.uncertainty import ConvexHull, Direct, Ellipsoid, Family, Pair, support_min_pair


def fd_hessian(pair, w, h=1e-5):
    g = lambda v: support_min_pair(pair, v).value
    E = np.eye(w.size)
    return np.array([[(g(w + h * (a + b)) - g(w + h * (a - b)) - g(w - h * (a - b))
                       + g(w - h * (a + b))) / (4 * h * h) for b in E] for a in E])


def random_ellipsoid_pair(rng, kappa):
    out = []
    for c in ([0.3, 0.0], [-0.3, 0.2]):
        B = rng.standard_normal((2, 2))
        out.append(Ellipsoid(np.array(c), psd_sqrt(B @ B.T + 0.3 * np.eye(2)), kappa))
    return Pair(*out)


# ---- subproblem


def test_subproblem_ball_off_axis(ball):
    res = linearized_subproblem(ball, np.array([0.0, 1.0]))
    assert np.allclose(res.w_hat, [1 / np.sqrt(3), 1.0], atol=1e-6)


def test_subproblem_ball_fixed_point(ball):
    res = linearized_subproblem(ball, np.array([1.0, 0.0]))
    assert np.allclose(res.w_hat, [1.0, 0.0], atol=1e-7)


def test_subproblem_one_dimensional():
    pair = Pair(ConvexHull(np.array([[-1.0], [3.0]])), ConvexHull(np.array([[-3.0], [1.0]])))
    res = linearized_subproblem(pair, np.array([1.0]))
    assert res.w_hat.tolist() == [1.0]


def test_subproblem_rejects_non_unit(ball):
    with pytest.raises(InvalidDirection):
        linearized_subproblem(ball, np.array([0.0, 2.0]))


def test_subproblem_unbounded_when_origin_outside():
    # separated ball: g grows without bound along the hyperplane
    pair = Direct(Ellipsoid(np.array([3.0, 0.0]), np.eye(2), 1.0))
    w = np.array([1.0, 1.0]) / np.sqrt(2)
    with pytest.raises(SubproblemUnbounded):
        linearized_subproblem(pair, w)


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_subproblem_improves_and_stays_on_hyperplane(seed):
    fam, eta = overlapping_instance(seed % 40)
    pair = fam.pair(eta)
    w = np.random.default_rng(seed).standard_normal(2)
    w /= np.linalg.norm(w)
    res = linearized_subproblem(pair, w)
    assert w @ res.w_hat == pytest.approx(1.0, abs=1e-9)
    assert res.value >= support_min_pair(pair, w).value - 1e-12
    assert np.linalg.norm(res.w_hat) >= 1.0 - 1e-12


# ---- local search


def test_local_search_ball_from_side(ball):
    res = local_search(ball, LocalSearchConfig(init=[0.0, 1.0]))
    assert res.converged
    # the stopping rule works at the epsilon scale
    assert np.allclose(res.w, [1.0, 0.0], atol=1e-5)
    assert res.value == pytest.approx(-0.5, abs=1e-9)


def test_local_search_ball_fixed_start(ball):
    res = local_search(ball, LocalSearchConfig(init=[1.0, 0.0]))
    assert len(res.trace) == 1
    assert np.allclose(res.trace.records[0].w_hat, [1.0, 0.0])
    assert res.w.tolist() == [1.0, 0.0]


def test_local_search_one_dimensional_hulls():
    pair = Pair(ConvexHull(np.array([[-1.0], [3.0]])), ConvexHull(np.array([[-3.0], [1.0]])))
    res = local_search(pair)
    assert res.w.tolist() == [1.0]
    assert res.value == pytest.approx(-2.0)


@settings(max_examples=15)
@given(st.integers(0, 500))
def test_local_search_trace_invariants(seed):
    fam, eta = overlapping_instance(seed)
    res = local_search(fam.pair(eta))
    assert res.converged
    recs = res.trace.records
    vals = res.trace.values()
    assert np.all(np.diff(vals) > -1e-12)
    assert np.all(vals < 0)
    for r in recs:
        assert np.linalg.norm(r.w_tilde) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(r.w_hat) >= 1.0 - 1e-12
        assert r.g_hat >= r.g_tilde - 1e-12


def test_local_search_config_validation():
    with pytest.raises(InvalidParameter):
        LocalSearchConfig(epsilon=0.0)
    with pytest.raises(InvalidParameter):
        LocalSearchConfig(max_outer=0)


def test_initial_direction_rules(ball):
    assert np.allclose(initial_direction(ball), [1.0, 0.0])
    a = initial_direction(ball, "random", seed=3)
    assert np.allclose(a, initial_direction(ball, "random", seed=3))
    assert np.linalg.norm(a) == pytest.approx(1.0)
    assert np.allclose(initial_direction(ball, [0.0, 5.0]), [0.0, 1.0])
    with pytest.raises(InvalidDirection):
        initial_direction(ball, [0.0, 0.0])
    with pytest.raises(InvalidParameter):
        initial_direction(ball, "bogus")


def test_initial_direction_falls_back_when_centers_coincide():
    pair = Direct(Ellipsoid(np.zeros(2), np.eye(2), 1.0))
    w = initial_direction(pair, seed=1)
    assert np.linalg.norm(w) == pytest.approx(1.0)


# ---- second order


def test_hessian_unit_ball():
    pair = Direct(Ellipsoid(np.zeros(2), np.eye(2), 1.0))
    assert np.allclose(hessian_g(pair, np.array([1.0, 0.0])), np.diag([0.0, -1.0]))


def test_hessian_zero_radius_is_zero():
    pair = Direct(Ellipsoid(np.array([1.0, 2.0]), np.eye(2), 0.0))
    assert np.allclose(hessian_g(pair, np.array([1.0, 0.0])), 0.0)


@given(st.integers(0, 10_000), st.floats(0.2, 2.0))
def test_hessian_matches_finite_differences(seed, kappa):
    rng = np.random.default_rng(seed)
    pair = random_ellipsoid_pair(rng, kappa)
    w = rng.standard_normal(2)
    w /= np.linalg.norm(w)
    assert np.max(np.abs(hessian_g(pair, w) - fd_hessian(pair, w))) <= 1e-4


def test_hessian_not_differentiable():
    pair = Direct(Ellipsoid(np.zeros(2), np.diag([1.0, 0.0]), 1.0))
    with pytest.raises(NotDifferentiable):
        hessian_g(pair, np.array([0.0, 1.0]))


def test_hessian_needs_ellipsoids(instance_a):
    with pytest.raises(InvalidParameter):
        hessian_g(Family.from_data(instance_a, "ch").pair(0.0), np.array([1.0, 0.0]))


def test_tangent_eigenvalue_ignores_radial_direction():
    H = np.diag([5.0, -1.0])
    assert tangent_max_eigenvalue(H, np.array([1.0, 0.0])) == pytest.approx(-1.0)


def test_optimality_check_ball(ball):
    rep = local_optimality_check(ball, np.array([1.0, 0.0]), delta=0.05, n_samples=1000)
    assert rep.max_violation <= 1e-8
    assert rep.hessian_test is True
    assert rep.tangent_eigenvalue == pytest.approx(-1.0)
    assert rep.g_star == pytest.approx(-0.5)


def test_optimality_check_detects_ascent(ball):
    assert local_optimality_check(ball, np.array([0.0, 1.0])).max_violation > 0


def test_optimality_check_rejects_non_unit(ball):
    with pytest.raises(InvalidDirection):
        local_optimality_check(ball, np.array([2.0, 0.0]))


def test_sample_cap_stays_in_cap():
    w = np.array([0.6, 0.8])
    W = sample_cap(w, 0.05, 500, seed=0)
    assert np.allclose(np.linalg.norm(W, axis=1), 1.0)
    assert np.all(np.arccos(np.clip(W @ w, -1, 1)) <= 0.05 + 1e-12)
    assert np.array_equal(W, sample_cap(w, 0.05, 500, seed=0))
