import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rcm.errors import EmptyFamily, InvalidLoss, InvalidParameter, LossOverflow
from rcm.instances import discrete_families
from rcm.statcheck import (ClassPriors, DiscreteDistribution, LossSpec, check_loss,
                           constant_loss, exponential_loss, golden_section, j_loss,
                           logistic_loss, mean_set, min_bias_j, sandwich_check,
                           worst_case_expected_loss, worst_case_minimax)
from rcm.uncertainty import support_values

PRIORS = ClassPriors()
W = np.array([1.0, 0.0])
pm = DiscreteDistribution.point_mass


# ---- losses


def test_j_loss_examples():
    xp, xm = np.array([1.0, 0.0]), np.array([-1.0, 0.0])
    assert j_loss(W, 0.0, xp, xm, PRIORS, exponential_loss()) == pytest.approx(np.exp(-1))
    assert j_loss(W, 1.0, xp, xm, PRIORS, exponential_loss()) == pytest.approx(
        0.5 * (np.exp(-2) + 1.0))
    assert j_loss(W, 3.7, xp, xm, PRIORS, constant_loss(2.5)) == 2.5


def test_loss_overflow():
    with pytest.raises(LossOverflow):
        exponential_loss()(np.array([-1000.0]))


def test_logistic_curvature_bound():
    check_loss(logistic_loss())
    z = np.linspace(-50, 50, 4001)
    h = 1e-3
    f = logistic_loss()
    second = (f(z + h) - 2 * f(z) + f(z - h)) / h ** 2
    assert np.max(second) <= 0.25 + 1e-6


def test_check_loss_rejects():
    with pytest.raises(InvalidLoss):
        check_loss(exponential_loss())
    with pytest.raises(InvalidLoss):
        check_loss(LossSpec("square", lambda z: z ** 2, 2.0))
    with pytest.raises(InvalidLoss):
        check_loss(LossSpec("tight", lambda z: np.logaddexp(0.0, -z), 0.1))


# ---- bias minimization


def test_golden_section_quadratic():
    b, v = golden_section(lambda b: (b - 1.3) ** 2, -10, 10, 1e-10)
    assert b == pytest.approx(1.3, abs=1e-8)
    assert v == pytest.approx(0.0, abs=1e-15)


def test_min_bias_symmetric_exponential():
    b, v = min_bias_j(W, np.array([1.0, 0.0]), np.array([-1.0, 0.0]), PRIORS, exponential_loss())
    assert b == pytest.approx(0.0, abs=1e-7)
    assert v == pytest.approx(np.exp(-1), abs=1e-12)


def test_min_bias_coincident_points_matches_dense_grid():
    x = np.array([0.7, 0.0])
    loss = logistic_loss()
    b, v = min_bias_j(W, x, x, PRIORS, loss)
    grid = np.linspace(-20, 20, 400_001)
    dense = 0.5 * loss(0.7 + grid) + 0.5 * loss(-0.7 - grid)
    assert v == pytest.approx(dense.min(), abs=1e-9)
    # symmetric loss and equal priors center the projection
    assert b == pytest.approx(-0.7, abs=1e-5)


def test_min_bias_constant_loss():
    _, v = min_bias_j(W, np.array([1.0, 0.0]), np.array([-1.0, 0.0]), PRIORS, constant_loss(3.0))
    assert v == 3.0


# ---- distributions and mean sets


def test_distribution_validation():
    with pytest.raises(InvalidParameter):
        DiscreteDistribution(np.zeros((2, 2)), [0.5, 0.6])
    with pytest.raises(InvalidParameter):
        DiscreteDistribution(np.zeros((2, 2)), [1.0])
    with pytest.raises(InvalidParameter):
        ClassPriors(0.7, 0.2)


def test_mean_set_examples():
    assert np.array_equal(mean_set([pm([1.0, 2.0])]).points, [[1.0, 2.0]])
    two = [DiscreteDistribution([[0.0, 1.0], [0.0, -1.0]], [0.5, 0.5]), pm([2.0, 0.0])]
    assert np.allclose(mean_set(two).points, [[0.0, 0.0], [2.0, 0.0]])
    pts = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    assert np.array_equal(mean_set([pm(p) for p in pts]).points, pts)
    with pytest.raises(EmptyFamily):
        mean_set([])


@given(st.integers(0, 10_000))
def test_mean_set_closed_under_mixtures(seed):
    rng = np.random.default_rng(seed)
    fam = [DiscreteDistribution(rng.standard_normal((3, 2)), np.full(3, 1 / 3)) for _ in range(3)]
    lam = rng.dirichlet(np.ones(3))
    mix = DiscreteDistribution(np.vstack([p.points for p in fam]),
                               np.concatenate([l * p.weights for l, p in zip(lam, fam)]))
    t = np.linspace(0, 2 * np.pi, 90, endpoint=False)
    D = np.column_stack([np.cos(t), np.sin(t)])
    a = support_values(mean_set(fam), D)
    b = support_values(mean_set(fam + [mix]), D)
    assert np.max(np.abs(a - b)) <= 1e-12


# ---- worst case


def test_worst_case_point_masses():
    fams = ([pm([1.0, 0.0])], [pm([-1.0, 0.0])])
    assert worst_case_expected_loss(fams, W, PRIORS, exponential_loss()) == pytest.approx(
        np.exp(-1), abs=1e-9)


def test_worst_case_picks_nearer_mean():
    fams = ([pm([1.0, 0.0]), pm([3.0, 0.0])], [pm([-1.0, 0.0])])
    worst = worst_case_expected_loss(fams, W, PRIORS, exponential_loss())
    assert worst == pytest.approx(np.exp(-1), abs=1e-9)


def test_worst_case_constant_loss():
    fams = discrete_families(0)
    assert worst_case_expected_loss(fams, W, PRIORS, constant_loss(2.5)) == pytest.approx(2.5)


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_worst_case_grid_matches_minimax(seed):
    fams = discrete_families(seed)
    w = np.random.default_rng(seed).standard_normal(2)
    w /= np.linalg.norm(w)
    a = worst_case_expected_loss(fams, w, PRIORS, logistic_loss())
    b = worst_case_minimax(fams, w, PRIORS, logistic_loss())
    # convex in b and linear in the mixture weights: the saddle values agree
    assert a == pytest.approx(b, abs=1e-8)


# ---- sandwich


def test_sandwich_point_masses_tight():
    fams = ([pm([1.0, 0.0]), pm([3.0, 0.5])], [pm([-1.0, 0.0]), pm([-2.0, -1.0])])
    r = sandwich_check(fams, PRIORS, logistic_loss())
    assert r.holds
    assert r.worst == pytest.approx(r.J_star, abs=1e-9)


def test_sandwich_spread_with_equal_means():
    spread = DiscreteDistribution([[2.0, 0.0], [0.0, 0.0]], [0.5, 0.5])
    fams = ([spread], [pm([-1.0, 0.0])])
    r = sandwich_check(fams, PRIORS, logistic_loss())
    assert r.holds and r.worst >= r.J_star - 1e-9


def test_sandwich_rejects_uncertified_loss():
    with pytest.raises(InvalidLoss):
        sandwich_check(discrete_families(0), PRIORS, exponential_loss())


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_sandwich_random(seed):
    r = sandwich_check(discrete_families(seed), PRIORS, logistic_loss())
    assert r.holds, (r.J_star, r.worst, r.upper)
