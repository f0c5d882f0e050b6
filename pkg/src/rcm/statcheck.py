"""Expected-loss view of the robust classifier on finite distribution families.

Each class is described by a finite family of discrete distributions.  The
robust problem on the hull of their means gives a lower bound ``J*`` on the
worst-case expected loss of a convex decreasing loss; a curvature bound ``L``
on the loss adds at most ``L c^2 / 2`` on top, where ``c`` bounds the support.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import EmptyFamily, InvalidLoss, InvalidParameter, LossOverflow
from .oracle import capped_simplex_grid
from .solver_convex import solve_rcm
from .uncertainty import ConvexHull, Family, Pair, support_min_pair

INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# losses


@dataclass(frozen=True)
class LossSpec:
    """A scalar loss ``l(z)`` evaluated elementwise on arrays.

    ``curvature_bound`` is ``L`` with ``0 <= l'' <= L`` (``None`` if unbounded).
    """

    name: str
    evaluator: Callable
    curvature_bound: Optional[float]
    monotone_nonincreasing: bool = True

    def __call__(self, z):
        with np.errstate(over="ignore", invalid="ignore"):
            v = self.evaluator(np.asarray(z, dtype=float))
        if not np.all(np.isfinite(v)):
            raise LossOverflow(f"{self.name} loss is not finite on the given arguments")
        return v


def exponential_loss():
    return LossSpec("exponential", lambda z: np.exp(-z), None)


def logistic_loss():
    return LossSpec("logistic", lambda z: np.logaddexp(0.0, -z), 0.25)


def constant_loss(c=1.0):
    c = float(c)
    return LossSpec("constant", lambda z: np.full(np.shape(z), c), 0.0)


def check_loss(loss, lo=-50.0, hi=50.0, n=2001, h=1e-3, slack=1e-6):
    """Finite-difference check of monotonicity and ``0 <= l'' <= L`` on a grid.

    Raises :class:`InvalidLoss` on the first violated condition.
    """
    if loss.curvature_bound is None:
        raise InvalidLoss(f"{loss.name} loss has no curvature bound")
    if not loss.monotone_nonincreasing:
        raise InvalidLoss(f"{loss.name} loss is not declared non-increasing")
    z = np.linspace(lo, hi, n)
    v = loss(z)
    if np.any(np.diff(v) > slack * np.maximum(1.0, np.abs(v[1:]))):
        raise InvalidLoss(f"{loss.name} loss increases somewhere on [{lo}, {hi}]")
    second = (loss(z + h) - 2.0 * v + loss(z - h)) / (h * h)
    if np.any(second < -slack) or np.any(second > loss.curvature_bound + slack):
        raise InvalidLoss(f"{loss.name} loss violates 0 <= l'' <= {loss.curvature_bound}")


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class DiscreteDistribution:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.points, dtype=float))
        q = np.asarray(self.weights, dtype=float).ravel()
        if P.shape[0] != q.size or q.size == 0:
            raise InvalidParameter("need one weight per support point and at least one point")
        if np.any(q < 0) or abs(q.sum() - 1.0) > 1e-12:
            raise InvalidParameter("weights must be non-negative and sum to 1")
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "weights", q)

    @classmethod
    def point_mass(cls, p):
        return cls(np.atleast_2d(np.asarray(p, dtype=float)), np.ones(1))

    @property
    def mean(self):
        return self.weights @ self.points

    @property
    def d(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class ClassPriors:
    pi_plus: float = 0.5
    pi_minus: float = 0.5

    def __post_init__(self):
        if min(self.pi_plus, self.pi_minus) < 0 or abs(self.pi_plus + self.pi_minus - 1.0) > 1e-12:
            raise InvalidParameter("priors must be non-negative and sum to 1")


def mean_set(family):
    """Convex hull of the distribution means of a finite family."""
    if len(family) == 0:
        raise EmptyFamily("distribution family is empty")
    return ConvexHull(np.array([p.mean for p in family]))


def support_radius(families):
    """Largest support-point norm over every distribution of both classes."""
    return max(float(np.max(np.linalg.norm(p.points, axis=1))) for fam in families for p in fam)


# ---------------------------------------------------------------------------
# bias minimization


def golden_section(f, lo, hi, tol):
    """Minimize a convex ``f`` on ``[lo, hi]`` elementwise over arrays of brackets.

    ``f`` maps an array of abscissae to an array of values of the same shape.
    Returns ``(argmin, min value)`` with the argmin located within ``tol``.
    """
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    lo, hi = lo.copy(), hi.copy()
    c = hi - INVPHI * (hi - lo)
    d = lo + INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while np.max(hi - lo) > tol:
        left = fc <= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        c_new = np.where(left, hi - INVPHI * (hi - lo), d)
        d_new = np.where(left, c, lo + INVPHI * (hi - lo))
        f_new = f(np.where(left, c_new, d_new))
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = c_new, d_new
    b = 0.5 * (lo + hi)
    return b, f(b)


def default_bracket(projections):
    B = 10.0 * float(np.max(np.abs(projections))) + 10.0
    return -B, B


def j_loss(w, b, x_plus, x_minus, priors, loss):
    """``pi_+ l(x_+.w + b) + pi_- l(-x_-.w - b)``."""
    w = np.asarray(w, dtype=float)
    zp = float(np.asarray(x_plus, dtype=float) @ w) + b
    zm = -float(np.asarray(x_minus, dtype=float) @ w) - b
    return float(priors.pi_plus * loss(zp) + priors.pi_minus * loss(zm))


def min_bias_j(w, x_plus, x_minus, priors, loss, bracket=None, tol=1e-10):
    """Minimize :func:`j_loss` over the bias by golden-section search."""
    w = np.asarray(w, dtype=float)
    sp = float(np.asarray(x_plus, dtype=float) @ w)
    sm = float(np.asarray(x_minus, dtype=float) @ w)
    lo, hi = bracket if bracket is not None else default_bracket([sp, sm])

    def f(b):
        return priors.pi_plus * loss(sp + b) + priors.pi_minus * loss(-sm - b)

    b, v = golden_section(f, lo, hi, tol)
    return float(b), float(v)


# ---------------------------------------------------------------------------
# worst case over families


def _projected(family, w):
    """Padded ``(projections, weights)`` arrays of shape ``(K, J)``."""
    J = max(len(p.weights) for p in family)
    S = np.zeros((len(family), J))
    Q = np.zeros((len(family), J))
    for k, p in enumerate(family):
        n = len(p.weights)
        S[k, :n] = p.points @ w
        Q[k, :n] = p.weights
    return S, Q


def _check_families(families, w):
    fp, fm = families
    if len(fp) == 0 or len(fm) == 0:
        raise EmptyFamily("both classes need a non-empty distribution family")
    d = np.asarray(w).size
    if any(p.d != d for p in list(fp) + list(fm)):
        raise InvalidParameter("distribution dimension does not match w")


def _member_losses(S, Q, loss, b, sign):
    """Expected loss of every family member at each bias in ``b``: shape ``(K, len(b))``."""
    return np.sum(Q[:, :, None] * loss(sign * (S[:, :, None] + b)), axis=1)


def worst_case_expected_loss(families, w, priors, loss, tol=1e-6, step=0.05, n_grid=512,
                             batch=512):
    """Largest bias-minimized expected loss over mixtures of the two families.

    Mixture weights on each family run over a simplex lattice of spacing
    ``step`` (which contains every pure member); for each pair of mixtures the
    expected loss is computed exactly from the support points and minimized
    over ``b`` by golden-section search.

    The minima on a shared bias grid bound every pair's true minimum from
    above, so only pairs whose bound beats the running maximum are refined;
    each refinement is bracketed by the grid cells around its grid argmin,
    which contain the minimizer of a convex function.
    """
    w = np.asarray(w, dtype=float).ravel()
    _check_families(families, w)
    Sp, Qp = _projected(families[0], w)
    Sm, Qm = _projected(families[1], w)
    Ap = capped_simplex_grid(len(families[0]), 1.0, step)
    Am = capped_simplex_grid(len(families[1]), 1.0, step)
    lo, hi = default_bracket(np.concatenate([Sp.ravel(), Sm.ravel()]))
    grid = np.linspace(lo, hi, n_grid)
    Fp = priors.pi_plus * (Ap @ _member_losses(Sp, Qp, loss, grid, 1.0))
    Fm = priors.pi_minus * (Am @ _member_losses(Sm, Qm, loss, grid, -1.0))

    upper = np.empty((len(Ap), len(Am)))
    arg = np.empty((len(Ap), len(Am)), dtype=int)
    rows = max(1, 2_000_000 // (len(Am) * n_grid))
    for i in range(0, len(Ap), rows):
        T = Fp[i:i + rows, None, :] + Fm[None, :, :]
        arg[i:i + rows] = np.argmin(T, axis=2)
        upper[i:i + rows] = np.take_along_axis(T, arg[i:i + rows, :, None], axis=2)[..., 0]

    order = np.argsort(-upper, axis=None)
    worst = -np.inf
    for s in range(0, order.size, batch):
        idx = order[s:s + batch]
        idx = idx[upper.flat[idx] > worst]
        if idx.size == 0:
            break
        ip, im = np.unravel_index(idx, upper.shape)
        k = arg[ip, im]
        blo, bhi = grid[np.maximum(k - 1, 0)], grid[np.minimum(k + 1, n_grid - 1)]
        a, m = Ap[ip], Am[im]

        def f(b):
            ep = _member_losses(Sp, Qp, loss, b, 1.0).T
            em = _member_losses(Sm, Qm, loss, b, -1.0).T
            return priors.pi_plus * np.sum(a * ep, axis=1) + priors.pi_minus * np.sum(m * em, axis=1)

        _, vals = golden_section(f, blo, bhi, tol)
        worst = max(worst, float(np.max(vals)))
    return worst


def worst_case_minimax(families, w, priors, loss, tol=1e-10):
    """Exact worst case over the full mixture simplices.

    The expected loss is convex in ``b`` and linear in the mixture weights, so
    the max-min equals ``min_b pi_+ max_k E_k+(b) + pi_- max_k E_k-(b)``.
    """
    w = np.asarray(w, dtype=float).ravel()
    _check_families(families, w)
    Sp, Qp = _projected(families[0], w)
    Sm, Qm = _projected(families[1], w)
    lo, hi = default_bracket(np.concatenate([Sp.ravel(), Sm.ravel()]))

    def f(b):
        b = np.atleast_1d(b)
        ep = np.sum(Qp * loss(Sp[None] + b[:, None, None]), axis=2).max(axis=1)
        em = np.sum(Qm * loss(-Sm[None] - b[:, None, None]), axis=2).max(axis=1)
        return priors.pi_plus * ep + priors.pi_minus * em

    _, v = golden_section(f, np.array([lo]), np.array([hi]), tol)
    return float(v[0])


# ---------------------------------------------------------------------------
# sandwich


@dataclass
class SandwichReport:
    J_star: float
    worst: float
    upper: float
    c: float
    w: np.ndarray
    holds: bool


def sandwich_check(families, priors, loss, w=None, tol=1e-9, step=0.05):
    """Check ``J* - tol <= worst <= J* + L c^2 / 2 + tol``.

    ``w`` defaults to the robust direction on the two mean sets; ``J*`` is the
    bias-minimized loss at the worst-case means along ``w`` and ``c`` is the
    largest support-point norm.
    """
    check_loss(loss)
    fp, fm = families
    hp, hm = mean_set(fp), mean_set(fm)
    if w is None:
        fam = Family("ch", plus_points=hp.points, minus_points=hm.points)
        w = solve_rcm(fam, 0.0).w
    w = np.asarray(w, dtype=float).ravel()
    w = w / np.linalg.norm(w)
    x_plus, x_minus = support_min_pair(Pair(hp, hm), w).per_class
    _, J_star = min_bias_j(w, x_plus, x_minus, priors, loss)
    worst = worst_case_expected_loss(families, w, priors, loss, step=step)
    c = support_radius(families)
    upper = J_star + 0.5 * loss.curvature_bound * c * c
    holds = J_star - tol <= worst <= upper + tol
    return SandwichReport(J_star, worst, upper, c, w, bool(holds))
