"""Brute-force and closed-form references.

None of these routines go through the nearest-point or local-search solvers;
they only evaluate support functions, enumerate grids, or use scipy's generic
minimizer, so they can check the main solvers independently.
"""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DegenerateMeans, DimensionTooLarge, InvalidParameter, TooLarge
from .linalg import solve_spd
from .uncertainty import (ConvexHull, Pair, ReducedConvexHull, support_min_pair,
                          support_values_pair)


@dataclass
class GridSolveResult:
    w_best: np.ndarray
    value: float
    grid_resolution: int


def sphere_grid(d, resolution):
    """Unit directions: ``{+1, -1}`` for d=1, an angular grid for d=2, a Fibonacci sphere for d=3."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        t = 2.0 * np.pi * np.arange(resolution) / resolution
        return np.column_stack([np.cos(t), np.sin(t)])
    if d == 3:
        k = np.arange(resolution) + 0.5
        z = 1.0 - 2.0 * k / resolution
        r = np.sqrt(1.0 - z * z)
        phi = np.pi * (3.0 - np.sqrt(5.0)) * k
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    raise DimensionTooLarge(f"grid oracle supports d <= 3, got d={d}")


def grid_sphere_solve(pair, resolution=10_000):
    """Maximize ``g`` over a grid of unit directions."""
    d = pair.d
    if d == 2 and resolution < 360:
        raise InvalidParameter("use at least 360 directions in 2-D")
    W = sphere_grid(d, resolution)
    vals = support_values_pair(pair, W)
    i = int(np.argmax(vals))
    w = W[i]
    return GridSolveResult(w, support_min_pair(pair, w).value, len(W))


def capped_simplex_grid(n, cap, step):
    """All weight vectors on the ``step`` lattice of ``{lam >= 0, sum = 1, lam <= cap}``."""
    k = int(round(1.0 / step))
    rows = []
    for combo in itertools.product(range(k + 1), repeat=n - 1):
        last = k - sum(combo)
        if last < 0:
            continue
        rows.append(combo + (last,))
    lam = np.array(rows, dtype=float) / k
    return lam[np.all(lam <= cap + 1e-12, axis=1)]


def capped_simplex_vertices(n, cap):
    """Vertices of the capped simplex: all coordinates in ``{0, cap}`` but at most one."""
    verts = set()
    for perm in itertools.permutations(range(n)):
        lam = np.clip(1.0 - np.arange(n) * cap, 0.0, cap)
        v = np.zeros(n)
        v[list(perm)] = lam
        verts.add(tuple(np.round(v, 15)))
    return np.array(sorted(verts))


def _hull_weights(s, step):
    n = s.points.shape[0]
    if n > 3:
        raise TooLarge("grid_nearest_point handles at most 3 points per class")
    cap = s.cap if isinstance(s, ReducedConvexHull) else 1.0
    return capped_simplex_grid(n, cap, step)


def grid_nearest_point(pair, step=0.02):
    """Closest pair of points between two (reduced) hulls by weight-grid enumeration."""
    if not isinstance(pair, Pair) or not all(
            isinstance(s, (ConvexHull, ReducedConvexHull)) for s in (pair.plus, pair.minus)):
        raise InvalidParameter("grid_nearest_point needs a pair of hull sets")
    if step > 0.02 + 1e-15:
        raise InvalidParameter("use a weight step of at most 0.02")
    Xp = _hull_weights(pair.plus, step) @ pair.plus.points
    Xm = _hull_weights(pair.minus, step) @ pair.minus.points
    best = (np.inf, None, None)
    for i in range(0, len(Xp), 256):
        diff = Xp[i:i + 256, None, :] - Xm[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        j = np.unravel_index(np.argmin(dist), dist.shape)
        if dist[j] < best[0]:
            best = (float(dist[j]), Xp[i + j[0]], Xm[j[1]])
    return best


def fda_closed_form(moments_plus, moments_minus):
    """Fisher direction ``(cov_+ + cov_-)^{-1} (mean_+ - mean_-)`` and the critical radius."""
    A = moments_plus.cov + moments_minus.cov
    mu = moments_plus.mean - moments_minus.mean
    v = solve_spd(A, mu)
    zeta = float(np.sqrt(max(mu @ v, 0.0)))
    nrm = np.linalg.norm(v)
    w = v / nrm if nrm > 0 else np.zeros_like(v)
    return w, zeta


def fisher_ratio(moments_plus, moments_minus, w):
    A = moments_plus.cov + moments_minus.cov
    mu = moments_plus.mean - moments_minus.mean
    return float(mu @ w / np.sqrt(w @ A @ w))


def mpm_kappa_closed_form(moments_plus, moments_minus, tol=1e-10):
    """Critical radius ``1 / min{||S_+ w|| + ||S_- w|| : (mean_+ - mean_-).w = 1}``.

    The affine constraint is eliminated with an orthonormal basis of the
    complement of the mean gap, and the remaining smooth convex problem goes to
    scipy's BFGS.
    """
    mu = moments_plus.mean - moments_minus.mean
    nmu = np.linalg.norm(mu)
    if nmu == 0:
        raise DegenerateMeans("class means coincide")
    Sp, Sm = moments_plus.sqrt_cov, moments_minus.sqrt_cov
    w0 = mu / nmu ** 2
    d = mu.size
    if d == 1:
        return 1.0 / (abs(Sp[0, 0] * w0[0]) + abs(Sm[0, 0] * w0[0]))
    Q, _ = np.linalg.qr(np.column_stack([mu, np.eye(d)]), mode="complete")
    N = Q[:, 1:d]

    def h(z):
        w = w0 + N @ z
        return np.linalg.norm(Sp @ w) + np.linalg.norm(Sm @ w)

    def grad(z):
        w = w0 + N @ z
        g = np.zeros(d)
        for S in (Sp, Sm):
            Sw = S @ w
            n = np.linalg.norm(Sw)
            if n > 0:
                g += S.T @ Sw / n
        return N.T @ g

    res = minimize(h, np.zeros(d - 1), jac=grad, method="BFGS", options={"gtol": tol, "maxiter": 10_000})
    return 1.0 / float(res.fun)
