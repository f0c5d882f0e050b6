"""Local search for the non-convex regime (origin interior to the difference set).

The outer loop linearizes the unit-norm constraint at the current direction
``w_t`` and maximizes the concave support function ``g`` over the hyperplane
``w_t . w = 1``; the maximizer is renormalized and becomes the next direction.
Because ``g`` is negative and positively homogeneous there, every
renormalization strictly increases ``g`` until the maximizer coincides with
``w_t``.
"""

import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import (InvalidDirection, InvalidParameter, NotConverged, NotDifferentiable,
                     SubproblemUnbounded)
from .linalg import orthonormal_complement, sym_eig
from .minnorm import min_norm_point
from .uncertainty import (Direct, Ellipsoid, Pair, pair_center, support_min_pair,
                          support_values_pair)

UNIT_TOL = 1e-10
UNBOUNDED_GUARD = 1e12
ARMIJO = 1e-4


@dataclass
class LocalSearchConfig:
    """Settings for :func:`local_search`.

    ``init`` is ``"mean"`` (normalized difference of set centers), ``"random"``
    (seeded) or an explicit direction.
    """

    epsilon: float = 1e-6
    max_outer: int = 10_000
    inner_tol: float = 1e-7
    inner_max_steps: int = 5000
    inner_tol_start: float = 1e-3
    init: object = "mean"
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidParameter("epsilon must be positive")
        if self.max_outer < 1 or self.inner_max_steps < 1:
            raise InvalidParameter("iteration limits must be positive")


@dataclass
class TraceRecord:
    w_tilde: np.ndarray
    w_hat: np.ndarray
    g_tilde: float
    g_hat: float
    step: float
    inner_iterations: int

    def as_dict(self):
        return {
            "w_tilde": [float(v) for v in self.w_tilde],
            "w_hat": [float(v) for v in self.w_hat],
            "g_tilde": float(self.g_tilde),
            "g_hat": float(self.g_hat),
            "step": float(self.step),
            "inner_iterations": int(self.inner_iterations),
        }


@dataclass
class SolveTrace:
    records: List[TraceRecord] = field(default_factory=list)
    converged: bool = False

    def __len__(self):
        return len(self.records)

    def values(self):
        return np.array([r.g_tilde for r in self.records])

    def as_list(self):
        return [r.as_dict() for r in self.records]


@dataclass
class SubproblemResult:
    w_hat: np.ndarray
    value: float
    iterations: int
    stationarity: float


def _g(pair, w):
    return support_min_pair(pair, w)


def _solve_subproblem(pair, w_tilde, tol, max_steps):
    d = w_tilde.size
    base = _g(pair, w_tilde)
    if d == 1:
        return SubproblemResult(w_tilde.copy(), base.value, 0, 0.0)
    N = orthonormal_complement(w_tilde)
    scale = max(float(np.linalg.norm(pair_center(pair))), 1.0)

    z = np.zeros(d - 1)
    f = base.value
    # bundle of nearby supergradients (reduced coordinates)
    bundle = [N.T @ base.minimizer]
    radius = scale
    v_norm = np.inf
    it = 0
    for it in range(1, max_steps + 1):
        if len(bundle) == 1:
            v = bundle[0]
        else:
            v, _ = min_norm_point(np.array(bundle), tol=1e-15)
        v_norm = float(np.linalg.norm(v))
        if v_norm <= tol:
            break
        u = v / v_norm
        r = radius
        r_min = 1e-13 * (1.0 + np.linalg.norm(z)) * scale
        accepted = None
        while r >= r_min:
            zt = z + r * u
            res = _g(pair, w_tilde + N @ zt)
            if res.value >= f + ARMIJO * r * v_norm and res.value > f:
                accepted = (zt, res, r)
                break
            r *= 0.5
        if accepted is not None:
            z, res, r = accepted
            f = res.value
            if f > UNBOUNDED_GUARD or np.linalg.norm(z) > UNBOUNDED_GUARD:
                raise SubproblemUnbounded(
                    "linearized subproblem is unbounded; the origin is not interior to U")
            radius = 2.0 * r
            bundle = [N.T @ res.minimizer]
            continue
        # null step: pick up the supergradient just past the kink along u
        probe = _g(pair, w_tilde + N @ (z + max(r_min, 1e-9 * scale) * u))
        s_probe = N.T @ probe.minimizer
        if any(np.linalg.norm(s_probe - s) <= 1e-12 * scale for s in bundle):
            break
        bundle.append(s_probe)
        if len(bundle) > 4 * d + 4:
            bundle = bundle[:1] + bundle[-(2 * d + 2):]
        radius = max(r_min * 4.0, radius * 0.25)
    w_hat = w_tilde + N @ z
    return SubproblemResult(w_hat, f, it, v_norm)


def linearized_subproblem(pair, w_tilde, tol=1e-7, max_steps=5000):
    """Maximize ``g(w)`` subject to ``w_tilde . w = 1``.

    Parameters
    ----------
    pair : Pair or Direct
        Difference set whose interior contains the origin.
    w_tilde : array, shape (d,)
        Unit vector defining the hyperplane.
    tol : float
        Stop when the min-norm element of the collected supergradients
        (restricted to the hyperplane) is at most ``tol``.
    max_steps : int
        Inner iteration budget.

    Returns
    -------
    SubproblemResult
        ``w_hat`` satisfies ``w_tilde . w_hat = 1`` and ``g(w_hat) >= g(w_tilde)``.
    """
    w_tilde = np.asarray(w_tilde, dtype=float).ravel()
    if abs(np.linalg.norm(w_tilde) - 1.0) > UNIT_TOL:
        raise InvalidDirection("w_tilde must have unit norm")
    return _solve_subproblem(pair, w_tilde, tol, max_steps)


def initial_direction(pair, init="mean", seed=0):
    d = pair.d
    if isinstance(init, str):
        if init == "mean":
            w = pair_center(pair)
            if np.linalg.norm(w) > 0:
                return w / np.linalg.norm(w)
        elif init != "random":
            raise InvalidParameter(f"unknown initial direction rule {init!r}")
        w = np.random.default_rng(seed).standard_normal(d)
        return w / np.linalg.norm(w)
    w = np.asarray(init, dtype=float).ravel()
    if w.size != d or not np.linalg.norm(w) > 0:
        raise InvalidDirection("initial direction must be a nonzero vector of matching dimension")
    return w / np.linalg.norm(w)


@dataclass
class LocalSearchResult:
    w: np.ndarray
    value: float
    trace: SolveTrace
    converged: bool


def local_search(pair, cfg=None):
    """Linearized local-optimum search for the non-convex regime.

    Returns the final unit direction, its support value (negative) and the
    per-iteration trace.
    """
    cfg = cfg or LocalSearchConfig()
    w = initial_direction(pair, cfg.init, cfg.seed)
    trace = SolveTrace()
    inner_tol = max(cfg.inner_tol_start, cfg.inner_tol)
    g_w = _g(pair, w).value
    for _ in range(cfg.max_outer):
        sub = _solve_subproblem(pair, w, inner_tol, cfg.inner_max_steps)
        step = float(np.linalg.norm(sub.w_hat - w))
        if step <= cfg.epsilon and inner_tol > cfg.inner_tol:
            # never stop on a loose inner solve
            inner_tol = cfg.inner_tol
            sub = _solve_subproblem(pair, w, inner_tol, cfg.inner_max_steps)
            step = float(np.linalg.norm(sub.w_hat - w))
        trace.records.append(TraceRecord(w.copy(), sub.w_hat.copy(), g_w, sub.value, step,
                                         sub.iterations))
        if step <= cfg.epsilon:
            trace.converged = True
            break
        w = sub.w_hat / np.linalg.norm(sub.w_hat)
        g_w = _g(pair, w).value
        inner_tol = max(inner_tol * 0.1, cfg.inner_tol)
    else:
        warnings.warn(NotConverged(f"local search hit max_outer={cfg.max_outer}"))
    return LocalSearchResult(w, g_w, trace, trace.converged)


# ---------------------------------------------------------------------------
# second-order diagnostics


def _ellipsoid_terms(pair):
    """``(sqrt_cov, radius)`` terms of ``-radius * ||S w||`` in ``g`` for ellipsoid families."""
    if isinstance(pair, Direct) and isinstance(pair.diff, Ellipsoid):
        return [(pair.diff.sqrt_cov, pair.diff.radius)]
    if isinstance(pair, Pair) and isinstance(pair.plus, Ellipsoid) and isinstance(pair.minus, Ellipsoid):
        return [(pair.plus.sqrt_cov, pair.plus.radius), (pair.minus.sqrt_cov, pair.minus.radius)]
    return None


def hessian_g(pair, w, threshold=1e-10):
    """Analytic Hessian of ``g`` for ellipsoid-family pairs."""
    terms = _ellipsoid_terms(pair)
    if terms is None:
        raise InvalidParameter("hessian_g needs an ellipsoid-family pair")
    w = np.asarray(w, dtype=float).ravel()
    H = np.zeros((w.size, w.size))
    for S, kappa in terms:
        if kappa == 0:
            continue
        Sw = S @ w
        nrm = float(np.linalg.norm(Sw))
        if nrm <= threshold:
            raise NotDifferentiable("||S w|| vanishes; g is not twice differentiable here")
        Sig = S.T @ S
        Sigw = Sig @ w
        H -= kappa * (Sig / nrm - np.outer(Sigw, Sigw) / nrm ** 3)
    return 0.5 * (H + H.T)


def tangent_max_eigenvalue(H, w):
    """Largest eigenvalue of ``H`` restricted to the complement of ``w``."""
    N = orthonormal_complement(np.asarray(w, dtype=float) / np.linalg.norm(w))
    if N.shape[1] == 0:
        return -np.inf
    lam, _ = sym_eig(N.T @ H @ N)
    return float(lam[-1])


@dataclass
class OptimalityReport:
    max_violation: float
    g_star: float
    hessian_test: Optional[bool] = None
    tangent_eigenvalue: Optional[float] = None


def sample_cap(w, delta, n, seed):
    """``n`` unit vectors within angle ``delta`` of the unit vector ``w``."""
    rng = np.random.default_rng(seed)
    d = w.size
    if d == 1:
        return np.tile(w, (n, 1))
    N = orthonormal_complement(w)
    dirs = rng.standard_normal((n, d - 1))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    # area-uniform in the small cap for d = 2 is uniform in angle; fine for a local probe
    theta = delta * rng.random(n)
    return np.cos(theta)[:, None] * w + np.sin(theta)[:, None] * (dirs @ N.T)


def local_optimality_check(pair, w_star, delta=0.05, n_samples=1000, seed=0):
    """Sampled ascent test around ``w_star`` plus the Hessian test for ellipsoid families.

    ``max_violation`` is ``max g(w) - g(w_star)`` over the sampled cap; the
    Hessian test compares the largest tangent-space eigenvalue of the Hessian
    with ``g(w_star)``.
    """
    w_star = np.asarray(w_star, dtype=float).ravel()
    if abs(np.linalg.norm(w_star) - 1.0) > UNIT_TOL:
        raise InvalidDirection("w_star must have unit norm")
    g_star = support_min_pair(pair, w_star).value
    W = sample_cap(w_star, delta, n_samples, seed)
    vals = support_values_pair(pair, W)
    report = OptimalityReport(float(np.max(vals) - g_star), g_star)
    if _ellipsoid_terms(pair) is not None:
        try:
            lam = tangent_max_eigenvalue(hessian_g(pair, w_star), w_star)
        except NotDifferentiable:
            return report
        report.tangent_eigenvalue = lam
        report.hessian_test = bool(lam < g_star)
    return report
