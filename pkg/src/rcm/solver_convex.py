"""Convex regime: nearest point of the difference set, regime classification,
critical parameter search and parameter sweeps.

When the origin lies outside ``U = U_+ - U_-`` the robust separation problem
reduces to the minimum-norm point ``x*`` of ``U``; ``w* = x* / ||x*||`` and the
optimal value equals ``||x*||``.
"""

import enum
import warnings
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import InvalidBracket, NotConverged, NotSeparated
from .minnorm import Corral
from .solver_nonconvex import LocalSearchConfig, local_search
from .uncertainty import pair_center, pair_scale, support_min_pair

EPS = np.finfo(float).eps


class Regime(enum.Enum):
    STRICTLY_SEPARATED = "strictly_separated"
    TOUCHING = "touching"
    OVERLAPPING = "overlapping"


@dataclass
class NearestPointResult:
    x_star: np.ndarray
    per_class: Optional[Tuple[np.ndarray, np.ndarray]]
    distance: float
    iterations: int
    converged: bool
    gap: float
    history: List[float]
    separated: bool = False  # a strictly separating direction was certified



def nearest_point(pair, tol=1e-8, max_iter=100_000, method="mnp", stop_on_separation=False,
                  zero_tol=0.0, warn=True):
    """Minimum-norm point of the Minkowski difference ``U_+ - U_-``.

    Parameters
    ----------
    pair : Pair or Direct
    tol : float
        Stop once the Frank-Wolfe gap ``<x - s, x>`` is at most ``tol**2``
        (or at the round-off floor of the gap).
    max_iter : int
        Oracle-call budget.
    method : {"mnp", "fw"}
        ``"mnp"`` keeps a Wolfe corral of oracle atoms and re-optimizes over
        their affine hull (fully corrective); ``"fw"`` is the plain
        Frank-Wolfe step with exact line search.
    stop_on_separation : bool
        Return as soon as the oracle certifies ``g(x / ||x||) > 0``.
    zero_tol : float
        Return as soon as ``||x|| <= zero_tol``.  A round-off floor of
        ``64 eps`` times the data scale always applies.

    Returns
    -------
    NearestPointResult
    """
    if method not in ("mnp", "fw"):
        raise ValueError(f"unknown method {method!r}")
    d = pair.d
    scale = pair_scale(pair)
    c0 = pair_center(pair)
    start = support_min_pair(pair, c0 if np.any(c0) else np.ones(d))
    is_pair = start.per_class is not None
    corral = Corral(start.minimizer, start.per_class)
    x = start.minimizer.copy()
    xp, xm = (start.per_class if is_pair else (None, None))
    history = [float(np.linalg.norm(x))]
    gap = np.inf
    converged = False
    separated = False
    # below this the iterate is indistinguishable from the origin
    zero_floor = max(zero_tol, 64.0 * EPS * scale)
    it = 0
    for it in range(1, max_iter + 1):
        nx = float(np.linalg.norm(x))
        if nx <= zero_floor:
            converged = True
            gap = 0.0
            break
        s = support_min_pair(pair, x)
        gap = float(x @ x - s.value)
        if stop_on_separation and s.value > 0:
            separated = True
            converged = True
            break
        floor = 32.0 * EPS * nx * (nx + float(np.linalg.norm(s.minimizer)))
        if gap <= tol * tol or gap <= floor:
            converged = True
            break
        if method == "fw":
            step = x - s.minimizer
            denom = float(step @ step)
            gamma = min(1.0, gap / denom) if denom > 0 else 0.0
            x = x - gamma * step
            if is_pair:
                xp = xp + gamma * (s.per_class[0] - xp)
                xm = xm + gamma * (s.per_class[1] - xm)
        else:
            if corral.contains(s.minimizer, 1e-15 * scale):
                converged = True
                break
            corral.insert(s.minimizer, s.per_class)
            x = corral.point
        history.append(float(np.linalg.norm(x)))
    else:
        if warn:
            warnings.warn(NotConverged(f"nearest_point stopped at max_iter={max_iter}, gap={gap:.3e}"))
    if method == "mnp" and is_pair:
        xp = corral.combine(lambda p: p[0])
        xm = corral.combine(lambda p: p[1])
    per_class = (xp, xm) if is_pair else None
    return NearestPointResult(x, per_class, float(np.linalg.norm(x)), it, converged, gap,
                              history, separated)


def classify_regime(g_opt, tol=1e-6):
    """Sign rule: positive optimum means separated, zero touching, negative overlapping."""
    if g_opt > tol:
        return Regime.STRICTLY_SEPARATED
    if g_opt < -tol:
        return Regime.OVERLAPPING
    return Regime.TOUCHING


@dataclass
class ConvexSolution:
    w: np.ndarray
    value: float
    per_class: Optional[Tuple[np.ndarray, np.ndarray]]
    nearest: NearestPointResult


def solve_convex(pair, tol=1e-8, max_iter=100_000, regime_tol=1e-6):
    """Direction ``x* / ||x*||`` from the nearest point; raises :class:`NotSeparated` otherwise."""
    res = nearest_point(pair, tol=tol, max_iter=max_iter)
    if res.distance <= regime_tol:
        raise NotSeparated(f"distance {res.distance:.3e} is within the touching band")
    w = res.x_star / res.distance
    w = w / np.linalg.norm(w)
    return ConvexSolution(w, res.distance, res.per_class, res)


# ---------------------------------------------------------------------------
# critical parameter


class EtaStatus(enum.Enum):
    FOUND = "found"
    NEVER_INTERSECTS = "never_intersects"
    ALWAYS_INTERSECTS = "always_intersects"


@dataclass
class EtaMaxResult:
    eta_max: float
    bracket: Tuple[float, float]
    distance_at_eta_max: float
    status: EtaStatus
    w_boundary: Optional[np.ndarray] = None
    evaluations: int = 0


def _contains_origin(pair, zero_tol, max_iter):
    res = nearest_point(pair, tol=zero_tol, max_iter=max_iter, stop_on_separation=True,
                        zero_tol=zero_tol, warn=False)
    if res.separated:
        return False, res
    if res.converged:
        return res.distance <= zero_tol, res
    # undecided within the budget: no separating direction found
    return True, res


def eta_max(family, lo=None, hi=None, tol=1e-9, zero_tol=None, max_iter=20_000):
    """Smallest normalized parameter at which the origin enters ``U^eta`` (bisection).

    Parameters
    ----------
    family : Family
    lo, hi : float, optional
        Bracket in normalized units.  Defaults to the family's range; for the
        radius families ``hi`` starts at 1 and doubles up to ``2**60``.
    tol : float
        Final bracket width.
    zero_tol : float, optional
        Distance below which the origin counts as inside; defaults to
        ``1e-10`` times the data scale.
    """
    f_lo, f_hi = family.eta_range()
    grow = hi is None and np.isinf(f_hi)
    lo = f_lo if lo is None else lo
    hi = (1.0 if np.isinf(f_hi) else f_hi) if hi is None else hi
    if not lo < hi and family.kind != "ch":
        raise InvalidBracket(f"need lo < hi, got ({lo}, {hi})")
    if lo < f_lo or hi > f_hi:
        raise InvalidBracket(f"bracket ({lo}, {hi}) outside the family range ({f_lo}, {f_hi})")
    if zero_tol is None:
        zero_tol = 1e-10 * pair_scale(family.pair(lo))
    evals = 0

    def inside(eta):
        nonlocal evals
        evals += 1
        return _contains_origin(family.pair(eta), zero_tol, max_iter)

    in_lo, res_lo = inside(lo)
    if in_lo:
        return EtaMaxResult(lo, (lo, lo), res_lo.distance, EtaStatus.ALWAYS_INTERSECTS,
                            evaluations=evals)
    w_sep = res_lo.x_star / np.linalg.norm(res_lo.x_star)
    if family.kind == "ch":
        return EtaMaxResult(np.inf, (lo, hi), res_lo.distance, EtaStatus.NEVER_INTERSECTS,
                            w_boundary=w_sep, evaluations=evals)
    in_hi, res_hi = inside(hi)
    while not in_hi and grow and hi < 2.0 ** 60:
        lo, res_lo = hi, res_hi
        w_sep = res_lo.x_star / np.linalg.norm(res_lo.x_star)
        hi *= 2.0
        in_hi, res_hi = inside(hi)
    if not in_hi:
        return EtaMaxResult(np.inf, (lo, hi), res_hi.distance, EtaStatus.NEVER_INTERSECTS,
                            w_boundary=res_hi.x_star / np.linalg.norm(res_hi.x_star),
                            evaluations=evals)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        in_mid, res = inside(mid)
        if in_mid:
            hi, res_hi = mid, res
        else:
            lo, res_lo = mid, res
            w_sep = res.x_star / np.linalg.norm(res.x_star)
    return EtaMaxResult(hi, (lo, hi), res_hi.distance, EtaStatus.FOUND, w_boundary=w_sep,
                        evaluations=evals)


# ---------------------------------------------------------------------------
# solving at a given parameter


@dataclass
class RCMSolution:
    """Optimal direction and value of the robust separation problem at one parameter."""

    w: np.ndarray
    value: float
    regime: Regime
    per_class: Optional[Tuple[np.ndarray, np.ndarray]]
    path: str  # "convex", "boundary" or "nonconvex"
    trace: object = None


def solve_rcm(family, eta, emax=None, tol=1e-8, regime_tol=1e-6, eta_tol=None, ls_config=None,
              max_iter=100_000):
    """Two-stage dispatch: convex solve below ``eta_max``, boundary solution at it,
    local search above it."""
    pair = family.pair(eta)
    if emax is None:
        emax = eta_max(family)
    if eta_tol is None:
        eta_tol = max(10 * (emax.bracket[1] - emax.bracket[0]), 1e-9)
    if family.kind == "ch" or emax.status is not EtaStatus.FOUND:
        at_boundary = False
        below = emax.status is EtaStatus.NEVER_INTERSECTS
    else:
        at_boundary = abs(eta - emax.eta_max) <= eta_tol
        below = eta < emax.eta_max
    if at_boundary and emax.w_boundary is not None:
        w = emax.w_boundary / np.linalg.norm(emax.w_boundary)
        sup = support_min_pair(pair, w)
        return RCMSolution(w, sup.value, classify_regime(sup.value, regime_tol), sup.per_class,
                           "boundary")
    if below:
        res = nearest_point(pair, tol=tol, max_iter=max_iter)
        if res.distance > regime_tol:
            w = res.x_star / res.distance
            w = w / np.linalg.norm(w)
            value = support_min_pair(pair, w).value
            return RCMSolution(w, value, classify_regime(value, regime_tol), res.per_class,
                               "convex")
        if emax.w_boundary is not None:
            w = emax.w_boundary / np.linalg.norm(emax.w_boundary)
            sup = support_min_pair(pair, w)
            return RCMSolution(w, sup.value, classify_regime(sup.value, regime_tol),
                               sup.per_class, "boundary")
    ls = local_search(pair, ls_config or LocalSearchConfig())
    sup = support_min_pair(pair, ls.w)
    return RCMSolution(ls.w, sup.value, classify_regime(sup.value, regime_tol), sup.per_class,
                       "nonconvex", ls.trace)


def eta_sweep(family, grid, emax=None, **kwargs):
    """Optimal value of the robust problem along an ascending grid of normalized ``eta``."""
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise InvalidBracket("grid must be ascending")
    if emax is None:
        emax = eta_max(family)
    return [(float(eta), solve_rcm(family, eta, emax, **kwargs).value) for eta in grid]
