"""Uncertainty sets and their support (linear-minimization) oracles.

Every set exposes ``g(w) = min_{x in U} x.w`` together with a minimizer.  The
families are the convex hull of class samples, the reduced convex hull with a
per-weight cap ``2 / (nu * m)``, the ellipsoid ``center + S u, ||u|| <= kappa``
and the summed-covariance ellipsoid used directly as a difference set.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DimensionError, EmptyClass, InfeasibleRCH, InvalidMatrix, InvalidParameter
from .linalg import psd_sqrt

FEAS_RTOL = 1e-12
NU_FLOOR = 1e-6


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class Dataset:
    """Labelled samples ``(x_i, y_i)`` with ``y_i`` in ``{+1, -1}``."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y).ravel()
        if X.shape[0] != y.shape[0]:
            raise DimensionError(f"{X.shape[0]} samples but {y.shape[0]} labels")
        if not np.all(np.isin(y, (-1, 1))):
            raise InvalidParameter("labels must be exactly +1 or -1")
        y = y.astype(int)
        if not np.all(np.isfinite(X)):
            raise InvalidParameter("samples contain non-finite values")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def m(self):
        return self.X.shape[0]

    def points(self, label):
        return self.X[self.y == label]

    @property
    def m_plus(self):
        return int(np.sum(self.y == 1))

    @property
    def m_minus(self):
        return int(np.sum(self.y == -1))

    def require_both_classes(self):
        if self.m_plus == 0 or self.m_minus == 0:
            raise EmptyClass("both classes need at least one sample")


@dataclass(frozen=True)
class ClassMoments:
    mean: np.ndarray
    cov: np.ndarray
    sqrt_cov: np.ndarray
    ridge: float = 0.0

    @classmethod
    def from_cov(cls, mean, cov, ridge=0.0):
        mean = np.asarray(mean, dtype=float)
        cov = np.asarray(cov, dtype=float)
        return cls(mean, cov, psd_sqrt(cov), ridge)


def estimate_moments(data, label, ridge=0.0):
    """Sample mean and population covariance (``1/m`` normalization) of one class.

    ``ridge`` is added to the diagonal as an absolute amount.
    """
    if ridge < 0:
        raise InvalidParameter("ridge must be non-negative")
    pts = data.points(label)
    if len(pts) == 0:
        raise EmptyClass(f"class {label:+d} has no samples")
    mean = pts.mean(axis=0)
    centered = pts - mean
    cov = centered.T @ centered / len(pts) + ridge * np.eye(pts.shape[1])
    return ClassMoments.from_cov(mean, cov, ridge)


def relative_ridge(data, label, rel):
    """Absolute ridge ``rel * trace(cov) / d`` for a class (``rel`` itself if the trace vanishes)."""
    raw = estimate_moments(data, label, 0.0)
    level = np.trace(raw.cov) / data.d
    return rel * level if level > 0 else rel


# ---------------------------------------------------------------------------
# sets


@dataclass(frozen=True)
class ConvexHull:
    points: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.points, dtype=float))
        if P.shape[0] == 0:
            raise InvalidParameter("convex hull needs at least one point")
        object.__setattr__(self, "points", P)

    @property
    def d(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class ReducedConvexHull:
    points: np.ndarray
    nu: float
    m_total: int

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.points, dtype=float))
        if P.shape[0] == 0:
            raise InvalidParameter("reduced convex hull needs at least one point")
        if not self.nu > 0:
            raise InvalidParameter("nu must be positive")
        object.__setattr__(self, "points", P)
        if self.cap * P.shape[0] < 1.0 - FEAS_RTOL:
            raise InfeasibleRCH(
                f"nu={self.nu} gives cap {self.cap:.6g} with {P.shape[0]} points (cap*n < 1)")

    @property
    def cap(self):
        return 2.0 / (self.nu * self.m_total)

    @property
    def d(self):
        return self.points.shape[1]

    def position_weights(self):
        """Knapsack weight assigned to the i-th smallest projection."""
        n = self.points.shape[0]
        lam = np.clip(1.0 - np.arange(n) * self.cap, 0.0, self.cap)
        return lam / lam.sum()


@dataclass(frozen=True)
class Ellipsoid:
    """``{center + sqrt_cov @ u : ||u|| <= radius}``."""

    center: np.ndarray
    sqrt_cov: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).ravel()
        S = np.atleast_2d(np.asarray(self.sqrt_cov, dtype=float))
        if S.shape != (c.size, c.size):
            raise DimensionError("sqrt_cov must be d x d")
        if np.max(np.abs(S - S.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(S), initial=0.0)):
            raise InvalidMatrix("sqrt_cov must be symmetric")
        if self.radius < 0:
            raise InvalidParameter("radius must be non-negative")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "sqrt_cov", S)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def d(self):
        return self.center.size


class SummedEllipsoid(Ellipsoid):
    """Difference set ``(mean_+ - mean_-) + (cov_+ + cov_-)^{1/2} u, ||u|| <= zeta``."""


UncertaintySet = Union[ConvexHull, ReducedConvexHull, Ellipsoid, SummedEllipsoid]


@dataclass(frozen=True)
class Pair:
    plus: UncertaintySet
    minus: UncertaintySet

    def __post_init__(self):
        if self.plus.d != self.minus.d:
            raise DimensionError("pair members have different dimensions")

    @property
    def d(self):
        return self.plus.d


@dataclass(frozen=True)
class Direct:
    diff: UncertaintySet

    @property
    def d(self):
        return self.diff.d


PairSet = Union[Pair, Direct]


@dataclass
class SupportResult:
    value: float
    minimizer: np.ndarray
    per_class: Optional[Tuple[np.ndarray, np.ndarray]] = None
    weights: Optional[np.ndarray] = field(default=None, repr=False)


def _check_w(s, w):
    w = np.asarray(w, dtype=float).ravel()
    if w.size != s.d:
        raise DimensionError(f"direction has length {w.size}, set lives in R^{s.d}")
    return w


def support_min(s, w):
    """Minimize ``x.w`` over the set ``s``."""
    w = _check_w(s, w)
    if isinstance(s, ReducedConvexHull):
        proj = s.points @ w
        order = np.argsort(proj, kind="stable")
        lam = np.zeros(len(proj))
        lam[order] = s.position_weights()
        x = lam @ s.points
        return SupportResult(float(lam @ proj), x, weights=lam)
    if isinstance(s, ConvexHull):
        proj = s.points @ w
        i = int(np.argmin(proj))
        lam = np.zeros(len(proj))
        lam[i] = 1.0
        return SupportResult(float(proj[i]), s.points[i].copy(), weights=lam)
    if isinstance(s, Ellipsoid):
        Sw = s.sqrt_cov @ w
        nrm = float(np.linalg.norm(Sw))
        if nrm == 0.0 or s.radius == 0.0:
            return SupportResult(float(s.center @ w), s.center.copy())
        x = s.center - s.radius * (s.sqrt_cov @ Sw) / nrm
        return SupportResult(float(s.center @ w - s.radius * nrm), x)
    raise TypeError(f"unknown uncertainty set {type(s).__name__}")


def support_min_pair(pair, w):
    """Minimize ``x.w`` over the Minkowski difference ``U_+ - U_-``."""
    if isinstance(pair, Direct):
        return support_min(pair.diff, w)
    w = np.asarray(w, dtype=float).ravel()
    rp = support_min(pair.plus, w)
    rm = support_min(pair.minus, -w)
    return SupportResult(rp.value + rm.value, rp.minimizer - rm.minimizer,
                         per_class=(rp.minimizer, rm.minimizer))


def support_values(s, W):
    """Vectorized ``g`` for many directions (rows of ``W``)."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if isinstance(s, ReducedConvexHull):
        proj = np.sort(s.points @ W.T, axis=0)
        return s.position_weights() @ proj
    if isinstance(s, ConvexHull):
        return np.min(s.points @ W.T, axis=0)
    if isinstance(s, Ellipsoid):
        return W @ s.center - s.radius * np.linalg.norm(W @ s.sqrt_cov.T, axis=1)
    raise TypeError(f"unknown uncertainty set {type(s).__name__}")


def support_values_pair(pair, W):
    if isinstance(pair, Direct):
        return support_values(pair.diff, W)
    W = np.atleast_2d(np.asarray(W, dtype=float))
    return support_values(pair.plus, W) + support_values(pair.minus, -W)


def set_center(s):
    """A representative interior point: centroid for hulls, center for ellipsoids."""
    if isinstance(s, (ConvexHull, ReducedConvexHull)):
        return s.points.mean(axis=0)
    return s.center.copy()


def pair_center(pair):
    if isinstance(pair, Direct):
        return set_center(pair.diff)
    return set_center(pair.plus) - set_center(pair.minus)


def pair_scale(pair):
    """Rough magnitude of the points in the difference set (used for relative tolerances)."""
    def one(s):
        if isinstance(s, (ConvexHull, ReducedConvexHull)):
            return float(np.max(np.linalg.norm(s.points, axis=1)))
        return float(np.linalg.norm(s.center) + s.radius * np.linalg.norm(s.sqrt_cov, 2))
    if isinstance(pair, Direct):
        return max(one(pair.diff), 1.0)
    return max(one(pair.plus) + one(pair.minus), 1.0)


def rch_feasible(nu, m_class, m_total):
    """True iff a class of ``m_class`` points admits weights capped at ``2 / (nu m_total)``."""
    if not nu > 0:
        raise InvalidParameter("nu must be positive")
    return nu <= 2.0 * m_class / m_total * (1.0 + FEAS_RTOL)


# ---------------------------------------------------------------------------
# parametrized families


FAMILIES = ("ch", "rch", "ellipsoid", "fda")


@dataclass(frozen=True)
class Family:
    """A one-parameter family of pair sets ``U^eta`` that grows with ``eta``.

    ``eta`` is the normalized parameter: ``nu_max - nu`` for reduced hulls, the
    radius scale for ellipsoids (radii ``eta * kappa_ratio``) and ``zeta`` for
    the summed ellipsoid.  The convex-hull family ignores ``eta``.
    """

    kind: str
    plus_points: Optional[np.ndarray] = None
    minus_points: Optional[np.ndarray] = None
    moments_plus: Optional[ClassMoments] = None
    moments_minus: Optional[ClassMoments] = None
    kappa_ratio: Tuple[float, float] = (1.0, 1.0)

    @classmethod
    def hull(cls, data, reduced=False):
        data.require_both_classes()
        return cls("rch" if reduced else "ch", data.points(1), data.points(-1))

    @classmethod
    def ellipsoid(cls, moments_plus, moments_minus, kappa_ratio=(1.0, 1.0)):
        if min(kappa_ratio) < 0 or max(kappa_ratio) <= 0:
            raise InvalidParameter("kappa ratios must be non-negative and not both zero")
        return cls("ellipsoid", moments_plus=moments_plus, moments_minus=moments_minus,
                   kappa_ratio=tuple(float(k) for k in kappa_ratio))

    @classmethod
    def fda(cls, moments_plus, moments_minus):
        return cls("fda", moments_plus=moments_plus, moments_minus=moments_minus)

    @classmethod
    def from_data(cls, data, kind, ridge=1e-6, kappa_ratio=(1.0, 1.0)):
        """Build a family from samples; ``ridge`` is relative to ``trace(cov)/d`` per class."""
        if kind not in FAMILIES:
            raise InvalidParameter(f"unknown family {kind!r}")
        data.require_both_classes()
        if kind in ("ch", "rch"):
            return cls.hull(data, reduced=(kind == "rch"))
        mp = estimate_moments(data, 1, relative_ridge(data, 1, ridge))
        mm = estimate_moments(data, -1, relative_ridge(data, -1, ridge))
        if kind == "fda":
            return cls.fda(mp, mm)
        return cls.ellipsoid(mp, mm, kappa_ratio)

    @property
    def m_total(self):
        return len(self.plus_points) + len(self.minus_points)

    @property
    def nu_max(self):
        return 2.0 * min(len(self.plus_points), len(self.minus_points)) / self.m_total

    @property
    def d(self):
        if self.kind in ("ch", "rch"):
            return self.plus_points.shape[1]
        return self.moments_plus.mean.size

    def eta_range(self):
        """Valid normalized range ``(lo, hi)``; ``hi`` is ``inf`` for radius families."""
        if self.kind == "ch":
            return 0.0, 0.0
        if self.kind == "rch":
            return 0.0, self.nu_max - NU_FLOOR
        return 0.0, np.inf

    def to_native(self, eta):
        """Family-native parameter (``nu``, ``kappa``, ``zeta``) for a normalized ``eta``."""
        if self.kind == "rch":
            return self.nu_max - eta
        if self.kind == "ch":
            return None
        return eta

    def from_native(self, param):
        if self.kind == "rch":
            if not param > 0:
                raise InvalidParameter("nu must be positive")
            if not (rch_feasible(param, len(self.plus_points), self.m_total)
                    and rch_feasible(param, len(self.minus_points), self.m_total)):
                raise InfeasibleRCH(f"nu={param} exceeds nu_max={self.nu_max:.6g}")
            return max(self.nu_max - param, 0.0)
        if self.kind == "ch":
            return 0.0
        if param < 0:
            raise InvalidParameter("radius parameter must be non-negative")
        return float(param)

    def radii(self, eta):
        kp, km = self.kappa_ratio
        return eta * kp, eta * km

    def pair(self, eta):
        """Pair set at normalized parameter ``eta``."""
        if self.kind == "ch":
            return Pair(ConvexHull(self.plus_points), ConvexHull(self.minus_points))
        if not eta >= 0:
            raise InvalidParameter(f"eta={eta} must be non-negative")
        if self.kind == "rch" and not eta < self.nu_max:
            raise InvalidParameter(f"eta={eta} leaves no positive nu (nu_max={self.nu_max:.6g})")
        if self.kind == "rch":
            nu = min(self.nu_max - eta, self.nu_max)
            m = self.m_total
            return Pair(ReducedConvexHull(self.plus_points, nu, m),
                        ReducedConvexHull(self.minus_points, nu, m))
        mp, mm = self.moments_plus, self.moments_minus
        if self.kind == "fda":
            S = psd_sqrt(mp.cov + mm.cov)
            return Direct(SummedEllipsoid(mp.mean - mm.mean, S, eta))
        kp, km = self.radii(eta)
        return Pair(Ellipsoid(mp.mean, mp.sqrt_cov, kp), Ellipsoid(mm.mean, mm.sqrt_cov, km))

    def class_means(self):
        if self.kind in ("ch", "rch"):
            return self.plus_points.mean(axis=0), self.minus_points.mean(axis=0)
        return self.moments_plus.mean, self.moments_minus.mean


def scale_pair(family, eta):
    """Pair set of ``family`` at normalized ``eta`` (sets grow with ``eta``)."""
    return family.pair(eta)
