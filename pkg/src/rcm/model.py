"""Training pipeline: critical parameter, solver dispatch, bias, prediction."""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import DimensionError, InvalidParameter, InvalidRate
from .solver_convex import EtaStatus, Regime, eta_max, solve_rcm
from .solver_nonconvex import LocalSearchConfig
from .uncertainty import Family

AUTO = "auto"
BIAS_METHODS = ("midpoint", "threshold")


def kappa_from_rate(eta_rate):
    """Radius ``sqrt((1 - eta) / eta)`` for a misclassification rate ``eta`` in (0, 1)."""
    eta_rate = float(eta_rate)
    if not 0.0 < eta_rate < 1.0:
        raise InvalidRate(f"rate must lie in (0, 1), got {eta_rate}")
    return float(np.sqrt((1.0 - eta_rate) / eta_rate))


def alpha_from_kappa(kappa):
    """Confidence level ``kappa^2 / (1 + kappa^2)``; inverse of ``kappa = sqrt(alpha / (1 - alpha))``."""
    kappa = float(kappa)
    if not kappa >= 0:
        raise InvalidParameter(f"kappa must be non-negative, got {kappa}")
    k2 = kappa * kappa
    return k2 / (1.0 + k2)


@dataclass
class TrainConfig:
    """Solver and bias settings for :func:`train`.

    ``ridge`` is relative to ``trace(cov) / d`` of each class.  ``kappa`` is an
    explicit ``(kappa_plus, kappa_minus)`` pair for the ellipsoid family; when
    given, ``param`` must be omitted.
    """

    ridge: float = 1e-6
    tol: float = 1e-8
    eps: float = 1e-6
    max_iter: int = 10_000
    seed: int = 0
    bias: str = "midpoint"
    kappa: Optional[Tuple[float, float]] = None
    regime_tol: float = 1e-6

    def __post_init__(self):
        if self.bias not in BIAS_METHODS:
            raise InvalidParameter(f"unknown bias method {self.bias!r}")
        if self.ridge < 0 or not self.tol > 0 or not self.eps > 0 or self.max_iter < 1:
            raise InvalidParameter("ridge must be >= 0; tol, eps and max_iter must be positive")


@dataclass(frozen=True)
class TrainedModel:
    w: np.ndarray
    b: float
    family: str
    param: object  # family-native: nu, kappa, (kappa_plus, kappa_minus), zeta or None
    eta_max: Optional[object]  # family-native; None when the sets never meet
    eta_status: str
    regime: Regime
    g_value: float
    per_class: Optional[Tuple[np.ndarray, np.ndarray]] = None
    bias_method: str = "midpoint"
    bias_fallback: bool = False  # midpoint of class means used instead of minimizers
    path: str = "convex"
    trace: object = field(default=None, compare=False, repr=False)

    @property
    def d(self):
        return self.w.size


@dataclass
class Metrics:
    error_rate: float
    tp: int
    fp: int
    tn: int
    fn: int
    empty: bool = False

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


# ---------------------------------------------------------------------------
# bias


def bias_midpoint(x_plus, x_minus, w):
    """``b = -(x_+ + x_-).w / 2``: the hyperplane through the midpoint of the two points."""
    x_plus, x_minus, w = (np.asarray(v, dtype=float).ravel() for v in (x_plus, x_minus, w))
    return float(-0.5 * (x_plus + x_minus) @ w)


def bias_best_threshold(data, w):
    """Bias minimizing the training 0-1 error of ``sign(x.w + b)``.

    Candidates are the midpoints between consecutive distinct sorted projections
    plus one guard below and above; among equally good thresholds the one with
    the widest gap to its nearest projection wins (first such on ties).
    """
    w = np.asarray(w, dtype=float).ravel()
    if data.m == 0:
        return 0.0
    p = data.X @ w
    u = np.unique(p)
    span = max(float(u[-1] - u[0]), 1.0)
    cands = np.concatenate([[u[0] - span], 0.5 * (u[:-1] + u[1:]), [u[-1] + span]])
    margins = np.concatenate([[span], 0.5 * np.diff(u), [span]])
    # predicted +1 where p >= t
    pos = data.y == 1
    errors = np.array([np.sum((p >= t) != pos) for t in cands])
    best = np.flatnonzero(errors == errors.min())
    i = best[np.argmax(margins[best])]
    return float(-cands[i])


# ---------------------------------------------------------------------------
# training


def _build_family(data, kind, param, cfg):
    """Family and normalized parameter (``None`` for auto)."""
    if kind == "ellipsoid":
        if cfg.kappa is not None:
            explicit = param not in (None, AUTO)
            if explicit:
                raise InvalidParameter("give either param or an explicit kappa pair, not both")
            kp, km = (float(k) for k in cfg.kappa)
            top = max(kp, km)
            if min(kp, km) < 0 or top <= 0:
                raise InvalidParameter("kappa pair must be non-negative and not both zero")
            fam = Family.from_data(data, kind, cfg.ridge, (kp / top, km / top))
            return fam, (None if param == AUTO else top)
    fam = Family.from_data(data, kind, cfg.ridge)
    if kind == "ch" or param is None or param == AUTO:
        return fam, None
    return fam, fam.from_native(float(param))


def _native(fam, eta):
    if fam.kind == "ellipsoid" and fam.kappa_ratio != (1.0, 1.0):
        kp, km = fam.radii(eta)
        return [float(kp), float(km)]
    return fam.to_native(eta)


def train(data, kind, param=None, cfg=None):
    """Fit a robust linear classifier.

    Parameters
    ----------
    data : Dataset
    kind : {"ch", "rch", "ellipsoid", "fda"}
    param : float, "auto" or None
        Family-native parameter (``nu`` for rch, ``kappa`` for ellipsoid,
        ``zeta`` for fda; ignored for ch).  ``"auto"`` or ``None`` uses the
        critical value itself (along ``cfg.kappa`` when that pair is set).
    cfg : TrainConfig, optional
    """
    cfg = cfg or TrainConfig()
    data.require_both_classes()
    fam, eta = _build_family(data, kind, param, cfg)
    emax = eta_max(fam, tol=min(cfg.tol, 1e-9))
    if eta is None:
        if fam.kind == "ch":
            eta = 0.0
        elif emax.status is EtaStatus.FOUND:
            eta = emax.eta_max
        elif emax.status is EtaStatus.NEVER_INTERSECTS:
            eta = fam.eta_range()[1] if np.isfinite(fam.eta_range()[1]) else emax.bracket[1]
        else:
            eta = fam.eta_range()[0]
    ls = LocalSearchConfig(epsilon=cfg.eps, max_outer=cfg.max_iter, seed=cfg.seed)
    sol = solve_rcm(fam, eta, emax, tol=cfg.tol, regime_tol=cfg.regime_tol, ls_config=ls)

    w = sol.w / np.linalg.norm(sol.w)
    fallback = False
    if cfg.bias == "threshold":
        b = bias_best_threshold(data, w)
    elif sol.per_class is not None:
        b = bias_midpoint(sol.per_class[0], sol.per_class[1], w)
    else:
        mp, mm = fam.class_means()
        b = bias_midpoint(mp, mm, w)
        fallback = True

    if emax.status is EtaStatus.NEVER_INTERSECTS:
        em_native = None
    else:
        em_native = _native(fam, emax.eta_max)
    return TrainedModel(
        w=w, b=float(b), family=fam.kind, param=_native(fam, eta), eta_max=em_native,
        eta_status=emax.status.value, regime=sol.regime, g_value=float(sol.value),
        per_class=sol.per_class, bias_method=cfg.bias, bias_fallback=fallback, path=sol.path,
        trace=sol.trace)


# ---------------------------------------------------------------------------
# prediction


def decision_function(model, X):
    X = np.asarray(X, dtype=float)
    X2 = np.atleast_2d(X)
    if X2.shape[1] != model.d:
        raise DimensionError(f"model has d={model.d}, input has {X2.shape[1]} features")
    return X2 @ model.w + model.b


def predict(model, X):
    """Labels ``sign(x.w + b)`` with an exact zero mapped to +1.

    A single vector gives an ``int``; a 2-D array gives an array of labels.
    """
    scores = decision_function(model, X)
    labels = np.where(scores >= 0, 1, -1)
    if np.ndim(X) == 1:
        return int(labels[0])
    return labels


def evaluate(model, data):
    """Confusion counts and 0-1 error rate of ``model`` on ``data``."""
    if data.m == 0:
        return Metrics(0.0, 0, 0, 0, 0, empty=True)
    yhat = predict(model, data.X)
    pos, hat = data.y == 1, yhat == 1
    tp = int(np.sum(pos & hat))
    fn = int(np.sum(pos & ~hat))
    fp = int(np.sum(~pos & hat))
    tn = int(np.sum(~pos & ~hat))
    return Metrics((fp + fn) / data.m, tp, fp, tn, fn)
