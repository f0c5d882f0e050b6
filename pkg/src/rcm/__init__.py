"""Robust linear classification over uncertainty sets of class representatives."""

from .errors import *  # noqa: F401,F403
from .model import (TrainConfig, TrainedModel, Metrics, alpha_from_kappa, bias_best_threshold,
                    bias_midpoint, evaluate, kappa_from_rate, predict, train)
from .solver_convex import (EtaStatus, Regime, classify_regime, eta_max, eta_sweep, nearest_point,
                            solve_convex, solve_rcm)
from .solver_nonconvex import (LocalSearchConfig, hessian_g, linearized_subproblem, local_search,
                               local_optimality_check)
from .uncertainty import (ClassMoments, ConvexHull, Dataset, Ellipsoid, Family, ReducedConvexHull,
                          SummedEllipsoid, estimate_moments, support_min, support_min_pair)

__version__ = "0.1.0"
