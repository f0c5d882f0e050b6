"""Self-check suites run by ``rcm verify``.

Each suite is a list of named checks on small seeded instances; a check
returns ``True`` on success.  Exceptions count as failures.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from . import linalg, model, oracle, solver_convex, solver_nonconvex, statcheck, uncertainty
from .uncertainty import ClassMoments, Dataset, Family


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: List[str] = field(default_factory=list)

    @property
    def total(self):
        return self.passed + len(self.failed)

    @property
    def ok(self):
        return not self.failed


def _random_spd(rng, d):
    A = rng.standard_normal((d, d))
    return A @ A.T + 0.1 * np.eye(d)


def _blobs(seed, shift, n=6):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.standard_normal((n, 2)) + [shift, 0.3],
                   rng.standard_normal((n, 2)) * [1.0, 1.5] - [shift, 0.0]])
    return Dataset(X, np.r_[np.ones(n), -np.ones(n)])


def _symmetric_moments(var):
    return (ClassMoments.from_cov([1.0, 0.0], var * np.eye(2)),
            ClassMoments.from_cov([-1.0, 0.0], var * np.eye(2)))


# ---------------------------------------------------------------------------


def _linalg_checks():
    rng = np.random.default_rng(0)

    def sqrt_squares():
        A = _random_spd(rng, 4)
        R = linalg.psd_sqrt(A)
        return np.allclose(R @ R, A, atol=1e-10)

    def solve_residual():
        A = _random_spd(rng, 5)
        b = rng.standard_normal(5)
        return np.linalg.norm(A @ linalg.solve_spd(A, b) - b) <= 1e-9

    def complement():
        u = rng.standard_normal(4)
        N = linalg.orthonormal_complement(u / np.linalg.norm(u))
        return np.allclose(N.T @ N, np.eye(3)) and np.allclose(N.T @ u, 0.0)

    return [("psd_sqrt squares back", sqrt_squares), ("solve_spd residual", solve_residual),
            ("orthonormal complement", complement)]


def _uncertainty_checks():
    rng = np.random.default_rng(1)

    def knapsack():
        for _ in range(20):
            n = int(rng.integers(2, 4))
            P = rng.standard_normal((n, 2))
            cap = float(rng.choice([1.0, 0.8, 0.6, 0.5, 0.4])) if n == 3 else 0.6
            if cap * n < 1:
                continue
            s = uncertainty.ReducedConvexHull(P, 2.0 / (cap * 10), 10)
            w = rng.standard_normal(2)
            brute = np.min(oracle.capped_simplex_vertices(n, s.cap) @ P @ w)
            if abs(uncertainty.support_min(s, w).value - brute) > 1e-9:
                return False
        return True

    def ellipsoid():
        S = linalg.psd_sqrt(_random_spd(rng, 2))
        e = uncertainty.Ellipsoid(np.array([0.5, -1.0]), S, 0.7)
        w = rng.standard_normal(2)
        t = np.linspace(0.0, 2 * np.pi, 20_000)
        boundary = e.center + 0.7 * np.column_stack([np.cos(t), np.sin(t)]) @ S.T
        return abs(uncertainty.support_min(e, w).value - np.min(boundary @ w)) <= 1e-6

    return [("fractional knapsack vs vertices", knapsack), ("ellipsoid vs boundary", ellipsoid)]


def _convex_checks():
    def duality():
        data = Dataset(np.array([[1.0, 0.0], [2.0, 1.0], [-1.0, 0.0], [-2.0, 1.0]]),
                       [1, 1, -1, -1])
        sol = solver_convex.solve_convex(Family.from_data(data, "ch").pair(0.0))
        return abs(sol.value - 2.0) <= 1e-8 and np.allclose(sol.w, [1.0, 0.0], atol=1e-8)

    def fda_anchor():
        em = solver_convex.eta_max(Family.fda(*_symmetric_moments(0.5)))
        return abs(em.eta_max - 2.0) <= 1e-6

    def mpm_anchor():
        em = solver_convex.eta_max(Family.ellipsoid(*_symmetric_moments(1.0)))
        return abs(em.eta_max - 1.0) <= 1e-4

    def rch_anchor():
        data = Dataset(np.array([[3.0], [-1.0], [-3.0], [1.0]]), [1, 1, -1, -1])
        fam = Family.from_data(data, "rch")
        em = solver_convex.eta_max(fam)
        return abs(fam.to_native(em.eta_max) - 2.0 / 3.0) <= 1e-6

    return [("nearest point duality", duality), ("fda critical radius", fda_anchor),
            ("mpm critical radius", mpm_anchor), ("rch critical nu", rch_anchor)]


def _nonconvex_checks():
    def monotone():
        for seed in range(5):
            fam = Family.from_data(_blobs(seed, 0.25), "ellipsoid")
            pair = fam.pair(2.0 * solver_convex.eta_max(fam).eta_max)
            res = solver_nonconvex.local_search(pair)
            vals = res.trace.values()
            if not res.converged or np.any(np.diff(vals) <= -1e-12):
                return False
        return True

    def hessian():
        fam = Family.from_data(_blobs(3, 0.25), "ellipsoid")
        pair = fam.pair(1.5)
        w = np.array([0.6, 0.8])
        H = solver_nonconvex.hessian_g(pair, w)
        h = 1e-5
        g = lambda v: uncertainty.support_min_pair(pair, v).value
        fd = np.array([[(g(w + h * (ei + ej)) - g(w + h * (ei - ej)) - g(w - h * (ei - ej))
                         + g(w - h * (ei + ej))) / (4 * h * h)
                        for ej in np.eye(2)] for ei in np.eye(2)])
        return np.max(np.abs(H - fd)) <= 1e-4

    return [("local search monotone", monotone), ("hessian vs finite differences", hessian)]


def _model_checks():
    def roundtrip():
        etas = np.linspace(0.01, 0.99, 50)
        return all(abs(model.alpha_from_kappa(model.kappa_from_rate(e)) + e - 1) <= 1e-12
                   for e in etas)

    def instance_a():
        data = Dataset(np.array([[1.0, 0.0], [2.0, 1.0], [-1.0, 0.0], [-2.0, 1.0]]),
                       [1, 1, -1, -1])
        m = model.train(data, "ch")
        return (np.allclose(m.w, [1.0, 0.0], atol=1e-8) and abs(m.b) <= 1e-8
                and model.evaluate(m, data).error_rate == 0.0)

    def threshold_not_worse():
        data = _blobs(4, 0.5)
        m = model.train(data, "fda")
        mt = model.train(data, "fda", cfg=model.TrainConfig(bias="threshold"))
        return model.evaluate(mt, data).error_rate <= model.evaluate(m, data).error_rate

    return [("rate/alpha round trip", roundtrip), ("separable training", instance_a),
            ("threshold bias not worse", threshold_not_worse)]


def _statcheck_checks():
    def sandwich():
        rng = np.random.default_rng(5)
        for _ in range(5):
            fams = []
            for c in ([1.0, 0.3], [-1.0, 0.0]):
                fams.append([statcheck.DiscreteDistribution(
                    rng.standard_normal((3, 2)) + c, np.full(3, 1 / 3)) for _ in range(2)])
            if not statcheck.sandwich_check(tuple(fams), statcheck.ClassPriors(),
                                            statcheck.logistic_loss()).holds:
                return False
        return True

    def point_mass():
        pm = statcheck.DiscreteDistribution.point_mass
        fams = ([pm([1.0, 0.0]), pm([3.0, 0.0])], [pm([-1.0, 0.0])])
        r = statcheck.sandwich_check(fams, statcheck.ClassPriors(), statcheck.logistic_loss())
        return abs(r.worst - r.J_star) <= 1e-9

    return [("sandwich bounds", sandwich), ("point masses are tight", point_mass)]


def _oracle_checks():
    def grid_match():
        for seed in range(3):
            fam = Family.from_data(_blobs(seed, 1.5), "fda")
            emax = solver_convex.eta_max(fam)
            eta = 0.5 * emax.eta_max
            sol = solver_convex.solve_rcm(fam, eta, emax)
            grid = oracle.grid_sphere_solve(fam.pair(eta))
            if abs(sol.value - grid.value) > 1e-2:
                return False
        return True

    return [("solver vs sphere grid", grid_match)]


SUITES = {
    "linalg": _linalg_checks,
    "uncertainty": _uncertainty_checks,
    "solver_convex": _convex_checks,
    "solver_nonconvex": _nonconvex_checks,
    "model": _model_checks,
    "statcheck": _statcheck_checks,
    "oracle": _oracle_checks,
}


def run_suites(names=None):
    """Run the named suites (all by default) in a fixed order."""
    names = sorted(SUITES) if names is None else sorted(names)
    results = []
    for name in names:
        res = SuiteResult(name)
        for label, check in SUITES[name]():
            try:
                ok = bool(check())
            except Exception as exc:  # a crash is a failed check
                ok = False
                label = f"{label} ({type(exc).__name__}: {exc})"
            if ok:
                res.passed += 1
            else:
                res.failed.append(label)
        results.append(res)
    return results
