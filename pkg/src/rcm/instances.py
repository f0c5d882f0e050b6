"""Seeded random instances shared by the tests and the experiment scripts."""

import numpy as np

from .solver_convex import EtaStatus, eta_max
from .statcheck import DiscreteDistribution
from .uncertainty import FAMILIES, Dataset, Family, support_values_pair


def two_blobs(seed, sep, d=2, sizes=(4, 9)):
    """Two Gaussian classes ``sep`` apart along the first axis, sizes drawn from ``sizes``."""
    rng = np.random.default_rng(seed)
    n1, n2 = rng.integers(sizes[0], sizes[1], 2)
    off = np.zeros(d)
    off[0] = sep / 2
    tilt = np.zeros(d)
    if d > 1:
        tilt[1] = 0.3
    spread = np.ones(d)
    if d > 1:
        spread[1] = 1.5
    X = np.vstack([rng.standard_normal((n1, d)) + off + tilt,
                   rng.standard_normal((n2, d)) * spread - off])
    return Dataset(X, np.r_[np.ones(n1), -np.ones(n2)])


def pick_eta(family, emax, convex):
    """Normalized parameter below (``convex``) or above the critical value."""
    lo, hi = family.eta_range()
    if family.kind == "ch":
        return 0.0
    if emax.status is EtaStatus.FOUND:
        e = emax.eta_max
        if convex:
            return 0.5 * e
        return e + 0.5 * (hi - e) if np.isfinite(hi) else 1.5 * e
    if emax.status is EtaStatus.NEVER_INTERSECTS:
        return 0.5 * hi if np.isfinite(hi) else 0.5
    return 0.5 * hi if np.isfinite(hi) else 1.0


def mixed_instance(kind, seed):
    """``(family, eta, emax)``: odd seeds overlap more, ``seed % 4 < 2`` targets the convex side."""
    sep = 0.5 if seed % 2 else 3.0
    fam = Family.from_data(two_blobs(seed, sep), kind)
    emax = eta_max(fam)
    return fam, pick_eta(fam, emax, seed % 4 < 2), emax


def overlapping_instance(seed, kind=None):
    """``(family, eta)`` with the origin strictly inside the difference set.

    The family cycles through all kinds with the seed unless ``kind`` is given;
    draws are repeated with derived seeds until the overlap is clear.
    """
    kind = kind or FAMILIES[seed % len(FAMILIES)]
    for sub in range(100):
        rng_seed = 1000 * seed + sub
        fam = Family.from_data(two_blobs(rng_seed, 0.25, sizes=(6, 10)), kind)
        if kind == "ch":
            eta = 0.0
        else:
            emax = eta_max(fam)
            if emax.status is not EtaStatus.FOUND:
                continue
            eta = pick_eta(fam, emax, convex=False)
        if _deep(fam, eta):
            return fam, eta
    raise RuntimeError(f"no overlapping draw for seed {seed}")


def _deep(fam, eta):
    # g < 0 on a circle of directions: the origin sits inside with some margin
    t = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    W = np.column_stack([np.cos(t), np.sin(t)])
    return bool(np.max(support_values_pair(fam.pair(eta), W)) < -1e-3)


def discrete_families(seed, d=2, max_members=3, max_support=4):
    """Two finite families of discrete distributions around shifted centers."""
    rng = np.random.default_rng(seed)
    fams = []
    for center in ([1.0, 0.3], [-1.0, 0.0]):
        c = np.zeros(d)
        c[:2] = np.asarray(center)[:d] * rng.uniform(0.2, 2.0)
        members = []
        for _ in range(int(rng.integers(1, max_members + 1))):
            n = int(rng.integers(1, max_support + 1))
            q = rng.random(n) + 0.05
            members.append(DiscreteDistribution(rng.standard_normal((n, d)) + c, q / q.sum()))
        fams.append(members)
    return tuple(fams)
