"""Wolfe's minimum-norm-point procedure over a growing set of atoms.

The corral keeps an affinely independent set of atoms with positive convex
weights whose combination is the current iterate.  Callers feed it new atoms
(from a finite list or from a linear-minimization oracle) and it performs the
minor cycles that restore optimality over the affine hull.
"""

import numpy as np

WEIGHT_EPS = 1e-14


def affine_minimizer(Q):
    """Weights ``alpha`` (summing to one) minimizing ``||Q.T @ alpha||``."""
    k = Q.shape[0]
    if k == 1:
        return np.ones(1)
    B = (Q[1:] - Q[0]).T
    beta, *_ = np.linalg.lstsq(B, -Q[0], rcond=None)
    return np.concatenate([[1.0 - beta.sum()], beta])


class Corral:
    """Active atoms and their convex weights.

    Parameters
    ----------
    atom : array, shape (d,)
        First atom; the iterate starts there.
    payload : object
        Arbitrary data carried along with the atom (per-class points, ...).
    """

    def __init__(self, atom, payload=None):
        self.atoms = np.asarray(atom, dtype=float)[None, :].copy()
        self.payloads = [payload]
        self.weights = np.ones(1)

    @property
    def point(self):
        return self.weights @ self.atoms

    def __len__(self):
        return len(self.weights)

    def contains(self, atom, tol):
        return bool(np.any(np.max(np.abs(self.atoms - atom), axis=1) <= tol))

    def combine(self, fn):
        """Weighted combination of ``fn(payload)`` over the active atoms."""
        return sum(w * np.asarray(fn(p), dtype=float) for w, p in zip(self.weights, self.payloads))

    def insert(self, atom, payload=None):
        """Add an atom and run minor cycles until the weights are strictly positive."""
        self.atoms = np.vstack([self.atoms, atom])
        self.payloads.append(payload)
        lam = np.append(self.weights, 0.0)
        while True:
            alpha = affine_minimizer(self.atoms)
            if np.all(alpha > WEIGHT_EPS):
                lam = alpha
                break
            neg = alpha <= WEIGHT_EPS
            denom = lam[neg] - alpha[neg]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(denom > 0, lam[neg] / denom, np.inf)
            theta = min(1.0, float(np.min(ratios)))
            lam = theta * alpha + (1.0 - theta) * lam
            keep = lam > WEIGHT_EPS
            if keep.all():
                # theta hit no boundary because of round-off; drop the smallest weight
                keep[np.argmin(lam)] = False
            self.atoms = self.atoms[keep]
            self.payloads = [p for p, k in zip(self.payloads, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
            if len(lam) == 1:
                break
        self.weights = lam / lam.sum()


def min_norm_point(points, tol=1e-12, max_iter=1000):
    """Minimum-norm point of ``conv(points)``.

    Returns
    -------
    x : array, shape (d,)
    weights : array, shape (n,)
        Convex weights over the input rows reproducing ``x``.
    """
    P = np.asarray(points, dtype=float)
    norms = np.einsum("ij,ij->i", P, P)
    i0 = int(np.argmin(norms))
    corral = Corral(P[i0], i0)
    scale = float(np.sqrt(norms.max())) if len(norms) else 1.0
    for _ in range(max_iter):
        x = corral.point
        proj = P @ x
        j = int(np.argmin(proj))
        gap = x @ x - proj[j]
        if gap <= tol * max(scale * scale, 1e-300) or j in corral.payloads:
            break
        corral.insert(P[j], j)
    weights = np.zeros(len(P))
    for w, idx in zip(corral.weights, corral.payloads):
        weights[idx] += w
    return corral.point, weights
