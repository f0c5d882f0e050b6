"""Trained direction against the sphere-grid optimum, per family and regime."""

import argparse
from dataclasses import dataclass

import numpy as np

from rcm.instances import mixed_instance
from rcm.oracle import grid_sphere_solve
from rcm.solver_convex import Regime, solve_rcm
from rcm.uncertainty import FAMILIES


@dataclass
class AgreementConfig:
    seeds: int = 20
    resolution: int = 10_000


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(AgreementConfig()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    cfg = AgreementConfig(**vars(p.parse_args()))
    print(f"{'family':10s} {'regime':20s} {'n':>3s} {'match':>5s} {'max angle':>9s} {'max dg':>9s}")
    for kind in FAMILIES:
        groups = {}
        for seed in range(cfg.seeds):
            fam, eta, emax = mixed_instance(kind, seed)
            sol = solve_rcm(fam, eta, emax)
            grid = grid_sphere_solve(fam.pair(eta), cfg.resolution)
            ang = np.degrees(np.arccos(np.clip(sol.w @ grid.w_best, -1, 1)))
            dg = abs(sol.value - grid.value)
            groups.setdefault(sol.regime, []).append((ang, dg, ang <= 2.0 and dg <= 1e-2))
        for regime in Regime:
            r = groups.get(regime)
            if not r:
                continue
            a = np.array(r)
            print(f"{kind:10s} {regime.value:20s} {len(r):3d} {int(a[:, 2].sum()):5d} "
                  f"{a[:, 0].max():9.3f} {a[:, 1].max():9.2e}")


if __name__ == "__main__":
    main()
