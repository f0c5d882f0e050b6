"""Outer-iteration counts, monotonicity and global-match rate of the local search."""

import argparse
from dataclasses import dataclass

import numpy as np

from rcm.instances import overlapping_instance
from rcm.oracle import grid_sphere_solve
from rcm.solver_nonconvex import LocalSearchConfig, local_optimality_check, local_search
from rcm.uncertainty import FAMILIES


@dataclass
class StatsConfig:
    instances: int = 100
    eps: float = 1e-6
    init: str = "mean"
    seed: int = 0


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(StatsConfig()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    cfg = StatsConfig(**vars(p.parse_args()))
    ls = LocalSearchConfig(epsilon=cfg.eps, init=cfg.init, seed=cfg.seed)
    rows = {k: [] for k in FAMILIES}
    for i in range(cfg.instances):
        fam, eta = overlapping_instance(i)
        pair = fam.pair(eta)
        res = local_search(pair, ls)
        grid = grid_sphere_solve(pair)
        vals = res.trace.values()
        cos = float(np.clip(res.w @ grid.w_best, -1, 1))
        hit = np.degrees(np.arccos(cos)) <= 2.0 and abs(res.value - grid.value) <= 1e-2
        local = local_optimality_check(pair, res.w, delta=1e-2).max_violation <= 1e-8
        rows[fam.kind].append((len(res.trace), bool(np.all(np.diff(vals) > -1e-12)), hit, local))
    print(f"{'family':10s} {'n':>4s} {'outer mean':>10s} {'outer max':>9s} "
          f"{'monotone':>8s} {'global':>7s} {'local':>6s}")
    for kind, r in rows.items():
        if not r:
            continue
        it = np.array([x[0] for x in r])
        print(f"{kind:10s} {len(r):4d} {it.mean():10.1f} {it.max():9d} "
              f"{sum(x[1] for x in r):8d} {sum(x[2] for x in r):7d} {sum(x[3] for x in r):6d}")


if __name__ == "__main__":
    main()
