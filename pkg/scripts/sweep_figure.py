"""Optimal robust value against the set parameter for each family on one seeded dataset.

Writes ``sweep_<family>.csv`` and, when matplotlib is available, ``sweep.png``.
"""

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rcm.instances import two_blobs
from rcm.solver_convex import EtaStatus, eta_max, eta_sweep
from rcm.uncertainty import Family


@dataclass
class SweepConfig:
    seed: int = 0
    sep: float = 1.5
    points: int = 41
    out: str = "results"


def sweep(fam, n):
    emax = eta_max(fam)
    lo, hi = fam.eta_range()
    if not np.isfinite(hi):
        hi = 2.0 * emax.eta_max if emax.status is EtaStatus.FOUND else 1.0
    grid = np.linspace(lo, hi, n)
    rows = eta_sweep(fam, grid, emax)
    native = np.array([fam.to_native(e) for e, _ in rows])
    values = np.array([v for _, v in rows])
    return native, values, emax


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(SweepConfig()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    cfg = SweepConfig(**vars(p.parse_args()))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    data = two_blobs(cfg.seed, cfg.sep, sizes=(10, 16))
    curves = {}
    for kind in ("rch", "ellipsoid", "fda"):
        fam = Family.from_data(data, kind)
        native, values, emax = sweep(fam, cfg.points)
        np.savetxt(out / f"sweep_{kind}.csv", np.column_stack([native, values]), delimiter=",",
                   header="param,value", comments="")
        crit = fam.to_native(emax.eta_max) if emax.status is EtaStatus.FOUND else None
        print(f"{kind:9s} critical={crit} monotone={bool(np.all(np.diff(values) <= 1e-6))}")
        curves[kind] = (native, values)
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
    for ax, (kind, (x, y)) in zip(axes, curves.items()):
        ax.plot(x, y, marker=".")
        ax.axhline(0.0, color="grey", lw=0.8)
        ax.set_title(kind)
        ax.set_xlabel({"rch": "nu", "ellipsoid": "kappa", "fda": "zeta"}[kind])
    axes[0].set_ylabel("optimal value")
    fig.tight_layout()
    fig.savefig(out / "sweep.png", dpi=120)


if __name__ == "__main__":
    main()
