"""Mean SK ground probability against the scheduling index gamma for several tau."""

import os
from dataclasses import dataclass

from _common import parse, save_config
from qcmix.experiments import sk_benchmark
from qcmix.io import write_csv


@dataclass
class Config:
    n: int = 6
    instances: int = 20
    seed_base: int = 0
    alphas: tuple = tuple(round(0.1 * k, 1) for k in range(1, 11))
    taus: tuple = (2.0, 5.0, 10.0, 20.0, 50.0)
    gammas: tuple = (0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0)
    dt: float = 1e-3
    workers: int = os.cpu_count() or 1


def main():
    cfg, out = parse(Config, __doc__)
    res = sk_benchmark(cfg.n, range(cfg.seed_base, cfg.seed_base + cfg.instances), cfg.alphas,
                       cfg.taus, cfg.gammas, 0.0, cfg.dt, cfg.workers, out / "sk_gamma_partial.csv")
    write_csv(out / "sk_gamma_rows.csv", ["seed", "alpha", "tau", "gamma", "p_ground"], res.rows)
    write_csv(out / "sk_gamma_aggregate.csv", ["alpha", "tau", "gamma", "mean", "sem", "count"],
              res.aggregates)
    save_config(cfg, out / "sk_gamma_scan.json")
    (out / "sk_gamma_partial.csv").unlink()
    for tau in cfg.taus:
        best = max((m, a, g) for a, t, g, m, _, _ in res.aggregates if t == tau)
        print(f"tau={tau:g}: best mean {best[0]:.4f} at alpha={best[1]:g}, gamma={best[2]:g}")


if __name__ == "__main__":
    main()
