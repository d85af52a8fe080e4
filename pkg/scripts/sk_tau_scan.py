"""Mean SK ground probability against tau for every alpha at s(t) = (t/tau)^gamma."""

import os
from dataclasses import dataclass

from _common import parse, save_config
from qcmix.experiments import best_alpha, sk_benchmark
from qcmix.io import write_csv


@dataclass
class Config:
    n: int = 6
    instances: int = 20
    seed_base: int = 0
    alphas: tuple = tuple(round(0.1 * k, 1) for k in range(11))
    taus: tuple = (2.0, 5.0, 10.0, 20.0, 50.0)
    gamma: float = 0.4
    dt: float = 1e-3
    workers: int = os.cpu_count() or 1


def main():
    cfg, out = parse(Config, __doc__)
    res = sk_benchmark(cfg.n, range(cfg.seed_base, cfg.seed_base + cfg.instances), cfg.alphas,
                       cfg.taus, [cfg.gamma], 0.0, cfg.dt, cfg.workers, out / "sk_tau_partial.csv")
    write_csv(out / "sk_tau_rows.csv", ["seed", "alpha", "tau", "gamma", "p_ground"], res.rows)
    write_csv(out / "sk_tau_aggregate.csv", ["alpha", "tau", "gamma", "mean", "sem", "count"],
              res.aggregates)
    save_config(cfg, out / "sk_tau_scan.json")
    (out / "sk_tau_partial.csv").unlink()
    for tau in cfg.taus:
        a, m, se = best_alpha(res, cfg.gamma, tau)
        print(f"tau={tau:g}: best alpha={a:g} mean={m:.4f} +- {se:.4f}")


if __name__ == "__main__":
    main()
