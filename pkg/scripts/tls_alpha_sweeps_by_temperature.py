"""Stationary rho_11 branches against alpha at several temperatures, h=Gamma=1."""

from dataclasses import dataclass

import numpy as np

from _common import parse, save_config
from qcmix.io import write_csv
from qcmix.tls import TlsParams, sweep_stationary


@dataclass
class Config:
    temperatures: tuple = (0.2, 0.5, 0.9, 1.0, 1.1, 1.2, 2.0, 5.0, 100.0)
    h: float = 1.0
    gamma_x: float = 1.0
    num: int = 101
    space: str = "manifold"


def main():
    cfg, out = parse(Config, __doc__)
    out_rows = []
    for T in cfg.temperatures:
        rows = sweep_stationary(TlsParams(cfg.h, cfg.gamma_x, 0.0, T), "alpha",
                                np.linspace(0, 1, cfg.num), cfg.space)
        out_rows += [(T, r.value, r.branch, r.z, r.x, r.y, r.stability) for r in rows]
        print(f"T={T:g}: {len({r.branch for r in rows})} branches")
    write_csv(out / "tls_alpha_sweeps.csv",
              ["temperature", "alpha", "branch", "z", "x", "y", "stability"], out_rows)
    save_config(cfg, out / "tls_alpha_sweeps_by_temperature.json")


if __name__ == "__main__":
    main()
