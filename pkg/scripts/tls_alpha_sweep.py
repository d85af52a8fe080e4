"""Stationary rho_11 branches against alpha at T=0, h=Gamma=1."""

from dataclasses import dataclass

import numpy as np

from _common import parse, save_config
from qcmix.io import write_csv
from qcmix.tls import TlsParams, stable_curve, sweep_stationary


@dataclass
class Config:
    h: float = 1.0
    gamma_x: float = 1.0
    temperature: float = 0.0
    num: int = 101
    space: str = "manifold"


def main():
    cfg, out = parse(Config, __doc__)
    rows = sweep_stationary(TlsParams(cfg.h, cfg.gamma_x, 0.0, cfg.temperature), "alpha",
                            np.linspace(0, 1, cfg.num), cfg.space)
    write_csv(out / "tls_alpha_sweep.csv", ["alpha", "branch", "z", "x", "y", "stability"],
              ((r.value, r.branch, r.z, r.x, r.y, r.stability) for r in rows))
    save_config(cfg, out / "tls_alpha_sweep.json")
    v, z = stable_curve(rows)
    print(f"stable branch from z={z[0]:.6f} (alpha=0) to z={z[-1]:.6f} (alpha=1); "
          f"monotone: {bool(np.all(np.diff(z) >= 0))}")


if __name__ == "__main__":
    main()
