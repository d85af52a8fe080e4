"""Stable rho_11 against temperature at alpha=0.1, with the thermal curves for Gamma=0 and Gamma=1.

Both root-finding spaces are written: the pure-state manifold and the unconstrained
(x, y, z) system. Only the latter shows the crossover onto the classical curve.
"""

from dataclasses import dataclass

import numpy as np

from _common import parse, save_config
from qcmix.io import write_csv
from qcmix.tls import TlsParams, locate_kink, stable_curve, sweep_stationary


@dataclass
class Config:
    alpha: float = 0.1
    h: float = 1.0
    gamma_x: float = 1.0
    t_min: float = 0.05
    t_max: float = 3.0
    step: float = 0.01


def thermal_z(h, gamma, T):
    e = np.hypot(h, gamma)
    return 0.5 * (1 + h / e * np.tanh(e / T))


def main():
    cfg, out = parse(Config, __doc__)
    temps = np.round(np.arange(cfg.t_min, cfg.t_max + cfg.step / 2, cfg.step), 10)
    base = TlsParams(cfg.h, cfg.gamma_x, cfg.alpha)
    curves = {}
    for space in ("manifold", "full"):
        rows = sweep_stationary(base, "temperature", temps, space)
        write_csv(out / f"tls_temperature_branches_{space}.csv",
                  ["temperature", "branch", "z", "x", "y", "stability"],
                  ((r.value, r.branch, r.z, r.x, r.y, r.stability) for r in rows))
        curves[space] = dict(zip(*stable_curve(rows)))
    write_csv(out / "tls_temperature_kink.csv",
              ["temperature", "z_stable_manifold", "z_stable_full", "z_thermal_gamma0", "z_thermal_gamma1"],
              ((T, curves["manifold"].get(T, float("nan")), curves["full"].get(T, float("nan")),
                thermal_z(cfg.h, 0.0, T), thermal_z(cfg.h, cfg.gamma_x, T)) for T in temps))
    save_config(cfg, out / "tls_temperature_kink.json")
    v = np.array(sorted(curves["full"]))
    print(f"kink of the unconstrained stable curve at T={locate_kink(v, [curves['full'][x] for x in v]):.3f}")


if __name__ == "__main__":
    main()
