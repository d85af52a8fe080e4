"""rho_11(t) of the two-level system at T=0, h=Gamma=1 for two mixing strengths."""

from dataclasses import dataclass

import numpy as np

from _common import parse, save_config
from qcmix.io import write_csv
from qcmix.tls import TlsParams, integrate, tls_stationary


@dataclass
class Config:
    alphas: tuple = (0.1, 0.2)
    h: float = 1.0
    gamma_x: float = 1.0
    t_end: float = 100.0
    dt: float = 1e-3
    every: int = 100


def main():
    cfg, out = parse(Config, __doc__)
    cols, header = [], ["t"]
    for a in cfg.alphas:
        p = TlsParams(cfg.h, cfg.gamma_x, a)
        t, xyz = integrate(p, 0.5, 0.0, cfg.t_end, cfg.dt, cfg.every)
        cols.append(xyz[:, 2])
        header.append(f"rho11_alpha_{a:g}")
        z_star = tls_stationary(p)[0].z
        far = np.nonzero(np.abs(xyz[:, 2] - z_star) >= 0.01)[0]
        settle = t[far[-1] + 1] if far.size and far[-1] + 1 < t.size else float("nan")
        print(f"alpha={a:g}: stationary z={z_star:.6f}, within 0.01 from t={settle:.2f}")
    write_csv(out / "tls_relaxation.csv", header, zip(t, *cols))
    save_config(cfg, out / "tls_relaxation.json")


if __name__ == "__main__":
    main()
