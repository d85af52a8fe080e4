"""P_I/P_C of the 8-spin quantum-signature model along s(t) = sqrt(t/tau)."""

from dataclasses import dataclass

from _common import parse, save_config
from qcmix.experiments import qs_ratio_run
from qcmix.io import write_csv


@dataclass
class Config:
    alphas: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    tau: float = 100.0
    gamma: float = 0.5
    temperature: float = 0.0
    dt: float = 1e-3
    sample_every: int = 100


def main():
    cfg, out = parse(Config, __doc__)
    runs = qs_ratio_run(cfg.alphas, cfg.tau, cfg.gamma, cfg.temperature, cfg.dt, cfg.sample_every)
    first = runs[cfg.alphas[0]]
    write_csv(out / "qs_ratio.csv", ["t", "s"] + [f"pi_pc_alpha_{a:g}" for a in cfg.alphas],
              zip(first.times, first.s, *(runs[a].observables["pi_pc_ratio"] for a in cfg.alphas)))
    save_config(cfg, out / "qs_ratio.json")
    for a in cfg.alphas:
        print(f"alpha={a:g}: final P_I/P_C={runs[a].observables['pi_pc_ratio'][-1]:.4f}")


if __name__ == "__main__":
    main()
