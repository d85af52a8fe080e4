"""HT level probabilities for a quench to constant s, with the stationary-oracle values."""

from dataclasses import dataclass

from _common import parse, save_config
from qcmix.engine import MixConfig
from qcmix.experiments import Schedule, run_annealing, stationary_oracle
from qcmix.io import write_csv
from qcmix.ising import husimi_temperley


@dataclass
class Config:
    alpha: float = 0.1
    temperature: float = 0.0
    s: float = 0.8
    tau: float = 100.0
    dt: float = 1e-3
    sample_every: int = 100


def main():
    cfg, out = parse(Config, __doc__)
    inst = husimi_temperley(4)
    tr = run_annealing(inst, Schedule.constant(cfg.s, cfg.tau),
                       MixConfig(cfg.alpha, cfg.temperature, cfg.dt, sample_every=cfg.sample_every))
    ref = stationary_oracle(inst, cfg.s, cfg.alpha, cfg.temperature)
    lv = tr.observables["level_probabilities"]
    write_csv(out / "ht_quench.csv",
              ["t", "p_level_0", "p_level_1", "p_level_2", "stat_level_0", "stat_level_1", "stat_level_2"],
              ((t, *row, *ref) for t, row in zip(tr.times, lv)))
    save_config(cfg, out / "ht_quench.json")
    print("final levels", " ".join(f"{x:.5f}" for x in lv[-1]), "| stationary",
          " ".join(f"{x:.5f}" for x in ref))


if __name__ == "__main__":
    main()
