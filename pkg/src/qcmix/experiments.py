"""Annealing schedules, observables and the experiment drivers."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import (DENSE_CHECK_MAX_SPINS, MixConfig, Trajectory, density_check,
                     evolve_trajectory, uniform_state)
from .io import fmt
from .ising import (QS_CORE, QS_OUTER, IsingInstance, SpectrumTable, apply_total_hamiltonian,
                    classical_energies, quantum_signature, sk_random)

log = logging.getLogger(__name__)

ORACLE_MAX_SPINS = 10
OBSERVABLES = ("level_probabilities", "qubo_ground_probability", "pi_pc_ratio", "purity_defect",
               "state_dump")


@dataclass(frozen=True)
class Schedule:
    """``s(t) = scale * (t/tau)**gamma_index`` clamped to [0, 1]; ``form="constant"`` holds ``scale``."""

    tau: float
    gamma_index: float = 1.0
    scale: float = 1.0
    form: str = "power"

    def __post_init__(self):
        if self.form not in ("power", "constant"):
            raise ValueError(f"unknown schedule form {self.form!r}")
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if not self.gamma_index > 0:
            raise ValueError(f"gamma_index must be > 0, got {self.gamma_index}")
        if self.form == "constant" and not 0.0 <= self.scale <= 1.0:
            raise ValueError(f"constant s must lie in [0, 1], got {self.scale}")
        if self.form == "power" and not 0.0 < self.scale <= 1.0:
            raise ValueError(f"scale must lie in (0, 1], got {self.scale}")

    @classmethod
    def constant(cls, s: float, tau: float) -> "Schedule":
        return cls(tau=tau, scale=s, form="constant")

    def __call__(self, t: float) -> float:
        if self.form == "constant":
            return self.scale
        frac = min(max(t / self.tau, 0.0), 1.0)
        return min(max(self.scale * frac ** self.gamma_index, 0.0), 1.0)


# --- observables ---------------------------------------------------------------

def level_probabilities(probs: np.ndarray, spectrum: SpectrumTable) -> np.ndarray:
    """Total probability per classical energy level (lowest level first); last axis is levels."""
    probs = np.asarray(probs)
    return np.stack([probs[..., g].sum(axis=-1) for g in spectrum.levels()], axis=-1)


def qubo_ground_probability(probs: np.ndarray, spectrum: SpectrumTable) -> np.ndarray:
    return np.asarray(probs)[..., spectrum.ground_indices].sum(axis=-1)


def qs_labels(inst: IsingInstance | None = None) -> tuple[np.ndarray, int]:
    """Cluster indices (all core spins up, outer spins free) and the all-down isolated index."""
    n = 8 if inst is None else inst.n
    if n != len(QS_CORE) + len(QS_OUTER):
        raise ValueError("P_I/P_C labels are only defined for the quantum-signature model")
    cluster = []
    for pattern in range(1 << len(QS_OUTER)):
        idx = 0
        for k, spin in enumerate(QS_OUTER):
            if pattern >> k & 1:
                idx |= 1 << spin
        cluster.append(idx)
    return np.array(sorted(cluster)), (1 << n) - 1


def pi_pc(P: np.ndarray, labels: tuple[np.ndarray, int] | None = None) -> float:
    """``P_I / P_C``; returns ``inf`` (and logs) when the cluster mean vanishes."""
    cluster, isolated = qs_labels() if labels is None else labels
    P = np.asarray(P)
    p_c = float(P[cluster].mean())
    p_i = float(P[isolated])
    if p_c == 0.0:
        log.warning("P_C is zero; returning +inf for P_I/P_C")
        return math.inf
    return p_i / p_c


def attach_observables(traj: Trajectory, inst: IsingInstance, spectrum: SpectrumTable,
                       observables=("level_probabilities", "qubo_ground_probability")) -> Trajectory:
    for name in observables:
        if name not in OBSERVABLES:
            raise ValueError(f"unknown observable {name!r}; choose from {OBSERVABLES}")
        if name == "level_probabilities":
            traj.observables[name] = level_probabilities(traj.probs, spectrum)
        elif name == "qubo_ground_probability":
            traj.observables[name] = qubo_ground_probability(traj.probs, spectrum)
        elif name == "pi_pc_ratio":
            labels = qs_labels(inst)
            traj.observables[name] = np.array([pi_pc(p, labels) for p in traj.probs])
        elif name == "purity_defect":
            if inst.n > DENSE_CHECK_MAX_SPINS:
                raise ValueError(f"purity_defect needs n <= {DENSE_CHECK_MAX_SPINS}")
            traj.observables[name] = np.array([density_check(a)[0] for a in traj.psi])
        elif name == "state_dump":
            traj.observables[name] = traj.psi
    return traj


def run_annealing(inst: IsingInstance, schedule: Schedule, config: MixConfig,
                  observables=("level_probabilities", "qubo_ground_probability"),
                  spectrum: SpectrumTable | None = None) -> Trajectory:
    """Mixed evolution from the uniform superposition with observables attached."""
    if spectrum is None:
        spectrum = classical_energies(inst)
    traj = evolve_trajectory(inst, schedule, config, "uniform", spectrum=spectrum)
    return attach_observables(traj, inst, spectrum, observables)


# --- stationary-state oracle ---------------------------------------------------

def dense_hamiltonian(inst: IsingInstance, s: float) -> np.ndarray:
    spectrum = classical_energies(inst)
    eye = np.eye(inst.dim, dtype=complex)
    return np.column_stack([apply_total_hamiltonian(inst, s, e, spectrum) for e in eye]).real


class OracleNotConverged(RuntimeError):
    pass


def stationary_oracle(inst: IsingInstance, s: float, alpha: float, temperature: float,
                      mode: str = "auto", dt: float = 1e-3, window: float = 10.0,
                      drift_tol: float = 1e-6, max_time: float = 5000.0) -> np.ndarray:
    """Stationary level probabilities at fixed ``s``.

    ``mode="exact"`` (alpha=0 only) diagonalises ``H(s)`` and projects the ground
    eigenvector onto the classical levels. ``mode="integrate"`` runs the mixed
    engine from the uniform state in windows of ``window`` time units until two
    consecutive window averages differ by less than ``drift_tol``.
    """
    if inst.n > ORACLE_MAX_SPINS:
        raise ValueError(f"stationary oracle limited to {ORACLE_MAX_SPINS} spins")
    spectrum = classical_energies(inst)
    if mode == "auto":
        mode = "exact" if alpha == 0.0 else "integrate"
    if mode == "exact":
        if alpha != 0.0:
            raise ValueError("exact oracle mode is only valid at alpha = 0")
        _, vecs = np.linalg.eigh(dense_hamiltonian(inst, s))
        return level_probabilities(np.abs(vecs[:, 0]) ** 2, spectrum)
    if mode != "integrate":
        raise ValueError(f"unknown oracle mode {mode!r}")

    per_window = max(1, round(window / dt))
    stride = max(1, per_window // 200)
    config = MixConfig(alpha, temperature, dt, sample_every=stride)
    sched = Schedule.constant(s, window)
    state = "uniform"
    prev = None
    t = 0.0
    while t < max_time:
        traj = evolve_trajectory(inst, sched, config, state, tau=window, spectrum=spectrum)
        state = (traj.psi[-1], traj.probs[-1])
        avg = level_probabilities(traj.probs[1:], spectrum).mean(axis=0)
        t += window
        if prev is not None and np.abs(avg - prev).max() < drift_tol:
            return avg
        prev = avg
    raise OracleNotConverged(f"no stationary state within t={max_time} (s={s}, alpha={alpha})")


def max_deviation(traj: Trajectory, reference, t_min: float, t_max: float) -> float:
    """Max over samples in ``[t_min, t_max]`` and levels of ``|p_level(t) - reference(s(t))|``."""
    levels = traj.observables["level_probabilities"]
    mask = (traj.times >= t_min) & (traj.times <= t_max)
    ref = np.array([reference(s) for s in traj.s[mask]])
    return float(np.abs(levels[mask] - ref).max())


# --- SK benchmark --------------------------------------------------------------

@dataclass
class BenchmarkResult:
    rows: list[tuple[int, float, float, float, float]]
    aggregates: list[tuple[float, float, float, float, float, int]] = field(default_factory=list)

    def mean_table(self, gamma: float) -> dict[tuple[float, float], tuple[float, float]]:
        """``(alpha, tau) -> (mean, standard error)`` at one scheduling index."""
        return {(a, t): (m, se) for a, t, g, m, se, _ in self.aggregates if g == gamma}


def aggregate(rows) -> list[tuple[float, float, float, float, float, int]]:
    groups: dict[tuple[float, float, float], list[float]] = {}
    for seed, alpha, tau, gamma, p in sorted(rows):
        groups.setdefault((alpha, tau, gamma), []).append(p)
    out = []
    for (alpha, tau, gamma), ps in sorted(groups.items()):
        arr = np.array(ps)
        se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
        out.append((alpha, tau, gamma, float(arr.mean()), se, int(arr.size)))
    return out


def _sk_cell(args) -> tuple[int, float, float, float, float]:
    n, seed, alpha, tau, gamma, temperature, dt = args
    inst = sk_random(n, seed)
    spectrum = classical_energies(inst)
    nsteps = math.ceil(tau / dt - 1e-9)
    config = MixConfig(alpha, temperature, dt, sample_every=nsteps + 1)
    traj = evolve_trajectory(inst, Schedule(tau, gamma), config, spectrum=spectrum)
    p = float(qubo_ground_probability(traj.probs[-1], spectrum))
    return seed, alpha, tau, gamma, p


ROW_FIELDS = ("seed", "alpha", "tau", "gamma", "p_ground")


def read_rows(path: Path) -> list[tuple[int, float, float, float, float]]:
    with open(path, newline="") as fh:
        return [(int(r["seed"]), float(r["alpha"]), float(r["tau"]), float(r["gamma"]),
                 float(r["p_ground"])) for r in csv.DictReader(fh)]


def sk_benchmark(n: int, seeds, alpha_list, tau_list, gamma_list, temperature: float = 0.0,
                 dt: float = 1e-3, workers: int = 1, partial_path: str | Path | None = None,
                 progress=None) -> BenchmarkResult:
    """Final QUBO ground probability for every (seed, alpha, tau, gamma) cell.

    Completed cells are appended to ``partial_path`` as they finish, and cells already
    present there are skipped, so an interrupted run resumes where it stopped.
    """
    seeds, alpha_list, tau_list, gamma_list = (list(x) for x in (seeds, alpha_list, tau_list, gamma_list))
    if not (seeds and alpha_list and tau_list and gamma_list):
        raise ValueError("benchmark grids must be nonempty")
    cells = [(n, int(sd), float(a), float(t), float(g), float(temperature), float(dt))
             for sd in seeds for t in tau_list for g in gamma_list for a in alpha_list]
    done: dict[tuple, tuple] = {}
    writer = None
    fh = None
    if partial_path is not None:
        partial_path = Path(partial_path)
        if partial_path.exists() and partial_path.stat().st_size:
            for row in read_rows(partial_path):
                done[row[:4]] = row
        fh = open(partial_path, "a", newline="")
        writer = csv.writer(fh)
        if not done:
            writer.writerow(ROW_FIELDS)
    todo = [c for c in cells if (c[1], c[2], c[3], c[4]) not in done]
    try:
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                results = pool.map(_sk_cell, todo, chunksize=max(1, len(todo) // (8 * workers)))
                for row in results:
                    done[row[:4]] = row
                    if writer:
                        writer.writerow([fmt(v) for v in row])
                        fh.flush()
                    if progress:
                        progress(len(done), len(cells))
        else:
            for c in todo:
                row = _sk_cell(c)
                done[row[:4]] = row
                if writer:
                    writer.writerow([fmt(v) for v in row])
                    fh.flush()
                if progress:
                    progress(len(done), len(cells))
    finally:
        if fh:
            fh.close()
    wanted = {(c[1], c[2], c[3], c[4]) for c in cells}
    rows = sorted(r for k, r in done.items() if k in wanted)
    return BenchmarkResult(rows, aggregate(rows))


def best_alpha(result: BenchmarkResult, gamma: float, tau: float) -> tuple[float, float, float]:
    """``(alpha, mean, standard error)`` of the highest mean ground probability at ``tau``."""
    table = result.mean_table(gamma)
    cands = [(a, m, se) for (a, t), (m, se) in table.items() if t == tau]
    return max(cands, key=lambda c: (c[1], -c[0]))


# --- quantum-signature ratio ---------------------------------------------------

def qs_ratio_run(alphas, tau: float = 100.0, gamma: float = 0.5, temperature: float = 0.0,
                 dt: float = 1e-3, sample_every: int = 1000) -> dict[float, Trajectory]:
    inst = quantum_signature()
    spectrum = classical_energies(inst)
    out = {}
    for a in alphas:
        config = MixConfig(a, temperature, dt, sample_every=sample_every)
        out[a] = run_annealing(inst, Schedule(tau, gamma), config,
                               ("pi_pc_ratio", "qubo_ground_probability"), spectrum)
    return out


def uniform_ground_fraction(spectrum: SpectrumTable) -> float:
    return spectrum.ground_indices.size / spectrum.energies.size


__all__ = [
    "Schedule", "level_probabilities", "qubo_ground_probability", "qs_labels", "pi_pc",
    "run_annealing", "stationary_oracle", "sk_benchmark", "BenchmarkResult", "best_alpha",
    "qs_ratio_run", "max_deviation", "uniform_state",
]
