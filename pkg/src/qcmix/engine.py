"""Mixed quantum/classical dynamics on the full 2^n basis.

The quantum subsystem is a pure state vector ``psi`` (complex, length 2^n) and the
classical subsystem a probability vector ``P``. Each step advances both with RK4
(Schroedinger equation and heat-bath master equation respectively) and then
blends them amplitude-wise:

    r_i = sqrt((1 - alpha) |a_i|^2 + alpha P_i),  a_i <- r_i a_i/|a_i|,  P_i <- r_i^2

so the quantum state stays pure for every alpha.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from numba import njit
from scipy.special import expit

from .ising import (IsingInstance, SpectrumTable, _hamiltonian_matvec,
                    apply_total_hamiltonian, classical_energies)

RENORM_TOL = 1e-9
DENSE_CHECK_MAX_SPINS = 8


@dataclass(frozen=True)
class MixConfig:
    alpha: float
    temperature: float
    dt: float = 1e-3
    phase_floor: float = 1e-15
    sample_every: int = 100

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not self.temperature >= 0.0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.phase_floor > 0.0:
            raise ValueError(f"phase_floor must be > 0, got {self.phase_floor}")
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be >= 1, got {self.sample_every}")

    @property
    def beta(self) -> float:
        """Inverse temperature; ``math.inf`` stands for T = 0 and is never used in arithmetic."""
        return math.inf if self.temperature == 0.0 else 1.0 / self.temperature


@dataclass
class Trajectory:
    times: np.ndarray
    s: np.ndarray
    psi: np.ndarray
    probs: np.ndarray
    config: MixConfig
    schedule: object
    max_renorm_defect: float = 0.0
    observables: dict = field(default_factory=dict)

    def echo(self) -> dict:
        sched = self.schedule
        return {
            "config": asdict(self.config),
            "schedule": asdict(sched) if hasattr(sched, "__dataclass_fields__") else repr(sched),
        }


# --- classical master equation -------------------------------------------------

def heat_bath_rates(spectrum: SpectrumTable, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Single-flip rates of the heat-bath master equation.

    Returns ``(rate_in, rate_out)`` where ``rate_in[k, i] = L[i, i ^ 2^k]`` is the rate of
    arriving at ``i`` by flipping spin ``k`` and ``rate_out[i] = -L[i, i]``.
    """
    if not beta >= 0.0:
        raise ValueError(f"inverse temperature must be >= 0 (temperature non-negative), got {beta}")
    E = np.asarray(spectrum.energies, dtype=float)
    n = spectrum.n
    idx = np.arange(E.size)
    rate_in = np.empty((n, E.size))
    for k in range(n):
        dE = E - E[idx ^ (1 << k)]  # E_i - E_j for the source j = i with spin k flipped
        if math.isinf(beta):
            rate_in[k] = np.where(np.abs(dE) <= spectrum.tol, 0.5, np.where(dE < 0.0, 1.0, 0.0))
        else:
            rate_in[k] = expit(-beta * dE)
    rate_out = np.zeros(E.size)
    for k in range(n):
        rate_out += rate_in[k][idx ^ (1 << k)]
    return rate_in, rate_out


def dense_rate_matrix(spectrum: SpectrumTable, beta: float) -> np.ndarray:
    rate_in, rate_out = heat_bath_rates(spectrum, beta)
    dim = spectrum.energies.size
    L = np.diag(-rate_out)
    idx = np.arange(dim)
    for k in range(rate_in.shape[0]):
        L[idx, idx ^ (1 << k)] = rate_in[k]
    return L


@njit(cache=True)
def _master_apply(rate_in, rate_out, P, out):
    n = rate_in.shape[0]
    for i in range(P.shape[0]):
        acc = -rate_out[i] * P[i]
        for k in range(n):
            acc += rate_in[k, i] * P[i ^ (1 << k)]
        out[i] = acc


def master_rhs(P: np.ndarray, spectrum: SpectrumTable, beta: float) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.shape != spectrum.energies.shape:
        raise ValueError(f"distribution of shape {P.shape} does not match spectrum {spectrum.energies.shape}")
    rate_in, rate_out = heat_bath_rates(spectrum, beta)
    out = np.empty_like(P)
    _master_apply(rate_in, rate_out, P, out)
    return out


# --- Schroedinger equation -----------------------------------------------------

def schrodinger_rhs(psi: np.ndarray, inst: IsingInstance, s: float,
                    spectrum: SpectrumTable | None = None) -> np.ndarray:
    return -1j * apply_total_hamiltonian(inst, s, psi, spectrum)


# --- compiled step kernels ------------------------------------------------------

@njit(cache=True)
def _rk4_psi(energies, s, gx, n, dt, psi, k1, k2, k3, k4, tmp):
    _hamiltonian_matvec(energies, s, gx, n, psi, k1)
    for i in range(psi.shape[0]):
        k1[i] *= -1j
        tmp[i] = psi[i] + 0.5 * dt * k1[i]
    _hamiltonian_matvec(energies, s, gx, n, tmp, k2)
    for i in range(psi.shape[0]):
        k2[i] *= -1j
        tmp[i] = psi[i] + 0.5 * dt * k2[i]
    _hamiltonian_matvec(energies, s, gx, n, tmp, k3)
    for i in range(psi.shape[0]):
        k3[i] *= -1j
        tmp[i] = psi[i] + dt * k3[i]
    _hamiltonian_matvec(energies, s, gx, n, tmp, k4)
    for i in range(psi.shape[0]):
        psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] - 1j * k4[i])


@njit(cache=True)
def _rk4_prob(rate_in, rate_out, dt, P, k1, k2, k3, k4, tmp):
    _master_apply(rate_in, rate_out, P, k1)
    for i in range(P.shape[0]):
        tmp[i] = P[i] + 0.5 * dt * k1[i]
    _master_apply(rate_in, rate_out, tmp, k2)
    for i in range(P.shape[0]):
        tmp[i] = P[i] + 0.5 * dt * k2[i]
    _master_apply(rate_in, rate_out, tmp, k3)
    for i in range(P.shape[0]):
        tmp[i] = P[i] + dt * k3[i]
    _master_apply(rate_in, rate_out, tmp, k4)
    for i in range(P.shape[0]):
        P[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@njit(cache=True)
def _mix(psi, P, alpha, floor):
    """In-place blend; returns the renormalisation defect ``|sum r^2 - 1|``, or -1 on a negative radicand."""
    total = 0.0
    for i in range(psi.shape[0]):
        mag = abs(psi[i])
        r2 = (1.0 - alpha) * mag * mag + alpha * P[i]
        if r2 < 0.0:
            return -1.0
        r = math.sqrt(r2)
        if mag >= floor:
            psi[i] = r * (psi[i] / mag)
        else:
            psi[i] = r + 0.0j
        P[i] = r2
        total += r2
    norm = math.sqrt(total)
    for i in range(psi.shape[0]):
        psi[i] /= norm
        P[i] /= total
    return abs(total - 1.0)


@njit(cache=True)
def _run(energies, gx, n, rate_in, rate_out, s_steps, dt_steps, record, alpha, floor,
         renorm_tol, psi, P, psi_out, P_out):
    dim = psi.shape[0]
    c1 = np.empty(dim, np.complex128)
    c2 = np.empty(dim, np.complex128)
    c3 = np.empty(dim, np.complex128)
    c4 = np.empty(dim, np.complex128)
    c5 = np.empty(dim, np.complex128)
    r1 = np.empty(dim)
    r2 = np.empty(dim)
    r3 = np.empty(dim)
    r4 = np.empty(dim)
    r5 = np.empty(dim)
    worst = 0.0
    row = 0
    for m in range(s_steps.shape[0]):
        _rk4_psi(energies, s_steps[m], gx, n, dt_steps[m], psi, c1, c2, c3, c4, c5)
        _rk4_prob(rate_in, rate_out, dt_steps[m], P, r1, r2, r3, r4, r5)
        defect = _mix(psi, P, alpha, floor)
        if defect < 0.0 or defect > renorm_tol:
            return defect, m
        if defect > worst:
            worst = defect
        if record[m]:
            psi_out[row, :] = psi
            P_out[row, :] = P
            row += 1
    return worst, s_steps.shape[0]


def _checked_defect(defect: float, step: int) -> float:
    if defect < 0.0:
        raise FloatingPointError(f"negative radicand in mixing rule at step {step}")
    if defect > RENORM_TOL:
        raise FloatingPointError(
            f"renormalisation defect {defect:.3e} exceeds {RENORM_TOL:g} at step {step}; reduce dt")
    return defect


def mix_update(psi_next: np.ndarray, P_next: np.ndarray, alpha: float,
               phase_floor: float = 1e-15) -> tuple[np.ndarray, np.ndarray]:
    psi = np.array(psi_next, dtype=complex)
    P = np.array(P_next, dtype=float)
    if psi.shape != P.shape:
        raise ValueError(f"shape mismatch: {psi.shape} vs {P.shape}")
    _checked_defect(_mix(psi, P, float(alpha), float(phase_floor)), 0)
    return psi, P


def evolve_step(psi: np.ndarray, P: np.ndarray, inst: IsingInstance, spectrum: SpectrumTable,
                s: float, config: MixConfig) -> tuple[np.ndarray, np.ndarray]:
    """One Lie-split step: RK4 on each subsystem over ``config.dt``, then one blend."""
    if psi.shape != (inst.dim,) or P.shape != (inst.dim,):
        raise ValueError("state dimensions do not match the instance")
    psi = np.array(psi, dtype=complex)
    P = np.array(P, dtype=float)
    rate_in, rate_out = heat_bath_rates(spectrum, config.beta)
    dim = inst.dim
    _rk4_psi(spectrum.energies, float(s), float(inst.transverse), inst.n, config.dt, psi,
             *(np.empty(dim, complex) for _ in range(5)))
    _rk4_prob(rate_in, rate_out, config.dt, P, *(np.empty(dim) for _ in range(5)))
    _checked_defect(_mix(psi, P, config.alpha, config.phase_floor), 0)
    return psi, P


def uniform_state(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)


def step_grid(tau: float, dt: float) -> np.ndarray:
    """Step start times on ``[0, tau]``; the last step is shortened to land on ``tau``."""
    if not tau > 0.0:
        raise ValueError(f"total time must be > 0, got {tau}")
    nsteps = max(1, math.ceil(tau / dt - 1e-9))
    t = np.arange(nsteps + 1) * dt
    t[-1] = tau
    return t


def evolve_trajectory(inst: IsingInstance, schedule: Callable[[float], float], config: MixConfig,
                      initial="uniform", tau: float | None = None,
                      spectrum: SpectrumTable | None = None) -> Trajectory:
    """Integrate from t=0 to ``tau`` (default ``schedule.tau``).

    ``initial`` is ``"uniform"`` or a ``(psi, P)`` pair; for a bare ``psi`` the classical
    distribution starts at ``|psi|^2``. Samples are taken at t=0, every
    ``config.sample_every`` steps and at the final step.
    """
    if spectrum is None:
        spectrum = classical_energies(inst)
    if tau is None:
        tau = schedule.tau
    dim = inst.dim
    if isinstance(initial, str):
        if initial != "uniform":
            raise ValueError(f"unknown initial state {initial!r}")
        psi = uniform_state(dim)
        P = np.abs(psi) ** 2
    elif isinstance(initial, tuple):
        psi = np.array(initial[0], dtype=complex)
        P = np.array(initial[1], dtype=float)
    else:
        psi = np.array(initial, dtype=complex)
        P = np.abs(psi) ** 2
    if psi.shape != (dim,) or P.shape != (dim,):
        raise ValueError("initial state does not match the instance dimension")

    t = step_grid(tau, config.dt)
    s_steps = np.array([schedule(x) for x in t[:-1]], dtype=float)
    if not np.all(np.isfinite(s_steps)):
        raise ValueError("schedule returned non-finite values")
    dt_steps = np.diff(t)
    nsteps = s_steps.size
    record = np.zeros(nsteps, dtype=np.bool_)
    record[config.sample_every - 1::config.sample_every] = True
    record[-1] = True
    nrec = int(record.sum())

    psi_out = np.empty((nrec + 1, dim), dtype=complex)
    P_out = np.empty((nrec + 1, dim))
    psi_out[0] = psi
    P_out[0] = P
    rate_in, rate_out = heat_bath_rates(spectrum, config.beta)
    defect, stopped = _run(np.asarray(spectrum.energies, dtype=float), float(inst.transverse), inst.n,
                           rate_in, rate_out, s_steps, dt_steps, record, float(config.alpha),
                           float(config.phase_floor), RENORM_TOL, psi, P, psi_out[1:], P_out[1:])
    _checked_defect(defect, stopped)

    times = np.concatenate([[0.0], t[1:][record]])
    s_rec = np.array([schedule(x) for x in times])
    return Trajectory(times, s_rec, psi_out, P_out, config, schedule, float(defect))


def density_check(psi: np.ndarray) -> tuple[float, float]:
    """Max-norm defects of ``rho^2 - rho`` and ``tr(rho) - 1`` for ``rho = |psi><psi|``."""
    psi = np.asarray(psi, dtype=complex)
    if psi.size > 1 << DENSE_CHECK_MAX_SPINS:
        raise ValueError(f"dense density check limited to {DENSE_CHECK_MAX_SPINS} spins")
    rho = np.outer(psi, psi.conj())
    purity = float(np.abs(rho @ rho - rho).max())
    trace = float(abs(np.trace(rho).real - 1.0))
    return purity, trace
