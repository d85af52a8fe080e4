"""Ising problem instances, classical spectra and the matrix-free annealing Hamiltonian.

Basis convention: bit ``k`` of a basis index encodes spin ``k``; a 0-bit is spin
+1 (up) and a 1-bit is spin -1 (down). Index 0 is therefore the all-up state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

MAX_SPINS = 16
DEGENERACY_RTOL = 1e-9

# Quantum-signature model layout: spins 0-3 form the core ring, spin 4+k hangs off core spin k.
QS_CORE = (0, 1, 2, 3)
QS_OUTER = (4, 5, 6, 7)


@dataclass(frozen=True, eq=False)
class IsingInstance:
    """Couplings ``J_ij`` and fields ``h_i`` of ``H_c = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i``.

    ``transverse`` scales the driver ``H_q = -transverse * sum_i sigma^x_i``; every
    model in this package uses 1, other values exist for two-level comparisons.
    """

    n: int
    couplings: np.ndarray
    fields: np.ndarray
    label: str = ""
    transverse: float = 1.0

    def __post_init__(self):
        J = np.array(self.couplings, dtype=float)
        h = np.array(self.fields, dtype=float)
        if self.n < 1:
            raise ValueError(f"spin count must be >= 1, got {self.n}")
        if J.shape != (self.n, self.n):
            raise ValueError(f"couplings must be {self.n}x{self.n}, got {J.shape}")
        if h.shape != (self.n,):
            raise ValueError(f"fields must have length {self.n}, got {h.shape}")
        if not np.array_equal(J, J.T):
            raise ValueError("couplings must be symmetric")
        if np.any(np.diag(J) != 0.0):
            raise ValueError("couplings must have a zero diagonal")
        J.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "couplings", J)
        object.__setattr__(self, "fields", h)

    @property
    def dim(self) -> int:
        return 1 << self.n

    def to_dict(self) -> dict:
        iu, ju = np.triu_indices(self.n, k=1)
        triplets = [
            [int(i), int(j), float(self.couplings[i, j])]
            for i, j in zip(iu, ju)
            if self.couplings[i, j] != 0.0
        ]
        out = {
            "n": self.n,
            "couplings": triplets,
            "fields": [float(x) for x in self.fields],
            "label": self.label,
        }
        if self.transverse != 1.0:
            out["transverse"] = float(self.transverse)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "IsingInstance":
        n = int(data["n"])
        J = np.zeros((n, n))
        for i, j, value in data.get("couplings", []):
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-coupling on spin {i}")
            J[i, j] = J[j, i] = float(value)
        h = data.get("fields") or [0.0] * n
        return cls(n, J, np.asarray(h, dtype=float), str(data.get("label", "")),
                   float(data.get("transverse", 1.0)))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "IsingInstance":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    energies: np.ndarray
    ground_indices: np.ndarray
    ground_energy: float
    tol: float = field(default=0.0)

    @property
    def n(self) -> int:
        return int(self.energies.size).bit_length() - 1

    def levels(self) -> list[np.ndarray]:
        """Basis indices grouped by classical energy level, lowest level first."""
        order = np.argsort(self.energies, kind="stable")
        groups: list[list[int]] = []
        last = None
        for idx in order:
            e = self.energies[idx]
            if last is None or e - last > self.tol:
                groups.append([])
                last = e
            groups[-1].append(int(idx))
        return [np.array(sorted(g)) for g in groups]

    def level_energies(self) -> np.ndarray:
        return np.array([self.energies[g[0]] for g in self.levels()])


def _check_size(n: int) -> None:
    if n > MAX_SPINS:
        raise ValueError(f"{n} spins exceeds the size cap of {MAX_SPINS}")


def spin_configurations(n: int) -> np.ndarray:
    """(2^n, n) array of +/-1 spins, row i is basis state i."""
    idx = np.arange(1 << n)[:, None]
    bits = (idx >> np.arange(n)[None, :]) & 1
    return 1 - 2 * bits


def classical_energies(inst: IsingInstance) -> SpectrumTable:
    _check_size(inst.n)
    spins = spin_configurations(inst.n).astype(float)
    # 0.5 because J is stored symmetrically and each pair must count once
    energies = -0.5 * np.einsum("ai,ij,aj->a", spins, inst.couplings, spins) - spins @ inst.fields
    ground = float(energies.min())
    tol = DEGENERACY_RTOL * max(1.0, float(np.abs(energies).max()))
    ground_idx = np.flatnonzero(np.abs(energies - ground) <= tol)
    energies.setflags(write=False)
    return SpectrumTable(energies, ground_idx, ground, tol)


def husimi_temperley(n: int = 4) -> IsingInstance:
    if n < 2:
        raise ValueError(f"Husimi-Temperley model needs n >= 2, got {n}")
    J = np.full((n, n), 0.25)
    np.fill_diagonal(J, 0.0)
    return IsingInstance(n, J, np.zeros(n), f"husimi_temperley(n={n})")


def quantum_signature() -> IsingInstance:
    n = 8
    J = np.zeros((n, n))
    for k, c in enumerate(QS_CORE):
        nxt = QS_CORE[(k + 1) % len(QS_CORE)]
        J[c, nxt] = J[nxt, c] = 1.0
        o = QS_OUTER[k]
        J[c, o] = J[o, c] = 1.0
    h = np.zeros(n)
    h[list(QS_CORE)] = 1.0
    h[list(QS_OUTER)] = -1.0
    return IsingInstance(n, J, h, "quantum_signature")


def sk_random(n: int, seed: int) -> IsingInstance:
    """SK spin glass, ``J_ij ~ N(0, 1/n)`` for i<j, zero fields."""
    if n < 2:
        raise ValueError(f"SK model needs n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    J = np.zeros((n, n))
    J[iu, ju] = rng.normal(0.0, np.sqrt(1.0 / n), size=iu.size)
    J = J + J.T
    return IsingInstance(n, J, np.zeros(n), f"sk_random(n={n}, seed={seed})")


def single_spin(h: float, transverse: float = 1.0) -> IsingInstance:
    """One spin with longitudinal field ``h``: ``H_c = -h sigma^z``."""
    return IsingInstance(1, np.zeros((1, 1)), np.array([h]), f"single_spin(h={h})", transverse)


@njit(cache=True)
def _hamiltonian_matvec(energies, s, gx, n, v, out):
    q = (1.0 - s) * gx
    for i in range(v.shape[0]):
        acc = s * energies[i] * v[i]
        for k in range(n):
            acc -= q * v[i ^ (1 << k)]
        out[i] = acc


def apply_total_hamiltonian(inst: IsingInstance, s: float, v: np.ndarray,
                            spectrum: SpectrumTable | None = None) -> np.ndarray:
    """``(s H_c + (1-s) H_q) v`` without forming the matrix."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (inst.dim,):
        raise ValueError(f"vector of shape {v.shape} does not match dimension {inst.dim}")
    if spectrum is None:
        spectrum = classical_energies(inst)
    out = np.empty_like(v)
    _hamiltonian_matvec(spectrum.energies, float(s), float(inst.transverse), inst.n, v, out)
    return out
