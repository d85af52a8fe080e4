"""Independent dense oracles shared by the tests.

Nothing here imports the package's Hamiltonian or rate code: the matrices are
built from explicit Pauli Kronecker products and brute-force enumeration.
"""

import itertools

import numpy as np
import pytest

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
I2 = np.eye(2)


def site_op(op, k, n):
    """``op`` acting on spin ``k``; spin k is bit k of the index, so it is the
    k-th factor counted from the right in the Kronecker product."""
    out = np.array([[1.0]])
    for j in reversed(range(n)):
        out = np.kron(out, op if j == k else I2)
    return out


def dense_h(J, h, s, transverse=1.0):
    J = np.asarray(J, dtype=float)
    h = np.asarray(h, dtype=float)
    n = len(h)
    hc = np.zeros((2**n, 2**n))
    for i in range(n):
        hc -= h[i] * site_op(SZ, i, n)
        for j in range(i + 1, n):
            hc -= J[i, j] * site_op(SZ, i, n) @ site_op(SZ, j, n)
    hq = -transverse * sum(site_op(SX, k, n) for k in range(n))
    return s * hc + (1.0 - s) * hq


def brute_energies(J, h):
    J = np.asarray(J, dtype=float)
    h = np.asarray(h, dtype=float)
    n = len(h)
    out = np.empty(2**n)
    for idx in range(2**n):
        spins = np.array([1 - 2 * ((idx >> k) & 1) for k in range(n)])
        out[idx] = -sum(J[i, j] * spins[i] * spins[j]
                        for i, j in itertools.combinations(range(n), 2)) - h @ spins
    return out


def dense_generator(E, beta):
    """Heat-bath generator L (dP/dt = L P) by explicit double loop."""
    dim = len(E)
    L = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(dim):
            if i != j and bin(i ^ j).count("1") == 1:
                if np.isinf(beta):
                    d = E[i] - E[j]
                    L[i, j] = 1.0 if d < -1e-12 else (0.5 if abs(d) <= 1e-12 else 0.0)
                else:
                    L[i, j] = 1.0 / (1.0 + np.exp(beta * (E[i] - E[j])))
    L -= np.diag(L.sum(axis=0))
    return L


def rk4(f, y, dt, steps):
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
