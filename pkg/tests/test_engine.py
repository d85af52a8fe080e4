import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import brute_energies, dense_generator, dense_h, rk4
from qcmix.engine import (MixConfig, dense_rate_matrix, density_check, evolve_step,
                          evolve_trajectory, master_rhs, mix_update, schrodinger_rhs, step_grid,
                          uniform_state)
from qcmix.experiments import Schedule
from qcmix.ising import (IsingInstance, classical_energies, husimi_temperley, quantum_signature,
                         single_spin)


def random_instance(rng, n=4):
    J = np.triu(rng.normal(size=(n, n)), 1)
    return IsingInstance(n, J + J.T, rng.normal(size=n), "random")


# --- master equation -------------------------------------------------------------

def test_master_two_level_zero_temperature():
    sp = classical_energies(single_spin(0.7))
    np.testing.assert_allclose(master_rhs(np.array([0.3, 0.7]), sp, math.inf), [0.7, -0.7])


def test_master_infinite_temperature():
    sp = classical_energies(husimi_temperley(4))
    np.testing.assert_allclose(dense_rate_matrix(sp, 0.0)[1, 0], 0.5)
    np.testing.assert_allclose(master_rhs(np.full(16, 1 / 16), sp, 0.0), 0.0, atol=1e-15)


@pytest.mark.parametrize("beta", [0.3, 1.0, 4.0])
def test_master_two_level_boltzmann_is_fixed(beta):
    h = 0.9
    sp = classical_energies(single_spin(h))
    P = np.array([math.exp(beta * h), math.exp(-beta * h)]) / (2 * math.cosh(beta * h))
    np.testing.assert_allclose(master_rhs(P, sp, beta), 0.0, atol=1e-15)


@pytest.mark.parametrize("beta", [math.inf, 0.5, 1.0, 2.0])
def test_dense_rate_matrix_matches_oracle(rng, beta):
    inst = random_instance(rng)
    sp = classical_energies(inst)
    L = dense_rate_matrix(sp, beta)
    np.testing.assert_allclose(L, dense_generator(brute_energies(inst.couplings, inst.fields), beta),
                               atol=1e-14)
    P = rng.random(16)
    np.testing.assert_allclose(master_rhs(P, sp, beta), L @ P, atol=1e-14)


def test_zero_temperature_ties_rate_half():
    free = IsingInstance(2, np.zeros((2, 2)), np.zeros(2))
    L = dense_rate_matrix(classical_energies(free), math.inf)
    assert L[1, 0] == 0.5 and L[0, 1] == 0.5 and L[3, 0] == 0.0
    np.testing.assert_allclose(np.diag(L), -1.0)


def test_negative_beta_rejected():
    with pytest.raises(ValueError):
        master_rhs(np.ones(2) / 2, classical_energies(single_spin(1.0)), -1.0)


# --- Schrodinger part ------------------------------------------------------------

def test_schrodinger_eigenvector():
    inst = husimi_temperley(4)
    vals, vecs = np.linalg.eigh(dense_h(inst.couplings, inst.fields, 0.37))
    v = vecs[:, 3].astype(complex)
    np.testing.assert_allclose(schrodinger_rhs(v, inst, 0.37), -1j * vals[3] * v, atol=1e-13)


@pytest.mark.parametrize("s", [0.0, 0.25, 0.9])
def test_schrodinger_driver_only(s):
    out = schrodinger_rhs(np.array([1, 0], complex), single_spin(0.0), s)
    np.testing.assert_allclose(out, [0, 1j * (1 - s)], atol=1e-15)


def test_schrodinger_norm_preserving(rng):
    inst = random_instance(rng)
    for _ in range(20):
        a = rng.normal(size=16) + 1j * rng.normal(size=16)
        a /= np.linalg.norm(a)
        assert abs(np.vdot(a, schrodinger_rhs(a, inst, rng.random())).real) < 1e-12


# --- mixing rule -----------------------------------------------------------------

def test_mix_alpha_zero_identity():
    a = np.array([0.6, 0.8j])
    psi, P = mix_update(a, np.array([0.5, 0.5]), 0.0)
    np.testing.assert_allclose(psi, a, atol=1e-15)
    np.testing.assert_allclose(P, [0.36, 0.64], atol=1e-15)


def test_mix_alpha_one_zero_amplitude_phase():
    psi, P = mix_update(np.array([1, 0], complex), np.array([0.25, 0.75]), 1.0)
    np.testing.assert_allclose(psi, [0.5, math.sqrt(0.75)], atol=1e-15)
    np.testing.assert_allclose(P, [0.25, 0.75], atol=1e-15)


def test_mix_half():
    a = np.array([math.sqrt(0.8), math.sqrt(0.2)], complex)
    psi, P = mix_update(a, np.array([0.5, 0.5]), 0.5)
    np.testing.assert_allclose(P, [0.65, 0.35], atol=1e-15)
    np.testing.assert_allclose(np.abs(psi) ** 2, P, atol=1e-15)


def test_mix_keeps_phase():
    a = np.exp(1j * np.array([0.3, -2.0])) * np.sqrt([0.4, 0.6])
    psi, _ = mix_update(a, np.array([0.9, 0.1]), 0.3)
    np.testing.assert_allclose(np.angle(psi), [0.3, -2.0], atol=1e-14)


def test_mix_rejects_unnormalised_input():
    with pytest.raises(FloatingPointError, match="renormalisation"):
        mix_update(np.array([1, 1], complex), np.array([0.5, 0.5]), 0.5)


@given(arrays(np.float64, 8, elements=st.floats(-1, 1)),
       arrays(np.float64, 8, elements=st.floats(-1, 1)),
       arrays(np.float64, 8, elements=st.floats(0, 1)),
       st.floats(0, 1))
@settings(max_examples=100, deadline=None)
def test_mix_normalised_outputs(re, im, p, alpha):
    a = re + 1j * im
    if np.linalg.norm(a) < 1e-3 or p.sum() < 1e-3:
        return
    a /= np.linalg.norm(a)
    p /= p.sum()
    psi, P = mix_update(a, p, alpha)
    assert abs(np.sum(np.abs(psi) ** 2) - 1) < 1e-12
    assert abs(P.sum() - 1) < 1e-12
    assert np.all(P >= 0)
    np.testing.assert_allclose(np.abs(psi) ** 2, P, atol=1e-14)


# --- single steps ----------------------------------------------------------------

def _state(rng, dim):
    a = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    a /= np.linalg.norm(a)
    return a, np.abs(a) ** 2


def test_step_alpha_zero_is_rk4_schrodinger(rng):
    inst = random_instance(rng)
    sp = classical_energies(inst)
    H = dense_h(inst.couplings, inst.fields, 0.6)
    a, P = _state(rng, 16)
    cfg = MixConfig(0.0, 0.0, dt=0.01)
    psi, Pn = evolve_step(a, P, inst, sp, 0.6, cfg)
    ref = rk4(lambda v: -1j * H @ v, a, 0.01, 1)
    ref /= np.linalg.norm(ref)
    np.testing.assert_allclose(psi, ref, atol=1e-12)
    np.testing.assert_allclose(Pn, np.abs(ref) ** 2, atol=1e-12)


def test_step_alpha_one_is_rk4_master(rng):
    inst = random_instance(rng)
    sp = classical_energies(inst)
    L = dense_generator(brute_energies(inst.couplings, inst.fields), 1.0)
    a, _ = _state(rng, 16)
    P = rng.random(16)
    P /= P.sum()
    _, Pn = evolve_step(a, P, inst, sp, 0.6, MixConfig(1.0, 1.0, dt=0.01))
    np.testing.assert_allclose(Pn, rk4(lambda q: L @ q, P, 0.01, 1), atol=1e-12)


def test_step_purity(rng):
    inst = quantum_signature()
    sp = classical_energies(inst)
    a, P = _state(rng, 256)
    psi, _ = evolve_step(a, P, inst, sp, 0.5, MixConfig(0.5, 0.0))
    assert density_check(psi)[0] < 1e-10


def test_step_shape_check():
    inst = husimi_temperley(4)
    with pytest.raises(ValueError):
        evolve_step(np.ones(8, complex), np.ones(8), inst, classical_energies(inst), 0.5,
                    MixConfig(0.5, 0.0))


# --- trajectories ----------------------------------------------------------------

def test_rabi_oscillation():
    a0 = np.array([1, 0], complex)
    tr = evolve_trajectory(single_spin(0.0), Schedule.constant(0.0, 1.0),
                           MixConfig(0.0, 0.0, dt=1e-3, sample_every=500), a0)
    np.testing.assert_allclose(tr.times, [0, 0.5, 1.0])
    np.testing.assert_allclose(tr.probs[:, 0], np.cos(tr.times) ** 2, atol=1e-6)


def test_classical_two_level_relaxation():
    tr = evolve_trajectory(single_spin(1.0), Schedule.constant(1.0, 5.0),
                           MixConfig(1.0, 0.0, dt=1e-3, sample_every=100))
    np.testing.assert_allclose(tr.probs[:, 0], 1 - 0.5 * np.exp(-tr.times), atol=1e-6)


def test_trajectory_sampling_and_invariants():
    tr = evolve_trajectory(husimi_temperley(4), Schedule(tau=1.05, gamma_index=0.5),
                           MixConfig(0.3, 0.5, dt=0.01, sample_every=20))
    assert tr.times[0] == 0 and tr.times[-1] == pytest.approx(1.05)
    assert np.all(np.diff(tr.times) > 0)
    assert len(tr.times) == 1 + 5 + 1
    np.testing.assert_allclose(np.sum(np.abs(tr.psi) ** 2, axis=1), 1, atol=1e-9)
    np.testing.assert_allclose(tr.probs.sum(axis=1), 1, atol=1e-9)
    assert np.all(tr.probs >= 0)
    assert tr.max_renorm_defect < 1e-9
    assert tr.echo()["config"]["alpha"] == 0.3


def test_step_grid_shortens_last_step():
    t = step_grid(1.05, 0.1)
    assert len(t) == 12 and t[-1] == pytest.approx(1.05) and t[-2] == pytest.approx(1.0)


def test_reduction_alpha_zero_matches_schrodinger():
    inst = husimi_temperley(4)
    s = Schedule(tau=10.0, gamma_index=1.0)
    dt = 1e-3
    tr = evolve_trajectory(inst, s, MixConfig(0.0, 0.0, dt=dt, sample_every=1000))
    hc = dense_h(inst.couplings, inst.fields, 1.0)
    hq = dense_h(inst.couplings, inst.fields, 0.0)
    a = uniform_state(16)
    ref = [np.abs(a) ** 2]
    for k in range(10_000):
        H = s(k * dt) * hc + (1 - s(k * dt)) * hq
        a = rk4(lambda v: -1j * H @ v, a, dt, 1)
        a /= np.linalg.norm(a)
        if (k + 1) % 1000 == 0:
            ref.append(np.abs(a) ** 2)
    assert np.abs(tr.probs - np.array(ref)).max() < 1e-10


def test_reduction_alpha_one_matches_master():
    inst = husimi_temperley(4)
    L = dense_generator(brute_energies(inst.couplings, inst.fields), 2.0)
    tr = evolve_trajectory(inst, Schedule(tau=10.0), MixConfig(1.0, 0.5, dt=1e-3, sample_every=1000))
    P = np.full(16, 1 / 16)
    ref = [P]
    for _ in range(10):
        P = rk4(lambda q: L @ q, P, 1e-3, 1000)
        ref.append(P)
    assert np.abs(tr.probs - np.array(ref)).max() < 1e-12


def test_zero_temperature_energy_monotone(rng):
    inst = random_instance(rng)
    E = classical_energies(inst).energies
    tr = evolve_trajectory(inst, Schedule.constant(0.5, 10.0), MixConfig(1.0, 0.0, sample_every=50))
    assert np.all(np.diff(tr.probs @ E) <= 1e-10)


def test_equilibrium_is_boltzmann(rng):
    inst = random_instance(rng)
    E = classical_energies(inst).energies
    tr = evolve_trajectory(inst, Schedule.constant(0.5, 200.0),
                           MixConfig(1.0, 1.0, dt=1e-2, sample_every=20000))
    boltz = np.exp(-(E - E.min()))
    boltz /= boltz.sum()
    assert 0.5 * np.abs(tr.probs[-1] - boltz).sum() < 1e-6


def test_density_check_examples(rng):
    a, _ = _state(rng, 32)
    assert max(density_check(a)) < 1e-12
    e = np.zeros(8, complex)
    e[0] = 1
    assert density_check(e) == (0.0, 0.0)


def test_density_check_after_qs_steps():
    tr = evolve_trajectory(quantum_signature(), Schedule.constant(0.5, 1.0),
                           MixConfig(0.5, 0.0, dt=1e-3, sample_every=100))
    assert max(density_check(a)[0] for a in tr.psi) < 1e-9


@pytest.mark.parametrize("kwargs", [dict(alpha=1.2, temperature=0.0), dict(alpha=0.5, temperature=-1.0),
                                    dict(alpha=0.5, temperature=0.0, dt=0.0),
                                    dict(alpha=0.5, temperature=0.0, phase_floor=0.0)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        MixConfig(**kwargs)


def test_config_beta():
    assert MixConfig(0.1, 0.0).beta == math.inf
    assert MixConfig(0.1, 0.5).beta == 2.0
