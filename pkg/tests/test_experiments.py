import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcmix.engine import MixConfig, evolve_trajectory
from qcmix.experiments import (BenchmarkResult, Schedule, aggregate, attach_observables,
                               best_alpha, level_probabilities, max_deviation, pi_pc, qs_labels,
                               qubo_ground_probability, read_rows, run_annealing, sk_benchmark,
                               stationary_oracle)
from qcmix.ising import (IsingInstance, classical_energies, husimi_temperley, quantum_signature,
                         single_spin, sk_random)
from qcmix.tls import TlsParams, tls_stationary

# Ground-state level weights of H(0.8) for the 4-spin HT model, from a dense
# Kronecker-product eigensolve (tests/conftest.dense_h).
HT_EXACT_S08 = (0.8618142863920135, 0.11944175803322646, 0.018743955574759864)


@given(st.floats(0.1, 100), st.floats(0.1, 3), st.floats(0.01, 1))
@settings(max_examples=100)
def test_schedule_invariants(tau, gamma, scale):
    s = Schedule(tau, gamma, scale)
    assert s(0.0) == 0.0
    assert s(tau) == pytest.approx(scale, rel=1e-15)
    ts = np.linspace(0, tau, 50)
    assert np.all(np.diff([s(t) for t in ts]) >= 0)
    assert s(2 * tau) == pytest.approx(scale)


def test_schedule_validation():
    for bad in (dict(tau=0.0), dict(tau=1.0, gamma_index=0.0), dict(tau=1.0, scale=1.5),
                dict(tau=1.0, scale=0.0), dict(tau=1.0, form="cosine")):
        with pytest.raises(ValueError):
            Schedule(**bad)
    with pytest.raises(ValueError):
        Schedule.constant(1.2, 10.0)
    assert Schedule.constant(0.0, 5.0)(3.0) == 0.0


def test_scaled_sqrt_schedule():
    s = Schedule(100.0, 0.5, 0.8)
    assert s(25.0) == pytest.approx(0.4)


def test_initial_ground_probability():
    inst = quantum_signature()
    sp = classical_energies(inst)
    tr = run_annealing(inst, Schedule(1.0), MixConfig(0.3, 0.0, sample_every=500), spectrum=sp)
    assert tr.observables["qubo_ground_probability"][0] == pytest.approx(17 / 256)
    np.testing.assert_allclose(tr.observables["qubo_ground_probability"],
                               tr.probs[:, sp.ground_indices].sum(axis=1))
    assert np.all((tr.observables["qubo_ground_probability"] >= 0)
                  & (tr.observables["qubo_ground_probability"] <= 1))


def test_level_probabilities_sum_to_one():
    sp = classical_energies(husimi_temperley(4))
    P = np.random.default_rng(0).dirichlet(np.ones(16), size=5)
    lv = level_probabilities(P, sp)
    assert lv.shape == (5, 3)
    np.testing.assert_allclose(lv.sum(axis=1), 1)
    np.testing.assert_allclose(lv[:, 0], qubo_ground_probability(P, sp))


def test_unknown_observable():
    inst = single_spin(1.0)
    tr = evolve_trajectory(inst, Schedule(0.01), MixConfig(0.1, 0.0))
    with pytest.raises(ValueError, match="unknown observable"):
        attach_observables(tr, inst, classical_energies(inst), ["entropy"])


def test_qs_labels():
    cluster, isolated = qs_labels(quantum_signature())
    assert len(cluster) == 16 and isolated == 255
    assert all(c & 0b1111 == 0 for c in cluster)


def test_pi_pc_examples():
    assert pi_pc(np.full(256, 1 / 256)) == pytest.approx(1.0)
    P = np.zeros(256)
    P[255] = 1.0
    assert pi_pc(P) == math.inf


def test_oracle_exact_mode():
    out = stationary_oracle(husimi_temperley(4), 0.8, 0.0, 0.0, mode="exact")
    np.testing.assert_allclose(out, HT_EXACT_S08, atol=1e-12)
    with pytest.raises(ValueError):
        stationary_oracle(husimi_temperley(4), 0.8, 0.1, 0.0, mode="exact")


def test_oracle_classical_end():
    out = stationary_oracle(husimi_temperley(4), 1.0, 0.5, 0.0)
    assert out[0] == pytest.approx(1.0, abs=1e-6)


def test_oracle_matches_two_level_root():
    out = stationary_oracle(single_spin(2.0, transverse=2.0), 0.5, 0.1, 0.0)
    z = tls_stationary(TlsParams(1.0, 1.0, 0.1))[0].z
    assert out[0] == pytest.approx(z, abs=1e-4)


def test_oracle_size_limit():
    with pytest.raises(ValueError):
        stationary_oracle(sk_random(11, 0), 0.5, 0.1, 0.0)


def test_classical_rows_ignore_driver():
    inst = sk_random(5, 2)
    other = IsingInstance(inst.n, inst.couplings, inst.fields, transverse=3.0)
    cfg = MixConfig(1.0, 0.0, sample_every=100)
    a = evolve_trajectory(inst, Schedule(3.0, 0.4), cfg)
    b = evolve_trajectory(other, Schedule(3.0, 0.4), cfg)
    np.testing.assert_array_equal(a.probs, b.probs)


def test_max_deviation():
    inst = husimi_temperley(4)
    tr = run_annealing(inst, Schedule.constant(0.8, 2.0), MixConfig(0.1, 0.0, sample_every=100))
    lv = tr.observables["level_probabilities"]
    ref = lv[-1]
    assert max_deviation(tr, lambda s: ref, 0.0, 2.0) == pytest.approx(np.abs(lv - ref).max())
    assert max_deviation(tr, lambda s: ref, 2.0, 2.0) == 0.0


def test_sk_benchmark_determinism_and_aggregates(tmp_path):
    kw = dict(n=4, seeds=[0, 1, 2], alpha_list=[0.0, 1.0], tau_list=[1.0], gamma_list=[0.4])
    a = sk_benchmark(**kw)
    b = sk_benchmark(**kw, workers=2)
    assert a.rows == b.rows
    assert len(a.rows) == 6 and all(0 <= r[4] <= 1 for r in a.rows)
    for alpha, tau, gamma, mean, se, count in a.aggregates:
        ps = [r[4] for r in a.rows if r[1] == alpha]
        assert count == 3
        assert mean == float(np.mean(ps))
        assert se == pytest.approx(np.std(ps, ddof=1) / math.sqrt(3))


def test_sk_benchmark_resume(tmp_path):
    kw = dict(n=4, seeds=[0, 1], alpha_list=[0.0, 0.5], tau_list=[1.0], gamma_list=[0.4])
    full = sk_benchmark(**kw)
    part = tmp_path / "partial.csv"
    sk_benchmark(n=4, seeds=[0], alpha_list=[0.0, 0.5], tau_list=[1.0], gamma_list=[0.4],
                 partial_path=part)
    assert len(read_rows(part)) == 2
    calls = []
    resumed = sk_benchmark(**kw, partial_path=part, progress=lambda d, t: calls.append(d))
    assert resumed.rows == full.rows
    assert calls == [3, 4]
    assert len(read_rows(part)) == 4


def test_sk_benchmark_rejects_empty_grid():
    with pytest.raises(ValueError):
        sk_benchmark(4, [], [0.0], [1.0], [0.4])


def test_best_alpha_breaks_ties_to_smaller_alpha():
    rows = [(0, 0.0, 2.0, 0.4, 0.5), (0, 1.0, 2.0, 0.4, 0.5), (0, 0.5, 2.0, 0.4, 0.4)]
    res = BenchmarkResult(rows, aggregate(rows))
    assert best_alpha(res, 0.4, 2.0)[0] == 0.0
