import math

import mpmath
import numpy as np
import pytest
from scipy import optimize

from capcert.channels import make_rng
from capcert.gaussmath import binary_entropy
from capcert.qubit import (N_OUTCOMES, N_SETTINGS, QubitChannelSpec, TomographyCounts,
                           almost_iid_halfspace_slack, choi_state, coherent_information,
                           coherent_information_closed_form, conditional_entropy, confidence_epsilon,
                           definetti_epsilon, kl_bernoulli, linear_inversion, outcome_probabilities,
                           pauli_povm, polytope_halfspace_check, qubit_iid_bound, qubit_noniid_bound,
                           qubit_report, simulate_tomography, worst_case_conditional_entropy)

PSI = np.array([1, 0, 0, 1]) / math.sqrt(2)


def test_kraus_completeness_random():
    r = make_rng(1)
    for a, b in r.uniform(-2 * math.pi, 2 * math.pi, size=(1000, 2)):
        assert QubitChannelSpec(a, b).completeness_error() < 1e-12


def test_choi_identity_and_flip():
    np.testing.assert_allclose(choi_state(QubitChannelSpec(0, 0)), np.outer(PSI, PSI), atol=1e-15)
    X = np.array([[0, 1], [1, 0]])
    v = np.kron(np.eye(2), X) @ PSI
    rho = choi_state(QubitChannelSpec(math.pi / 2, math.pi / 2))
    np.testing.assert_allclose(rho, np.outer(v, v), atol=1e-15)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 1


def test_choi_is_state():
    r = make_rng(2)
    for a, b in r.uniform(0, math.pi, size=(50, 2)):
        rho = choi_state(QubitChannelSpec(a, b))
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12
        # reference marginal stays maximally mixed
        ref = np.einsum("abcb->ac", rho.reshape(2, 2, 2, 2))
        np.testing.assert_allclose(ref, np.eye(2) / 2, atol=1e-12)


def test_coherent_information_identity():
    assert coherent_information(choi_state(QubitChannelSpec(0, 0))) == pytest.approx(1.0, abs=1e-12)


def test_dephasing_line():
    for a in np.linspace(0, math.pi / 2, 50):
        ci = coherent_information(choi_state(QubitChannelSpec(a, a)))
        assert ci == pytest.approx(1 - binary_entropy(math.sin(a) ** 2), abs=1e-9)


def test_closed_form_and_symmetry():
    r = make_rng(3)
    for a, b in r.uniform(0, math.pi, size=(50, 2)):
        ci = coherent_information(choi_state(QubitChannelSpec(a, b)))
        assert coherent_information_closed_form(a, b) == pytest.approx(ci, abs=1e-9)
        mirrored = coherent_information(choi_state(QubitChannelSpec(math.pi - a, math.pi - b)))
        assert mirrored == pytest.approx(ci, abs=1e-9)


def test_coherent_information_can_be_negative():
    # alpha = pi/2, beta = 0 sends everything to |1>: output decouples
    assert coherent_information(choi_state(QubitChannelSpec(math.pi / 2, 0.0))) <= 0
    assert coherent_information(np.eye(4) / 4) == pytest.approx(-1.0)


def test_coherent_information_rejects_non_states():
    with pytest.raises(ValueError):
        coherent_information(np.eye(4))
    with pytest.raises(ValueError):
        coherent_information(np.diag([1.5, -0.5, 0, 0]))
    with pytest.raises(ValueError):
        coherent_information(np.eye(2) / 2)


def test_povms_resolve_identity():
    for s in range(N_SETTINGS):
        E = pauli_povm(s)
        np.testing.assert_allclose(sum(E), np.eye(4), atol=1e-14)
        for P in E:
            np.testing.assert_allclose(P @ P, P, atol=1e-14)
    p = outcome_probabilities(np.outer(PSI, PSI))
    np.testing.assert_allclose(p[0], [0.5, 0, 0, 0.5], atol=1e-14)  # identity read out in Z
    np.testing.assert_allclose(p[5], [0.5, 0, 0, 0.5], atol=1e-14)  # X x X
    np.testing.assert_allclose(p[15], [0.5, 0, 0, 0.5], atol=1e-14)


def test_confidence_epsilon_closed_forms():
    for n, d in [(1000, 0.01), (50, 0.2), (10**6, 1e-5)]:
        assert confidence_epsilon(0.0, d, n) == pytest.approx(1 - d ** (1 / n), abs=1e-12)
    assert confidence_epsilon(0.3, 1 - 1e-15, 100) < 1e-6
    assert confidence_epsilon(1.0, 0.01, 100) == 0.0


def test_confidence_epsilon_against_root_finders():
    target = math.log(100) / 1000

    def D(e):
        return kl_bernoulli(0.5, 0.5 + e) - target

    ref = optimize.brentq(D, 1e-12, 0.5 - 1e-15, xtol=1e-15)
    got = confidence_epsilon(0.5, 0.01, 1000)
    assert got == pytest.approx(ref, abs=1e-10)
    mp = mpmath.findroot(lambda e: 0.5 * mpmath.log(0.5 / (0.5 + e)) + 0.5 * mpmath.log(0.5 / (0.5 - e))
                         - mpmath.log(100) / 1000, 0.07)
    assert got == pytest.approx(float(mp), abs=1e-10)


def test_confidence_epsilon_monotone_and_vectorized():
    eps_n = [confidence_epsilon(0.2, 0.01, n) for n in (100, 1000, 10000)]
    assert eps_n[0] > eps_n[1] > eps_n[2]
    eps_d = [confidence_epsilon(0.2, d, 1000) for d in (0.1, 0.01, 0.001)]
    assert eps_d[0] < eps_d[1] < eps_d[2]
    vec = confidence_epsilon(np.array([0.0, 0.2, 0.7]), 0.01, 1000)
    np.testing.assert_allclose(vec, [confidence_epsilon(p, 0.01, 1000) for p in (0.0, 0.2, 0.7)])


def test_counts_validation_and_csv(tmp_path):
    c = np.full((16, 4), 10)
    t = TomographyCounts.uniform(c, 0.01)
    assert t.n == 640 and t.delta == pytest.approx(0.01)
    np.testing.assert_array_equal(t.n_k, np.full(16, 40))
    path = tmp_path / "counts.csv"
    t.to_csv(path)
    back = TomographyCounts.from_csv(path, 0.01)
    np.testing.assert_array_equal(back.counts, t.counts)
    with pytest.raises(ValueError):
        TomographyCounts.uniform(np.zeros((16, 4)), 0.01)
    with pytest.raises(ValueError):
        TomographyCounts.uniform(np.ones((15, 4)), 0.01)
    with pytest.raises(ValueError):
        TomographyCounts.uniform(-np.ones((16, 4)), 0.01)
    bad = tmp_path / "bad.csv"
    bad.write_text("setting,outcome,count\n0,0,1\n")
    with pytest.raises(ValueError):
        TomographyCounts.from_csv(bad, 0.01)
    bad.write_text("setting_index,outcome_index,count\n16,0,1\n")
    with pytest.raises(ValueError):
        TomographyCounts.from_csv(bad, 0.01)


def test_polytope_trivial_cases():
    rho = np.eye(4) / 4
    exact = TomographyCounts.uniform(np.full((N_SETTINGS, N_OUTCOMES), 250), 0.01)
    assert polytope_halfspace_check(rho, exact)
    # all weight on an outcome the state never produces
    pure = np.outer(PSI, PSI)
    counts = np.full((N_SETTINGS, N_OUTCOMES), 0)
    counts[:, 1] = 10**6
    assert not polytope_halfspace_check(pure, TomographyCounts.uniform(counts, 0.01))
    with pytest.raises(TypeError):
        polytope_halfspace_check(rho, np.ones((16, 4)))


def test_polytope_contains_true_state_small_campaign():
    rho = choi_state(QubitChannelSpec(0.4, 0.1))
    r = make_rng(4)
    hits = sum(polytope_halfspace_check(rho, simulate_tomography(rho, 10**5, r, 0.01)) for _ in range(50))
    assert hits >= 49


def test_linear_inversion_recovers_state():
    rho = choi_state(QubitChannelSpec(0.7, 0.2))
    est = linear_inversion(simulate_tomography(rho, 10**7, make_rng(5)))
    assert np.abs(est - rho).max() < 5e-3
    assert np.trace(est).real == pytest.approx(1.0)


def test_worst_case_entropy_is_upper_bound():
    rho = choi_state(QubitChannelSpec(0.3, 0.2))
    counts = simulate_tomography(rho, 10**5, make_rng(6), 0.01)
    assert polytope_halfspace_check(rho, counts)
    value, worst, heuristic = worst_case_conditional_entropy(counts, make_rng(7), restarts=3)
    assert heuristic
    assert polytope_halfspace_check(worst, counts)
    assert value >= conditional_entropy(rho) - 1e-9


def test_qubit_iid_bound_limits():
    assert qubit_iid_bound(-1.0, 1e12, 0.02) == pytest.approx(1.0, abs=1e-4)
    for n in (1e3, 1e6, 1e9):
        assert qubit_iid_bound(0.0, n, 0.02) <= 0


def _iid_oracle(h, n, eps):
    root = math.sqrt(eps / 2)

    def neg(u):  # eta = root * sigmoid(u)
        eta = root / (1 + math.exp(-u))
        return -(4 / n) * (-3 * math.sqrt(n) * math.sqrt(math.log2(2 / (root - eta) ** 2)) + math.log2(eta))

    us = np.linspace(-40, 25, 40001)
    u0 = us[np.argmin([neg(u) for u in us])]
    res = optimize.minimize_scalar(neg, bracket=(u0 - 0.01, u0, u0 + 0.01), tol=1e-14)
    return -h - res.fun - 2 / n


def test_qubit_iid_bound_against_oracle():
    val = qubit_iid_bound(-1.0, 1e6, 0.02)
    assert 0 < val < 1
    assert val == pytest.approx(_iid_oracle(-1.0, 1e6, 0.02), abs=1e-9)


def test_qubit_iid_bound_increasing_in_n():
    vals = [qubit_iid_bound(-0.6, n, 0.02) for n in (1e3, 1e4, 1e5, 1e6, 1e8)]
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_definetti_epsilon():
    assert definetti_epsilon(1e3, 1e3, 1e6) == 0.0
    assert definetti_epsilon(1e3, 1e3, 0) == pytest.approx(2e24 * math.exp(-0.25), rel=1e-12)
    vals = [definetti_epsilon(1e4, 1e6, r) for r in (0, 1e3, 1e4, 1e5)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_noniid_bound():
    # desk-scale sizes: the de Finetti error swamps epsilon
    assert qubit_noniid_bound(1.0, 1e4, 1e3, 10, 0.02) == 0.0
    big = qubit_noniid_bound(1.0, 1e12, 1e9, 1e6, 0.02)
    assert 0 < big < 1e12
    assert qubit_noniid_bound(0.5, 1e12, 1e9, 1e6, 0.02) < big


def test_almost_iid_slack():
    s = almost_iid_halfspace_slack(1e5, 16e5, 0, 0.01 / 64)
    expect = 16 * math.sqrt(math.log2(6400) / 16e5 + 2 / 16e5 * math.log2(8e5 + 1))
    assert s == pytest.approx(expect)
    assert almost_iid_halfspace_slack(1e5, 16e5, 1e3, 0.01 / 64) > s


def test_report_keys():
    rho = choi_state(QubitChannelSpec(0.2, 0.1))
    rep = qubit_report(simulate_tomography(rho, 10**5, make_rng(8)), 0.02, make_rng(9), restarts=2)
    assert rep["heuristic"] is True
    assert rep["q_lower_per_use"] >= 0
    assert rep["q_lower"] == pytest.approx(rep["n"] * rep["q_lower_per_use"])
