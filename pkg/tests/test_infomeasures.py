import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qbound import infomeasures as im
from qbound import linalg, qcore
from conftest import random_channel


def rand_state(d, rng):
    return qcore.random_density(d, rng).matrix


def test_entropy_known_values():
    assert im.entropy(np.eye(2) / 2) == pytest.approx(1.0, abs=1e-12)
    assert im.entropy(np.diag([1.0, 0.0])) == pytest.approx(0.0, abs=1e-12)
    assert im.entropy(np.eye(3) / 3) == pytest.approx(np.log2(3), abs=1e-12)
    assert im.entropy(np.eye(2) / 2, base='nats') == pytest.approx(
        np.log(2), abs=1e-12)


def test_relative_entropy_classical():
    # classical 2-point distributions embedded diagonally
    p, q = np.array([0.3, 0.7]), np.array([0.6, 0.4])
    expect = float(np.sum(p * np.log2(p / q)))
    assert im.relative_entropy(np.diag(p), np.diag(q)) == pytest.approx(
        expect, abs=1e-12)


def test_relative_entropy_support_violation():
    rho = np.diag([0.5, 0.5]).astype(complex)
    sigma = np.diag([1.0, 0.0]).astype(complex)
    assert im.relative_entropy(rho, sigma) == math.inf
    assert im.dmax(rho, sigma) == math.inf
    assert im.sandwiched_renyi(rho, sigma, 2.0) == math.inf


def test_dmax_classical():
    rho = np.diag([0.8, 0.2]).astype(complex)
    sigma = np.diag([0.5, 0.5]).astype(complex)
    assert im.dmax(rho, sigma) == pytest.approx(np.log2(1.6), abs=1e-10)


def test_renyi_orderings(rng):
    rho, sigma = rand_state(3, rng), rand_state(3, rng)
    D = im.relative_entropy(rho, sigma)
    D2 = im.sandwiched_renyi(rho, sigma, 2.0)
    Dhalf = im.sandwiched_renyi(rho, sigma, 0.5)
    Dm = im.dmax(rho, sigma)
    # monotone in alpha, with dmax the alpha -> inf limit
    assert Dhalf <= D + 1e-9
    assert D <= D2 + 1e-9
    assert D2 <= Dm + 1e-9
    # alpha -> 1 recovers the relative entropy
    assert im.sandwiched_renyi(rho, sigma, 1.00001) == pytest.approx(D, abs=1e-3)


def test_renyi_classical_oracle():
    p, q = np.array([0.3, 0.7]), np.array([0.6, 0.4])
    a = 2.0
    expect = float(np.log2(np.sum(p ** a * q ** (1 - a))) / (a - 1))
    got = im.sandwiched_renyi(np.diag(p), np.diag(q), a)
    assert got == pytest.approx(expect, abs=1e-10)


def neyman_pearson(p, q, eps):
    """Classical hypothesis-testing divergence by the exact water-filling."""
    order = np.argsort(q / p)  # accept likeliest-under-p first
    pw, qw = p[order], q[order]
    need, spent, beta = 1 - eps, 0.0, 0.0
    for pi, qi in zip(pw, qw):
        take = min(1.0, (need - spent) / pi) if pi > 0 else 0.0
        take = max(take, 0.0)
        beta += take * qi
        spent += take * pi
        if spent >= need - 1e-15:
            break
    return -np.log2(beta)


def test_hypothesis_testing_matches_neyman_pearson():
    p = np.array([0.5, 0.3, 0.2])
    q = np.array([0.2, 0.3, 0.5])
    for eps in (0.0, 0.1, 0.3):
        expect = neyman_pearson(p, q, eps)
        got = im.hypothesis_testing(np.diag(p), np.diag(q), eps)
        assert got == pytest.approx(expect, abs=1e-6)


def test_hypothesis_testing_eps_zero_equals_support_overlap():
    # eps = 0 forces Lambda >= supp(rho): value -log2 Tr{P_rho sigma}
    rho = np.diag([1.0, 0.0]).astype(complex)
    sigma = np.diag([0.25, 0.75]).astype(complex)
    assert im.hypothesis_testing(rho, sigma, 0.0) == pytest.approx(2.0, abs=1e-6)


def test_mutual_information_bell():
    phi = qcore.max_ent_state(2)
    assert im.mutual_information(phi, (2, 2)) == pytest.approx(2.0, abs=1e-10)
    assert im.coherent_information(phi, (2, 2)) == pytest.approx(1.0, abs=1e-10)
    prod = np.kron(np.eye(2) / 2, np.eye(2) / 2)
    assert im.mutual_information(prod, (2, 2)) == pytest.approx(0.0, abs=1e-10)


def test_cmi_of_markov_state():
    # rho_AB (x) rho_C has I(A;B|C) = I(A;B)
    phi = qcore.max_ent_state(2)
    rho = np.kron(phi, np.eye(2) / 2)
    assert im.conditional_mutual_information(rho, (2, 2, 2)) == pytest.approx(
        2.0, abs=1e-10)


def test_holevo_and_cq_state():
    probs = [0.5, 0.5]
    states = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    assert im.holevo(probs, states) == pytest.approx(1.0, abs=1e-12)
    tau = im.cq_state(probs, states)
    assert im.mutual_information(tau, (2, 2)) == pytest.approx(1.0, abs=1e-10)


def test_rel_entropy_variance_classical():
    p, q = np.array([0.3, 0.7]), np.array([0.6, 0.4])
    llr = np.log2(p / q)
    D = float(np.sum(p * llr))
    expect = float(np.sum(p * (llr - D) ** 2))
    assert im.rel_entropy_variance(np.diag(p), np.diag(q)) == pytest.approx(
        expect, abs=1e-10)
    # variance vanishes at rho = sigma
    assert im.rel_entropy_variance(np.diag(p), np.diag(p)) == pytest.approx(
        0.0, abs=1e-12)


def test_fidelity_and_trace_distance(rng):
    rho = rand_state(3, rng)
    assert im.fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)
    assert im.trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-12)
    # pure states: F = |<a|b>|^2
    a = np.array([1.0, 0.0], dtype=complex)
    b = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    F = im.fidelity(np.outer(a, a.conj()), np.outer(b, b.conj()))
    assert F == pytest.approx(0.5, abs=1e-10)


def test_metric_checks_slacks_nonnegative(rng):
    for _ in range(5):
        rho, sigma = rand_state(3, rng), rand_state(3, rng)
        rep = im.metric_checks(rho, sigma)
        assert rep["fvg_lower_slack"] >= -1e-9
        assert rep["fvg_upper_slack"] >= -1e-9
        assert rep["pinsker_slack"] >= -1e-9


def test_binary_entropy_and_g():
    assert im.binary_entropy(0.5) == pytest.approx(1.0, abs=1e-12)
    assert im.binary_entropy(0.0) == 0.0
    assert im.g_fn(0) == 0.0
    assert im.g_fn(1) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        im.binary_entropy(1.5)


def test_afw_check(rng):
    rho, sigma = rand_state(4, rng), rand_state(4, rng)
    rep = im.afw_check(rho, sigma, (2, 2))
    assert rep["slack"] >= -1e-9
    same = im.afw_check(rho, rho, (2, 2))
    assert same["lhs"] == pytest.approx(0.0, abs=1e-10)


def test_eeprop_check_maximally_entangled():
    psi = qcore.max_ent_vector(3)
    rep = im.eeprop_check(psi, (3, 3), eps=0.01)
    assert rep["applicable"]
    assert rep["fidelity"] == pytest.approx(1.0, abs=1e-10)
    assert rep["slack"] >= -1e-9


def test_eeprop_check_local_basis_twist(rng):
    # a locally rotated maximally entangled state is still maximal
    from conftest import haar_unitary
    U = haar_unitary(2, rng)
    psi = np.kron(np.eye(2), U) @ qcore.max_ent_vector(2)
    rep = im.eeprop_check(psi, (2, 2), eps=0.01)
    assert rep["applicable"]
    assert rep["fidelity"] == pytest.approx(1.0, abs=1e-9)


def test_eeprop_not_applicable_for_product():
    psi = np.kron(np.array([1.0, 0.0]), np.array([1.0, 0.0])).astype(complex)
    rep = im.eeprop_check(psi, (2, 2), eps=0.01)
    assert not rep["applicable"]


def test_squashed_surrogate_check():
    phi = qcore.max_ent_state(2)
    rep = im.squashed_surrogate_check(phi, (2, 2), eps=0.05)
    assert rep["applicable"]
    assert rep["rel_ent_AE"] <= rep["rel_ent_bound"] + 1e-9
    assert rep["l1_AE"] <= rep["l1_bound"] + 1e-9
    assert rep["slack"] >= -1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_data_processing_all_divergences(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    rho = qcore.random_density(d, rng).matrix
    sigma = qcore.random_density(d, rng).matrix
    ch = random_channel(d, int(rng.integers(2, 4)), int(rng.integers(2, 4)), rng)
    Nr, Ns = ch.apply(rho), ch.apply(sigma)
    assert im.relative_entropy(Nr, Ns) <= im.relative_entropy(rho, sigma) + 1e-8
    assert im.dmax(Nr, Ns) <= im.dmax(rho, sigma) + 1e-8
    a = float(rng.uniform(1.1, 3.0))
    assert im.sandwiched_renyi(Nr, Ns, a) <= im.sandwiched_renyi(rho, sigma, a) + 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_entropy_concavity(seed):
    rng = np.random.default_rng(seed)
    rho = qcore.random_density(3, rng).matrix
    sigma = qcore.random_density(3, rng).matrix
    lam = float(rng.uniform())
    mix = lam * rho + (1 - lam) * sigma
    assert im.entropy(mix) >= lam * im.entropy(rho) + (1 - lam) * im.entropy(sigma) - 1e-10
