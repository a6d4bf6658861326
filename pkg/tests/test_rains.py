import numpy as np
import pytest

from qbound import infomeasures as im
from qbound import linalg, qcore, rains


def test_state_bound_max_ent():
    for d in (2, 3):
        phi = qcore.max_ent_state(d)
        val, wit = rains.rmax_state(phi, (d, d))
        assert val == pytest.approx(np.log2(d), abs=1e-7)
        assert wit["gap"] <= 1e-6


def test_state_bound_product_is_zero(rng):
    rho = np.kron(qcore.random_density(2, rng).matrix,
                  qcore.random_density(2, rng).matrix)
    val, _ = rains.rmax_state(rho, (2, 2))
    assert abs(val) < 1e-6


def test_channel_bound_identity_and_depolarizing():
    val, _ = rains.rmax_channel(qcore.identity_channel(2))
    assert val == pytest.approx(1.0, abs=1e-6)
    # fully depolarizing output is a constant channel: no entanglement
    val, _ = rains.rmax_channel(qcore.depolarizing(2, 1.0))
    assert abs(val) < 1e-5


def test_bidirectional_choi_ordering():
    N = qcore.partial_swap(0.0)
    J, dims = rains.bidirectional_choi(N)
    assert dims == (2, 2, 2, 2)
    assert abs(np.trace(J).real - 4) < 1e-10
    # swapping maximally entangled halves: J is pure of rank 1 per block pair
    assert np.linalg.eigvalsh(J)[0] > -1e-10


def test_bidirectional_swap_and_identity():
    out = rains.rmax_bidirectional(qcore.partial_swap(0.0))
    assert out["value"] == pytest.approx(2.0, abs=1e-4)
    assert out["gap"] <= 1e-6
    out = rains.rmax_bidirectional(qcore.partial_swap(1.0))
    assert abs(out["value"]) < 1e-4
    assert out["gap"] <= 1e-6


def test_bidirectional_swap_dephasing_half():
    out = rains.rmax_bidirectional(
        qcore.swap_then_collective_dephasing(0.5, np.pi))
    assert out["value"] == pytest.approx(1.0, abs=1e-2)
    assert out["gap"] <= 1e-6


def test_emax_ppt_max_ent():
    for d in (2, 3):
        val = rains.emax_ppt(qcore.max_ent_state(d), (d, d))
        assert val == pytest.approx(np.log2(d), abs=1e-6)


def test_ppt_prime_lmo_and_membership(rng):
    phi = qcore.max_ent_state(2)
    # best overlap of a PPT' operator with the 2x2 max-ent state is 1/2
    sigma = rains.ppt_prime_lmo(-phi, (2, 2))
    ov = float(np.real(np.trace(sigma @ phi)))
    assert ov == pytest.approx(0.5, abs=1e-7)
    assert rains.ppt_prime_member(sigma, (2, 2), slack=1e-6)
    # the max-ent state itself is not PPT'
    assert not rains.ppt_prime_member(phi, (2, 2), slack=1e-6)


def test_rains_relative_entropy_values(rng):
    res = rains.rains_relative_entropy(qcore.max_ent_state(2), (2, 2))
    assert res["value"] == pytest.approx(1.0, abs=1e-4)
    rho = np.kron(qcore.random_density(2, rng).matrix,
                  qcore.random_density(2, rng).matrix)
    res = rains.rains_relative_entropy(rho, (2, 2))
    assert abs(res["value"]) < 1e-4


def test_rains_orderings(rng):
    # D_Rains <= sandwiched(alpha=2) <= max-Rains on a mixed entangled state
    phi = qcore.max_ent_state(2)
    rho = 0.85 * phi + 0.15 * np.eye(4) / 4
    lo = rains.rains_relative_entropy(rho, (2, 2))["value"]
    mid = rains.sandwiched_rains(rho, (2, 2), alpha=2.0)["value"]
    hi, _ = rains.rmax_state(rho, (2, 2))
    assert lo <= mid + 1e-3
    assert mid <= hi + 1e-3


def test_amortization_spotcheck():
    N = qcore.partial_swap(0.0)
    # max-ent on (L_A, A') and on (B', L_B)
    rho = np.kron(qcore.max_ent_state(2), qcore.max_ent_state(2))
    rep = rains.amortization_spotcheck(N, rho, (2, 2, 2, 2))
    assert rep["holds"]
    assert rep["slack"] >= -1e-6


def test_private_state_overlap():
    theta = np.eye(2, dtype=complex) / 2
    twists = {(0, 1): np.diag([1.0, -1.0]).astype(complex),
              (1, 0): np.diag([1.0, -1.0]).astype(complex)}
    gamma = rains.make_private_state(2, theta, twists)
    Pi = rains.privacy_test_operator(2, 2, twists)
    assert rains.privacy_overlap(Pi, gamma) == pytest.approx(1.0, abs=1e-10)
    # classically correlated key state passes only with probability 1/K
    keys = np.zeros((4, 4), dtype=complex)
    keys[0, 0] = keys[3, 3] = 0.5
    cl = np.kron(keys, theta)
    assert rains.privacy_overlap(Pi, cl) == pytest.approx(0.5, abs=1e-10)


def test_converse_rate_bounds():
    # strong converse: (bound + log2(1/(1-eps)) / n)
    v = rains.converse_rate_bounds('strong', 1.0, n=10, eps=0.5)
    assert v == pytest.approx(1.0 + 0.1, abs=1e-12)
    v = rains.converse_rate_bounds('strong_renyi', 1.0, n=10, eps=0.5,
                                   alpha=2.0)
    assert v == pytest.approx(1.0 + (2.0 / 10) * np.log2(2), abs=1e-12)
    v = rains.converse_rate_bounds('weak', 1.0, n=10, eps=0.5)
    assert v == pytest.approx((1.0 + 1.0 / 10) / 0.5, abs=1e-12)
    with pytest.raises(ValueError):
        rains.converse_rate_bounds('other', 1.0, n=1, eps=0.1)
