"""Scalar information quantities.

Entropies, relative entropies and their Renyi / max / hypothesis-testing
relatives, mutual informations, the relative entropy variance, fidelity
and trace distance, and the continuity / normalization inequality
reports. Every entropic quantity carries an explicit base; support
violations return math.inf rather than a large float.
"""
import math

import numpy as np
from scipy.special import logsumexp

from . import linalg, sdp
from .qcore import DensityOperator

INF = math.inf
_CUT = 1e-12


def _mat(rho):
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)


def _logfn(base):
    if base == 'bits':
        return np.log2
    if base == 'nats':
        return np.log
    raise ValueError("base must be 'bits' or 'nats'")


def entropy(rho, base='bits'):
    """
    von Neumann entropy, with 0 log 0 = 0.

    :param rho: density operator (matrix or DensityOperator).
    :param base: 'bits' or 'nats'.
    """
    log = _logfn(base)
    w = np.linalg.eigvalsh(_mat(rho))
    cut = _CUT * max(w.max(), 1e-300)
    return float(-sum(v * log(v) for v in w if v > cut))


def _support_violation(rho, sigma):
    """Weight of rho outside the support of sigma."""
    R, S = _mat(rho), _mat(sigma)
    w, V = np.linalg.eigh(S)
    cut = _CUT * max(abs(w).max(), 1e-300)
    kern = V[:, w <= cut]
    if kern.shape[1] == 0:
        return 0.0
    return float(np.real(np.trace(kern.conj().T @ R @ kern)))


def relative_entropy(rho, sigma, base='bits'):
    """D(rho||sigma) = Tr{rho [log rho - log sigma]}; inf on support violation."""
    R, S = _mat(rho), _mat(sigma)
    if _support_violation(R, S) > 1e-10:
        return INF
    log = _logfn(base)
    wr, Vr = np.linalg.eigh(R)
    ws, Vs = np.linalg.eigh(S)
    cut_r = _CUT * max(abs(wr).max(), 1e-300)
    cut_s = _CUT * max(abs(ws).max(), 1e-300)
    t1 = sum(v * log(v) for v in wr if v > cut_r)
    # Tr rho log sigma on the support of sigma
    t2 = 0.0
    for mu, v in zip(ws, Vs.T):
        if mu > cut_s:
            t2 += log(mu) * float(np.real(v.conj() @ R @ v))
    return float(t1 - t2)


def dmax(rho, sigma):
    """Max-relative entropy log2 min{lambda: rho <= 2^lambda sigma} in bits."""
    R, S = _mat(rho), _mat(sigma)
    if _support_violation(R, S) > 1e-10:
        return INF
    Sinv = linalg.matrix_fn_on_support(S, lambda x: x ** -0.5)
    lam = np.linalg.eigvalsh(Sinv @ R @ Sinv)[-1]
    return float(np.log2(max(lam, 1e-300)))


def sandwiched_renyi(rho, sigma, alpha):
    """Sandwiched Renyi relative entropy (bits); dedicated alpha->1 limit."""
    if alpha <= 0 or alpha == 1:
        if abs(alpha - 1) < 1e-12:
            return relative_entropy(rho, sigma)
        raise ValueError("alpha must be positive and different from 1")
    if abs(alpha - 1) <= 1e-4:
        return relative_entropy(rho, sigma)
    R, S = _mat(rho), _mat(sigma)
    if alpha > 1 and _support_violation(R, S) > 1e-10:
        return INF
    e = (1 - alpha) / (2 * alpha)
    Se = linalg.matrix_fn_on_support(S, lambda x: x ** e)
    w = np.linalg.eigvalsh(Se @ R @ Se)
    w = w[w > _CUT * max(abs(w).max(), 1e-300)]
    # Tr M^alpha through logs to survive large alpha
    logtr = logsumexp(alpha * np.log(w))
    return float(logtr / ((alpha - 1) * np.log(2)))


def hypothesis_testing(rho, sigma, eps, tol=1e-8):
    """
    eps-hypothesis-testing divergence, solved as an SDP.

    -log2 min Tr{Lambda sigma} over 0 <= Lambda <= 1, Tr{Lambda rho} >= 1-eps.
    Returns inf when the optimal overlap with sigma vanishes.
    """
    if not 0 <= eps < 1:
        raise ValueError("eps must be in [0, 1)")
    R, S = _mat(rho), _mat(sigma)
    d = R.shape[0]
    m = sdp.Model()
    lam = m.var(d)
    m.set_objective({lam: S})
    m.add_psd([(lam, lambda X: -X)], -np.eye(d, dtype=complex))   # Lambda <= 1
    m.add_psd([(lam, lambda X: np.real(np.trace(X @ R)) * np.ones((1, 1)))],
              (1 - eps) * np.ones((1, 1)))
    sol = m.solve(tol=min(tol, 1e-8))
    if sol.status == "numerical_limit":
        raise ArithmeticError("hypothesis-testing SDP did not converge")
    v = sol.primal_value
    if v < max(1e-10, 10 * tol):
        return INF
    return float(-np.log2(v))


def conditional_entropy(rho, dims, cond, base='bits'):
    """S(rest | cond) for the subsystem split dims."""
    R = _mat(rho)
    cond = sorted(set(cond))
    Rc = linalg.partial_trace(R, dims, cond)
    return entropy(R, base) - entropy(Rc, base)


def mutual_information(rho, dims, base='bits'):
    """I(A;B) for a bipartite split dims = (dA, dB)."""
    R = _mat(rho)
    if len(dims) != 2:
        raise ValueError("expected a bipartite split")
    SA = entropy(linalg.partial_trace(R, dims, [0]), base)
    SB = entropy(linalg.partial_trace(R, dims, [1]), base)
    return SA + SB - entropy(R, base)


def conditional_mutual_information(rho, dims, base='bits'):
    """I(A;B|C) for a tripartite split dims = (dA, dB, dC)."""
    R = _mat(rho)
    if len(dims) != 3:
        raise ValueError("expected a tripartite split")
    SAC = entropy(linalg.partial_trace(R, dims, [0, 2]), base)
    SBC = entropy(linalg.partial_trace(R, dims, [1, 2]), base)
    SC = entropy(linalg.partial_trace(R, dims, [2]), base)
    return SAC + SBC - entropy(R, base) - SC


def coherent_information(rho, dims, base='bits'):
    """I(A>B) = S(B) - S(AB) for dims = (dA, dB)."""
    R = _mat(rho)
    SB = entropy(linalg.partial_trace(R, dims, [1]), base)
    return SB - entropy(R, base)


def cq_state(probs, states):
    """Classical-quantum state sum_x p(x) |x><x| (x) rho_x."""
    probs = np.asarray(probs, dtype=float)
    if probs.min() < -1e-12 or abs(probs.sum() - 1) > 1e-12:
        raise ValueError("probabilities must form a simplex vector")
    n = len(probs)
    d = _mat(states[0]).shape[0]
    out = np.zeros((n * d, n * d), dtype=complex)
    for x, (p, st) in enumerate(zip(probs, states)):
        out[x * d:(x + 1) * d, x * d:(x + 1) * d] = p * _mat(st)
    return out


def holevo(probs, states, base='bits'):
    """Holevo quantity S(avg) - sum p S(rho_x)."""
    probs = np.asarray(probs, dtype=float)
    avg = sum(p * _mat(st) for p, st in zip(probs, states))
    return entropy(avg, base) - float(sum(p * entropy(st, base)
                                          for p, st in zip(probs, states) if p > 0))


def rel_entropy_variance(rho, sigma):
    """V(rho||sigma) = Tr{rho (log2 rho - log2 sigma - D)^2} in bits^2."""
    R, S = _mat(rho), _mat(sigma)
    if _support_violation(R, S) > 1e-10:
        raise ValueError("support of rho not contained in support of sigma")
    L = (linalg.matrix_fn_on_support(R, np.log2)
         - linalg.matrix_fn_on_support(S, np.log2))
    D = float(np.real(np.trace(R @ L)))
    V = float(np.real(np.trace(R @ L @ L))) - D * D
    return max(V, 0.0)


def fidelity(rho, sigma):
    """Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1^2."""
    R, S = _mat(rho), _mat(sigma)
    sr = linalg.matrix_fn_on_support(R, np.sqrt)
    ss = linalg.matrix_fn_on_support(S, np.sqrt)
    return float(min(linalg.schatten_norm(sr @ ss, 1) ** 2, 1.0 + 1e-9))


def trace_distance(rho, sigma):
    return 0.5 * linalg.schatten_norm(_mat(rho) - _mat(sigma), 1)


def metric_checks(rho, sigma):
    """Fuchs-van de Graaf and Pinsker inequalities, with slacks."""
    F = fidelity(rho, sigma)
    T = trace_distance(rho, sigma)
    D = relative_entropy(rho, sigma)
    pinsker = (D - (2 * T) ** 2 / (2 * np.log(2))) if D != INF else INF
    return {
        "fidelity": F,
        "trace_distance": T,
        "relative_entropy": D,
        "fvg_lower_slack": T - (1 - np.sqrt(F)),
        "fvg_upper_slack": np.sqrt(max(1 - F, 0.0)) - T,
        "pinsker_slack": pinsker,
    }


def binary_entropy(eps):
    if not 0 <= eps <= 1:
        raise ValueError("argument outside [0, 1]")
    out = 0.0
    for p in (eps, 1 - eps):
        if p > 0:
            out -= p * np.log2(p)
    return float(out)


def g_fn(y):
    """g(y) = (y+1) log2(y+1) - y log2 y, the bosonic entropy function."""
    if y < 0:
        raise ValueError("negative argument")
    if y == 0:
        return 0.0
    return float((y + 1) * np.log2(y + 1) - y * np.log2(y))


# ---------------------------------------------------------------------------
# continuity / approximate-normalization reports
# ---------------------------------------------------------------------------

def afw_check(rho, sigma, dims):
    """Uniform continuity of conditional entropy for a bipartite split.

    |S(A|B)_rho - S(A|B)_sigma| <= 2 eps log2 dA + g(eps), eps the trace
    distance. Returns the two sides and the slack.
    """
    R, S = _mat(rho), _mat(sigma)
    dA = dims[0]
    eps = trace_distance(R, S)
    lhs = abs(conditional_entropy(R, dims, [1]) - conditional_entropy(S, dims, [1]))
    rhs = 2 * eps * np.log2(dA) + g_fn(eps)
    return {"eps": eps, "lhs": lhs, "rhs": rhs, "slack": rhs - lhs}


def _schmidt_aligned_unitary(psi, dims):
    """Unitary on B aligning the Schmidt basis of psi with |Phi>.

    With psi = sum_k s_k |u_k>|v_k>, the map W: |v_k> -> conj(|u_k>)
    gives (1 x W)|psi> = sum_k s_k |u_k> conj(|u_k>), which has maximal
    overlap (sum_k s_k)/sqrt(d) with the maximally entangled state.
    """
    dA, dB = dims
    M = np.asarray(psi).reshape(dA, dB)
    U, s, Vh = np.linalg.svd(M)
    W = U.conj() @ Vh.conj()
    return U, s, Vh, W


def eeprop_check(psi, dims, eps):
    """Near-maximal entanglement entropy forces proximity to |Phi>.

    Premise: S(A) >= (1-eps) log2 |A| for the pure state psi. The optimal
    local unitary comes from Schmidt-basis alignment, with maximal
    fidelity (sum_i sqrt(lambda_i) / sqrt(d))^2.
    """
    dA, dB = dims
    psi = np.asarray(psi, dtype=complex)
    rhoA = linalg.partial_trace(np.outer(psi, psi.conj()), dims, [0])
    SA = entropy(rhoA)
    if SA < (1 - eps) * np.log2(dA):
        return {"applicable": False, "entropy_A": SA}
    U, s, Vh, W = _schmidt_aligned_unitary(psi, dims)
    F = float((np.sum(s) / np.sqrt(dA)) ** 2)
    dist = float(np.sqrt(max(1 - F, 0.0)))   # pure states saturate FvG
    bound = (2 * eps * np.log(dA)) ** 0.25
    return {"applicable": True, "entropy_A": SA, "fidelity": F,
            "distance": dist, "bound": bound, "slack": bound - dist,
            "unitary_B": W}


def squashed_surrogate_check(rho, dims, eps):
    """Mutual-information surrogate of the near-maximal-key normalization.

    Premise: I(A;B)/2 >= (1-eps) log2 |A|. Follows the proof chain down
    to the distance bound (2 sqrt(eps ln|A|))^{1/2} against the best
    Schmidt-aligned maximally entangled state.
    """
    R = _mat(rho)
    dA, dB = dims
    half_mi = mutual_information(R, dims) / 2
    if half_mi < (1 - eps) * np.log2(dA):
        return {"applicable": False, "half_mutual_information": half_mi}
    # chain: D(psi_AE || pi (x) psi_E) <= 2 eps log2 dA, through Pinsker
    w, V = np.linalg.eigh(R)
    w = np.clip(w, 0, None)
    dE = int(np.sum(w > 1e-14)) or 1
    psi = np.zeros(dA * dB * dE, dtype=complex)
    kept = [k for k in range(len(w)) if w[k] > 1e-14]
    for e, k in enumerate(kept):
        vec = V[:, k]
        for i in range(dA * dB):
            psi[i * dE + e] += np.sqrt(w[k]) * vec[i]
    full = np.outer(psi, psi.conj())
    rho_AE = linalg.partial_trace(full, (dA, dB, dE), [0, 2])
    rho_E = linalg.partial_trace(full, (dA, dB, dE), [2])
    prod = np.kron(np.eye(dA) / dA, rho_E)
    Dae = relative_entropy(rho_AE, prod)
    l1 = 2 * trace_distance(rho_AE, prod)
    # align a maximally entangled state with the top eigenvector of rho
    top = V[:, -1]
    _, _, _, W = _schmidt_aligned_unitary(top, dims)
    phi = np.zeros(dA * dB, dtype=complex)
    for i in range(dA):
        phi += np.kron(np.eye(dA)[:, i], W.conj().T @ np.eye(dA)[:, i]) / np.sqrt(dA)
    dist = trace_distance(R, np.outer(phi, phi.conj()))
    bound = (2 * np.sqrt(eps * np.log(dA))) ** 0.5
    return {"applicable": True, "half_mutual_information": half_mi,
            "rel_ent_AE": Dae, "rel_ent_bound": 2 * eps * np.log2(dA),
            "l1_AE": l1, "l1_bound": 2 * np.sqrt(eps * np.log(dA)),
            "distance": dist, "bound": bound, "slack": bound - dist}
