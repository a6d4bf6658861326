"""PPT-relaxed entanglement measures and converse-bound arithmetic.

Max-Rains quantities for states, point-to-point channels and
bidirectional channels (primal and dual programs solved independently),
the PPT relaxation of the max-relative entropy of entanglement, Rains
and sandwiched Rains relative entropies by Frank-Wolfe over the PPT'
spectrahedron, private-state privacy tests, and strong/weak-converse
rate combinators.

All values are in bits. PPT'(A:B) = {sigma >= 0, ||T_B sigma||_1 <= 1}.
"""
import numpy as np
from scipy.optimize import minimize_scalar

from . import linalg, sdp
from .infomeasures import binary_entropy
from .qcore import DensityOperator, choi_of


def _mat(rho):
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)


def rmax_state(rho, dims, tol=1e-8):
    """
    Max-Rains relative entropy of a bipartite state, log2 of an SDP.

    minimize Tr{C+D} s.t. C, D >= 0, T_B(C-D) >= rho.

    :param rho: bipartite state.
    :param dims: (dA, dB).
    :return: (value, {"C": C, "D": D}) with feasible witnesses.
    """
    R = _mat(rho)
    n = R.shape[0]
    TB = lambda X: linalg.partial_transpose(X, dims, [1])
    m = sdp.Model()
    C = m.var(n)
    D = m.var(n)
    m.set_objective({C: np.eye(n, dtype=complex), D: np.eye(n, dtype=complex)})
    m.add_psd([(C, TB), (D, lambda X: -TB(X))], R)
    sol = _accept(m.solve(tol=tol), tol, "max-Rains state")
    W = max(sol.primal_value, 1e-300)
    return float(np.log2(W)), {"C": sol.primal_blocks[C], "D": sol.primal_blocks[D],
                               "W": W, "gap": sol.gap}


def _accept(sol, tol, label):
    """Accept an optimal solve, or a stalled one whose gap is still tight."""
    if sol.status == "optimal":
        return sol
    if sol.status == "numerical_limit" and sol.gap <= max(100 * tol, 1e-6):
        return sol
    raise ArithmeticError("%s SDP failed: %s (gap %.3g)"
                          % (label, sol.status, sol.gap))


def _inf_norm_rains_sdp(J, dims, keep_idx, transpose_idx, tol):
    """min ||Tr_{traced}{V+Y}||_inf s.t. V,Y >= 0, T(V-Y) >= J."""
    n = J.shape[0]
    keep_idx = sorted(keep_idx)
    dk = int(np.prod([dims[k] for k in keep_idx]))
    T = lambda X: linalg.partial_transpose(X, dims, transpose_idx)
    PT = lambda X: linalg.partial_trace(X, dims, keep_idx)
    m = sdp.Model()
    t = m.var(1)
    V = m.var(n)
    Y = m.var(n)
    m.set_objective({t: np.ones((1, 1), dtype=complex)})
    m.add_psd([(V, T), (Y, lambda X: -T(X))], J)
    m.add_psd([(t, lambda X: X[0, 0] * np.eye(dk, dtype=complex)),
               (V, lambda X: -PT(X)), (Y, lambda X: -PT(X))],
              np.zeros((dk, dk), dtype=complex))
    sol = _accept(m.solve(tol=tol), tol, "channel Rains")
    return sol.primal_value, {"V": sol.primal_blocks[V], "Y": sol.primal_blocks[Y],
                              "gap": sol.gap}


def rmax_channel(ch, tol=1e-8):
    """
    Max-Rains information of a point-to-point channel, log2 Gamma.

    Gamma solves min ||Tr_B{V+Y}||_inf s.t. V, Y >= 0, T_B(V-Y) >= J.
    """
    J = choi_of(ch).matrix
    dims = (ch.in_dim, ch.out_dim)
    gamma, wit = _inf_norm_rains_sdp(J, dims, keep_idx=[0], transpose_idx=[1],
                                     tol=tol)
    return float(np.log2(max(gamma, 1e-300))), wit


def bidirectional_choi(N):
    """Choi operator of a bidirectional channel, ordered L_A, A, B, L_B."""
    J = choi_of(N.channel).matrix
    la, lb = N.in_split
    a, b = N.out_split
    J = linalg.permute_systems(J, (la, lb, a, b), [0, 2, 3, 1])
    return J, (la, a, b, lb)


def rmax_bidirectional(N, tol=1e-9):
    """
    Bidirectional max-Rains information, via both SDPs independently.

    Dual:   min ||Tr_AB{V+Y}||_inf, V,Y >= 0, T_{B L_B}(V-Y) >= J.
    Primal: max Tr{J X}, X, rho >= 0, Tr{rho} = 1,
            -rho (x) 1_AB <= T_{B L_B}(X) <= rho (x) 1_AB.

    :return: dict with primal/dual Gamma values, their gap, and the
        log2 of the averaged common value.
    """
    J, dims = bidirectional_choi(N)
    la, a, b, lb = dims
    dual, wit = _inf_norm_rains_sdp(J, dims, keep_idx=[0, 3],
                                    transpose_idx=[2, 3], tol=tol)

    n = la * a * b * lb
    nr = la * lb
    dab = a * b

    def embed_rho(R):
        # rho on (L_A, L_B) -> rho (x) 1_AB on (L_A, A, B, L_B)
        M = np.kron(R, np.eye(dab, dtype=complex))
        return linalg.permute_systems(M, (la, lb, a, b), [0, 2, 3, 1])

    T = lambda X: linalg.partial_transpose(X, dims, [2, 3])
    m = sdp.Model()
    X = m.var(n)
    rho = m.var(nr)
    m.set_objective({X: -J})
    m.add_psd([(rho, embed_rho), (X, lambda M: -T(M))],
              np.zeros((n, n), dtype=complex))
    m.add_psd([(rho, embed_rho), (X, T)], np.zeros((n, n), dtype=complex))
    m.add_eq([(rho, lambda R: np.trace(R).real * np.ones((1, 1)))],
             np.ones((1, 1)))
    sol = _accept(m.solve(tol=tol), tol, "bidirectional primal")
    primal = -sol.primal_value
    gap = abs(primal - dual)
    value = float(np.log2(max((primal + dual) / 2, 1e-300)))
    return {"value": value, "gamma_primal": primal, "gamma_dual": dual,
            "gap": gap, "witness": wit,
            "X": sol.primal_blocks[X], "rho": sol.primal_blocks[rho]}


def emax_ppt(rho, dims, tol=1e-8):
    """
    PPT relaxation of the max-relative entropy of entanglement.

    minimize log2 Tr{sigma''} s.t. sigma'' >= rho, sigma'' >= 0,
    T_B sigma'' >= 0. Lower-bounds the SEP-based quantity.
    """
    R = _mat(rho)
    n = R.shape[0]
    TB = lambda X: linalg.partial_transpose(X, dims, [1])
    m = sdp.Model()
    S = m.var(n)
    m.set_objective({S: np.eye(n, dtype=complex)})
    m.add_psd([(S, lambda X: X)], R)
    m.add_psd([(S, TB)], np.zeros((n, n), dtype=complex))
    sol = m.solve(tol=tol)
    if sol.status != "optimal":
        raise ArithmeticError("emax_ppt SDP failed: %s" % sol.status)
    return float(np.log2(max(sol.primal_value, 1e-300)))


def ppt_prime_lmo(G, dims, tol=1e-9):
    """argmin Tr{G sigma} over the PPT' spectrahedron."""
    G = np.asarray(G, dtype=complex)
    n = G.shape[0]
    TB = lambda X: linalg.partial_transpose(X, dims, [1])
    m = sdp.Model()
    S = m.var(n)
    C = m.var(n)
    D = m.var(n)
    u = m.var(1)
    m.set_objective({S: G})
    m.add_eq([(S, lambda X: X), (C, lambda X: -TB(X)), (D, TB)],
             np.zeros((n, n), dtype=complex))
    m.add_eq([(C, lambda X: np.trace(X).real * np.ones((1, 1))),
              (D, lambda X: np.trace(X).real * np.ones((1, 1))),
              (u, lambda X: X)], np.ones((1, 1)))
    sol = _accept(m.solve(tol=tol), tol, "PPT' linear oracle")
    return sol.primal_blocks[S]


def ppt_prime_member(sigma, dims, slack=1e-8):
    """Membership check sigma >= 0 and ||T_B sigma||_1 <= 1 + slack."""
    S = np.asarray(sigma)
    w = np.linalg.eigvalsh(S)
    tb = linalg.schatten_norm(linalg.partial_transpose(S, dims, [1]), 1)
    return w[0] >= -slack and tb <= 1 + slack


def _safe_rel_ent(R, sigma, floor=1e-14):
    """D(R||sigma) in bits with an eigenvalue floor on sigma."""
    wr = np.linalg.eigvalsh(R)
    cut = 1e-12 * max(wr.max(), 1e-300)
    t1 = sum(v * np.log2(v) for v in wr if v > cut)
    ws, Vs = np.linalg.eigh(sigma)
    ws = np.maximum(ws, floor * max(ws.max(), 1e-300))
    t2 = sum(np.log2(mu) * float(np.real(v.conj() @ R @ v))
             for mu, v in zip(ws, Vs.T))
    return float(t1 - t2)


def _rel_ent_gradient(R, sigma, floor=1e-14):
    """Gradient of sigma -> -Tr{R log2 sigma} (divided differences)."""
    ws, Vs = np.linalg.eigh(sigma)
    ws = np.maximum(ws, floor * max(ws.max(), 1e-300))
    Rt = Vs.conj().T @ R @ Vs
    Phi = np.empty((len(ws), len(ws)))
    for i, a in enumerate(ws):
        for j, b in enumerate(ws):
            Phi[i, j] = 1.0 / a if abs(a - b) < 1e-15 * a else \
                (np.log(a) - np.log(b)) / (a - b)
    G = -(Vs @ (Rt * Phi) @ Vs.conj().T) / np.log(2)
    return (G + G.conj().T) / 2


def _frank_wolfe(f, grad, sigma0, dims, gap_tol=1e-5, max_iter=500):
    sigma = sigma0.copy()
    gap = np.inf
    for it in range(1, max_iter + 1):
        G = grad(sigma)
        s = ppt_prime_lmo(G, dims)
        gap = float(np.real(np.trace(G @ (sigma - s))))
        if gap <= gap_tol:
            return sigma, gap, it, True
        def line(t):
            return f((1 - t) * sigma + t * s)
        res = minimize_scalar(line, bounds=(0.0, 1.0), method='bounded',
                              options={"xatol": 1e-12})
        t = float(res.x)
        if t <= 0:
            t = min(2.0 / (it + 2), 1.0)
        sigma = (1 - t) * sigma + t * s
    return sigma, gap, max_iter, False


def rains_relative_entropy(rho, dims, gap_tol=1e-5, max_iter=500):
    """
    Rains relative entropy min D(rho||sigma) over PPT', by Frank-Wolfe.

    :return: dict with value (an upper bound on the true minimum), the
        final iterate, the Frank-Wolfe duality-gap estimate, and a
        convergence flag.
    """
    R = _mat(rho)
    n = R.shape[0]
    sigma0 = np.eye(n, dtype=complex) / n
    f = lambda s: _safe_rel_ent(R, s)
    g = lambda s: _rel_ent_gradient(R, s)
    sigma, gap, its, ok = _frank_wolfe(f, g, sigma0, dims, gap_tol, max_iter)
    return {"value": f(sigma), "sigma": sigma, "gap": gap,
            "iterations": its, "converged": ok}


def sandwiched_rains(rho, dims, alpha, gap_tol=1e-5, max_iter=500):
    """
    Sandwiched Rains relative entropy over PPT' (alpha > 1), Frank-Wolfe
    with a finite-difference gradient.
    """
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    R = _mat(rho)
    n = R.shape[0]
    e = (1 - alpha) / (2 * alpha)
    floor = 1e-12

    def f(sigma):
        ws, Vs = np.linalg.eigh(sigma)
        ws = np.maximum(ws, floor * max(ws.max(), 1e-300))
        Se = (Vs * ws ** e) @ Vs.conj().T
        w = np.linalg.eigvalsh(Se @ R @ Se)
        w = w[w > 1e-16 * max(abs(w).max(), 1e-300)]
        return float(np.log2(np.sum(w ** alpha)) / (alpha - 1))

    basis = sdp.hermitian_basis(n)

    def grad(sigma):
        h = 1e-6
        G = np.zeros((n, n), dtype=complex)
        for B in basis:
            d = (f(sigma + h * B) - f(sigma - h * B)) / (2 * h)
            G += d * B
        return G

    sigma0 = np.eye(n, dtype=complex) / n
    sigma, gap, its, ok = _frank_wolfe(f, grad, sigma0, dims, gap_tol, max_iter)
    return {"value": f(sigma), "sigma": sigma, "gap": gap,
            "iterations": its, "converged": ok}


def amortization_spotcheck(N, rho, dims, tol=1e-8):
    """
    Check the amortization inequality for one state and channel.

    R_max(L_A A ; B L_B) of the output is at most the input max-Rains
    plus the bidirectional max-Rains of the channel.

    :param rho: state on (L_A, A', B', L_B).
    :param dims: those four dimensions.
    """
    R = _mat(rho)
    la, ain, bin_, lb = dims
    a, b = N.out_split
    out = np.zeros((la * a * b * lb,) * 2, dtype=complex)
    for K in N.channel.kraus:
        Kf = np.kron(np.kron(np.eye(la), K), np.eye(lb))
        out += Kf @ R @ Kf.conj().T
    r_in, _ = rmax_state(R, (la * ain, bin_ * lb), tol=tol)
    r_out, _ = rmax_state(out, (la * a, b * lb), tol=tol)
    r_ch = rmax_bidirectional(N)["value"]
    slack = r_in + r_ch - r_out
    return {"input": r_in, "output": r_out, "channel": r_ch,
            "slack": slack, "holds": slack >= -1e-6}


# ---------------------------------------------------------------------------
# private states and privacy tests
# ---------------------------------------------------------------------------

def _twist_unitary(K, twists, ds):
    """U^t = sum_ij |ij><ij| (x) U^{ij} on (K_A, K_B, S_A S_B)."""
    n = K * K * ds
    U = np.zeros((n, n), dtype=complex)
    for i in range(K):
        for j in range(K):
            Uij = np.asarray(twists.get((i, j), np.eye(ds)), dtype=complex)
            if np.abs(Uij.conj().T @ Uij - np.eye(ds)).max() > 1e-10:
                raise ValueError("twist (%d,%d) is not unitary" % (i, j))
            blk = (i * K + j) * ds
            U[blk:blk + ds, blk:blk + ds] = Uij
    return U


def make_private_state(K, theta, twists=None):
    """
    Twisted state gamma = U^t (Phi_K (x) theta) (U^t)^dag.

    Systems ordered (K_A, K_B, shields). theta is the shield state; the
    twists map (i, j) -> unitary on the shields.
    """
    th = _mat(theta)
    ds = th.shape[0]
    U = _twist_unitary(K, twists or {}, ds)
    phi = np.zeros((K * K, K * K), dtype=complex)
    for i in range(K):
        for j in range(K):
            phi[i * K + i, j * K + j] = 1.0 / K
    gamma = U @ np.kron(phi, th) @ U.conj().T
    return DensityOperator(gamma, (K, K, ds))


def privacy_test_operator(K, shield_dim, twists=None):
    """Projector Pi = U^t (Phi_K (x) 1_S) (U^t)^dag."""
    U = _twist_unitary(K, twists or {}, shield_dim)
    phi = np.zeros((K * K, K * K), dtype=complex)
    for i in range(K):
        for j in range(K):
            phi[i * K + i, j * K + j] = 1.0 / K
    return U @ np.kron(phi, np.eye(shield_dim, dtype=complex)) @ U.conj().T


def privacy_overlap(Pi, rho):
    return float(np.real(np.trace(np.asarray(Pi) @ _mat(rho))))


def converse_rate_bounds(kind, quantity, n, eps, alpha=None):
    """
    Rate-bound arithmetic on a previously computed information quantity.

    kind 'strong':        R <= quantity + log2(1/(1-eps)) / n
    kind 'strong_renyi':  R <= quantity + alpha/(n(alpha-1)) log2(1/(1-eps))
    kind 'weak':          (1-eps) R <= quantity + h2(eps)/n
    """
    if n < 1 or not 0 < eps < 1:
        raise ValueError("require n >= 1 and eps in (0,1)")
    if kind == "strong":
        return float(quantity + np.log2(1.0 / (1 - eps)) / n)
    if kind == "strong_renyi":
        if alpha is None or alpha <= 1:
            raise ValueError("alpha > 1 required")
        return float(quantity + alpha / (n * (alpha - 1)) * np.log2(1.0 / (1 - eps)))
    if kind == "weak":
        return float((quantity + binary_entropy(eps) / n) / (1 - eps))
    raise ValueError("unknown kind %r" % kind)
