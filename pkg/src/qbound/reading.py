"""Memory cells and reading rates.

Cells are finite collections of channels indexed by classical symbols;
reading capacities, second-order and strong-converse refinements,
private and secure reading parameters, and the fixed zero-error
certificate all live here. Capacities and rates are in bits.
"""
import math

import numpy as np
from scipy.stats import norm

from . import linalg, sdp
from .infomeasures import (binary_entropy, cq_state, entropy, g_fn, holevo,
                           mutual_information, coherent_information,
                           conditional_mutual_information, relative_entropy,
                           rel_entropy_variance)
from .qcore import (DensityOperator, IsometricExtension, KrausChannel,
                    choi_of, covariance_check, depolarizing, gadc,
                    isometric_extension, max_ent_state, hw_group)


def _mat(rho):
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)


class MemoryCell:
    """
    Finite alphabet of channels with common dimensions, optionally
    carrying one isometric (wiretap) extension per symbol.
    """

    def __init__(self, channels, wiretap=None, symbols=None):
        channels = list(channels)
        if not channels:
            raise ValueError("cell needs at least one symbol")
        din, dout = channels[0].in_dim, channels[0].out_dim
        for ch in channels:
            if (ch.in_dim, ch.out_dim) != (din, dout):
                raise ValueError("cell channels must share dimensions")
        if wiretap is not None:
            wiretap = list(wiretap)
            if len(wiretap) != len(channels):
                raise ValueError("one wiretap extension per symbol")
            for V, ch in zip(wiretap, channels):
                Ja = choi_of(V.channel()).matrix
                Jb = choi_of(ch).matrix
                if np.abs(Ja - Jb).max() > 1e-10:
                    raise ValueError("wiretap extension does not trace "
                                     "out to the cell channel")
        self.channels = channels
        self.wiretap = wiretap
        self.symbols = list(symbols) if symbols is not None \
            else list(range(len(channels)))
        self.in_dim = din
        self.out_dim = dout

    def __len__(self):
        return len(self.channels)

    def output_states(self, probe):
        """[N_x(probe)] for a probe on the cell input."""
        P = _mat(probe)
        return [ch.apply(P) for ch in self.channels]

    def probe_outputs(self, psi):
        """
        Joint (L, B) outputs for a pure probe vector on (L, input), and
        the matching environment states when wiretaps are present.
        """
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        dL = psi.size // self.in_dim
        joints, envs = [], []
        for i, ch in enumerate(self.channels):
            if self.wiretap is not None:
                V = self.wiretap[i]
                big = np.kron(np.eye(dL), V.matrix) @ psi
                R = np.outer(big, big.conj())
                dims = (dL, V.out_dim, V.env_dim)
                joints.append(linalg.partial_trace(R, dims, [0, 1]))
                envs.append(linalg.partial_trace(R, dims, [2]))
            else:
                R = np.outer(psi, psi.conj())
                out = np.zeros((dL * ch.out_dim,) * 2, dtype=complex)
                for K in ch.kraus:
                    Kf = np.kron(np.eye(dL), K)
                    out += Kf @ R @ Kf.conj().T
                joints.append(out)
                envs.append(None)
        return joints, envs


def with_wiretaps(channels, symbols=None):
    """Cell with canonical isometric extensions attached."""
    ws = [isometric_extension(ch) for ch in channels]
    return MemoryCell(channels, wiretap=ws, symbols=symbols)


class EnvCell:
    """
    Environment-parametrized cell: one fixed interaction channel F and
    per-symbol ancilla states, with M_x(rho) = F(rho (x) theta_x).
    """

    def __init__(self, theta_states, interaction, cell=None, tol=1e-9):
        self.theta = [_mat(t) for t in theta_states]
        self.interaction = interaction
        if cell is not None:
            din = cell.in_dim
            for th, ch in zip(self.theta, cell.channels):
                for i in range(din):
                    for j in range(din):
                        E = np.zeros((din, din), dtype=complex)
                        E[i, j] = 1.0
                        lhs = interaction.apply(np.kron(E, th))
                        if np.abs(lhs - ch.apply(E)).max() > tol:
                            raise ValueError("interaction does not "
                                             "reproduce the cell channel")
        self.cell = cell


def covariant_cell_capacity(base_channel, group):
    """
    Reading capacity of the cell generated by conjugating base_channel
    with a unitary one-design: the mutual information of the normalized
    Choi state, in bits.
    """
    if not group.is_one_design():
        raise ValueError("group is not a unitary one-design")
    if not covariance_check(base_channel, group, _trivial_out_group(base_channel, group)):
        raise ValueError("channel is not covariant for the given group")
    J = choi_of(base_channel).matrix / base_channel.in_dim
    return mutual_information(J, (base_channel.in_dim, base_channel.out_dim))


def _trivial_out_group(ch, group):
    """Output representation matching the input one when dims allow."""
    from .qcore import GroupRep
    if ch.out_dim == ch.in_dim:
        return group
    # pad each unitary with an identity block on the extra output levels
    mats = []
    for U in group.unitaries:
        M = np.eye(ch.out_dim, dtype=complex)
        M[:ch.in_dim, :ch.in_dim] = U
        mats.append(M)
    return GroupRep(mats, check_closure=False)


def blahut_arimoto(states, tol=1e-10, kkt_tol=1e-8, max_iter=20000):
    """
    Capacity of the classical-quantum channel x -> rho_x.

    Iterates are monotone nondecreasing; stops once successive Holevo
    values differ by less than tol and the KKT residual
    max_x D(rho_x || rho_bar) - I is below kkt_tol.

    :return: dict with capacity (bits), optimal p, iterations.
    """
    states = [_mat(s) for s in states]
    m = len(states)
    if m == 0:
        raise ValueError("need at least one state")
    p = np.full(m, 1.0 / m)
    prev = -np.inf
    cap = 0.0
    for it in range(1, max_iter + 1):
        avg = sum(pi * s for pi, s in zip(p, states))
        divs = np.array([relative_entropy(s, avg) if pi > 0 else
                         relative_entropy(s, avg)
                         for pi, s in zip(p, states)])
        cap = float(np.dot(p, divs))
        resid = float(divs.max() - cap)
        if abs(cap - prev) < tol and resid <= kkt_tol:
            break
        prev = cap
        w = p * np.exp2(divs - divs.max())
        p = w / w.sum()
    return {"capacity": cap, "p": p, "iterations": it,
            "kkt_residual": resid}


def env_cell_capacity(states, tol=1e-10):
    """Blahut-Arimoto capacity of the ancilla-state ensemble."""
    return blahut_arimoto(states, tol=tol)


def fock_cutoff(N, tail=1e-12):
    """Smallest m with (N/(N+1))^(m+1) < tail."""
    if N <= 0:
        return 0
    r = N / (N + 1.0)
    m = int(math.ceil(math.log(tail) / math.log(r))) - 1
    m = max(m, 0)
    while r ** (m + 1) >= tail:
        m += 1
        if m > 10 ** 7:
            raise OverflowError("Fock cutoff too large")
    return m


def thermal_state(N, cutoff):
    """Truncated thermal state, diagonal in the number basis."""
    n = np.arange(cutoff + 1)
    if N <= 0:
        p = np.zeros(cutoff + 1)
        p[0] = 1.0
    else:
        p = (N / (N + 1.0)) ** n / (N + 1.0)
    return np.diag(p).astype(complex)


def thermal_cell_capacity(Ns, probs=None, tail=1e-12):
    """
    Capacity of a cell of thermal ancilla states with the given mean
    photon numbers. With probs fixed, the Holevo quantity; otherwise
    Blahut-Arimoto over the prior.
    """
    Ns = [float(N) for N in Ns]
    if any(N < 0 for N in Ns):
        raise ValueError("mean photon numbers must be nonnegative")
    cut = max(fock_cutoff(N, tail) for N in Ns)
    states = [thermal_state(N, cut) for N in Ns]
    if probs is not None:
        return float(holevo(probs, states))
    return blahut_arimoto(states)["capacity"]


def second_order_bound(states, n, eps, probs=None):
    """
    I + sqrt(V/n) * Phi^{-1}(eps) per use, with I and V evaluated at
    the Blahut-Arimoto optimizer when no prior is supplied. The
    optimizer-set spread of V is approximated by this single point.
    """
    if n < 1 or not 0 < eps < 1:
        raise ValueError("require n >= 1 and eps in (0,1)")
    states = [_mat(s) for s in states]
    if probs is None:
        probs = blahut_arimoto(states)["p"]
    probs = np.asarray(probs, dtype=float)
    rho_xb = cq_state(probs, states)
    avg = sum(p * s for p, s in zip(probs, states))
    prod = cq_state(probs, [avg] * len(states))
    I = float(holevo(probs, states))
    V = rel_entropy_variance(rho_xb, prod)
    return float(I + math.sqrt(V / n) * norm.ppf(eps))


def renyi_mutual_information(probs, states, alpha, residual_tol=1e-7,
                             max_iter=5000):
    """
    Sandwiched Renyi mutual information of a cq ensemble: minimum over
    sigma of the sandwiched divergence between the joint and
    p (x) sigma, by exponentiated-gradient descent on sigma.

    :return: dict with value (bits), sigma, stationarity residual.
    """
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    probs = np.asarray(probs, dtype=float)
    states = [_mat(s) for s in states]
    d = states[0].shape[0]
    e = (1 - alpha) / (2 * alpha)
    floor = 1e-14

    def f(sigma):
        ws, Vs = np.linalg.eigh(sigma)
        ws = np.maximum(ws, floor)
        Se = (Vs * ws ** e) @ Vs.conj().T
        tot = 0.0
        for p, r in zip(probs, states):
            if p <= 0:
                continue
            w = np.linalg.eigvalsh(Se @ r @ Se)
            w = w[w > 1e-18 * max(abs(w).max(), 1e-300)]
            tot += p * np.sum(w ** alpha)
        return float(np.log2(tot) / (alpha - 1))

    basis = sdp.hermitian_basis(d)

    def grad(sigma):
        h = 1e-6
        G = np.zeros((d, d), dtype=complex)
        for B in basis:
            G += (f(sigma + h * B) - f(sigma - h * B)) / (2 * h) * B
        return G

    sigma = np.eye(d, dtype=complex) / d
    val = f(sigma)
    eta = 1.0
    res = np.inf
    for it in range(1, max_iter + 1):
        G = grad(sigma)
        res = float(np.real(np.trace(sigma @ G)) - np.linalg.eigvalsh(G).min())
        if res <= residual_tol:
            break
        stepped = False
        L = _logm_full(sigma, floor)
        for _ in range(60):
            cand = _expm_density(L - eta * G)
            cval = f(cand)
            if cval <= val + 1e-15:
                sigma, val = cand, cval
                eta = min(eta * 1.25, 1e3)
                stepped = True
                break
            eta *= 0.5
        if not stepped:
            break
    return {"value": val, "sigma": sigma, "residual": res,
            "iterations": it, "converged": res <= residual_tol}


def _logm_full(sigma, floor):
    ws, Vs = np.linalg.eigh(sigma)
    ws = np.maximum(ws, floor)
    return (Vs * np.log(ws)) @ Vs.conj().T


def _expm_density(H):
    ws, Vs = np.linalg.eigh((H + H.conj().T) / 2)
    ws = ws - ws.max()
    E = (Vs * np.exp(ws)) @ Vs.conj().T
    return E / np.real(np.trace(E))


def strong_converse_exponent(probs, states, R, alpha, n=1,
                             residual_tol=1e-7):
    """
    Strong-converse success-probability bound
    2^{-n (1 - 1/alpha)(R - I_alpha)} for reading at rate R.
    """
    mi = renyi_mutual_information(probs, states, alpha,
                                 residual_tol=residual_tol)
    if not mi["converged"]:
        raise ArithmeticError("Renyi minimization residual %.3g" % mi["residual"])
    expo = (1 - 1.0 / alpha) * (R - mi["value"])
    return float(2.0 ** (-n * expo))


def weak_converse_objectives(cell, probs, input_state, input_dims):
    """
    Single-letter converse objectives for reading with a probe on
    (R, B'): nonadaptive I(XR;B) and adaptive I(X;B|R) - I(X;B'|R).

    input_state may be one state (symbol-independent probe) or one per
    symbol.
    """
    probs = np.asarray(probs, dtype=float)
    dR, dBp = input_dims
    m = len(cell)
    if isinstance(input_state, (list, tuple)):
        inputs = [_mat(s) for s in input_state]
    else:
        inputs = [_mat(input_state)] * m
    outs = []
    for ch, phi in zip(cell.channels, inputs):
        out = np.zeros((dR * ch.out_dim,) * 2, dtype=complex)
        for K in ch.kraus:
            Kf = np.kron(np.eye(dR), K)
            out += Kf @ phi @ Kf.conj().T
        outs.append(out)
    dB = cell.out_dim
    tau = cq_state(probs, outs)               # (X, R, B)
    nonadaptive = mutual_information(tau, (m * dR, dB))
    # I(X;B|R) on (X, B, R) ordering for the three-way splitter
    tau3 = linalg.permute_systems(tau, (m, dR, dB), [0, 2, 1])
    rho3 = linalg.permute_systems(cq_state(probs, inputs), (m, dR, dBp),
                                  [0, 2, 1])
    adaptive = (conditional_mutual_information(tau3, (m, dB, dR))
                - conditional_mutual_information(rho3, (m, dBp, dR)))
    return {"nonadaptive": float(nonadaptive), "adaptive": float(adaptive)}


def private_reading_rate_n1(cell, probs, psi):
    """
    Single-letter private reading rate I(X;LB) - I(X;E) for a wiretap
    cell and a pure probe vector on (L, input).
    """
    if cell.wiretap is None:
        raise ValueError("cell carries no wiretap extensions")
    joints, envs = cell.probe_outputs(psi)
    probs = np.asarray(probs, dtype=float)
    dLB = joints[0].shape[0]
    dE = envs[0].shape[0]
    m = len(cell)
    i_xlb = mutual_information(cq_state(probs, joints), (m, dLB))
    i_xe = mutual_information(cq_state(probs, envs), (m, dE))
    return float(i_xlb - i_xe)


def coherent_info_rate(cell, probs, psi):
    """
    Entanglement-generation rate I(X > LB) when the symbol register is
    kept in superposition: the environment of the wiretap extensions is
    traced out of the coherently encoded pure state.
    """
    if cell.wiretap is None:
        raise ValueError("cell carries no wiretap extensions")
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    probs = np.asarray(probs, dtype=float)
    dL = psi.size // cell.in_dim
    m = len(cell)
    dB = cell.wiretap[0].out_dim
    dE = cell.wiretap[0].env_dim
    omega = np.zeros(m * dL * dB * dE, dtype=complex)
    for x, (p, V) in enumerate(zip(probs, cell.wiretap)):
        branch = np.kron(np.eye(dL), V.matrix) @ psi
        omega[x * dL * dB * dE:(x + 1) * dL * dB * dE] = math.sqrt(p) * branch
    R = np.outer(omega, omega.conj())
    red = linalg.partial_trace(R, (m, dL * dB, dE), [0, 1])
    return float(coherent_information(red, (m, dL * dB)))


def hw_probe_cell(base_cell_channel_factory=None, d=2, q=0.5):
    """
    Erasure wiretap cell: Heisenberg-Weyl encodings followed by the
    erasure wiretap isometry.
    """
    from .qcore import erasure_wiretap_isometry
    W = erasure_wiretap_isometry(d, q)
    isos = []
    chans = []
    for U in hw_group(d).unitaries:
        M = W.matrix @ U
        iso = IsometricExtension(M, W.out_dim, W.env_dim)
        isos.append(iso)
        chans.append(iso.channel())
    return MemoryCell(chans, wiretap=isos)


def zero_error_certificate():
    """
    Fixed certificate that the two-channel cell admitting adaptive
    zero-error reading cannot be read without error non-adaptively:
    builds the positive definite operator P and checks the
    coefficient identity sum_{jk} a_{jk} (A^y_j)^dag A^x_k = P for
    x != y (and the identity for x = y) to 1e-10.
    """
    from .qcore import zero_error_pair, ket
    ch1, ch2 = zero_error_pair()
    A = [ch1.kraus, ch2.kraus]
    k00, k01, k11 = ket(0, 4), ket(1, 4), ket(3, 4)
    minus = (ket(0, 2) - ket(1, 2)) / math.sqrt(2)
    k1m = np.kron(ket(1, 2), minus)
    P = (np.outer(k00, k00.conj()) + np.outer(k01, k01.conj())
         + np.outer(k11, k11.conj()) + np.outer(k1m, k1m.conj()))
    min_eig = float(np.linalg.eigvalsh(P).min())

    alpha = np.zeros((5, 5))
    alpha[0, 0] = alpha[1, 1] = math.sqrt(2)
    alpha[2, 4] = alpha[3, 2] = 1.0
    alpha[3, 3] = -2 * math.sqrt(2)

    resid_cross = 0.0
    for x in (0, 1):
        for y in (0, 1):
            S = np.zeros((4, 4), dtype=complex)
            for j in range(5):
                for k in range(5):
                    if x == y:
                        a = 1.0 if j == k else 0.0
                    elif x < y:
                        a = alpha[j, k]
                    else:
                        # reversed pair uses the transposed table
                        a = alpha[k, j]
                    if a:
                        S += a * A[y][j].conj().T @ A[x][k]
            target = np.eye(4) if x == y else P
            resid_cross = max(resid_cross, float(np.abs(S - target).max()))
    return {"min_eig": min_eig,
            "expected_min_eig": 1 - 1 / math.sqrt(2),
            "identity_residual": resid_cross,
            "ok": (min_eig > 0 and resid_cross <= 1e-10)}


def _iso_outputs(iso, d):
    """(LB, E) marginals of (1_L (x) V) Phi_d for an extension V."""
    phi = np.zeros(d * d, dtype=complex)
    for i in range(d):
        phi[i * d + i] = 1.0 / math.sqrt(d)
    big = np.kron(np.eye(d), iso.matrix) @ phi
    R = np.outer(big, big.conj())
    dims = (d, iso.out_dim, iso.env_dim)
    return (linalg.partial_trace(R, dims, [0, 1]),
            linalg.partial_trace(R, dims, [2]))


def secure_reading_deltas(kind, q, N, eta0, eta1, d=2, theta=0.5):
    """
    Per-site security parameters for hiding sparse codewords among
    blanks: relative entropies between the mixed per-site output
    omega = q omega_1 + (1-q) omega_0 and the blank output omega_0, on
    the reading port (D_I) and the environment port (D_C), with a
    maximally entangled probe per site.

    kind 'depolarizing': cells keep the input with probability eta_x;
    includes the closed-form eigenvalue cross-check. kind 'gadc':
    amplitude damping with mixing angle theta.

    :return: dict with D_I, D_C, N*D_I, N*D_C (bits).
    """
    if not 0 <= q <= 1 or N < 1:
        raise ValueError("require q in [0,1] and N >= 1")
    if kind == "depolarizing":
        chans = [depolarizing(d, 1 - eta0), depolarizing(d, 1 - eta1)]
        dd = d
    elif kind == "gadc":
        chans = [gadc(eta0, theta), gadc(eta1, theta)]
        dd = 2
    else:
        raise ValueError("unknown kind %r" % kind)
    isos = [isometric_extension(ch) for ch in chans]
    lb, env = zip(*[_iso_outputs(V, dd) for V in isos])
    w0, w1 = lb
    e0, e1 = env
    w = q * w1 + (1 - q) * w0
    e = q * e1 + (1 - q) * e0
    D_I = relative_entropy(w, w0)
    D_C = relative_entropy(e, e0)
    out = {"D_I": D_I, "D_C": D_C, "N_D_I": N * D_I, "N_D_C": N * D_C}
    if kind == "depolarizing":
        l1_0 = eta0 + (1 - eta0) / d ** 2
        l2_0 = (1 - eta0) / d ** 2
        em = q * eta1 + (1 - q) * eta0
        l1 = em + (1 - em) / d ** 2
        l2 = (1 - em) / d ** 2
        closed = (l1 * math.log2(l1 / l1_0)
                  + (d ** 2 - 1) * l2 * math.log2(l2 / l2_0)) \
            if q > 0 else 0.0
        out["D_I_closed"] = closed
        if abs(closed - D_I) > 1e-10:
            raise AssertionError("closed-form eigenvalue path deviates: "
                                 "%.3g" % abs(closed - D_I))
    return out


def energy_constrained_bound(N_S):
    """2 g(N_S) for a mean-photon-number constraint N_S."""
    if N_S < 0:
        raise ValueError("N_S must be nonnegative")
    return float(2 * g_fn(N_S))
