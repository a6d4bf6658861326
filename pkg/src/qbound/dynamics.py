"""Open-system dynamics: entropy rates, Markovianity witnesses and
diamond-norm based nonunitarity.

Time-local generators with possibly time-dependent rates, a fixed-order
integrator with step-doubling error control, the entropy-production
lower bound in projector and commutator forms, witness integrals over a
Bloch grid, the trace-distance (BLP) measure, entropy-change bound
chains, the diamond norm as an SDP, and the analytic amplitude-damping
families used as cross-checks.

Entropies and entropy rates in this module are in nats.
"""
import math

import numpy as np

from . import linalg, sdp
from .qcore import DensityOperator, KrausChannel, choi_of


def _mat(rho):
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)


def _const(x):
    return x if callable(x) else (lambda t, _x=x: _x)


class LindbladGenerator:
    """
    Time-local generator: commutator with H(t) plus dissipators with
    rates gamma_i(t) and jump operators A_i(t). Scalars/arrays are
    promoted to constants.
    """

    def __init__(self, hamiltonian, jumps=()):
        self._H = _const(np.asarray(hamiltonian, dtype=complex)
                         if not callable(hamiltonian) else hamiltonian)
        self._jumps = [(_const(g), _const(np.asarray(A, dtype=complex)
                                          if not callable(A) else A))
                       for g, A in jumps]

    def hamiltonian(self, t):
        return np.asarray(self._H(t), dtype=complex)

    def jump_terms(self, t):
        return [(float(g(t)), np.asarray(A(t), dtype=complex))
                for g, A in self._jumps]

    def apply(self, t, rho):
        """Schroedinger-picture action on a state."""
        H = self.hamiltonian(t)
        out = -1j * (H @ rho - rho @ H)
        for g, A in self.jump_terms(t):
            AdA = A.conj().T @ A
            out += g * (A @ rho @ A.conj().T - 0.5 * (AdA @ rho + rho @ AdA))
        return out

    def adjoint_apply(self, t, X):
        """Heisenberg-picture action on an observable."""
        H = self.hamiltonian(t)
        out = 1j * (H @ X - X @ H)
        for g, A in self.jump_terms(t):
            AdA = A.conj().T @ A
            out += g * (A.conj().T @ X @ A - 0.5 * (AdA @ X + X @ AdA))
        return out


def _rk4_step(gen, t, rho, h):
    k1 = gen.apply(t, rho)
    k2 = gen.apply(t + h / 2, rho + h / 2 * k1)
    k3 = gen.apply(t + h / 2, rho + h / 2 * k2)
    k4 = gen.apply(t + h, rho + h * k3)
    out = rho + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return (out + out.conj().T) / 2


def evolve(gen, rho0, t_grid, local_err=1e-9):
    """
    Integrate rho' = L_t(rho) through the requested time grid.

    Classical fourth-order steps with step doubling: each trial step is
    compared against two half steps and the step size adapts until the
    per-step error estimate is below local_err.

    :return: list of states (arrays), one per grid time.
    """
    rho = np.array(_mat(rho0), dtype=complex)
    t_grid = [float(t) for t in t_grid]
    t = t_grid[0]
    out = [rho.copy()]
    for t_next in t_grid[1:]:
        if t_next < t:
            raise ValueError("time grid must be nondecreasing")
        h = t_next - t
        while t < t_next - 1e-15:
            h = min(h, t_next - t)
            full = _rk4_step(gen, t, rho, h)
            half = _rk4_step(gen, t + h / 2,
                             _rk4_step(gen, t, rho, h / 2), h / 2)
            err = np.abs(full - half).max() / 15.0
            if err <= local_err or h < 1e-12:
                rho = half
                t += h
                if err < local_err / 32 and err > 0:
                    h *= 2
                elif err == 0:
                    h *= 2
            else:
                h *= 0.5
        t = t_next
        out.append(rho.copy())
    return out


def entropy_rate(rho, rhodot):
    """-Tr{rhodot log rho} in nats, log restricted to the support."""
    R = _mat(rho)
    L = linalg.matrix_fn_on_support(R, math.log)
    return float(-np.real(np.trace(np.asarray(rhodot) @ L)))


def support_projector(rho, cut=1e-10):
    R = _mat(rho)
    w, V = linalg.eigh(R)
    keep = w > cut * max(w.max(), np.finfo(float).tiny)
    Vk = V[:, keep]
    return Vk @ Vk.conj().T


def markov_lower_bound(gen, t, rho, method="projector"):
    """
    Lower bound on the entropy rate under divisible dynamics.

    projector form: -Tr{Pi_t L_t^dag(rho_t)} with Pi_t the support
    projector. commutator form (full-rank states): the same number as
    sum_i gamma_i <[A_i^dag, A_i]>.
    """
    R = _mat(rho)
    if method == "projector":
        Pi = support_projector(R)
        return float(-np.real(np.trace(Pi @ gen.adjoint_apply(t, R))))
    if method == "commutator":
        val = 0.0
        for g, A in gen.jump_terms(t):
            comm = A.conj().T @ A - A @ A.conj().T
            val += g * float(np.real(np.trace(R @ comm)))
        return val
    raise ValueError("method must be projector or commutator")


def witness_f(gen, t, rho, rhodot=None):
    """
    Entropy rate minus its divisibility lower bound; negative values
    witness departure from (completely) divisible dynamics.
    """
    R = _mat(rho)
    if rhodot is None:
        rhodot = gen.apply(t, R)
    Pi = support_projector(R)
    kern_gain = np.real(np.trace((np.eye(len(R)) - Pi) @ rhodot))
    if kern_gain > 1e-12:
        # rank is increasing: the entropy rate diverges to +inf and the
        # support-restricted formula would undershoot it
        return math.inf
    return entropy_rate(R, rhodot) - markov_lower_bound(gen, t, R)


def bloch_grid(n_polar=6, n_azim=12):
    """Pure qubit states on a regular (polar x azimuthal) angle grid."""
    states = []
    for i in range(1, n_polar + 1):
        th = math.pi * i / (n_polar + 1)
        for j in range(n_azim):
            ph = 2 * math.pi * j / n_azim
            v = np.array([math.cos(th / 2),
                          math.sin(th / 2) * np.exp(1j * ph)])
            states.append(np.outer(v, v.conj()))
    states.append(np.diag([1.0, 0.0]).astype(complex))
    states.append(np.diag([0.0, 1.0]).astype(complex))
    return states


def nonmarkov_measure(gen, t_max, n_steps=200, states=None, local_err=1e-9):
    """
    Lower bound on a non-Markovianity measure: the integral of the
    negative part of the witness along the trajectory, maximized over a
    grid of initial states (Bloch grid for qubits by default).
    """
    d = gen.hamiltonian(0.0).shape[0]
    if states is None:
        if d != 2:
            raise ValueError("default state grid only covers qubits")
        states = bloch_grid()
    ts = np.linspace(0.0, t_max, n_steps + 1)
    best = 0.0
    arg = None
    for rho0 in states:
        traj = evolve(gen, rho0, ts, local_err=local_err)
        fs = np.array([witness_f(gen, t, r) for t, r in zip(ts, traj)])
        neg = np.maximum(0.0, -fs)
        val = float(np.trapezoid(neg, ts))
        if val > best:
            best, arg = val, rho0
    return {"measure": best, "state": arg}


def blp_measure(ts, distances):
    """
    Integral of the positive part of the trace-distance derivative,
    from sampled distances (central differences, trapezoid rule).
    """
    ts = np.asarray(ts, dtype=float)
    D = np.asarray(distances, dtype=float)
    dD = np.gradient(D, ts)
    return float(np.trapezoid(np.maximum(0.0, dD), ts))


def blp_for_family(channel_at, rho_a, rho_b, ts):
    """BLP integrand for a one-parameter channel family channel_at(t)."""
    Ra, Rb = _mat(rho_a), _mat(rho_b)
    Ds = []
    for t in ts:
        ch = channel_at(t)
        Ds.append(0.5 * linalg.schatten_norm(ch.apply(Ra) - ch.apply(Rb), 1))
    return blp_measure(ts, Ds)


class GADCFamily:
    """
    One-parameter amplitude-damping family with an oscillating mixing
    weight: p_t = cos^2(w t), eta_t = exp(-t). Carries the analytic
    population gap W_t, entropy rate and witness for the maximally
    mixed probe, alongside the Kraus family for numerical cross-checks.
    """

    def __init__(self, omega):
        self.omega = float(omega)

    def p(self, t):
        return math.cos(self.omega * t) ** 2

    def eta(self, t):
        return math.exp(-t)

    def kraus(self, t):
        p, eta = self.p(t), self.eta(t)
        se, sq = math.sqrt(eta), math.sqrt(1 - eta)
        K = [math.sqrt(p) * np.diag([1.0, se]),
             math.sqrt(p) * np.array([[0.0, sq], [0.0, 0.0]]),
             math.sqrt(1 - p) * np.diag([se, 1.0]),
             math.sqrt(1 - p) * np.array([[0.0, 0.0], [sq, 0.0]])]
        return KrausChannel([k.astype(complex) for k in K])

    def channel_at(self, t):
        return self.kraus(t)

    def W(self, t):
        return math.cos(2 * self.omega * t) * (1 - math.exp(-t))

    def Wdot(self, t):
        return (-2 * self.omega * math.sin(2 * self.omega * t)
                * (1 - math.exp(-t))
                + math.cos(2 * self.omega * t) * math.exp(-t))

    def state(self, t):
        W = self.W(t)
        return np.diag([(1 + W) / 2, (1 - W) / 2]).astype(complex)

    def entropy_rate(self, t):
        W = self.W(t)
        if abs(W) >= 1:
            return -math.copysign(math.inf, self.Wdot(t) * W)
        return 0.5 * self.Wdot(t) * math.log((1 - W) / (1 + W))

    def f(self, t):
        return self.entropy_rate(t) + self.W(t)


def gadc_family(omega):
    return GADCFamily(omega)


def damping_trajectory(t):
    """Analytic relaxation example: populations (1-e^-t, e^-t)."""
    x = math.exp(-t)
    rho = np.diag([1 - x, x]).astype(complex)
    if x in (0.0, 1.0):
        return rho, 0.0
    return rho, -x * math.log((1 - x) / x)


def oscillatory_trajectory(t):
    """Analytic oscillating example: populations (cos^2 pi t, sin^2 pi t)."""
    c2, s2 = math.cos(math.pi * t) ** 2, math.sin(math.pi * t) ** 2
    rho = np.diag([c2, s2]).astype(complex)
    if c2 < 1e-300 or s2 < 1e-300:
        return rho, 0.0
    ds = math.pi * math.sin(2 * math.pi * t) * (math.log(c2) - math.log(s2))
    return rho, ds


# ---------------------------------------------------------------------------
# entropy-change bounds and diamond-norm based nonunitarity
# ---------------------------------------------------------------------------

def _rel_ent_nats(R, S):
    wr, Vr = linalg.eigh(R)
    cut = 1e-12 * max(np.abs(wr).max(), np.finfo(float).tiny)
    t1 = sum(v * math.log(v) for v in wr if v > cut)
    Ls = linalg.matrix_fn_on_support(S, math.log)
    # support check left to the caller; used on full-rank arguments
    return float(t1 - np.real(np.trace(R @ Ls)))


def entropy_change_bounds(ch, rho):
    """
    Chain of bounds (nats) on Delta S = S(M(rho)) - S(rho) for a channel
    M with sub-unital adjoint composition:

    D(rho || M^dag M(rho)) <= Delta S
        <= Tr{[rho - M^dag M(rho)] log rho}
        <= ||rho - M^dag M(rho)||_1 ||log rho||_inf.
    """
    R = _mat(rho)
    MR = ch.apply(R)
    back = ch.adjoint_apply(MR)

    def ent(M):
        w = np.linalg.eigvalsh(M)
        return float(-sum(v * math.log(v) for v in w if v > 1e-15))

    delta = ent(MR) - ent(R)
    lower = _rel_ent_nats(R, back)
    LR = linalg.matrix_fn_on_support(R, math.log)
    mid = float(np.real(np.trace((R - back) @ LR)))
    upper = linalg.schatten_norm(R - back, 1) * linalg.schatten_norm(LR, np.inf)
    return {"lower": lower, "delta_S": delta, "middle": mid, "upper": upper}


def diamond_norm(J, in_dim, tol=1e-8):
    """
    Diamond norm of a Hermiticity-preserving map given its Choi
    operator (input copy first), as twice the value of

    max Re Tr{J W} s.t. 0 <= W <= rho (x) 1_out, Tr{rho} = 1.
    """
    J = np.asarray(J, dtype=complex)
    J = (J + J.conj().T) / 2
    n = J.shape[0]
    dout = n // in_dim
    m = sdp.Model()
    W = m.var(n)
    r = m.var(in_dim)
    m.set_objective({W: -J})
    m.add_psd([(r, lambda R: np.kron(R, np.eye(dout, dtype=complex))),
               (W, lambda X: -X)], np.zeros((n, n), dtype=complex))
    m.add_eq([(r, lambda R: np.trace(R).real * np.ones((1, 1)))],
             np.ones((1, 1)))
    sol = m.solve(tol=tol)
    if sol.status not in ("optimal",) and not (
            sol.status == "numerical_limit" and sol.gap <= max(100 * tol, 1e-7)):
        raise ArithmeticError("diamond norm SDP failed: %s" % sol.status)
    return float(2 * max(0.0, -sol.primal_value))


def diamond_distance(ch_a, ch_b, tol=1e-8):
    Ja = choi_of(ch_a).matrix
    Jb = choi_of(ch_b).matrix
    return diamond_norm(Ja - Jb, ch_a.in_dim, tol=tol)


def backaction_channel(ch):
    """M^dag after M: Kraus products K_j^dag K_i."""
    K = [Kj.conj().T @ Ki for Kj in ch.kraus for Ki in ch.kraus]
    return KrausChannel(K, check=False)


def nonunitarity(ch, tol=1e-8):
    """
    Diamond-norm distance of M^dag after M from the identity. Zero
    exactly for unitary (isometric) channels.
    """
    from .qcore import identity_channel
    return diamond_distance(identity_channel(ch.in_dim),
                            backaction_channel(ch), tol=tol)


def depolarizing_nonunitarity(d, q):
    """Closed form for the depolarizing channel: 2q(2-q)(1-1/d^2)."""
    return 2 * q * (2 - q) * (1 - 1.0 / d ** 2)


def unitarity_gap_check(ch, U, tol=1e-8):
    """
    If M is diamond-close (distance delta) to a unitary channel then
    its nonunitarity is at most sqrt(2 delta) + delta.
    """
    from .qcore import KrausChannel as KC
    uch = KC([np.asarray(U, dtype=complex)])
    delta = diamond_distance(ch, uch, tol=tol)
    lhs = nonunitarity(ch, tol=tol)
    bound = math.sqrt(2 * delta) + delta
    return {"delta": delta, "nonunitarity": lhs, "bound": bound,
            "holds": lhs <= bound + 1e-7}


def gaussian_rate_limit(kind, N=None):
    """
    Sign of the long-time entropy-rate limit for single-mode bosonic
    semigroups, from the gain/loss rate pair (gamma_plus, gamma_minus).

    amplifier: (N+1, N) -> +1; lossy: (N, N+1) -> -1;
    additive (unital): equal rates -> 0.
    """
    if kind == "amplifier":
        gp, gm = float(N) + 1, float(N)
    elif kind == "lossy":
        gp, gm = float(N), float(N) + 1
    elif kind == "additive":
        gp = gm = 1.0
    else:
        raise ValueError("unknown kind %r" % kind)
    diff = gp - gm
    return {"gamma_plus": gp, "gamma_minus": gm,
            "sign": int(np.sign(diff))}
