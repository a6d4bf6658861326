"""Small dense block-diagonal semidefinite programming.

Equality-form programs  min <C,X>  s.t.  <A_i,X> = b_i,  X >= 0 (block
diagonal) are solved with a primal-dual Mehrotra predictor-corrector
interior-point method. Complex Hermitian data enters through the real
symmetric embedding H -> [[Re H, -Im H], [Im H, Re H]].

A thin modeling layer (Model) turns operator equalities and one-sided
operator inequalities over Hermitian matrix variables into the scalar
equality form, adding PSD slack blocks for inequalities.
"""
import json
import numpy as np

DEFAULT_TOL = 1e-8
MAX_ITER = 200
BOUNDARY_FRAC = 0.98


class SDPProblem:
    """Block-diagonal equality-form SDP (minimize).

    blocks: list of block dimensions.
    C: list of per-block objective matrices.
    A: list of constraints, each a list of per-block matrices (None for a
       zero block).
    b: right-hand sides.
    """

    def __init__(self, blocks, C, A, b):
        self.blocks = [int(n) for n in blocks]
        self.C = [np.asarray(Cb) for Cb in C]
        self.A = [[None if Ab is None else np.asarray(Ab) for Ab in row]
                  for row in A]
        self.b = np.asarray(b, dtype=float)
        for Cb, n in zip(self.C, self.blocks):
            if Cb.shape != (n, n):
                raise ValueError("objective block shape mismatch")
        for row in self.A:
            for Ab, n in zip(row, self.blocks):
                if Ab is not None and Ab.shape != (n, n):
                    raise ValueError("constraint block shape mismatch")

    @property
    def is_complex(self):
        if any(np.iscomplexobj(Cb) for Cb in self.C):
            return True
        return any(Ab is not None and np.iscomplexobj(Ab)
                   for row in self.A for Ab in row)


class SDPSolution:
    def __init__(self, primal_value, dual_value, primal_blocks,
                 dual_multipliers, gap, status, iterations=0):
        self.primal_value = primal_value
        self.dual_value = dual_value
        self.primal_blocks = primal_blocks
        self.dual_multipliers = dual_multipliers
        self.gap = gap
        self.status = status
        self.iterations = iterations

    def __repr__(self):
        return ("SDPSolution(status=%s, primal=%.10g, dual=%.10g, gap=%.3g)"
                % (self.status, self.primal_value, self.dual_value, self.gap))


def embed_matrix(H):
    """Real symmetric embedding of a Hermitian matrix."""
    H = np.asarray(H)
    return np.block([[H.real, -H.imag], [H.imag, H.real]])


def embed_hermitian(p):
    """
    Rewrite a complex Hermitian SDPProblem over real symmetric blocks.

    The objective is halved and the right-hand sides doubled so the
    optimal value of the real program equals that of the complex one.
    """
    blocks = [2 * n for n in p.blocks]
    C = [embed_matrix(Cb) / 2 for Cb in p.C]
    A = [[None if Ab is None else embed_matrix(Ab) for Ab in row]
         for row in p.A]
    b = 2 * p.b
    return SDPProblem(blocks, C, A, b)


def _stack(p):
    """Per-block dense (m, n, n) constraint stacks."""
    m = len(p.A)
    stacks = []
    for bi, n in enumerate(p.blocks):
        S = np.zeros((m, n, n))
        for i, row in enumerate(p.A):
            if row[bi] is not None:
                S[i] = row[bi].real
        stacks.append(S)
    return stacks


def _presolve(p, tol=1e-18):
    """Drop linearly dependent constraint rows; detect inconsistency.

    Works on the Gram matrix of the vectorized rows with a pivoted
    Cholesky rank reveal, so the cost is one m x m factorization plus a
    single large BLAS product.
    """
    m = len(p.A)
    stacks = _stack(p)
    vecs = (np.hstack([S.reshape(m, -1) for S in stacks])
            if p.blocks else np.zeros((m, 0)))
    G = vecs @ vecs.T
    scale = max(np.diag(G).max(), 1.0) if m else 1.0
    keep = []
    work = G.copy()
    active = np.ones(m, bool)
    for _ in range(m):
        diag = np.where(active, np.diag(work), -np.inf)
        j = int(np.argmax(diag))
        if diag[j] <= tol * scale:
            break
        keep.append(j)
        active[j] = False
        col = work[:, j] / work[j, j]
        work = work - np.outer(col, work[j, :])
        work[j, :] = 0.0
        work[:, j] = 0.0
    keep.sort()
    dropped = [i for i in range(m) if i not in set(keep)]
    dropped_bad = False
    if dropped:
        Gkk = G[np.ix_(keep, keep)]
        coef = np.linalg.lstsq(Gkk, p.b[keep], rcond=None)[0]
        pred = G[np.ix_(dropped, keep)] @ coef
        if np.any(np.abs(pred - p.b[dropped]) > 1e-7 * max(1.0, np.abs(p.b).max())):
            dropped_bad = True
    return keep, dropped_bad


def solve(p, tol=DEFAULT_TOL, max_iter=MAX_ITER):
    """
    Solve a block-diagonal SDP to the requested tolerance.

    :param p: SDPProblem; complex Hermitian data is embedded automatically.
    :param tol: duality-gap / residual tolerance in [1e-12, 1e-4].
    :return: SDPSolution with status optimal | infeasible | numerical_limit.
    """
    if not 1e-12 <= tol <= 1e-4:
        raise ValueError("tol out of range")
    if sum(p.blocks) > 512:
        raise ValueError("total block dimension too large")
    if p.is_complex:
        q = embed_hermitian(p)
        sol = solve(q, tol=tol, max_iter=max_iter)
        blocks = []
        for bi, n in enumerate(p.blocks):
            Xr = sol.primal_blocks[bi]
            blocks.append((Xr[:n, :n] + Xr[n:, n:]) / 2
                          + 1j * (Xr[n:, :n] - Xr[:n, n:]) / 2)
        sol.primal_blocks = blocks
        return sol

    keep, inconsistent = _presolve(p)
    if inconsistent:
        return SDPSolution(np.inf, -np.inf, None, None, np.inf, "infeasible")
    A = [p.A[i] for i in keep]
    b = p.b[keep]
    p = SDPProblem(p.blocks, p.C, A, b)

    blocks, C = p.blocks, [Cb.real.copy() for Cb in p.C]
    stacks = _stack(p)
    m, ntot = len(p.A), sum(blocks)
    if m == 0:
        # unconstrained: X = 0 is optimal for C >= 0, else unbounded; our
        # programs never hit this, return the trivial point
        Z = [Cb.copy() for Cb in C]
        return SDPSolution(0.0, 0.0, [np.zeros((n, n)) for n in blocks],
                           np.zeros(0), 0.0, "optimal")

    normC = max(1.0, max(np.linalg.norm(Cb) for Cb in C))
    normA = max(1.0, max(np.linalg.norm(S.reshape(m, -1), axis=1).max()
                         for S in stacks))
    normb = max(1.0, np.abs(b).max())
    scale = max(10.0, np.sqrt(ntot), ntot * normb / normA)
    X = [scale * np.eye(n) for n in blocks]
    Z = [max(10.0, np.sqrt(ntot), normC, normA) * np.eye(n) for n in blocks]
    y = np.zeros(m)

    def op_A(Xb):
        return sum(np.einsum('mij,ji->m', S, Xb_) for S, Xb_ in zip(stacks, Xb))

    def op_At(v):
        return [np.einsum('m,mij->ij', v, S) for S in stacks]

    def inner(U, V):
        return sum(float(np.sum(u * v)) for u, v in zip(U, V))

    def max_step(Xb, dXb):
        amax = np.inf
        for Xc, dXc in zip(Xb, dXb):
            try:
                L = np.linalg.cholesky(Xc)
            except np.linalg.LinAlgError:
                w0 = np.linalg.eigvalsh(Xc)[0]
                lift = max(1e-12 * max(np.trace(Xc).real, 1.0), -2.0 * w0, 1e-14)
                L = np.linalg.cholesky(Xc + lift * np.eye(len(Xc)))
            Li = np.linalg.inv(L)
            w = np.linalg.eigvalsh(Li @ dXc @ Li.T)
            if w[0] < 0:
                amax = min(amax, -1.0 / w[0])
        return amax

    status = "numerical_limit"
    it = 0
    for it in range(1, max_iter + 1):
        rp = b - op_A(X)
        AtY = op_At(y)
        Rd = [Cb - Ab - Zb for Cb, Ab, Zb in zip(C, AtY, Z)]
        mu = inner(X, Z) / ntot
        pobj = inner(C, X)
        dobj = float(b @ y)
        gap = inner(X, Z)
        relgap = gap / (1.0 + abs(pobj))
        rp_n = np.linalg.norm(rp) / (1.0 + np.linalg.norm(b))
        rd_n = max(np.linalg.norm(Rb) for Rb in Rd) / normC
        if relgap <= tol and rp_n <= tol and rd_n <= tol:
            status = "optimal"
            break
        if abs(dobj) > 1e10 * normb and rd_n <= 1e-6:
            status = "infeasible"
            break

        Zi = []
        for Zb in Z:
            try:
                L = np.linalg.cholesky(Zb)
                Zi.append(np.linalg.inv(L).T @ np.linalg.inv(L))
            except np.linalg.LinAlgError:
                Zi.append(np.linalg.pinv(Zb, hermitian=True))

        # Schur complement M_ij = Tr(A_i X A_j Z^{-1}), built per block
        M = np.zeros((m, m))
        for bi, S in enumerate(stacks):
            Vb = Zi[bi][None] @ S @ X[bi][None]
            M += np.transpose(Vb, (0, 2, 1)).reshape(m, -1) @ S.reshape(m, -1).T
        M = (M + M.T) / 2
        jitter = 1e-13 * max(1.0, np.trace(M) / m)

        def solve_M(rhs):
            try:
                L = np.linalg.cholesky(M + jitter * np.eye(m))
                t = np.linalg.solve(L, rhs)
                return np.linalg.solve(L.T, t)
            except np.linalg.LinAlgError:
                return np.linalg.lstsq(M + 1e-10 * np.eye(m), rhs, rcond=None)[0]

        def direction(sigma_mu, corr):
            # Rc = sigma*mu*I - X Z - corr   (per block)
            rhs = rp.copy()
            Rc = []
            for bi in range(len(blocks)):
                Rcb = -X[bi] @ Z[bi]
                if sigma_mu:
                    Rcb = Rcb + sigma_mu * np.eye(blocks[bi])
                if corr is not None:
                    Rcb = Rcb - corr[bi]
                Rc.append(Rcb)
                T = (Rcb - X[bi] @ Rd[bi]) @ Zi[bi]
                rhs -= np.einsum('mij,ji->m', stacks[bi], T)
            dy = solve_M(rhs)
            dZ = [Rb - Ab for Rb, Ab in zip(Rd, op_At(dy))]
            dX = []
            for bi in range(len(blocks)):
                dXb = (Rc[bi] - X[bi] @ dZ[bi]) @ Zi[bi]
                dX.append((dXb + dXb.T) / 2)
            return dX, dy, dZ

        # predictor
        dXa, dya, dZa = direction(0.0, None)
        ap = min(1.0, max_step(X, dXa))
        ad = min(1.0, max_step(Z, dZa))
        mu_aff = inner([Xb + ap * d for Xb, d in zip(X, dXa)],
                       [Zb + ad * d for Zb, d in zip(Z, dZa)]) / ntot
        sigma = min(1.0, max(0.0, (mu_aff / mu)) ** 3)

        # corrector
        corr = [da @ dz for da, dz in zip(dXa, dZa)]
        dX, dy, dZ = direction(sigma * mu, corr)
        ap = min(1.0, BOUNDARY_FRAC * max_step(X, dX))
        ad = min(1.0, BOUNDARY_FRAC * max_step(Z, dZ))
        if ap < 1e-10 and ad < 1e-10:
            break
        X = [Xb + ap * d for Xb, d in zip(X, dX)]
        y = y + ad * dy
        Z = [Zb + ad * d for Zb, d in zip(Z, dZ)]

    pobj = inner(C, X)
    dobj = float(b @ y)
    return SDPSolution(pobj, dobj, X, y, abs(pobj - dobj), status, it)


# ---------------------------------------------------------------------------
# modeling layer: Hermitian matrix variables, operator (in)equalities
# ---------------------------------------------------------------------------

def hermitian_basis(n):
    """Orthonormal (Hilbert-Schmidt) basis of n x n Hermitian matrices."""
    basis = np.zeros((n * n, n, n), dtype=complex)
    k = 0
    s = 1.0 / np.sqrt(2.0)
    for i in range(n):
        basis[k, i, i] = 1.0
        k += 1
    for i in range(n):
        for j in range(i + 1, n):
            basis[k, i, j] = s
            basis[k, j, i] = s
            k += 1
            basis[k, i, j] = -1j * s
            basis[k, j, i] = 1j * s
            k += 1
    return basis


class Model:
    """Builder for SDPs over Hermitian PSD matrix variables.

    Every variable is a PSD block. Operator inequalities get PSD slack
    blocks; operator equalities are expanded over an orthonormal
    Hermitian basis of the output space.
    """

    def __init__(self):
        self.dims = []
        self._obj = {}
        self._eqs = []  # (terms, G) with terms = [(var, map_fn)]

    def var(self, dim):
        self.dims.append(int(dim))
        return len(self.dims) - 1

    def set_objective(self, coeffs):
        """Minimize sum_v <C_v, X_v>; coeffs maps var index -> Hermitian C_v."""
        self._obj = {v: np.asarray(C, dtype=complex) for v, C in coeffs.items()}

    def add_eq(self, terms, G):
        """Constrain sum_v map_v(X_v) = G (operator equality)."""
        G = np.asarray(G, dtype=complex)
        self._eqs.append((list(terms), G))

    def add_psd(self, terms, G):
        """Constrain sum_v map_v(X_v) - G >= 0 via a PSD slack block."""
        G = np.asarray(G, dtype=complex)
        s = self.var(G.shape[0])
        self.add_eq(list(terms) + [(s, lambda S: -S)], G)
        return s

    def compile(self):
        C = []
        for v, n in enumerate(self.dims):
            Cb = self._obj.get(v)
            C.append(np.zeros((n, n), dtype=complex) if Cb is None else Cb)
        A, b = [], []
        bases = {}
        for terms, G in self._eqs:
            d = G.shape[0]
            if d not in bases:
                bases[d] = hermitian_basis(d)
            out_basis = bases[d]
            # image of each input basis element under each map
            rows = [[None] * len(self.dims) for _ in range(d * d)]
            for v, fn in terms:
                n = self.dims[v]
                if n not in bases:
                    bases[n] = hermitian_basis(n)
                in_basis = bases[n]
                # F[l, k] = <out_l, fn(in_k)>
                imgs = np.array([fn(Bk) for Bk in in_basis])
                F = np.einsum('lij,kij->lk', out_basis.conj(), imgs).real
                Av = np.einsum('lk,kij->lij', F, in_basis)
                for l in range(d * d):
                    if rows[l][v] is None:
                        rows[l][v] = Av[l]
                    else:
                        rows[l][v] = rows[l][v] + Av[l]
            g = np.einsum('lij,ij->l', out_basis.conj(), G).real
            for l in range(d * d):
                A.append(rows[l])
                b.append(g[l])
        return SDPProblem(self.dims, C, A, b)

    def solve(self, tol=DEFAULT_TOL, max_iter=MAX_ITER):
        prob = self.compile()
        sol = solve(prob, tol=tol, max_iter=max_iter)
        return sol


# ---------------------------------------------------------------------------
# JSON dump / load
# ---------------------------------------------------------------------------

def _mat_to_json(M):
    if M is None:
        return None
    M = np.asarray(M, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in M]


def _mat_from_json(data):
    if data is None:
        return None
    return np.array([[complex(re, im) for re, im in row] for row in data])


def dump_problem(p, fp):
    obj = {
        "blocks": p.blocks,
        "objective": [_mat_to_json(Cb) for Cb in p.C],
        "constraints": [
            {"coeffs": [_mat_to_json(Ab) for Ab in row], "rhs": float(bi)}
            for row, bi in zip(p.A, p.b)
        ],
    }
    json.dump(obj, fp)


def load_problem(fp):
    obj = json.load(fp)
    A = [[_mat_from_json(Ab) for Ab in c["coeffs"]] for c in obj["constraints"]]
    b = [c["rhs"] for c in obj["constraints"]]
    C = [_mat_from_json(Cb) for Cb in obj["objective"]]
    return SDPProblem(obj["blocks"], C, A, b)
