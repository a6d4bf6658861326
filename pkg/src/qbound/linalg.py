"""Dense complex Hermitian linear algebra kernel.

Eigendecompositions, matrix functions restricted to the support,
tensor-product bookkeeping (kron / partial trace / partial transpose)
and Schatten norms. Everything works on plain numpy arrays; subsystem 0
is the most significant tensor index throughout.
"""
import numpy as np

SUPPORT_CUT = 1e-12  # relative to the largest eigenvalue magnitude
HERM_TOL = 1e-10


def _as_matrix(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix, got shape %s" % (M.shape,))
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def check_hermitian(H, tol=HERM_TOL):
    """Symmetrize H after checking it is Hermitian within tol."""
    H = _as_matrix(H)
    scale = max(1.0, np.abs(H).max())
    if np.abs(H - H.conj().T).max() > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return (H + H.conj().T) / 2


def eigh(H):
    """
    Eigendecomposition of a Hermitian matrix.

    :param H: Hermitian matrix (symmetrized internally, checked to 1e-10).
    :return: (eigenvalues ascending, unitary matrix of column eigenvectors).
    """
    H = check_hermitian(H)
    vals, vecs = np.linalg.eigh(H)
    return vals, vecs


def matrix_fn_on_support(H, f, support_cut=SUPPORT_CUT):
    """
    Apply a scalar function to a Hermitian matrix on its support.

    Eigenvalues with |lam| <= support_cut * max|lam| are mapped to zero,
    so f never sees (numerically) kernel directions. Used for log, sqrt,
    inverse powers on near-singular states.

    :param H: Hermitian matrix.
    :param f: real scalar function applied to the retained eigenvalues.
    :param support_cut: relative cutoff below which eigenvalues count as 0.
    :return: f(H) restricted to the support of H.
    """
    vals, vecs = eigh(H)
    cut = support_cut * max(np.abs(vals).max(), np.finfo(float).tiny)
    with np.errstate(invalid='ignore', divide='ignore'):
        fvals = np.array([f(v) if abs(v) > cut else 0.0 for v in vals])
    if not np.all(np.isfinite(fvals)):
        raise ValueError("function undefined at a retained eigenvalue")
    return (vecs * fvals) @ vecs.conj().T


def kron(*mats):
    out = np.asarray(mats[0], dtype=complex)
    for M in mats[1:]:
        out = np.kron(out, M)
    return out


def _check_shape(M, dims):
    M = _as_matrix(M)
    dims = tuple(int(d) for d in dims)
    if any(d <= 0 for d in dims):
        raise ValueError("subsystem dimensions must be positive")
    if int(np.prod(dims)) != M.shape[0]:
        raise ValueError("subsystem dims %s inconsistent with matrix dim %d"
                         % (dims, M.shape[0]))
    return M, dims


def partial_trace(M, dims, keep):
    """
    Trace out all subsystems not listed in keep.

    :param M: matrix on the tensor product of subsystems `dims`
        (subsystem 0 most significant).
    :param dims: ordered subsystem dimensions.
    :param keep: iterable of subsystem indices to retain (original order).
    :return: reduced matrix on the kept subsystems.
    """
    M, dims = _check_shape(M, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise IndexError("keep index out of range")
    T = M.reshape(dims + dims)
    # trace out the complement, highest index first so positions stay valid
    nrow = n
    for ax in sorted(set(range(n)) - set(keep), reverse=True):
        T = np.trace(T, axis1=ax, axis2=ax + nrow)
        nrow -= 1
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return T.reshape(d_keep, d_keep)


def partial_transpose(M, dims, transpose):
    """
    Transpose the listed subsystems in place, leave the rest alone.

    :param M: matrix on the tensor product of subsystems `dims`.
    :param dims: ordered subsystem dimensions.
    :param transpose: iterable of subsystem indices to transpose.
    :return: the partially transposed matrix, same shape as M.
    """
    M, dims = _check_shape(M, dims)
    n = len(dims)
    tset = set(int(t) for t in transpose)
    if any(t < 0 or t >= n for t in tset):
        raise IndexError("transpose index out of range")
    T = M.reshape(dims + dims)
    perm = list(range(2 * n))
    for t in tset:
        perm[t], perm[t + n] = perm[t + n], perm[t]
    d = int(np.prod(dims))
    return T.transpose(perm).reshape(d, d)


def permute_systems(M, dims, perm):
    """
    Reorder tensor factors of M so that new subsystem k is old subsystem
    perm[k].

    :param M: matrix on the tensor product of subsystems `dims`.
    :param dims: current ordered subsystem dimensions.
    :param perm: permutation given as the list of old indices in new order.
    """
    M, dims = _check_shape(M, dims)
    n = len(dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation")
    T = M.reshape(dims + dims)
    axes = perm + [p + n for p in perm]
    d = int(np.prod(dims))
    return T.transpose(axes).reshape(d, d)


def schatten_norm(M, p):
    """Schatten p-norm for p in {1, 2, inf} via singular values."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or not np.all(np.isfinite(M)):
        raise ValueError("expected a finite matrix")
    if p == 2:
        return float(np.linalg.norm(M, 'fro'))
    s = np.linalg.svd(M, compute_uv=False)
    if p == 1:
        return float(s.sum())
    if p == np.inf or p == 'inf':
        return float(s[0]) if len(s) else 0.0
    raise ValueError("p must be 1, 2 or inf")
