import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def haar_unitary(d, rng):
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def haar_isometry(dout, din, rng):
    A = rng.standard_normal((dout, din)) + 1j * rng.standard_normal((dout, din))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_channel(din, dout, env, rng):
    """Random channel from a Haar Stinespring isometry."""
    from qbound.qcore import KrausChannel
    V = haar_isometry(dout * env, din, rng)
    K = [V.reshape(dout, env, din)[:, e, :] for e in range(env)]
    return KrausChannel(K)
