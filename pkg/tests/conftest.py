import numpy as np


def random_unitary(n, rng):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def bell_mixture_state():
    """0.7 / 0.3 mixture of the two phase-twin maximally entangled qubit pairs."""
    from rank2lu.states import BipartiteShape, RankTwoState

    A = np.eye(2, dtype=complex) / np.sqrt(2.0)
    B = np.diag([1.0, -1.0]).astype(complex) / np.sqrt(2.0)
    return RankTwoState(shape=BipartiteShape(2, 2), lambda1=0.7, A=A, B=B)


def class_state(delta_sq, mu, lam=0.7, n=None, rng=None):
    """Valid in-class state A = U D V^dagger, B = U diag(mu) D V^dagger.

    delta_sq are the squared singular values of A (must sum to 1) and mu the
    unit-modulus diagonal of the twisting factor; sum(delta_sq * conj(mu))
    must vanish so the eigenvectors are orthogonal.  With rng given, U and V
    are Haar random; otherwise identity embeddings.
    """
    from rank2lu.states import BipartiteShape, RankTwoState

    delta_sq = np.asarray(delta_sq, dtype=float)
    mu = np.asarray(mu, dtype=complex)
    m = delta_sq.size
    n = m if n is None else n
    assert abs(delta_sq.sum() - 1.0) < 1e-12
    assert np.all(np.abs(np.abs(mu) - 1.0) < 1e-12)
    assert abs(np.sum(delta_sq * mu.conj())) < 1e-10
    D = np.zeros((m, n))
    D[:m, :m] = np.diag(np.sqrt(delta_sq))
    A = D.astype(complex)
    B = (np.diag(mu) @ D).astype(complex)
    if rng is not None:
        U = random_unitary(m, rng)
        V = random_unitary(n, rng)
        A = U @ A @ V.conj().T
        B = U @ B @ V.conj().T
    return RankTwoState(shape=BipartiteShape(m, n), lambda1=lam, A=A, B=B)


def triangle_mu(a, b, c):
    """Unit-modulus (mu1, mu2, mu3) with a*conj(mu1)+b*conj(mu2)+c*conj(mu3)=0.

    The weights must satisfy the triangle inequality.  Degenerate triangles
    (a = b + c) give collinear phases.
    """
    cos_t = (a * a + b * b - c * c) / (2.0 * a * b)
    beta = np.pi - np.arccos(np.clip(cos_t, -1.0, 1.0))
    rem = (-a - b * np.exp(1j * beta)) / c
    gamma = np.angle(rem)
    # solved for conj(mu), so conjugate back
    return np.conj([1.0, np.exp(1j * beta), np.exp(1j * gamma)])
