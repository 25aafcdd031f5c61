"""Descent kernels behind the brute-force unitary search.

Two interchangeable backends implement the same finite-difference descent on
f(H1, H2) = ||rho2 - (e^{iH1} (x) e^{iH2}) rho1 (.)^dagger||_F^2: a jitted
one built from explicit loops and a plain numpy one.  Selection is automatic
(numba when importable) and can be forced off with RANK2LU_DISABLE_NUMBA=1.
Hermitian matrices are packed as real vectors: d diagonal entries first, then
(re, im) pairs for the strict upper triangle in row-major order.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


DISABLE_ENV = "RANK2LU_DISABLE_NUMBA"

FD_STEP = 1e-6
STOP_STEP = 1e-12
STEP_GROW = 1.7
STEP_SHRINK = 0.5


def param_count(d: int) -> int:
    return d * d


def pack_hermitian(H: np.ndarray) -> np.ndarray:
    """Inverse of the theta -> Hermitian layout, for tests and witnesses."""
    d = H.shape[0]
    theta = np.empty(d * d)
    theta[:d] = np.diagonal(H).real
    k = d
    for i in range(d):
        for j in range(i + 1, d):
            theta[k] = H[i, j].real
            theta[k + 1] = H[i, j].imag
            k += 2
    return theta


def unpack_hermitian(theta: np.ndarray, d: int) -> np.ndarray:
    H = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        H[i, i] = theta[i]
    k = d
    for i in range(d):
        for j in range(i + 1, d):
            H[i, j] = theta[k] + 1j * theta[k + 1]
            H[j, i] = theta[k] - 1j * theta[k + 1]
            k += 2
    return H


def expm_i_hermitian(H: np.ndarray) -> np.ndarray:
    """e^{iH} for Hermitian H via eigendecomposition."""
    w, Q = np.linalg.eigh(H)
    return (Q * np.exp(1j * w)) @ Q.conj().T


# ---------------------------------------------------------------- numpy twin


def _objective_numpy(theta, rho1, rho2, m, n):
    H1 = unpack_hermitian(theta[: m * m], m)
    H2 = unpack_hermitian(theta[m * m :], n)
    K = np.kron(expm_i_hermitian(H1), expm_i_hermitian(H2))
    diff = rho2 - K @ rho1 @ K.conj().T
    return float(np.sum(diff.real**2 + diff.imag**2))


def descent_numpy(
    rho1,
    rho2,
    m,
    n,
    theta0,
    max_iters,
    step_init,
    stag_window,
    stag_rtol,
):
    theta = theta0.copy()
    f = _objective_numpy(theta, rho1, rho2, m, n)
    step = step_init
    p = theta.size
    grad = np.empty(p)
    history = np.empty(max_iters + 1)
    history[0] = f
    iters = 0
    for it in range(max_iters):
        iters = it + 1
        for k in range(p):
            saved = theta[k]
            theta[k] = saved + FD_STEP
            fp = _objective_numpy(theta, rho1, rho2, m, n)
            theta[k] = saved - FD_STEP
            fm = _objective_numpy(theta, rho1, rho2, m, n)
            theta[k] = saved
            grad[k] = (fp - fm) / (2.0 * FD_STEP)
        gnorm = float(np.sqrt(np.sum(grad * grad)))
        if gnorm < 1e-15:
            break
        improved = False
        while step >= STOP_STEP:
            trial = theta + (-step / gnorm) * grad
            ft = _objective_numpy(trial, rho1, rho2, m, n)
            if ft < f:
                theta = trial
                f = ft
                step *= STEP_GROW
                improved = True
                break
            step *= STEP_SHRINK
        if not improved:
            break
        history[it + 1] = f
        if it + 1 >= stag_window:
            old = history[it + 1 - stag_window]
            if old - f <= stag_rtol * old:
                break
    return f, theta, iters


# ---------------------------------------------------------------- jitted twin


@njit(cache=True)
def _unpack_jit(theta, d):
    H = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        H[i, i] = theta[i]
    k = d
    for i in range(d):
        for j in range(i + 1, d):
            H[i, j] = complex(theta[k], theta[k + 1])
            H[j, i] = complex(theta[k], -theta[k + 1])
            k += 2
    return H


@njit(cache=True)
def _expm_jit(H):
    w, Q = np.linalg.eigh(H)
    d = H.shape[0]
    phases = np.exp(1j * w)
    scaled = np.empty((d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            scaled[i, j] = Q[i, j] * phases[j]
    return scaled @ Q.conj().T


@njit(cache=True)
def _kron_jit(A, B):
    m1, n1 = A.shape
    m2, n2 = B.shape
    out = np.empty((m1 * m2, n1 * n2), dtype=np.complex128)
    for i in range(m1):
        for j in range(n1):
            a = A[i, j]
            for k in range(m2):
                for l in range(n2):
                    out[i * m2 + k, j * n2 + l] = a * B[k, l]
    return out


@njit(cache=True)
def _objective_jit(theta, rho1, rho2, m, n):
    H1 = _unpack_jit(theta[: m * m], m)
    H2 = _unpack_jit(theta[m * m :], n)
    K = _kron_jit(_expm_jit(H1), _expm_jit(H2))
    diff = rho2 - K @ rho1 @ K.conj().T
    total = 0.0
    for i in range(diff.shape[0]):
        for j in range(diff.shape[1]):
            v = diff[i, j]
            total += v.real * v.real + v.imag * v.imag
    return total


@njit(cache=True)
def _descent_jit(rho1, rho2, m, n, theta0, max_iters, step_init, stag_window, stag_rtol):
    theta = theta0.copy()
    f = _objective_jit(theta, rho1, rho2, m, n)
    step = step_init
    p = theta.size
    grad = np.empty(p)
    history = np.empty(max_iters + 1)
    history[0] = f
    iters = 0
    for it in range(max_iters):
        iters = it + 1
        for k in range(p):
            saved = theta[k]
            theta[k] = saved + FD_STEP
            fp = _objective_jit(theta, rho1, rho2, m, n)
            theta[k] = saved - FD_STEP
            fm = _objective_jit(theta, rho1, rho2, m, n)
            theta[k] = saved
            grad[k] = (fp - fm) / (2.0 * FD_STEP)
        gnorm = 0.0
        for k in range(p):
            gnorm += grad[k] * grad[k]
        gnorm = np.sqrt(gnorm)
        if gnorm < 1e-15:
            break
        improved = False
        while step >= STOP_STEP:
            trial = theta + (-step / gnorm) * grad
            ft = _objective_jit(trial, rho1, rho2, m, n)
            if ft < f:
                theta = trial
                f = ft
                step *= STEP_GROW
                improved = True
                break
            step *= STEP_SHRINK
        if not improved:
            break
        history[it + 1] = f
        if it + 1 >= stag_window:
            old = history[it + 1 - stag_window]
            if old - f <= stag_rtol * old:
                break
    return f, theta, iters


def descent_numba(
    rho1,
    rho2,
    m,
    n,
    theta0,
    max_iters,
    step_init,
    stag_window,
    stag_rtol,
):
    return _descent_jit(
        np.ascontiguousarray(rho1),
        np.ascontiguousarray(rho2),
        m,
        n,
        np.ascontiguousarray(theta0, dtype=np.float64),
        max_iters,
        step_init,
        stag_window,
        stag_rtol,
    )


BACKENDS = {"numpy": descent_numpy}
if NUMBA_AVAILABLE:
    BACKENDS["numba"] = descent_numba


def active_backend() -> str:
    """Backend actually in use: numba unless unavailable or disabled by env."""
    if NUMBA_AVAILABLE and os.environ.get(DISABLE_ENV, "") != "1":
        return "numba"
    return "numpy"


def get_descent(backend: str | None = None):
    return BACKENDS[backend or active_backend()]
