"""Dense complex-matrix substrate: decompositions and tolerance-aware predicates.

Matrices are plain 2-D ``numpy.ndarray`` objects with ``complex128`` entries.
All functions are pure and never mutate their arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    NotHermitian,
    ShapeMismatch,
    SingularInput,
)

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "as_matrix",
    "frobenius_norm",
    "frobenius_distance",
    "hermitian_eig",
    "svd",
    "polar",
    "rank_tol",
    "trace_power",
    "kron",
    "is_hermitian",
    "is_unitary",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Thresholds for floating-point rank, equality, and degeneracy decisions.

    tol_rank is relative to the largest singular value; tol_eq is an absolute
    threshold for scalar and matrix comparisons; tol_degenerate is the minimum
    eigenvalue gap below which a spectrum counts as degenerate.
    """

    tol_rank: float = 1e-8
    tol_eq: float = 1e-8
    tol_degenerate: float = 1e-7

    def __post_init__(self) -> None:
        for name in ("tol_rank", "tol_eq", "tol_degenerate"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")


DEFAULT_TOL = ToleranceConfig()


def as_matrix(M) -> np.ndarray:
    """Coerce input to a finite 2-D complex128 array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got ndim={A.ndim}")
    if A.size == 0:
        raise ShapeMismatch("matrix must have at least one entry")
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise ValueError("matrix entries must be finite")
    return A


def frobenius_norm(M) -> float:
    return float(np.linalg.norm(as_matrix(M)))


def frobenius_distance(M, N) -> float:
    """Frobenius distance between two same-shape matrices."""
    A = as_matrix(M)
    B = as_matrix(N)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(np.linalg.norm(A - B))


def is_hermitian(M, tol: float = 1e-8) -> bool:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        return False
    return np.linalg.norm(A - A.conj().T) <= tol * (1.0 + np.linalg.norm(A))


def is_unitary(M, tol: float = 1e-8) -> bool:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        return False
    return np.linalg.norm(A.conj().T @ A - np.eye(A.shape[0])) <= tol * A.shape[0]


def _normalize_column_phases(V: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is real positive."""
    out = V.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if np.abs(pivot) > 0:
            out[:, k] = col * (np.abs(pivot) / pivot)
    return out


def hermitian_eig(
    M, cfg: ToleranceConfig = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues real and sorted
    descending and eigenvectors as orthonormal columns.  Each column's phase
    is fixed so that its largest-magnitude component is real positive, which
    makes the decomposition reproducible across runs.

    Raises NotHermitian when the input deviates from its adjoint beyond
    ``tol_eq`` (relative), and ConvergenceFailure if the underlying
    iteration fails.
    """
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise NotHermitian(f"matrix is not square: {A.shape}")
    scale = np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) > cfg.tol_eq * (1.0 + scale):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    order = np.argsort(-w, kind="stable")
    return w[order], _normalize_column_phases(V[:, order])


def svd(M) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full singular value decomposition ``M = U @ diag_embed(sigma) @ V†``.

    U is m x m, V is n x n (not its adjoint), sigma has length min(m, n)
    and is sorted descending.
    """
    A = as_matrix(M)
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return U, s, Vh.conj().T


def polar(X, cfg: ToleranceConfig = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``X = U_X @ P`` of a square invertible matrix.

    U_X is unitary and P is Hermitian positive definite.  Raises
    SingularInput when the smallest singular value falls at or below
    ``tol_rank`` times the largest.
    """
    A = as_matrix(X)
    if A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f"polar factorization needs a square matrix, got {A.shape}")
    U, s, V = svd(A)
    if s[-1] <= cfg.tol_rank * s[0]:
        raise SingularInput(
            f"matrix is numerically singular (smin={s[-1]:.3e}, smax={s[0]:.3e})"
        )
    unitary = U @ V.conj().T
    P = (V * s) @ V.conj().T
    P = (P + P.conj().T) / 2.0
    return unitary, P


def rank_tol(M, cfg: ToleranceConfig = DEFAULT_TOL) -> int:
    """Numerical rank: singular values above ``tol_rank`` times the largest."""
    A = as_matrix(M)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > cfg.tol_rank * s[0]))


def trace_power(M, alpha: int) -> complex:
    """Tr(M^alpha) by repeated multiplication."""
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f"trace powers need a square matrix, got {A.shape}")
    if alpha < 1:
        raise ValueError(f"power must be a positive integer, got {alpha}")
    acc = A
    for _ in range(alpha - 1):
        acc = acc @ A
    return complex(np.trace(acc))


def kron(M, N) -> np.ndarray:
    """Kronecker product with block (i, j) equal to M[i, j] * N."""
    return np.kron(as_matrix(M), as_matrix(N))
