"""Bipartite state model.

A rank-two mixed state on H1 (x) H2 is held either as its full density matrix
or as the triple (lambda1, A, B) of eigenvalue weight plus the two coefficient
matrices of its eigenvectors.  Amplitudes are flattened row-major over
(subsystem-1 index, subsystem-2 index), which makes the action of a product
unitary U1 (x) U2 on a coefficient matrix exactly A -> U1 @ A @ U2.T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSpectrum,
    InvalidState,
    NotUnitary,
    RankNotTwo,
    ShapeMismatch,
)
from .numerics import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    hermitian_eig,
    is_unitary,
    kron,
)

__all__ = [
    "BipartiteShape",
    "DensityMatrix",
    "RankTwoState",
    "WMatrix",
    "ClassCheck",
    "gauge_phase",
    "vec_to_matrix",
    "matrix_to_vec",
    "decompose",
    "assemble",
    "check_class_condition",
    "build_w_matrix",
    "apply_local_unitary",
]


@dataclass(frozen=True)
class BipartiteShape:
    """Subsystem dimensions (m, n) with the convention m <= n."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if not (isinstance(self.m, int) and isinstance(self.n, int)):
            raise ShapeMismatch("subsystem dimensions must be integers")
        if not 1 <= self.m <= self.n:
            raise ShapeMismatch(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if self.m * self.n < 2:
            raise ShapeMismatch("total dimension must be at least 2")

    @property
    def total(self) -> int:
        return self.m * self.n


@dataclass(frozen=True)
class DensityMatrix:
    shape: BipartiteShape
    rho: np.ndarray

    def __post_init__(self) -> None:
        rho = as_matrix(self.rho)
        d = self.shape.total
        if rho.shape != (d, d):
            raise ShapeMismatch(f"density matrix must be {d}x{d}, got {rho.shape}")
        object.__setattr__(self, "rho", rho)

    def validate(self, cfg: ToleranceConfig = DEFAULT_TOL) -> None:
        """Check Hermiticity, unit trace, and positive semidefiniteness."""
        rho = self.rho
        if np.linalg.norm(rho - rho.conj().T) > cfg.tol_eq * (1.0 + np.linalg.norm(rho)):
            raise InvalidState("density matrix is not Hermitian within tolerance")
        if abs(np.trace(rho) - 1.0) > cfg.tol_eq:
            raise InvalidState(f"trace must be 1, got {np.trace(rho):.12g}")
        sym = (rho + rho.conj().T) / 2.0
        if np.linalg.eigvalsh(sym).min() < -cfg.tol_eq:
            raise InvalidState("density matrix has a negative eigenvalue beyond tolerance")


@dataclass(frozen=True)
class RankTwoState:
    """Weight lambda1 on the first eigenvector plus coefficient matrices A, B.

    lambda2 is derived as 1 - lambda1.  Construction checks only structure;
    call validate() for the normalization and orthogonality invariants.
    decompose() always returns lambda1 >= lambda2, but directly built states
    may order the weights either way.
    """

    shape: BipartiteShape
    lambda1: float
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self) -> None:
        if not 0.0 < self.lambda1 < 1.0:
            raise InvalidState(f"lambda1 must lie in (0, 1), got {self.lambda1}")
        A = as_matrix(self.A)
        B = as_matrix(self.B)
        expected = (self.shape.m, self.shape.n)
        if A.shape != expected or B.shape != expected:
            raise ShapeMismatch(
                f"coefficient matrices must be {expected}, got {A.shape} and {B.shape}"
            )
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def lambda2(self) -> float:
        return 1.0 - self.lambda1

    def validate(self, cfg: ToleranceConfig = DEFAULT_TOL) -> None:
        norm_a = np.trace(self.A @ self.A.conj().T).real
        norm_b = np.trace(self.B @ self.B.conj().T).real
        overlap = np.trace(self.A @ self.B.conj().T)
        if abs(norm_a - 1.0) > cfg.tol_eq:
            raise InvalidState(f"Tr(A A^) must be 1, got {norm_a:.12g}")
        if abs(norm_b - 1.0) > cfg.tol_eq:
            raise InvalidState(f"Tr(B B^) must be 1, got {norm_b:.12g}")
        if abs(overlap) > cfg.tol_eq:
            raise InvalidState(f"Tr(A B^) must vanish, got |{abs(overlap):.3e}|")


@dataclass(frozen=True)
class WMatrix:
    """Block matrix [[0, A], [B^dagger, 0]] used for the normality test."""

    m: int
    n: int
    w: np.ndarray

    def __post_init__(self) -> None:
        w = as_matrix(self.w)
        d = self.m + self.n
        if w.shape != (d, d):
            raise ShapeMismatch(f"W must be {d}x{d}, got {w.shape}")
        if np.any(w[: self.m, : self.m] != 0) or np.any(w[self.m :, self.m :] != 0):
            raise InvalidState("diagonal blocks of W must be exactly zero")
        object.__setattr__(self, "w", w)

    def normality_residual(self) -> float:
        wd = self.w.conj().T
        return float(np.linalg.norm(wd @ self.w - self.w @ wd))


@dataclass(frozen=True)
class ClassCheck:
    """Outcome of the class-condition test with both residuals."""

    ok: bool
    residual_gram: float
    residual_cogram: float

    def __bool__(self) -> bool:
        return self.ok


def gauge_phase(M: np.ndarray) -> np.ndarray:
    """Rotate a matrix by a global phase so its largest-magnitude entry is
    real positive.  Ties break at the lowest row-major index."""
    A = as_matrix(M)
    flat = A.reshape(-1)
    pivot = flat[int(np.argmax(np.abs(flat)))]
    if np.abs(pivot) == 0:
        return A.copy()
    return A * (np.abs(pivot) / pivot)


def vec_to_matrix(v, shape: BipartiteShape) -> np.ndarray:
    """Reshape a state vector into its m x n coefficient matrix."""
    arr = np.asarray(v, dtype=np.complex128).reshape(-1)
    if arr.size != shape.total:
        raise ShapeMismatch(f"vector length {arr.size} does not match {shape.total}")
    return arr.reshape(shape.m, shape.n)


def matrix_to_vec(M) -> np.ndarray:
    """Flatten a coefficient matrix back into a state vector (row-major)."""
    return as_matrix(M).reshape(-1)


def decompose(rho: DensityMatrix, cfg: ToleranceConfig = DEFAULT_TOL) -> RankTwoState:
    """Spectral decomposition of a rank-two density matrix into (lambda1, A, B).

    Eigenvalues come out descending, so lambda1 >= lambda2.  Coefficient
    matrices are gauge-fixed by gauge_phase.  Raises RankNotTwo unless
    exactly two eigenvalues exceed tol_eq, and DegenerateSpectrum when the
    two weights are closer than tol_degenerate (the eigenbasis is then not
    unique and no canonical choice exists).
    """
    rho.validate(cfg)
    w, V = hermitian_eig(rho.rho, cfg)
    significant = np.flatnonzero(w > cfg.tol_eq)
    if significant.size != 2:
        raise RankNotTwo(f"expected 2 eigenvalues above tolerance, found {significant.size}")
    l1, l2 = float(w[significant[0]]), float(w[significant[1]])
    if abs(l1 - l2) < cfg.tol_degenerate:
        raise DegenerateSpectrum(
            f"eigenvalue gap {abs(l1 - l2):.3e} below tol_degenerate; eigenvectors not unique"
        )
    A = gauge_phase(vec_to_matrix(V[:, significant[0]], rho.shape))
    B = gauge_phase(vec_to_matrix(V[:, significant[1]], rho.shape))
    return RankTwoState(shape=rho.shape, lambda1=l1, A=A, B=B)


def assemble(state: RankTwoState, cfg: ToleranceConfig = DEFAULT_TOL) -> DensityMatrix:
    """Rebuild the density matrix lambda1 |v1><v1| + lambda2 |v2><v2|."""
    state.validate(cfg)
    v1 = matrix_to_vec(state.A)
    v2 = matrix_to_vec(state.B)
    rho = state.lambda1 * np.outer(v1, v1.conj()) + state.lambda2 * np.outer(v2, v2.conj())
    return DensityMatrix(shape=state.shape, rho=(rho + rho.conj().T) / 2.0)


def check_class_condition(
    state: RankTwoState, cfg: ToleranceConfig = DEFAULT_TOL
) -> ClassCheck:
    """Test A^A = B^B and AA^ = BB^ in Frobenius norm."""
    A, B = state.A, state.B
    residual_gram = float(np.linalg.norm(A.conj().T @ A - B.conj().T @ B))
    residual_cogram = float(np.linalg.norm(A @ A.conj().T - B @ B.conj().T))
    ok = residual_gram <= cfg.tol_eq and residual_cogram <= cfg.tol_eq
    return ClassCheck(ok=ok, residual_gram=residual_gram, residual_cogram=residual_cogram)


def build_w_matrix(A, B) -> WMatrix:
    """Embed (A, B) into the block matrix [[0, A], [B^dagger, 0]].

    This matrix is normal exactly when the class condition holds, since
    W^W - WW^ = diag(BB^ - AA^, A^A - B^B).
    """
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise ShapeMismatch(f"A and B must share a shape, got {A.shape} and {B.shape}")
    m, n = A.shape
    w = np.zeros((m + n, m + n), dtype=np.complex128)
    w[:m, m:] = A
    w[m:, :m] = B.conj().T
    return WMatrix(m=m, n=n, w=w)


def apply_local_unitary(
    rho: DensityMatrix, U1, U2, cfg: ToleranceConfig = DEFAULT_TOL
) -> DensityMatrix:
    """Conjugate rho by the product unitary U1 (x) U2."""
    U1 = as_matrix(U1)
    U2 = as_matrix(U2)
    m, n = rho.shape.m, rho.shape.n
    if U1.shape != (m, m) or U2.shape != (n, n):
        raise ShapeMismatch(
            f"local unitaries must be {m}x{m} and {n}x{n}, got {U1.shape} and {U2.shape}"
        )
    if not is_unitary(U1, cfg.tol_eq) or not is_unitary(U2, cfg.tol_eq):
        raise NotUnitary("local transformation matrices must be unitary within tolerance")
    U = kron(U1, U2)
    out = U @ rho.rho @ U.conj().T
    return DensityMatrix(shape=rho.shape, rho=(out + out.conj().T) / 2.0)
