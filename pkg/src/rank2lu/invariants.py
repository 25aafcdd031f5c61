"""Complete invariant set for in-class rank-two states.

The fingerprint couples three layers: the purity of the mixture, the trace
powers z_alpha = Tr((A B^dagger)^alpha) for alpha = 1..m, and the rank
profile of A, B, and the powers of B^dagger A.  Two in-class states are
locally unitarily equivalent exactly when their fingerprints agree, with the
trace sequences compared modulo the eigenvector phase gauge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClassConditionViolated, ShapeMismatch
from .numerics import DEFAULT_TOL, ToleranceConfig, rank_tol, trace_power
from .states import RankTwoState, check_class_condition

__all__ = [
    "Fingerprint",
    "FingerprintComparison",
    "fingerprint",
    "align_phase",
    "compare_fingerprints",
]


@dataclass(frozen=True)
class Fingerprint:
    purity: float
    trace_powers: np.ndarray
    rank_a: int
    rank_b: int
    rank_ba_powers: tuple[int, ...]

    def __post_init__(self) -> None:
        z = np.asarray(self.trace_powers, dtype=np.complex128).reshape(-1)
        object.__setattr__(self, "trace_powers", z)
        object.__setattr__(self, "rank_ba_powers", tuple(int(r) for r in self.rank_ba_powers))
        if z.size != len(self.rank_ba_powers):
            raise ShapeMismatch("trace and rank sequences must share length m")

    @property
    def m(self) -> int:
        return self.trace_powers.size


@dataclass(frozen=True)
class FingerprintComparison:
    """Verdict of a fingerprint comparison.

    diagnosis names the first failing layer: "(i)" purity, "(ii)" trace
    powers, "(iii)" ranks.  chi is the aligning phase when layer (ii) passed.
    """

    equal: bool
    diagnosis: str | None
    chi: float | None

    def __bool__(self) -> bool:
        return self.equal


def fingerprint(state: RankTwoState, cfg: ToleranceConfig = DEFAULT_TOL) -> Fingerprint:
    """Compute the invariant set of an in-class state.

    Raises ClassConditionViolated when A^A != B^B or AA^ != BB^ beyond
    tolerance; the invariants are only complete inside the class.
    """
    state.validate(cfg)
    check = check_class_condition(state, cfg)
    if not check:
        raise ClassConditionViolated(
            f"class condition fails (residuals {check.residual_gram:.3e}, "
            f"{check.residual_cogram:.3e})"
        )
    m = state.shape.m
    ab = state.A @ state.B.conj().T
    z = np.array([trace_power(ab, alpha) for alpha in range(1, m + 1)])
    ba = state.B.conj().T @ state.A
    ranks = []
    power = np.eye(ba.shape[0], dtype=np.complex128)
    for _ in range(m):
        power = power @ ba
        ranks.append(rank_tol(power, cfg))
    purity = state.lambda1**2 + state.lambda2**2
    return Fingerprint(
        purity=float(purity),
        trace_powers=z,
        rank_a=rank_tol(state.A, cfg),
        rank_b=rank_tol(state.B, cfg),
        rank_ba_powers=tuple(ranks),
    )


def align_phase(z, z_prime, cfg: ToleranceConfig = DEFAULT_TOL):
    """Find chi with e^(i alpha chi) z'_alpha = z_alpha for all alpha, or None.

    The eigenvector phase gauge shifts every z'_alpha by alpha times a common
    phase, so sequences are compared on that orbit.  Candidates come from the
    first entry of z above tolerance: its equation has exactly alpha_0
    solutions, each checked against the full sequence.  Two all-zero
    sequences match vacuously at chi = 0.
    """
    z = np.asarray(z, dtype=np.complex128).reshape(-1)
    zp = np.asarray(z_prime, dtype=np.complex128).reshape(-1)
    if z.size != zp.size:
        raise ShapeMismatch(f"sequence lengths differ: {z.size} vs {zp.size}")
    alphas = np.arange(1, z.size + 1)
    significant = np.flatnonzero(np.abs(z) > cfg.tol_eq)
    if significant.size == 0:
        return 0.0 if np.all(np.abs(zp) <= cfg.tol_eq) else None
    a0 = int(significant[0]) + 1
    if np.abs(zp[a0 - 1]) <= cfg.tol_eq:
        return None
    base = np.angle(z[a0 - 1] / zp[a0 - 1]) / a0
    for k in range(a0):
        chi = base + 2.0 * np.pi * k / a0
        if np.all(np.abs(np.exp(1j * alphas * chi) * zp - z) <= cfg.tol_eq):
            return float(np.mod(chi, 2.0 * np.pi))
    return None


def compare_fingerprints(
    f1: Fingerprint, f2: Fingerprint, cfg: ToleranceConfig = DEFAULT_TOL
) -> FingerprintComparison:
    """Decide fingerprint equality layer by layer.

    Purity compares within tol_eq, trace powers up to a common gauge phase,
    ranks by exact integer equality.
    """
    if f1.m != f2.m:
        raise ShapeMismatch(f"fingerprints have different m: {f1.m} vs {f2.m}")
    if abs(f1.purity - f2.purity) > cfg.tol_eq:
        return FingerprintComparison(equal=False, diagnosis="(i)", chi=None)
    chi = align_phase(f1.trace_powers, f2.trace_powers, cfg)
    if chi is None:
        return FingerprintComparison(equal=False, diagnosis="(ii)", chi=None)
    ranks_match = (
        f1.rank_a == f2.rank_a
        and f1.rank_b == f2.rank_b
        and f1.rank_ba_powers == f2.rank_ba_powers
    )
    if not ranks_match:
        return FingerprintComparison(equal=False, diagnosis="(iii)", chi=chi)
    return FingerprintComparison(equal=True, diagnosis=None, chi=chi)
