"""Canonical form (Delta, Gamma Delta) of an in-class coefficient pair.

Writing A = U Dhat V^dagger with Dhat the rectangular diagonal of singular
values, the class condition forces B = U (Gamma Dhat) V^dagger with Gamma a
unitary matrix that is block diagonal over the groups of equal singular
values.  Two pairs are locally unitarily equivalent exactly when their delta
sequences agree and the per-block Gamma spectra agree up to one shared phase;
an explicit witness is assembled from matched block diagonalizations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    BlockExtractionFailure,
    ClassConditionViolated,
    ShapeMismatch,
    WitnessVerificationFailure,
)
from .numerics import DEFAULT_TOL, ToleranceConfig, frobenius_distance, svd
from .states import RankTwoState, apply_local_unitary, assemble, check_class_condition

__all__ = [
    "DeltaBlock",
    "CanonicalForm",
    "LUWitness",
    "CanonicalComparison",
    "unitary_eig",
    "canonicalize",
    "compare_canonical",
    "build_witness",
    "standard_form",
]

WITNESS_RESIDUAL_MAX = 1e-8
GAMMA_UNITARITY_MAX = 1e-7


@dataclass(frozen=True)
class DeltaBlock:
    """Maximal run [start, stop) of equal singular values."""

    start: int
    stop: int
    value: float
    zero: bool

    @property
    def size(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True)
class CanonicalForm:
    delta: np.ndarray
    gamma: np.ndarray
    u: np.ndarray
    v: np.ndarray
    blocks: tuple[DeltaBlock, ...]

    @property
    def m(self) -> int:
        return self.delta.size

    @property
    def n(self) -> int:
        return self.v.shape[0]

    def delta_embedded(self) -> np.ndarray:
        """The m x n rectangular diagonal embedding of delta."""
        out = np.zeros((self.m, self.n), dtype=np.complex128)
        out[: self.m, : self.m] = np.diag(self.delta)
        return out


@dataclass(frozen=True)
class LUWitness:
    u1: np.ndarray
    u2: np.ndarray
    residual: float


@dataclass(frozen=True)
class CanonicalComparison:
    """Outcome of a canonical comparison.

    reason is "delta", "blocks", or "gamma" on failure.  On success chi is
    the shared phase and matching holds, per non-zero block, the permutation
    p with e^(i chi) mu_k matched to mu'_p[k].
    """

    equal: bool
    reason: str | None
    chi: float | None
    matching: tuple[tuple[int, ...], ...] | None
    max_error: float

    def __bool__(self) -> bool:
        return self.equal


def unitary_eig(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a (near-)unitary matrix via a complex Schur form.

    Returns (eigenvalues, eigenvectors) sorted by argument in [0, 2 pi); the
    eigenvector columns are orthonormal because the input is normal.
    """
    T, Z = scipy.linalg.schur(np.asarray(M, dtype=np.complex128), output="complex")
    vals = np.diagonal(T).copy()
    order = np.argsort(np.mod(np.angle(vals), 2.0 * np.pi), kind="stable")
    return vals[order], Z[:, order]


def _partition_delta(delta: np.ndarray, cfg: ToleranceConfig) -> tuple[DeltaBlock, ...]:
    m = delta.size
    scale = delta[0] if delta[0] > 0 else 1.0
    boundaries = [0]
    for i in range(1, m):
        if delta[i - 1] - delta[i] > cfg.tol_degenerate * scale:
            boundaries.append(i)
    boundaries.append(m)
    blocks = []
    for start, stop in zip(boundaries[:-1], boundaries[1:]):
        value = float(np.mean(delta[start:stop]))
        zero = delta[start] <= cfg.tol_rank * scale
        blocks.append(DeltaBlock(start=start, stop=stop, value=value, zero=zero))
    return tuple(blocks)


def canonicalize(state: RankTwoState, cfg: ToleranceConfig = DEFAULT_TOL) -> CanonicalForm:
    """Compute (delta, gamma, u, v) with A = u Dhat v^ and B = u (gamma Dhat) v^.

    Only the class condition is required, not the full state invariants, so
    arbitrary in-class coefficient pairs can be canonicalized.  gamma is
    extracted blockwise from u^ B v and must come out unitary; a failure
    there means the singular-value clustering chose a partition the pair
    does not actually respect.
    """
    check = check_class_condition(state, cfg)
    if not check:
        raise ClassConditionViolated(
            f"class condition fails (residuals {check.residual_gram:.3e}, "
            f"{check.residual_cogram:.3e})"
        )
    u, delta, v = svd(state.A)
    m, n = state.shape.m, state.shape.n
    blocks = _partition_delta(delta, cfg)
    target = u.conj().T @ state.B @ v
    gamma = np.eye(m, dtype=np.complex128)
    for b in blocks:
        if b.zero:
            continue
        sub = target[b.start : b.stop, b.start : b.stop]
        gamma[b.start : b.stop, b.start : b.stop] = sub / delta[b.start : b.stop][None, :]
    unitarity = np.linalg.norm(gamma.conj().T @ gamma - np.eye(m))
    if unitarity > GAMMA_UNITARITY_MAX:
        raise BlockExtractionFailure(
            f"extracted gamma is not unitary (residual {unitarity:.3e}); "
            "singular-value clustering does not match the pair"
        )
    form = CanonicalForm(delta=delta, gamma=gamma, u=u, v=v, blocks=blocks)
    recon_b = np.linalg.norm(state.B - u @ (gamma @ form.delta_embedded()) @ v.conj().T)
    if recon_b > 1e-8:
        raise BlockExtractionFailure(
            f"blockwise gamma does not reproduce B (residual {recon_b:.3e})"
        )
    return form


def _block_eigendata(form: CanonicalForm):
    out = []
    for b in form.blocks:
        if b.zero:
            out.append(None)
        else:
            vals, vecs = unitary_eig(form.gamma[b.start : b.stop, b.start : b.stop])
            out.append((vals, vecs))
    return out


def compare_canonical(
    c1: CanonicalForm, c2: CanonicalForm, cfg: ToleranceConfig = DEFAULT_TOL
) -> CanonicalComparison:
    """Decide canonical equality: equal deltas plus per-block spectral match
    under one shared phase.

    Unitary similarity of the normal blocks reduces to eigenvalue-multiset
    equality, so candidates for the shared phase come from matching the first
    eigenvalue of the first non-zero block against every eigenvalue of its
    counterpart; each candidate is tested greedily across all blocks.
    """
    if c1.m != c2.m:
        raise ShapeMismatch(f"canonical forms have different m: {c1.m} vs {c2.m}")
    if np.any(np.abs(c1.delta - c2.delta) > cfg.tol_eq):
        return CanonicalComparison(
            equal=False,
            reason="delta",
            chi=None,
            matching=None,
            max_error=float(np.max(np.abs(c1.delta - c2.delta))),
        )
    structure1 = [(b.start, b.stop, b.zero) for b in c1.blocks]
    structure2 = [(b.start, b.stop, b.zero) for b in c2.blocks]
    if structure1 != structure2:
        return CanonicalComparison(
            equal=False, reason="blocks", chi=None, matching=None, max_error=np.inf
        )
    eig1 = _block_eigendata(c1)
    eig2 = _block_eigendata(c2)
    live = [k for k, e in enumerate(eig1) if e is not None]
    if not live:
        return CanonicalComparison(
            equal=True, reason=None, chi=0.0, matching=(), max_error=0.0
        )
    first1 = eig1[live[0]][0]
    first2 = eig2[live[0]][0]
    best_error = np.inf
    for candidate in first2:
        chi = float(np.angle(candidate / first1[0]))
        matched, perms, err = _match_all_blocks(eig1, eig2, chi, cfg)
        best_error = min(best_error, err)
        if matched:
            return CanonicalComparison(
                equal=True,
                reason=None,
                chi=float(np.mod(chi, 2.0 * np.pi)),
                matching=perms,
                max_error=err,
            )
    return CanonicalComparison(
        equal=False, reason="gamma", chi=None, matching=None, max_error=best_error
    )


def _match_all_blocks(eig1, eig2, chi, cfg):
    phase = np.exp(1j * chi)
    perms = []
    worst = 0.0
    for e1, e2 in zip(eig1, eig2):
        if e1 is None:
            perms.append(())
            continue
        rotated = phase * e1[0]
        targets = e2[0]
        taken = np.zeros(targets.size, dtype=bool)
        perm = []
        for value in rotated:
            free = np.flatnonzero(~taken)
            dist = np.abs(targets[free] - value)
            j = int(free[int(np.argmin(dist))])
            err = float(np.abs(targets[j] - value))
            worst = max(worst, err)
            if err > cfg.tol_eq:
                return False, None, worst
            taken[j] = True
            perm.append(j)
        perms.append(tuple(perm))
    return True, tuple(perms), worst


def _matching_variants(eig2, matching, cfg, cap=60):
    """The given matching first, then permutations of it inside clusters of
    near-equal target eigenvalues (the only place matching is ambiguous)."""
    yield matching
    options_per_block = []
    for e2, perm in zip(eig2, matching):
        if e2 is None or len(perm) <= 1:
            options_per_block.append([perm])
            continue
        targets = e2[0]
        # cluster target indices by eigenvalue proximity
        clusters = []
        for j in sorted(perm):
            if clusters and np.abs(targets[j] - targets[clusters[-1][-1]]) <= 10 * cfg.tol_eq:
                clusters[-1].append(j)
            else:
                clusters.append([j])
        variants = []
        cluster_perms = [list(itertools.permutations(c)) if len(c) <= 4 else [tuple(c)] for c in clusters]
        for combo in itertools.islice(itertools.product(*cluster_perms), cap):
            mapping = {}
            for original, permuted in zip(clusters, combo):
                mapping.update(dict(zip(original, permuted)))
            variants.append(tuple(mapping[j] for j in perm))
        options_per_block.append(variants)
    for combo in itertools.islice(itertools.product(*options_per_block), cap):
        if combo != matching:
            yield combo


def build_witness(
    state1: RankTwoState,
    c1: CanonicalForm,
    state2: RankTwoState,
    c2: CanonicalForm,
    comparison: CanonicalComparison,
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> LUWitness:
    """Assemble local unitaries carrying state1 onto state2.

    Per non-zero block, w_i maps the eigenbasis of Gamma_i onto the matched
    eigenbasis of Gamma'_i, so w Gamma w^dagger = e^(-i chi) Gamma'.  The
    block-diagonal w then intertwines the two canonical decompositions:
    u1 = u' w u^dagger on the first subsystem and u2 = (v w_ext^dagger
    v'^dagger)^T on the second, with w_ext padding w by the identity.  The
    residual is checked on the assembled density matrices; on failure the
    eigenvalue matching is re-tried over permutations within degenerate
    clusters before giving up.
    """
    if not comparison.equal or comparison.matching is None:
        raise WitnessVerificationFailure("comparison did not produce a matching")
    rho1 = assemble(state1, cfg)
    rho2 = assemble(state2, cfg)
    eig1 = _block_eigendata(c1)
    eig2 = _block_eigendata(c2)
    m, n = c1.m, c1.n
    best = np.inf
    for matching in _matching_variants(eig2, comparison.matching, cfg):
        w = np.eye(m, dtype=np.complex128)
        for b, e1, e2, perm in zip(c1.blocks, eig1, eig2, matching):
            if e1 is None:
                continue
            X = e1[1]
            Y = e2[1][:, list(perm)]
            w[b.start : b.stop, b.start : b.stop] = Y @ X.conj().T
        u1 = c2.u @ w @ c1.u.conj().T
        w_ext = np.eye(n, dtype=np.complex128)
        w_ext[:m, :m] = w
        u2 = (c1.v @ w_ext.conj().T @ c2.v.conj().T).T
        residual = frobenius_distance(
            rho2.rho, apply_local_unitary(rho1, u1, u2, cfg).rho
        )
        if residual <= WITNESS_RESIDUAL_MAX:
            return LUWitness(u1=u1, u2=u2, residual=float(residual))
        best = min(best, residual)
    raise WitnessVerificationFailure(
        f"no matching produced a witness below {WITNESS_RESIDUAL_MAX:.0e} "
        f"(best residual {best:.3e})"
    )


def standard_form(state: RankTwoState, cfg: ToleranceConfig = DEFAULT_TOL) -> RankTwoState:
    """Rotate the state so A becomes Dhat and B becomes Gamma Dhat.

    The result is locally unitarily equivalent to the input (conjugate by
    u^dagger and v^T) and is idempotent up to tolerance on delta and the
    blockwise gamma spectra.
    """
    form = canonicalize(state, cfg)
    dhat = form.delta_embedded()
    return RankTwoState(
        shape=state.shape,
        lambda1=state.lambda1,
        A=dhat,
        B=form.gamma @ dhat,
    )
