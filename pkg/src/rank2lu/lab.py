"""Generators, the two-qubit rotation/reflection family, and the search oracle.

Everything here is deterministic in (parameters, seed).  The in-class
generator works backwards from the canonical form: draw delta and a
commuting block unitary gamma, enforce the eigenvector-orthogonality
constraint Tr(gamma diag(delta)^2) = 0 on gamma's eigenphases, then dress
with Haar unitaries.  The oracle minimizes the Frobenius mismatch of the
conjugated density matrix over both local unitary groups by restarted
finite-difference descent; it certifies equivalence when it finds a witness
and only ever reports absence of one otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import LUWitness, canonicalize, compare_canonical
from .errors import (
    GenerationFailure,
    NotNormalized,
    OrthogonalityUnsatisfiable,
    ShapeMismatch,
    SingularB,
)
from .invariants import compare_fingerprints, fingerprint
from .kernels import expm_i_hermitian, get_descent, param_count, unpack_hermitian
from .numerics import DEFAULT_TOL, ToleranceConfig, as_matrix, rank_tol
from .states import (
    BipartiteShape,
    RankTwoState,
    apply_local_unitary,
    assemble,
    decompose,
)

__all__ = [
    "OracleConfig",
    "OracleResult",
    "haar_unitary",
    "random_class_state",
    "equivalent_pair",
    "inequivalent_pair",
    "slocc_equivalent_pair",
    "rotation_reflection_family",
    "concurrence_2x2",
    "oracle_search",
    "oracle_search_rho",
]


@dataclass(frozen=True)
class OracleConfig:
    """Knobs for the restarted descent.

    The gap between accept_threshold and reject_threshold is deliberate:
    residuals in between are reported as NoWitnessFound with the value
    attached, since a failed optimization certifies nothing.  The stagnation
    parameters stop a restart whose objective has flatlined; early_stop ends
    the restart loop once a witness is already in hand.
    """

    restarts: int = 50
    max_iters: int = 2000
    step_init: float = 0.1
    accept_threshold: float = 1e-6
    reject_threshold: float = 1e-3
    stagnation_window: int = 30
    stagnation_rtol: float = 1e-14
    early_stop: bool = True

    def __post_init__(self) -> None:
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if self.step_init <= 0:
            raise ValueError("step_init must be positive")
        if not self.accept_threshold < self.reject_threshold:
            raise ValueError("accept_threshold must be below reject_threshold")


@dataclass(frozen=True)
class OracleResult:
    best_residual: float
    best_witness: LUWitness
    verdict: str


def _haar(d: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R)
    return Q * (diag / np.abs(diag))


def haar_unitary(d: int, seed: int) -> np.ndarray:
    """Haar-distributed d x d unitary, deterministic in the seed."""
    if d < 1:
        raise ShapeMismatch(f"dimension must be at least 1, got {d}")
    return _haar(d, np.random.default_rng(seed))


def _random_feasible_weights(m: int, rng: np.random.Generator) -> np.ndarray:
    # distinct, well-separated weights that satisfy the polygon inequality
    # max w_k <= sum of the others (otherwise no closing phase assignment)
    if m == 2:
        return np.array([0.5, 0.5])
    for _ in range(500):
        w = np.sort(rng.gamma(3.0, size=m))[::-1]
        w = w / w.sum()
        if w[0] > 0.45 or w[-1] < 0.05:
            continue
        if np.min(-np.diff(np.sqrt(w))) < 0.02:
            continue
        return w
    raise GenerationFailure(f"could not draw feasible weights for m={m}")


def _closing_phases(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Unit-modulus mu with sum(weights * mu) = 0.

    The two heaviest slots are solved by the two-link reach construction
    after all other slots get free random phases; infeasible weight profiles
    raise OrthogonalityUnsatisfiable.
    """
    k = weights.size
    if k < 2:
        raise OrthogonalityUnsatisfiable(
            "orthogonality needs at least two nonzero singular values"
        )
    order = np.argsort(weights)[::-1]
    a, b = order[0], order[1]
    free = order[2:]
    wa, wb = weights[a], weights[b]
    if wa - wb > weights[free].sum() + 1e-12:
        raise OrthogonalityUnsatisfiable(
            "dominant weight exceeds the reach of the remaining ones; "
            "no phase assignment closes the trace"
        )
    mu = np.empty(k, dtype=complex)
    for _ in range(500):
        mu[free] = np.exp(2j * np.pi * rng.uniform(size=free.size))
        t = -np.sum(weights[free] * mu[free])
        r = abs(t)
        if r < 1e-14:
            if abs(wa - wb) > 1e-12:
                continue
            mu[a] = np.exp(2j * np.pi * rng.uniform())
            mu[b] = -mu[a]
            return mu
        cos_alpha = (r * r + wa * wa - wb * wb) / (2.0 * r * wa)
        if abs(cos_alpha) > 1.0:
            continue
        alpha = np.arccos(cos_alpha) * rng.choice([-1.0, 1.0])
        mu[a] = np.exp(1j * (np.angle(t) + alpha))
        mu[b] = (t - wa * mu[a]) / wb
        return mu
    raise OrthogonalityUnsatisfiable(
        "no closing phase assignment found for the requested weights"
    )


def _partition_runs(delta: np.ndarray, cfg: ToleranceConfig):
    """Maximal runs of equal singular values, plus a zero-block cutoff."""
    scale = delta[0] if delta[0] > 0 else 1.0
    bounds = [0]
    for i in range(1, delta.size):
        if delta[i - 1] - delta[i] > cfg.tol_degenerate * scale:
            bounds.append(i)
    bounds.append(delta.size)
    runs = list(zip(bounds[:-1], bounds[1:]))
    zero = [delta[s] <= cfg.tol_rank * scale for s, _ in runs]
    return runs, zero


def _gamma_from_spec(gamma_spec, runs, zero, m, cfg):
    gamma = np.eye(m, dtype=np.complex128)
    if isinstance(gamma_spec, np.ndarray) or (
        not isinstance(gamma_spec, (list, tuple)) and hasattr(gamma_spec, "shape")
    ):
        full = as_matrix(gamma_spec)
        if full.shape != (m, m):
            raise ShapeMismatch(f"gamma must be {m}x{m}, got {full.shape}")
        gamma = full
    else:
        blocks = list(gamma_spec)
        if len(blocks) != len(runs):
            raise ShapeMismatch(
                f"expected {len(runs)} gamma blocks for the delta multiplicities, "
                f"got {len(blocks)}"
            )
        for (start, stop), block in zip(runs, blocks):
            block = as_matrix(block)
            if block.shape != (stop - start, stop - start):
                raise ShapeMismatch(
                    f"gamma block for slots [{start}, {stop}) has shape {block.shape}"
                )
            gamma[start:stop, start:stop] = block
    if np.linalg.norm(gamma.conj().T @ gamma - np.eye(m)) > cfg.tol_eq * m:
        raise ShapeMismatch("requested gamma is not unitary")
    mask = np.zeros((m, m), dtype=bool)
    for start, stop in runs:
        mask[start:stop, start:stop] = True
    if np.linalg.norm(gamma[~mask]) > cfg.tol_eq:
        raise ShapeMismatch("requested gamma is not block diagonal over the delta runs")
    return gamma


def random_class_state(
    shape: BipartiteShape,
    lam: float,
    delta_spec="random",
    gamma_spec="random",
    seed: int = 0,
    cfg: ToleranceConfig = DEFAULT_TOL,
) -> RankTwoState:
    """Random valid in-class state with prescribed or random (delta, gamma).

    Rebuilds A = U Dhat V^dagger and B = U (gamma Dhat) V^dagger with Haar
    U, V.  The orthogonality constraint Tr(gamma diag(delta)^2) = 0 is
    enforced: random gamma eigenphases are projected onto it, an explicitly
    requested (delta, gamma) that violates it raises
    OrthogonalityUnsatisfiable.
    """
    rng = np.random.default_rng(seed)
    m, n = shape.m, shape.n
    if isinstance(delta_spec, str) and delta_spec == "random":
        if m < 2:
            raise OrthogonalityUnsatisfiable(
                "a 1 x n coefficient matrix admits no orthogonal in-class partner"
            )
        weights = _random_feasible_weights(m, rng)
        delta = np.sqrt(weights)
    else:
        delta = np.asarray(delta_spec, dtype=float).reshape(-1)
        if delta.size != m or np.any(delta < 0):
            raise ShapeMismatch(f"delta must be {m} nonnegative reals")
        norm = np.linalg.norm(delta)
        if norm == 0:
            raise ShapeMismatch("delta must not be all zero")
        delta = np.sort(delta / norm)[::-1]
    runs, zero = _partition_runs(delta, cfg)
    weights = delta**2
    support = np.flatnonzero(~np.array([z for (s, t), z in zip(runs, zero) for _ in range(t - s)]))

    if isinstance(gamma_spec, str) and gamma_spec == "random":
        if support.size < 2:
            raise OrthogonalityUnsatisfiable(
                "orthogonality needs at least two nonzero singular values"
            )
        mu_support = _closing_phases(weights[support], rng)
        mu = np.ones(m, dtype=complex)
        mu[support] = mu_support
        gamma = np.eye(m, dtype=np.complex128)
        for (start, stop), is_zero in zip(runs, zero):
            if is_zero:
                continue
            size = stop - start
            if size == 1:
                gamma[start, start] = mu[start]
            else:
                Q = _haar(size, rng)
                gamma[start:stop, start:stop] = (Q * mu[start:stop]) @ Q.conj().T
    else:
        gamma = _gamma_from_spec(gamma_spec, runs, zero, m, cfg)
        closure = np.trace(gamma @ np.diag(weights))
        if abs(closure) > cfg.tol_eq:
            raise OrthogonalityUnsatisfiable(
                f"Tr(gamma diag(delta)^2) = {closure:.3e} does not vanish; the "
                "requested pair cannot be an orthogonal eigenvector pair"
            )

    dhat = np.zeros((m, n), dtype=np.complex128)
    dhat[:m, :m] = np.diag(delta)
    U = _haar(m, rng)
    V = _haar(n, rng)
    A = U @ dhat @ V.conj().T
    B = U @ (gamma @ dhat) @ V.conj().T
    state = RankTwoState(shape=shape, lambda1=lam, A=A, B=B)
    state.validate(cfg)
    return state


def equivalent_pair(
    base: RankTwoState, seed: int, cfg: ToleranceConfig = DEFAULT_TOL
) -> tuple[RankTwoState, LUWitness]:
    """Haar-conjugated image of base plus the generating witness."""
    rng = np.random.default_rng(seed)
    u1 = _haar(base.shape.m, rng)
    u2 = _haar(base.shape.n, rng)
    moved = apply_local_unitary(assemble(base, cfg), u1, u2, cfg)
    image = decompose(moved, cfg)
    residual = float(np.linalg.norm(assemble(image, cfg).rho - moved.rho))
    if residual > 1e-10:
        raise GenerationFailure(f"round trip residual {residual:.3e} too large")
    return image, LUWitness(u1=u1, u2=u2, residual=residual)


def rotation_reflection_family(
    theta: float, gamma_angle: float, lam: float = 0.7
) -> RankTwoState:
    """Two-qubit family: A a rotation over sqrt(2), B a reflection over sqrt(2).

    Both Gram products equal I/2 for every pair of angles, so the family sits
    in the class for all parameters; at theta = 0 (resp. gamma_angle = 0) the
    first (resp. second) eigenvector reduces to a maximally entangled pair.
    """
    c, s = np.cos(theta), np.sin(theta)
    A = np.array([[c, s], [-s, c]], dtype=np.complex128) / np.sqrt(2.0)
    c, s = np.cos(gamma_angle), np.sin(gamma_angle)
    B = np.array([[c, s], [s, -c]], dtype=np.complex128) / np.sqrt(2.0)
    return RankTwoState(shape=BipartiteShape(2, 2), lambda1=lam, A=A, B=B)


def concurrence_2x2(M, cfg: ToleranceConfig = DEFAULT_TOL) -> float:
    """Pure-state concurrence 2 |det M| of a normalized 2 x 2 coefficient matrix."""
    M = as_matrix(M)
    if M.shape != (2, 2):
        raise ShapeMismatch(f"concurrence_2x2 needs a 2x2 matrix, got {M.shape}")
    norm = np.trace(M @ M.conj().T).real
    if abs(norm - 1.0) > cfg.tol_eq:
        raise NotNormalized(f"Tr(M M^) must be 1, got {norm:.12g}")
    return float(2.0 * abs(np.linalg.det(M)))


def _misalignment_floor(z1: np.ndarray, z2: np.ndarray, samples: int = 720) -> float:
    """min over a phase grid of the worst trace-power mismatch."""
    alphas = np.arange(1, z1.size + 1)
    chis = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    rotated = np.exp(1j * np.outer(chis, alphas)) * z2[None, :]
    return float(np.min(np.max(np.abs(rotated - z1[None, :]), axis=1)))


def inequivalent_pair(
    shape: BipartiteShape,
    lam: float,
    seed: int,
    cfg: ToleranceConfig = DEFAULT_TOL,
    margin: float = 0.05,
) -> tuple[RankTwoState, RankTwoState]:
    """Two same-shape, same-lambda, same-delta states certified inequivalent.

    The second state's gamma eigenphases are the complex conjugates of the
    first's (a freshly re-phased mirror of the closure polygon); for a
    non-degenerate polygon no single phase aligns the two spectra.  The pair
    is certified before returning: fingerprints must differ, the canonical
    comparison must fail, and both must fail by at least `margin` so the
    inequivalence is far outside tolerance.

    At m = 2 the orthogonality constraint pins the spectrum to one phase
    orbit (antipodal pairs), every same-lambda in-class pair is equivalent,
    and generation raises GenerationFailure.
    """
    m, n = shape.m, shape.n
    if m < 3:
        raise GenerationFailure(
            "no spectral negatives exist below m=3: equal weights force "
            "antipodal gamma phases, which a global phase always aligns"
        )
    rng = np.random.default_rng(seed)
    for _ in range(50):
        weights = _random_feasible_weights(m, rng)
        delta = np.sqrt(weights)
        mu = _closing_phases(weights, rng)
        mirror = np.exp(2j * np.pi * rng.uniform()) * np.conj(mu)
        states = []
        for phases in (mu, mirror):
            dhat = np.zeros((m, n), dtype=np.complex128)
            dhat[:m, :m] = np.diag(delta)
            gamma = np.diag(phases)
            U = _haar(m, rng)
            V = _haar(n, rng)
            A = U @ dhat @ V.conj().T
            B = U @ (gamma @ dhat) @ V.conj().T
            states.append(RankTwoState(shape=shape, lambda1=lam, A=A, B=B))
        s1, s2 = states
        f1, f2 = fingerprint(s1, cfg), fingerprint(s2, cfg)
        if compare_fingerprints(f1, f2, cfg):
            continue
        if _misalignment_floor(f1.trace_powers, f2.trace_powers) < margin:
            continue
        comparison = compare_canonical(canonicalize(s1, cfg), canonicalize(s2, cfg), cfg)
        if comparison or comparison.max_error < margin:
            continue
        return s1, s2
    raise GenerationFailure(
        f"no certified inequivalent pair found for shape ({m}, {n}) at margin {margin}"
    )


def _random_well_conditioned(d: int, rng: np.random.Generator, cap: float) -> np.ndarray:
    for _ in range(200):
        X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        if np.linalg.cond(X) <= cap:
            return X
    raise GenerationFailure(f"could not draw a matrix with condition number <= {cap}")


def _sqrtm_posdef(H: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh((H + H.conj().T) / 2.0)
    return (Q * np.sqrt(np.clip(w, 0.0, None))) @ Q.conj().T


def slocc_equivalent_pair(
    base: RankTwoState,
    seed: int,
    cond_cap: float = 100.0,
    cfg: ToleranceConfig = DEFAULT_TOL,
):
    """Image of base under random invertible (S, T) plus the ground truth.

    A raw contragredient move S^-1 A T0 spoils normalization and eigenvector
    orthogonality, so T0 is corrected to T0 (I + X)^(1/2) with X Hermitian
    solving the three real linear constraints (equal norms, vanishing
    overlap) exactly; a final common rescale lands both images on unit norm.
    The returned pair satisfies A2 = S^-1 A1 T, B2 = S^-1 B1 T on the nose.
    Returns (state2, p, q, residual) with p = S^-1, q = T^T and the residual
    of reassembling state2's density matrix from the transformed vectors.
    """
    m, n = base.shape.m, base.shape.n
    if m != n:
        raise ShapeMismatch("contragredient moves need m = n")
    if rank_tol(base.B, cfg) != m:
        raise SingularB("base state must have invertible B")
    rng = np.random.default_rng(seed)
    A1, B1 = base.A, base.B
    for _ in range(100):
        S = _random_well_conditioned(m, rng, cap=cond_cap / 5.0)
        T0 = _random_well_conditioned(m, rng, cap=cond_cap / 5.0)
        Sinv = np.linalg.inv(S)
        scale = np.sqrt(
            np.linalg.norm(Sinv @ A1 @ T0) * np.linalg.norm(Sinv @ B1 @ T0)
        )
        T0 = T0 / scale
        G = np.linalg.inv(S @ S.conj().T)
        MA = T0.conj().T @ (A1.conj().T @ G @ A1) @ T0
        MB = T0.conj().T @ (B1.conj().T @ G @ B1) @ T0
        N = T0.conj().T @ (B1.conj().T @ G @ A1) @ T0
        G1 = MA - MB
        G2 = (N + N.conj().T) / 2.0
        G3 = (N - N.conj().T) / 2.0j
        targets = np.array(
            [
                np.trace(MB - MA).real,
                -np.trace(N).real,
                -np.trace(N).imag,
            ]
        )
        basis = [G1, G2, G3]
        gram = np.array(
            [[np.trace(a @ b).real for b in basis] for a in basis]
        )
        if np.linalg.cond(gram) > 1e10:
            continue
        coeffs = np.linalg.solve(gram, targets)
        X = sum(c * g for c, g in zip(coeffs, basis))
        eigenvalues = np.linalg.eigvalsh((X + X.conj().T) / 2.0)
        if eigenvalues.min() < -0.8:
            continue
        T = T0 @ _sqrtm_posdef(np.eye(m) + X)
        A2 = Sinv @ A1 @ T
        B2 = Sinv @ B1 @ T
        norm = np.linalg.norm(A2)
        if abs(np.linalg.norm(B2) - norm) > 1e-9 or abs(np.trace(A2 @ B2.conj().T)) > 1e-9:
            continue
        T = T / norm
        A2 = A2 / norm
        B2 = B2 / norm
        if np.linalg.cond(S) > cond_cap or np.linalg.cond(T) > cond_cap:
            continue
        state2 = RankTwoState(shape=base.shape, lambda1=base.lambda1, A=A2, B=B2)
        state2.validate(cfg)
        p = Sinv
        q = T.T
        moved_a = p @ A1 @ q.T
        moved_b = Sinv @ B1 @ T
        va = moved_a.reshape(-1) / np.linalg.norm(moved_a)
        vb = moved_b.reshape(-1) / np.linalg.norm(moved_b)
        rebuilt = base.lambda1 * np.outer(va, va.conj()) + base.lambda2 * np.outer(
            vb, vb.conj()
        )
        residual = float(np.linalg.norm(rebuilt - assemble(state2, cfg).rho))
        if residual > 1e-8:
            continue
        return state2, p, q, residual
    raise GenerationFailure("no well-conditioned contragredient image found")


def oracle_search(
    s1: RankTwoState,
    s2: RankTwoState,
    cfg: OracleConfig | None = None,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> OracleResult:
    """Brute-force search for local unitaries carrying s1 onto s2.

    Restart 0 starts from the identity (zero Hermitian generators), so equal
    inputs resolve immediately; later restarts draw Gaussian generator
    coordinates from sub-seeds of (seed, restart).  Each restart runs the
    selected descent kernel.  The verdict is Equivalent only when the best
    residual reaches accept_threshold; NoWitnessFound is evidence, never
    proof, of inequivalence.
    """
    if s1.shape != s2.shape:
        raise ShapeMismatch(f"shapes differ: {s1.shape} vs {s2.shape}")
    return oracle_search_rho(
        assemble(s1, tol).rho, assemble(s2, tol).rho, s1.shape, cfg, seed
    )


def oracle_search_rho(
    rho1: np.ndarray,
    rho2: np.ndarray,
    shape: BipartiteShape,
    cfg: OracleConfig | None = None,
    seed: int = 0,
) -> OracleResult:
    """oracle_search on bare density matrices; works for any spectrum."""
    m, n = shape.m, shape.n
    if rho1.shape != (shape.total, shape.total) or rho2.shape != rho1.shape:
        raise ShapeMismatch(
            f"density matrices must be {shape.total} x {shape.total} for shape ({m}, {n})"
        )
    cfg = cfg or OracleConfig()
    rho1 = np.ascontiguousarray(rho1, dtype=np.complex128)
    rho2 = np.ascontiguousarray(rho2, dtype=np.complex128)
    p = param_count(m) + param_count(n)
    descend = get_descent()
    best_f = np.inf
    best_theta = np.zeros(p)
    for k in range(cfg.restarts):
        if k == 0:
            theta0 = np.zeros(p)
        else:
            sub = np.random.default_rng(np.random.SeedSequence(entropy=[seed, k]))
            theta0 = sub.normal(size=p)
        f, theta, _ = descend(
            rho1,
            rho2,
            m,
            n,
            theta0,
            cfg.max_iters,
            cfg.step_init,
            cfg.stagnation_window,
            cfg.stagnation_rtol,
        )
        if f < best_f:
            best_f = f
            best_theta = theta
        if cfg.early_stop and np.sqrt(best_f) <= cfg.accept_threshold:
            break
    best_residual = float(np.sqrt(best_f))
    u1 = expm_i_hermitian(unpack_hermitian(best_theta[: m * m], m))
    u2 = expm_i_hermitian(unpack_hermitian(best_theta[m * m :], n))
    witness = LUWitness(u1=u1, u2=u2, residual=best_residual)
    verdict = "Equivalent" if best_residual <= cfg.accept_threshold else "NoWitnessFound"
    return OracleResult(best_residual=best_residual, best_witness=witness, verdict=verdict)
