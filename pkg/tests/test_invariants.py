import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bell_mixture_state, class_state, random_unitary, triangle_mu
from rank2lu.errors import ClassConditionViolated, ShapeMismatch
from rank2lu.invariants import align_phase, compare_fingerprints, fingerprint
from rank2lu.states import (
    BipartiteShape,
    RankTwoState,
    apply_local_unitary,
    assemble,
    decompose,
)

SQ2 = np.sqrt(2.0)


def rotation_over_sqrt2(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex) / SQ2


def reflection_over_sqrt2(gamma):
    c, s = np.cos(gamma), np.sin(gamma)
    return np.array([[c, s], [s, -c]], dtype=complex) / SQ2


class TestFingerprint:
    def test_bell_mixture(self):
        f = fingerprint(bell_mixture_state())
        assert f.purity == pytest.approx(0.58, abs=1e-12)
        assert np.allclose(f.trace_powers, [0.0, 0.5], atol=1e-12)
        assert f.rank_a == 2 and f.rank_b == 2
        assert f.rank_ba_powers == (2, 2)

    @pytest.mark.parametrize("theta", [0.0, 0.4, 1.7])
    @pytest.mark.parametrize("gamma", [0.0, 0.9])
    def test_rotation_reflection_family_matches_bell(self, theta, gamma):
        state = RankTwoState(
            shape=BipartiteShape(2, 2),
            lambda1=0.7,
            A=rotation_over_sqrt2(theta),
            B=reflection_over_sqrt2(gamma),
        )
        f = fingerprint(state)
        assert f.purity == pytest.approx(0.58, abs=1e-12)
        # (A B^)^2 = I/4 for every theta, gamma: z = (0, 1/2) on the nose
        assert np.allclose(f.trace_powers, [0.0, 0.5], atol=1e-12)
        assert compare_fingerprints(f, fingerprint(bell_mixture_state()))

    def test_half_mixture_direct_input(self):
        state = bell_mixture_state()
        state = RankTwoState(shape=state.shape, lambda1=0.5, A=state.A, B=state.B)
        assert fingerprint(state).purity == pytest.approx(0.5, abs=1e-12)

    def test_three_level_frozen_values(self):
        state = class_state([0.5, 0.3, 0.2], [1.0, -1.0, -1.0])
        f = fingerprint(state)
        assert f.purity == pytest.approx(0.58, abs=1e-12)
        assert np.allclose(f.trace_powers, [0.0, 0.38, 0.09], atol=1e-12)
        assert f.rank_a == 3 and f.rank_b == 3
        assert f.rank_ba_powers == (3, 3, 3)

    def test_rejects_out_of_class(self):
        A = np.eye(2, dtype=complex) / SQ2
        B = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        state = RankTwoState(shape=BipartiteShape(2, 2), lambda1=0.7, A=A, B=B)
        with pytest.raises(ClassConditionViolated):
            fingerprint(state)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=40, deadline=None)
    def test_purity_range_and_trace_bound(self, seed):
        rng = np.random.default_rng(seed)
        lam = float(rng.uniform(0.55, 0.95))
        state = class_state(
            [0.4, 0.35, 0.25], triangle_mu(0.4, 0.35, 0.25), lam=lam, rng=rng
        )
        f = fingerprint(state)
        assert 0.5 < f.purity < 1.0
        assert np.all(np.abs(f.trace_powers) <= 1.0 + 1e-12)
        # rank sequences never increase with the power
        assert all(
            f.rank_ba_powers[i] >= f.rank_ba_powers[i + 1]
            for i in range(len(f.rank_ba_powers) - 1)
        )

    def test_purity_matches_assembled_density_matrix(self):
        state = class_state([0.5, 0.3, 0.2], [1.0, -1.0, -1.0], lam=0.64)
        rho = assemble(state).rho
        assert fingerprint(state).purity == pytest.approx(
            np.trace(rho @ rho).real, abs=1e-10
        )


class TestAlignPhase:
    def test_equal_sequences(self):
        assert align_phase([0.0, 0.5], [0.0, 0.5]) == pytest.approx(0.0)

    def test_opposite_sign(self):
        chi = align_phase([0.0, 0.5], [0.0, -0.5])
        assert chi is not None
        assert min(abs(chi - np.pi / 2), abs(chi - 3 * np.pi / 2)) <= 1e-12

    def test_modulus_mismatch(self):
        assert align_phase([0.0, 0.5], [0.0, 1.0 / 3.0]) is None

    def test_both_zero(self):
        assert align_phase([0.0, 0.0], [0.0, 0.0]) == pytest.approx(0.0)

    def test_zero_against_nonzero(self):
        assert align_phase([0.0, 0.0], [0.0, 0.5]) is None

    def test_length_mismatch(self):
        with pytest.raises(ShapeMismatch):
            align_phase([0.0], [0.0, 0.5])

    @given(
        st.integers(min_value=0, max_value=10_000),
        st.floats(min_value=0.0, max_value=2 * np.pi),
    )
    @settings(max_examples=60, deadline=None)
    def test_recovers_applied_phase(self, seed, chi_true):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 5))
        z = rng.normal(size=m) + 1j * rng.normal(size=m)
        alphas = np.arange(1, m + 1)
        zp = z * np.exp(-1j * alphas * chi_true)
        chi = align_phase(z, zp)
        assert chi is not None
        assert np.all(np.abs(np.exp(1j * alphas * chi) * zp - z) <= 1e-8)


class TestCompareFingerprints:
    def test_purity_mismatch_diagnosed_first(self):
        base = bell_mixture_state()
        other = RankTwoState(shape=base.shape, lambda1=0.6, A=base.A, B=base.B)
        out = compare_fingerprints(fingerprint(base), fingerprint(other))
        assert not out
        assert out.diagnosis == "(i)"

    def test_trace_mismatch(self):
        f1 = fingerprint(class_state([0.5, 0.3, 0.2], [1.0, -1.0, -1.0]))
        f2 = fingerprint(
            class_state([0.4, 0.35, 0.25], triangle_mu(0.4, 0.35, 0.25))
        )
        # same purity by construction; |z_2| <= 0.345 < 0.38 forces a clash
        assert abs(f1.purity - f2.purity) <= 1e-12
        assert abs(abs(f1.trace_powers[1]) - abs(f2.trace_powers[1])) > 1e-3
        out = compare_fingerprints(f1, f2)
        assert not out
        assert out.diagnosis == "(ii)"

    def test_rank_mismatch_at_tolerance_boundary(self):
        # third weight 1e-10 sits below tol_eq in every trace power but its
        # singular value 1e-5 is far above tol_rank: only layer (iii) sees it
        eps = 1e-10
        f_full = fingerprint(class_state([0.5, 0.5 - eps, eps], [1.0, -1.0, -1.0]))
        f_def = fingerprint(class_state([0.5, 0.5, 0.0], [1.0, -1.0, 1.0]))
        assert f_full.rank_a == 3 and f_def.rank_a == 2
        out = compare_fingerprints(f_def, f_full)
        assert not out
        assert out.diagnosis == "(iii)"

    def test_shape_mismatch(self):
        f1 = fingerprint(bell_mixture_state())
        f2 = fingerprint(class_state([0.5, 0.3, 0.2], [1.0, -1.0, -1.0]))
        with pytest.raises(ShapeMismatch):
            compare_fingerprints(f1, f2)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=60, deadline=None)
    def test_local_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        if seed % 2 == 0:
            state = class_state(
                [0.4, 0.35, 0.25], triangle_mu(0.4, 0.35, 0.25), n=4, rng=rng
            )
        else:
            state = bell_mixture_state()
        m, n = state.shape.m, state.shape.n
        rho = apply_local_unitary(
            assemble(state), random_unitary(m, rng), random_unitary(n, rng)
        )
        transformed = decompose(rho)
        out = compare_fingerprints(fingerprint(state), fingerprint(transformed))
        assert out
        assert out.chi is not None
