import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import block_diag

from hermpair.atlas import build_basic
from hermpair.glr import GlrBlock, build_glr_block, glr_canonicalize, pair_blocks_to_glr
from hermpair.harness import random_canonical_pair, random_spec
from hermpair.linalg import random_well_conditioned
from hermpair.normalizers import glr_seed_vector
from hermpair.pair import SelfAdjointnessViolation, square_operator

from conftest import block


def conjugate(h, b, m):
    minv = np.linalg.inv(m)
    return minv.conj().T @ h @ minv, m @ b @ minv


def pairing(h, b, lam_sq, s1, v):
    top = np.linalg.matrix_power(b - lam_sq * np.eye(len(v)), s1 - 1)
    return np.vdot(v, h @ top @ v)


class TestCanonicalize:
    @pytest.mark.parametrize("eta, k", [(2.0, 3), (-1.0, 2), (0.0, 2), (1 + 2j, 2)])
    def test_fixed_point(self, eta, k):
        h, b = build_glr_block(GlrBlock(eta, k, 1))
        form = glr_canonicalize(h, b)
        assert form.blocks == [GlrBlock(eta, k, 1)]
        assert np.allclose(form.H_can, h) and np.allclose(form.C_can, b)
        assert form.residuals["passed"]

    def test_fixed_point_transition_is_identity(self):
        h, b = build_glr_block(GlrBlock(3.0, 3, 1))
        assert np.allclose(glr_canonicalize(h, b).transition, np.eye(3), atol=1e-9)

    def test_scalar(self):
        form = glr_canonicalize([[-1.0]], [[5.0]])
        assert form.blocks == [GlrBlock(5, 1, -1)]

    def test_random_conjugate(self, rng):
        h = block_diag(build_basic("S", 2), -build_basic("S", 3))
        b = block_diag(build_basic("J", 2, 2), build_basic("J", 3, 2))
        h2, b2 = conjugate(h, b, random_well_conditioned(5, rng))
        form = glr_canonicalize(h2, b2)
        assert [(b.k, b.epsilon) for b in form.blocks] == [(3, -1), (2, 1)]
        assert np.allclose([b.eta for b in form.blocks], 2)

    def test_nonreal_conjugate(self, rng):
        h, b = build_glr_block(GlrBlock(1 + 1j, 2, 1))
        h2, b2 = conjugate(h, b, random_well_conditioned(4, rng))
        (blk,) = glr_canonicalize(h2, b2).blocks
        assert np.isclose(blk.eta, 1 + 1j) and blk.k == 2

    def test_rejects_non_selfadjoint(self):
        with pytest.raises(SelfAdjointnessViolation):
            glr_canonicalize(np.eye(2), [[0, 1], [0, 0]])

    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 7))
    def test_matches_pair_prediction(self, seed, n):
        rng = np.random.default_rng(seed)
        palette = (4.0, 1.0, -1.0, -4.0, 1j, 1 + 1j, 2.25)
        p, truth = random_canonical_pair(n, random_spec(n, rng, palette=palette), seed=seed)
        form = glr_canonicalize(p.H, square_operator(p.C))
        want = pair_blocks_to_glr(truth)
        got = form.blocks
        assert [(b.k, b.epsilon) for b in got] == [(b.k, b.epsilon) for b in want]
        assert np.allclose([b.eta for b in got], [b.eta for b in want], atol=1e-6)


class TestSeed:
    def test_second_coordinate(self):
        h, b = build_basic("S", 2), build_basic("J", 2, 4)
        assert pairing(h, b, 4, 2, np.array([0, 1])) == 1
        v = glr_seed_vector(h, b, 4, 2)
        assert abs(pairing(h, b, 4, 2, v)) > 1e-3

    def test_scalar(self):
        v = glr_seed_vector(np.eye(1), np.array([[3.0]]), 3, 1)
        assert np.isclose(abs(pairing(np.eye(1), np.array([[3.0]]), 3, 1, v)), np.vdot(v, v).real)

    @given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
    def test_homogeneity(self, s):
        h, b = build_basic("S", 3), build_basic("J", 3, 2)
        v = np.array([0.3, -1.0 + 0.5j, 2.0])
        assert np.isclose(pairing(h, b, 2, 3, s * v), abs(s) ** 2 * pairing(h, b, 2, 3, v))

    def test_rejects_nonreal(self):
        from hermpair.linalg import InputError

        with pytest.raises(InputError):
            glr_seed_vector(np.eye(1), np.eye(1), 1j, 1)


def test_negative_block_splits():
    assert pair_blocks_to_glr([block(-4, 2)]) == [GlrBlock(-4, 2, 1), GlrBlock(-4, 2, -1)]
