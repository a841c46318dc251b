import numpy as np
import pytest
from hypothesis import given, strategies as st

from hermpair.atlas import assemble, build_basic, build_pair_block
from hermpair.canonicalizer import (
    CanonicalForm,
    canonicalize_operator,
    canonicalize_pair,
    verify_canonical,
    witness_form,
)
from hermpair.harness import block_keys, policy_epsilon, random_canonical_pair
from hermpair.linalg import InputError
from hermpair.pair import SelfAdjointPair, validate_pair

from conftest import block

ATLAS = [(4, 1, 1), (4, 3, -1), (2.25, 2, 1), (0, 1, -1), (0, 2, 1), (0, 3, -1), (0, 4, 1),
         (-1, 1, 1), (-4, 2, 1), (1j, 1, 1), (1 + 1j, 2, 1), (-2 + 1j, 3, 1)]


def lk(blocks):
    return sorted((b.family, round(b.lambda_sq.real, 6), round(b.lambda_sq.imag, 6), b.k) for b in blocks)


class TestPair:
    @pytest.mark.parametrize("spec", ATLAS)
    def test_atlas_fixed_point(self, spec):
        b = block(*spec)
        form = canonicalize_pair(SelfAdjointPair(*build_pair_block(b)))
        assert form.blocks == [b]
        assert form.residuals["passed"]
        assert max(form.residuals["residual_H"], form.residuals["residual_C"]) < 1e-9

    def test_zero_signature(self):
        form = canonicalize_pair((np.diag([1.0, -1.0]), np.zeros((2, 2))))
        assert form.blocks == [block(0, 1, 1), block(0, 1, -1)]

    def test_scalar(self):
        form = canonicalize_pair(([[-3.0]], [[2j]]))
        assert form.blocks == [block(4, 1, -1)]
        assert np.isclose(form.blocks[0].lam, 2)

    def test_empty(self):
        form = canonicalize_pair(SelfAdjointPair(np.zeros((0, 0)), np.zeros((0, 0))))
        assert form.blocks == []

    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 8))
    def test_round_trip(self, seed, n):
        p, truth = random_canonical_pair(n, None, seed=seed)
        form = canonicalize_pair(p)
        assert form.residuals["passed"]
        assert block_keys(form.blocks) == block_keys(truth)
        assert sum(b.dim for b in form.blocks) == n

    @given(st.integers(0, 2 ** 32 - 1))
    def test_idempotent(self, seed):
        p, _ = random_canonical_pair(6, None, seed=seed)
        form = canonicalize_pair(p)
        again = canonicalize_pair(SelfAdjointPair(form.H_can, form.C_can))
        assert block_keys(again.blocks) == block_keys(form.blocks)
        assert np.allclose(again.H_can, form.H_can) and np.allclose(again.C_can, form.C_can)

    def test_blocks_are_sorted(self):
        p, _ = random_canonical_pair(7, [(4, 1), (0, 2), (1j, 1), (-1, 1)], seed=0)
        ls = [b.lambda_sq for b in canonicalize_pair(p).blocks]
        assert ls == sorted(ls, key=lambda z: (z.real, z.imag))

    def test_sign_policy(self):
        p, truth = random_canonical_pair(6, [(4, 1, -1), (0, 2, -1), (0, 1, -1), (-1, 1, -1)], seed=5)
        got = canonicalize_pair(p).blocks
        assert [(b.family, b.k, b.epsilon) for b in got] == [
            (b.family, b.k, policy_epsilon(b)) for b in truth]


class TestVerify:
    def test_identity_on_canonical(self):
        h, c = assemble([block(4, 2), block(1j, 1)])
        form = CanonicalForm("standard", [], np.eye(4), h, c)
        r = verify_canonical(SelfAdjointPair(h, c), form)
        assert r["passed"] and r["residual_H"] < 1e-14 and r["residual_C"] < 1e-14

    def test_corrupted_transition(self):
        p, _ = random_canonical_pair(5, None, seed=3)
        form = canonicalize_pair(p)
        form.transition = form.transition.copy()
        form.transition[0, 0] += 1
        assert not verify_canonical(p, form)["passed"]

    def test_dimension_mismatch(self):
        h, c = assemble([block(4, 2)])
        with pytest.raises(InputError):
            verify_canonical(SelfAdjointPair(h, c), CanonicalForm("standard", [], np.eye(3), h, c))

    def test_many_random(self):
        for seed in range(100):
            p, _ = random_canonical_pair(6, None, seed=1000 + seed)
            assert verify_canonical(p, canonicalize_pair(p))["passed"]


class TestOperator:
    def test_real_jordan(self):
        (b,) = canonicalize_operator(build_basic("J", 2, 3)).blocks
        assert (b.family, b.lambda_sq, b.k, b.epsilon) == ("positive-real", 9, 2, None)

    def test_rotation(self):
        (b,) = canonicalize_operator([[0, -1], [1, 0]]).blocks
        assert np.isclose(b.lam, 1j) and b.k == 1

    def test_no_form(self):
        form = canonicalize_operator(build_basic("J", 3, 0))
        assert form.H_can is None and form.residuals["passed"]

    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
    def test_cross_check_with_witness(self, seed, n):
        rng = np.random.default_rng(seed)
        c = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
        h = witness_form(c)
        validate_pair(h, c)
        assert lk(canonicalize_operator(c).blocks) == lk(canonicalize_pair((h, c)).blocks)

    @given(st.integers(0, 2 ** 32 - 1))
    def test_structured(self, seed):
        p, truth = random_canonical_pair(7, None, seed=seed)
        assert lk(canonicalize_operator(p.C).blocks) == lk(truth)


class TestWitness:
    @pytest.mark.parametrize("lam, k", [(2.0, 3), (0.5, 1), (1.0, 4)])
    def test_jordan(self, lam, k):
        assert np.allclose(witness_form(build_basic("J", k, lam)), build_basic("S", k))

    def test_zero(self):
        assert np.allclose(witness_form(np.zeros((2, 2))), np.eye(2))
