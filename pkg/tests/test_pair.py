import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hermpair.altforms import explicit_zero6_converter
from hermpair.atlas import build_alt_block, build_basic, build_pair_block
from hermpair.harness import random_canonical_pair
from hermpair.linalg import random_well_conditioned, signature
from hermpair.pair import (
    DegeneracyViolation,
    HermitianViolation,
    SelfAdjointnessViolation,
    SelfAdjointPair,
    SingularTransition,
    antilinear_power,
    apply_basis_change,
    square_operator,
    symmetric_form_of_pair,
    validate_pair,
)

from conftest import block

ROT = np.array([[0, -1], [1, 0]], dtype=complex)


class TestValidate:
    def test_valid(self):
        p = validate_pair(build_basic("S", 2), ROT)
        assert p.n == 2

    def test_self_adjointness(self):
        with pytest.raises(SelfAdjointnessViolation) as exc:
            validate_pair(np.eye(2), ROT)
        assert exc.value.condition == "self-adjointness"
        assert exc.value.residual > 1

    def test_degenerate(self):
        with pytest.raises(DegeneracyViolation) as exc:
            validate_pair(np.diag([1.0, 0.0]), np.eye(2))
        assert exc.value.condition == "nondegeneracy"

    def test_not_hermitian(self):
        with pytest.raises(HermitianViolation):
            validate_pair(np.array([[1, 1j], [1j, 1]]), np.zeros((2, 2)))

    def test_form_convention(self):
        h = np.array([[1, 2j], [-2j, 3]])
        p = SelfAdjointPair(h, np.zeros((2, 2)))
        e = np.eye(2)
        # H[i, j] = l(e_j, e_i)
        assert p.form(e[1], e[0]) == h[0, 1]


class TestBasisChange:
    def test_identity(self):
        p = validate_pair(build_basic("S", 2), ROT)
        q = apply_basis_change(p, np.eye(2))
        assert np.allclose(q.H, p.H) and np.allclose(q.C, p.C)

    @pytest.mark.parametrize("theta", [0.3, 1.1, -2.0])
    def test_scalar_phase(self, theta):
        p = validate_pair([[2.0]], [[1.5 + 0.5j]])
        q = apply_basis_change(p, [[cmath.exp(1j * theta)]])
        assert np.allclose(q.H, p.H)
        assert np.allclose(q.C, cmath.exp(2j * theta) * p.C)

    def test_explicit_zero6_converter(self):
        p = SelfAdjointPair(*build_pair_block(block(0, 6)))
        q = apply_basis_change(p, explicit_zero6_converter())
        n_alt, m_alt = build_alt_block(block(0, 6))
        assert np.allclose(q.H, n_alt) and np.allclose(q.C, m_alt)

    def test_singular(self):
        p = validate_pair(np.eye(2), np.eye(2))
        with pytest.raises(SingularTransition):
            apply_basis_change(p, [[1, 1], [1, 1]])

    def test_inverse_round_trip(self, rng):
        for seed in range(200):
            p, _ = random_canonical_pair(5, [(4, 2, -1), (1j, 1), (0, 1)], seed=seed)
            m = random_well_conditioned(5, rng)
            q = apply_basis_change(apply_basis_change(p, m), np.linalg.inv(m))
            assert np.linalg.norm(q.H - p.H) <= 1e-6 * np.linalg.norm(p.H)
            assert np.linalg.norm(q.C - p.C) <= 1e-6 * max(np.linalg.norm(p.C), 1)

    @given(st.integers(0, 2 ** 32 - 1))
    def test_group_action(self, seed):
        rng = np.random.default_rng(seed)
        p, _ = random_canonical_pair(4, [(-1, 1), (2.25, 2)], seed=seed)
        m1, m2 = random_well_conditioned(4, rng), random_well_conditioned(4, rng)
        a = apply_basis_change(apply_basis_change(p, m1, validate=False), m2, validate=False)
        b = apply_basis_change(p, m2 @ m1, validate=False)
        assert np.allclose(a.H, b.H, atol=1e-8 * np.linalg.norm(b.H))
        assert np.allclose(a.C, b.C, atol=1e-8 * max(np.linalg.norm(b.C), 1))

    @given(st.integers(0, 2 ** 32 - 1))
    def test_signature_conserved(self, seed):
        rng = np.random.default_rng(seed)
        p, _ = random_canonical_pair(5, [(4, 1, -1), (-4, 1), (0, 2, -1)], seed=seed)
        q = apply_basis_change(p, random_well_conditioned(5, rng))
        assert signature(q.H) == signature(p.H)


class TestSquareAndPowers:
    def test_rotation(self):
        assert np.allclose(square_operator(ROT), -np.eye(2))

    def test_nonreal_block(self):
        b = block(1 + 2j, 2)
        _, c = build_pair_block(b)
        want = np.zeros((4, 4), dtype=complex)
        want[:2, :2] = build_basic("J", 2, b.lambda_sq)
        want[2:, 2:] = build_basic("J", 2, b.lambda_sq.conjugate())
        assert np.allclose(square_operator(c), want)

    def test_zero(self):
        assert np.allclose(square_operator(np.zeros((3, 3))), 0)

    def test_antilinear_power(self, rng):
        c = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        y = x
        for _ in range(3):
            y = c @ y.conj()
        assert np.allclose(antilinear_power(c, 3) @ x.conj(), y)


class TestSymmetricForm:
    def test_rotation(self):
        p = validate_pair(build_basic("S", 2), ROT)
        assert np.allclose(symmetric_form_of_pair(p), np.diag([1, -1]))

    def test_identity(self):
        p = validate_pair(np.eye(3), np.eye(3))
        assert np.allclose(symmetric_form_of_pair(p), np.eye(3))

    def test_matches_definition(self, rng):
        p, _ = random_canonical_pair(4, [(1 + 1j, 1), (-1, 1)], seed=3)
        f = symmetric_form_of_pair(p)
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        # l'(v, w) = l(w, Av)
        assert np.isclose(v @ f @ w, p.form(w, p.act(v)))

    @given(st.integers(0, 2 ** 32 - 1))
    def test_symmetric(self, seed):
        p, _ = random_canonical_pair(6, None, seed=seed)
        f = symmetric_form_of_pair(p)
        assert np.linalg.norm(f - f.T) <= 1e-9 * max(np.linalg.norm(f), 1)
