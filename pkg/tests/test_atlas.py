from fractions import Fraction
from math import comb

import numpy as np
import pytest

from hermpair.atlas import (
    CanonicalBlock,
    assemble,
    build_alt_block,
    build_basic,
    build_pair_block,
    catalan_closed_form,
    catalan_coefficients,
    jordan_square_root,
    principal_sqrt,
    sort_blocks,
)
from hermpair.linalg import InputError
from hermpair.pair import square_operator, validate_pair
from hermpair.spectral import linear_profile

from conftest import block

ALL_FAMILIES = [4, 2.25, 0, -1, -4, 1j, 1 + 1j, -2 + 1j]


class TestBasic:
    def test_examples(self):
        assert np.array_equal(build_basic("S", 2), [[0, 1], [1, 0]])
        assert np.array_equal(build_basic("T", 2), [[0, 1], [0, 0]])
        assert np.array_equal(build_basic("J", 2, 5), [[5, 1], [0, 5]])

    def test_k_zero(self):
        with pytest.raises(InputError):
            build_basic("S", 0)


class TestBlockRecord:
    def test_family_consistency(self):
        with pytest.raises(InputError):
            CanonicalBlock("positive-real", -1, 1)

    def test_nonreal_stored_upper(self):
        assert block(1 - 1j, 1).lambda_sq == 1 + 1j

    def test_principal_root(self):
        assert np.isclose(principal_sqrt(-4), 2j)
        assert np.isclose(principal_sqrt(1j), np.exp(1j * np.pi / 4))
        assert principal_sqrt(0) == 0

    def test_dim(self):
        assert block(4, 3).dim == 3 and block(-1, 3).dim == 6

    def test_dict_round_trip(self):
        b = block(-2 + 1j, 2)
        assert CanonicalBlock.from_dict(b.to_dict()) == b


class TestPairBlocks:
    def test_positive_scalar(self):
        h, c = build_pair_block(block(4, 1, -1))
        assert np.array_equal(h, [[-1]]) and np.array_equal(c, [[2]])

    def test_negative(self):
        h, c = build_pair_block(block(-1, 1))
        assert np.array_equal(h, build_basic("S", 2))
        assert np.array_equal(c, [[0, -1], [1, 0]])

    @pytest.mark.parametrize("ls", ALL_FAMILIES)
    @pytest.mark.parametrize("k", range(1, 9))
    @pytest.mark.parametrize("eps", [1, -1])
    def test_valid_and_square(self, ls, k, eps):
        b = block(ls, k, eps)
        h, c = build_pair_block(b)
        validate_pair(h, c)
        hc = h @ c
        assert np.array_equal(hc, hc.T)
        sq = square_operator(c)
        if b.real_lambda:
            # J_{lam,k}^2 is only similar to J_{lam^2,k}; for lam = 0 it splits in two
            sizes = [k - k // 2, k // 2] if b.family == "zero" and k > 1 else [k]
            got = linear_profile(sq).clusters
            assert len(got) == 1 and np.isclose(got[0].lambda_sq, b.lambda_sq)
            assert sorted((s for s, m in got[0].jordan_sizes for _ in range(m)), reverse=True) == sizes
        else:
            want = np.zeros((2 * k, 2 * k), dtype=complex)
            want[:k, :k] = build_basic("J", k, b.lambda_sq)
            want[k:, k:] = build_basic("J", k, b.lambda_sq.conjugate())
            assert np.allclose(sq, want, atol=1e-14)

    @pytest.mark.parametrize("ls", [4, 2.25, 9])
    @pytest.mark.parametrize("k", range(1, 9))
    def test_alt_square_is_exact_jordan(self, ls, k):
        _, m = build_alt_block(block(ls, k))
        assert np.allclose(m @ m.conj(), build_basic("J", k, ls), atol=1e-12)


class TestCatalan:
    def test_first_terms(self):
        c = catalan_coefficients(Fraction(3), 2)
        assert c == [3, Fraction(1, 6)]

    def test_half_gives_catalan_numbers(self):
        c = catalan_coefficients(Fraction(1, 2), 7)
        assert [abs(x) for x in c[1:]] == [1, 1, 2, 5, 14, 42]

    def test_square_root_of_j13(self):
        c = catalan_coefficients(1, 3)
        assert c == [1, Fraction(1, 2), Fraction(-1, 8)]
        x = jordan_square_root(1, 3)
        assert np.allclose(x, np.eye(3) + 0.5 * np.eye(3, k=1) - 0.125 * np.eye(3, k=2))
        assert np.allclose(x @ x, build_basic("J", 3, 1))

    def test_k1(self):
        assert np.array_equal(jordan_square_root(1, 1), [[1]])

    @pytest.mark.parametrize("lam", [Fraction(1), Fraction(1, 2), Fraction(-3, 7), Fraction(5, 3)])
    def test_exact_square_identity(self, lam):
        for k in range(1, 13):
            c = catalan_coefficients(lam, k)
            # (sum c_i T^i)^2 = lam^2 I + T, coefficientwise in T
            sq = [sum(c[j] * c[i - j] for j in range(i + 1)) for i in range(k)]
            assert sq == [lam * lam, 1, *([0] * (k - 2))][:k]

    @pytest.mark.parametrize("lam", [Fraction(1), Fraction(2, 3), Fraction(-5, 4)])
    def test_closed_form_matches_recurrence(self, lam):
        c = catalan_coefficients(lam, 12)
        for i in range(1, 12):
            assert catalan_closed_form(lam, i) == c[i]

    def test_unshifted_binomial_disagrees(self):
        # the variant with binom(2i, i)/(i+1) is off by one index
        lam = Fraction(1)
        c = catalan_coefficients(lam, 4)
        literal = [(-1) ** (i + 1) * (2 * lam) ** (1 - 2 * i) * Fraction(comb(2 * i, i), i + 1)
                   for i in range(1, 4)]
        assert literal != c[1:]
        assert literal[0] == Fraction(1, 2) and c[1] == Fraction(1, 2)
        assert literal[1] != c[2]

    def test_complex_lambda_float_path(self):
        lam = 0.7 + 0.4j
        x = jordan_square_root(lam, 5)
        assert np.allclose(x @ x, build_basic("J", 5, lam * lam))

    def test_zero_rejected(self):
        with pytest.raises(InputError):
            catalan_coefficients(0, 3)


class TestAltBlocks:
    def test_n05(self):
        n, _ = build_alt_block(block(0, 5))
        want = np.zeros((5, 5))
        want[:2, :2] = build_basic("S", 2).real
        want[2:, 2:] = build_basic("S", 3).real
        assert np.array_equal(n, want)

    def test_positive_k2(self):
        lam = 1.5
        _, m = build_alt_block(block(lam * lam, 2))
        assert np.allclose(m, [[lam, 1 / (2 * lam)], [0, lam]])

    def test_m06_nilpotent(self):
        _, m = build_alt_block(block(0, 6))
        b = m @ m.conj()
        assert np.allclose(np.linalg.matrix_power(b, 3), 0)
        assert not np.allclose(np.linalg.matrix_power(b, 2), 0)

    @pytest.mark.parametrize("ls", ALL_FAMILIES)
    @pytest.mark.parametrize("k", range(1, 9))
    def test_n_structure(self, ls, k):
        n, m = build_alt_block(block(ls, k))
        assert np.array_equal(n, n.conj().T)
        assert set(np.unique(n.real)) <= {-1, 0, 1} and np.all(n.imag == 0)
        assert np.array_equal(n @ n, np.eye(n.shape[0]))
        validate_pair(n, m)


class TestSort:
    def test_zero_first(self):
        out = sort_blocks([block(4, 1), block(0, 2)])
        assert [b.family for b in out] == ["zero", "positive-real"]

    def test_permutation_invariant(self, rng):
        bs = [block(4, 1), block(0, 2, -1), block(0, 3), block(1j, 1), block(-1, 2), block(0, 2)]
        want = sort_blocks(bs)
        for _ in range(10):
            perm = [bs[i] for i in rng.permutation(len(bs))]
            assert sort_blocks(perm) == want

    def test_k_then_eps_descending(self):
        out = sort_blocks([block(4, 1, -1), block(4, 2, -1), block(4, 1, 1)])
        assert [(b.k, b.epsilon) for b in out] == [(2, -1), (1, 1), (1, -1)]

    def test_stable(self):
        a = CanonicalBlock("zero", 0, 1, None)
        b = CanonicalBlock("zero", 0, 1, None)
        out = sort_blocks([a, b])
        assert out[0] is a and out[1] is b


def test_assemble_dims():
    h, c = assemble([block(4, 2), block(-1, 1), block(0, 1, -1)])
    assert h.shape == c.shape == (5, 5)
    validate_pair(h, c)
