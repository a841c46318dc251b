"""Named matrices: S_k, T_k, J_{lam,k}, the pair blocks (H_{lam,k}, C_{lam,k}),
the alternative blocks (N_{lam,k}, M_{lam,k}) and the Catalan-like
coefficients of the Toeplitz square root of a Jordan block."""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np
from scipy.linalg import block_diag

from .linalg import InputError

FAMILIES = ("positive-real", "zero", "negative", "nonreal")


def principal_sqrt(lam_sq: complex) -> complex:
    """exp(Log(z)/2); zero maps to zero."""
    if lam_sq == 0:
        return 0j
    return cmath.exp(0.5 * cmath.log(lam_sq))


def family_of(lam_sq: complex) -> str:
    lam_sq = complex(lam_sq)
    if lam_sq.imag != 0:
        return "nonreal"
    if lam_sq.real > 0:
        return "positive-real"
    if lam_sq.real < 0:
        return "negative"
    return "zero"


@dataclass(frozen=True)
class CanonicalBlock:
    family: str
    lambda_sq: complex
    k: int
    epsilon: int | None = 1

    def __post_init__(self):
        lam_sq = complex(self.lambda_sq)
        if self.family == "nonreal" and lam_sq.imag < 0:
            lam_sq = lam_sq.conjugate()
        if self.family in ("positive-real", "negative", "zero"):
            lam_sq = complex(lam_sq.real, 0.0)
        object.__setattr__(self, "lambda_sq", lam_sq)
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}")
        if family_of(lam_sq) != self.family:
            raise InputError(f"lambda_sq={lam_sq} inconsistent with family {self.family}")
        if int(self.k) != self.k or self.k < 1:
            raise InputError("block parameter k must be a positive integer")
        if self.epsilon not in (1, -1, None):
            raise InputError("epsilon must be +1, -1 or None")

    @property
    def lam(self) -> complex:
        return principal_sqrt(self.lambda_sq)

    @property
    def dim(self) -> int:
        return self.k if self.family in ("positive-real", "zero") else 2 * self.k

    @property
    def real_lambda(self) -> bool:
        return self.family in ("positive-real", "zero")

    @classmethod
    def from_lambda_sq(cls, lambda_sq, k, epsilon=1):
        return cls(family_of(complex(lambda_sq)), lambda_sq, k, epsilon)

    def to_dict(self) -> dict:
        lam = self.lam
        return {
            "family": self.family,
            "lambda": [lam.real, lam.imag],
            "lambda_sq": [self.lambda_sq.real, self.lambda_sq.imag],
            "k": int(self.k),
            "epsilon": self.epsilon,
            "dim": self.dim,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CanonicalBlock":
        ls = d["lambda_sq"]
        return cls(d["family"], complex(ls[0], ls[1]), int(d["k"]), d.get("epsilon", 1))


def build_basic(kind: str, k: int, lam: complex = 0) -> np.ndarray:
    """S_k (anti-identity), T_k (upper shift) or J_{lam,k} = lam I + T_k."""
    if k < 1:
        raise InputError("k must be >= 1")
    if kind == "S":
        return np.fliplr(np.eye(k)).astype(complex)
    if kind == "T":
        return np.eye(k, k=1, dtype=complex)
    if kind == "J":
        return lam * np.eye(k, dtype=complex) + np.eye(k, k=1)
    if kind == "I":
        return np.eye(k, dtype=complex)
    raise InputError(f"unknown basic matrix kind {kind!r}")


def build_pair_block(b: CanonicalBlock):
    """(epsilon * H_{lam,k}, C_{lam,k}); epsilon None is treated as +1."""
    eps = 1 if b.epsilon is None else b.epsilon
    k = b.k
    if b.real_lambda:
        return eps * build_basic("S", k), build_basic("J", k, b.lam.real)
    c = np.zeros((2 * k, 2 * k), dtype=complex)
    c[:k, k:] = build_basic("J", k, b.lambda_sq)
    c[k:, :k] = np.eye(k)
    return eps * build_basic("S", 2 * k), c


def _exact(lam):
    if isinstance(lam, (int, Fraction)) and not isinstance(lam, bool):
        return Fraction(lam)
    if isinstance(lam, float) and np.isfinite(lam):
        f = Fraction(lam)
        if f.denominator <= 2 ** 20:
            return f
    return None


def catalan_coefficients(lam, count: int) -> list:
    """c_0..c_{count-1} with c_0 = lam, c_1 = 1/(2 lam) and
    c_i = -1/(2 lam) * sum_{j=1}^{i-1} c_j c_{i-j}.

    Exact ``Fraction`` values when ``lam`` is an int, Fraction or a float with
    a small dyadic denominator; complex floats otherwise.
    """
    if lam == 0:
        raise InputError("lambda must be nonzero")
    exact = _exact(lam)
    x = exact if exact is not None else complex(lam)
    coeffs = [x]
    if count > 1:
        coeffs.append(1 / (2 * x))
    for i in range(2, count):
        acc = sum(coeffs[j] * coeffs[i - j] for j in range(1, i))
        coeffs.append(-acc / (2 * x))
    return coeffs[:count]


def catalan_closed_form(lam, i: int):
    """(-1)^{i+1} (2 lam)^{1-2i} binom(2i-2, i-1)/i, valid for i >= 1."""
    if i < 1:
        raise InputError("closed form holds for i >= 1")
    exact = _exact(lam)
    x = exact if exact is not None else complex(lam)
    return (-1) ** (i + 1) * (2 * x) ** (1 - 2 * i) * Fraction(comb(2 * i - 2, i - 1), i)


def toeplitz_polynomial(coeffs, k: int | None = None) -> np.ndarray:
    """sum_i coeffs[i] T_k^i as a complex array."""
    k = len(coeffs) if k is None else k
    out = np.zeros((k, k), dtype=complex)
    for i, c in enumerate(coeffs[:k]):
        out += complex(c) * np.eye(k, k=i)
    return out


def jordan_square_root(lam, k: int) -> np.ndarray:
    """Upper-triangular Toeplitz X with X @ X = J_{lam^2, k}."""
    if lam == 0:
        raise InputError("a nilpotent Jordan block has no Toeplitz square root")
    return toeplitz_polynomial(catalan_coefficients(lam, k), k)


def build_alt_block(b: CanonicalBlock):
    """(epsilon * N_{lam,k}, M_{lam,k}) for the alternative canonical form."""
    eps = 1 if b.epsilon is None else b.epsilon
    k = b.k
    S = lambda m: build_basic("S", m)  # noqa: E731
    if b.family == "positive-real":
        return eps * S(k), jordan_square_root(b.lam.real, k)
    if b.family == "zero":
        if k % 2 == 0:
            h = k // 2
            m = 0.5 * np.block([
                [build_basic("J", h, 1), -build_basic("J", h, -1)],
                [build_basic("J", h, -1), -build_basic("J", h, 1)],
            ])
            return eps * block_diag(S(h), -S(h)), m
        h = (k - 1) // 2
        m = np.zeros((k, k), dtype=complex)
        # block rows (h, h, 1), block columns (h, 1, h)
        m[:h, h + 1:] = np.eye(h)
        m[h:2 * h, :h] = np.eye(h)
        n_part = block_diag(S(h), S(h + 1)) if h else S(1)
        return eps * n_part, m
    lam = b.lam
    m = np.zeros((2 * k, 2 * k), dtype=complex)
    m[:k, k:] = jordan_square_root(lam, k)
    m[k:, :k] = jordan_square_root(lam.conjugate(), k)
    if b.family == "negative":
        return eps * block_diag(S(k), -S(k)), m
    return eps * S(2 * k), m


SORT_DIGITS = 8  # rounding keeps the order stable under rounding noise in lambda_sq


def block_sort_key(b: CanonicalBlock):
    eps = 0 if b.epsilon is None else b.epsilon
    return (round(b.lambda_sq.real, SORT_DIGITS), round(b.lambda_sq.imag, SORT_DIGITS), -b.k, -eps)


def sort_blocks(blocks):
    """Order by (Re lam^2, Im lam^2, k descending, epsilon descending); stable."""
    return sorted(blocks, key=block_sort_key)


def assemble(blocks, builder=build_pair_block):
    """Block-diagonal (H, C) for a block list."""
    if not blocks:
        return np.zeros((0, 0), dtype=complex), np.zeros((0, 0), dtype=complex)
    parts = [builder(b) for b in blocks]
    h = block_diag(*[p[0] for p in parts]).astype(complex)
    c = block_diag(*[p[1] for p in parts]).astype(complex)
    return h, c
