"""Canonical form of a Hermitian form with a self-adjoint *linear* operator.

Blocks are (+-S_k, J_{eta,k}) for real eta and (S_2k, J_{eta,k} + J_{conj eta,k})
for nonreal eta. The construction reuses the chain / Hankel / Toeplitz
machinery of the positive-real normalizer with B in place of A - lambda.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .atlas import SORT_DIGITS, build_basic
from .canonicalizer import CanonicalForm, verify_canonical
from .linalg import (
    DEFAULT_TOL,
    InputError,
    NumericalFailure,
    ToleranceConfig,
    as_matrix,
    norm,
)
from .normalizers import glr_seed_vector, toeplitz_rescale
from .pair import DegeneracyViolation, HermitianViolation, SelfAdjointnessViolation, SelfAdjointPair
from .spectral import linear_profile, nested_kernels, orthogonal_complement


@dataclass(frozen=True)
class GlrBlock:
    eta: complex
    k: int
    epsilon: int = 1

    def __post_init__(self):
        eta = complex(self.eta)
        if eta.imag < 0:
            eta = eta.conjugate()
        object.__setattr__(self, "eta", eta)

    @property
    def real(self) -> bool:
        return self.eta.imag == 0

    @property
    def dim(self) -> int:
        return self.k if self.real else 2 * self.k

    def to_dict(self) -> dict:
        return {"eta": [self.eta.real, self.eta.imag], "k": self.k,
                "epsilon": self.epsilon, "dim": self.dim}


def glr_sort_key(b: GlrBlock):
    return (round(b.eta.real, SORT_DIGITS), round(b.eta.imag, SORT_DIGITS), -b.k, -b.epsilon)


def build_glr_block(b: GlrBlock):
    if b.real:
        return b.epsilon * build_basic("S", b.k), build_basic("J", b.k, b.eta.real)
    return (b.epsilon * build_basic("S", 2 * b.k),
            block_diag(build_basic("J", b.k, b.eta), build_basic("J", b.k, b.eta.conjugate())))


def _restrict_linear(h, b, v):
    hh = v.conj().T @ h @ v
    bb = np.linalg.lstsq(v, b @ v, rcond=None)[0]
    return (hh + hh.conj().T) / 2, bb


def _real_chain(h, b, eta, tol):
    n = h.shape[0]
    nmat = b - eta * np.eye(n)
    s = len(nested_kernels(nmat, tol, scale=max(norm(b), 1.0)))
    v = glr_seed_vector(h, b, eta, s, tol)
    chain = [v]
    for _ in range(s - 1):
        chain.append(nmat @ chain[-1])
    f = np.stack(chain[::-1], axis=1)
    gram = f.conj().T @ h @ f
    idx = np.add.outer(np.arange(1, s + 1), np.arange(1, s + 1))
    if s > 1:
        res = np.max(np.abs(gram[idx <= s])) / max(np.max(np.abs(gram)), 1e-300)
        if res > tol.verify_tol:
            raise NumericalFailure(f"GLR chain Gram is not anti-triangular ({res:.2e})")
    hk = [gram[idx == s + 1 + t].mean().real for t in range(s)]
    alpha, eps = toeplitz_rescale(hk, eta, tol)
    tpl = sum(a * np.eye(s, k=t) for t, a in enumerate(alpha))
    return f @ tpl, GlrBlock(eta, s, eps)


def _nonreal_chain(h, b, eta, tol):
    n = h.shape[0]
    nmat = b - eta * np.eye(n)
    nbar = b - np.conj(eta) * np.eye(n)
    scale = max(norm(b), 1.0)
    kers = nested_kernels(nmat, tol, scale=scale)
    kers_bar = nested_kernels(nbar, tol, scale=scale)
    s = len(kers)
    if s == 0 or len(kers_bar) != s:
        raise NumericalFailure(f"eigenvalue {eta} and its conjugate have different Jordan structure")
    top = np.linalg.matrix_power(nmat, s - 1)
    kx, ky = kers[-1], kers_bar[-1]
    cross = ky.conj().T @ h @ top @ kx
    u, sv, vh = np.linalg.svd(cross)
    if sv[0] <= tol.rank_tol * max(norm(h), 1e-300):
        raise NumericalFailure("no pair of vectors with nonzero top pairing")
    x = kx @ vh[0].conj()
    y0 = ky @ u[:, 0]
    # c_m = l(N^m x, y0); want y = sum beta_j Nbar^j y0 with l(N^t x, y) = delta_{t, s-1}
    c = [np.vdot(y0, h @ np.linalg.matrix_power(nmat, m) @ x) for m in range(s)]
    beta = np.zeros(s, dtype=complex)
    for j in range(s):
        t = s - 1 - j
        acc = sum(np.conj(beta[i]) * c[t + i] for i in range(j))
        beta[j] = np.conj(((1 if j == 0 else 0) - acc) / c[s - 1])
    y = sum(beta[j] * np.linalg.matrix_power(nbar, j) @ y0 for j in range(s))
    g = [np.linalg.matrix_power(nmat, s - j) @ x for j in range(1, s + 1)]
    g += [np.linalg.matrix_power(nbar, s - j) @ y for j in range(1, s + 1)]
    return np.stack(g, axis=1), GlrBlock(eta, s, 1)


def _check_glr_input(h, b, tol):
    if norm(h - h.conj().T) > tol.verify_tol * max(norm(h), 1e-300):
        raise HermitianViolation("H is not Hermitian")
    sv = np.linalg.svd(h, compute_uv=False) if h.size else np.ones(1)
    if h.size and sv[-1] <= tol.rank_tol * sv[0]:
        raise DegeneracyViolation("H is degenerate")
    hb = h @ b
    if norm(hb.conj().T - hb) > tol.verify_tol * max(norm(hb), 1e-300):
        raise SelfAdjointnessViolation("B is not self-adjoint for H: (HB)^* != HB")


def glr_canonicalize(h, b, tol: ToleranceConfig = DEFAULT_TOL) -> CanonicalForm:
    """Canonical form of (H, B) with HB Hermitian; flavor ``glr``."""
    h, b = as_matrix(h), as_matrix(b)
    if h.shape != b.shape:
        raise InputError("H and B have different shapes")
    _check_glr_input(h, b, tol)
    n = h.shape[0]
    chains = []
    for cl in linear_profile(b, tol).clusters:
        eta = cl.lambda_sq
        basis = cl.basis
        while basis.shape[1]:
            hh, bb = _restrict_linear(h, b, basis)
            vecs, blk = (_real_chain if eta.imag == 0 else _nonreal_chain)(hh, bb, eta, tol)
            chains.append((basis @ vecs, blk))
            comp = orthogonal_complement(SelfAdjointPair(hh, bb), vecs, tol).columns
            basis = basis @ comp
    chains.sort(key=lambda ch: glr_sort_key(ch[1]))
    blocks = [ch[1] for ch in chains]
    p = np.hstack([ch[0] for ch in chains]) if chains else np.zeros((n, 0), dtype=complex)
    parts = [build_glr_block(blk) for blk in blocks]
    h_can = block_diag(*[q[0] for q in parts]).astype(complex) if parts else np.zeros((0, 0), complex)
    b_can = block_diag(*[q[1] for q in parts]).astype(complex) if parts else np.zeros((0, 0), complex)
    m = np.linalg.inv(p) if n else p
    form = CanonicalForm("glr", blocks, m, h_can, b_can)
    form.residuals = verify_canonical(SelfAdjointPair(h, b), form, tol)
    if not form.residuals["passed"]:
        raise NumericalFailure(f"glr form failed verification: {form.residuals}")
    return form


def pair_blocks_to_glr(blocks) -> list:
    """GLR blocks of (H, C conj C) predicted from the blocks of a pair with C nonsingular."""
    out = []
    for blk in blocks:
        eps = 1 if blk.epsilon is None else blk.epsilon
        if blk.family == "zero":
            raise InputError("the square of a singular operator is not covered")
        if blk.family == "positive-real":
            out.append(GlrBlock(blk.lambda_sq.real, blk.k, eps))
        elif blk.family == "negative":
            # x +- Ax split the block into two real chains of opposite sign
            out.append(GlrBlock(blk.lambda_sq.real, blk.k, 1))
            out.append(GlrBlock(blk.lambda_sq.real, blk.k, -1))
        else:
            out.append(GlrBlock(blk.lambda_sq, blk.k, 1))
    return sorted(out, key=glr_sort_key)


__all__ = ["GlrBlock", "build_glr_block", "glr_canonicalize", "glr_seed_vector",
           "pair_blocks_to_glr", "glr_sort_key"]
