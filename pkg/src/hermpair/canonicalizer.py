"""End-to-end canonical forms.

``canonicalize_pair`` splits a pair into generalized eigenspaces of A^2,
peels blocks off each with the normalizers and assembles a single transition
matrix. ``canonicalize_operator`` does the same for a bare antilinear
operator (no form; blocks carry no sign) and ``witness_form`` pulls the
atlas forms back through it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .atlas import CanonicalBlock, assemble, block_sort_key, build_pair_block
from .linalg import (
    DEFAULT_TOL,
    InputError,
    NumericalFailure,
    ToleranceConfig,
    as_matrix,
    norm,
    orthonormal_basis,
)
from .normalizers import peel_cluster
from .pair import SelfAdjointPair, square_operator, validate_pair
from .spectral import nested_kernels, real_filtration, restrict_pair, spectral_profile

FLAVORS = ("standard", "alternative", "operator-only", "glr")


@dataclass
class CanonicalForm:
    """Blocks plus a transition ``M`` taking the input to ``(H_can, C_can)``.

    For the glr flavor ``C_can`` is the matrix of a linear operator and is
    compared against ``M B M^-1``; otherwise against ``M C conj(M)^-1``.
    """

    flavor: str
    blocks: list
    transition: np.ndarray
    H_can: np.ndarray | None
    C_can: np.ndarray
    residuals: dict = field(default_factory=dict)

    @property
    def linear(self) -> bool:
        return self.flavor == "glr"

    def block_list(self) -> list:
        return [b.to_dict() for b in self.blocks]

    def to_dict(self) -> dict:
        def cm(a):
            return None if a is None else [[[float(z.real), float(z.imag)] for z in row] for row in a]

        return {
            "flavor": self.flavor,
            "n": int(self.transition.shape[0]),
            "blocks": self.block_list(),
            "M": cm(self.transition),
            "H_can": cm(self.H_can),
            "C_can": cm(self.C_can),
            "residuals": {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v))
                          for k, v in self.residuals.items()},
        }


def _relative(a, b):
    return norm(a - b) / max(norm(b), 1.0)


def verify_canonical(p: SelfAdjointPair, form: CanonicalForm,
                     tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Residuals of the transition against the canonical matrices (relative, floor 1)."""
    m = as_matrix(form.transition)
    if m.shape != p.C.shape:
        raise InputError("transition and pair dimensions differ")
    sv = np.linalg.svd(m, compute_uv=False) if m.size else np.ones(1)
    if sv.size and sv[-1] <= tol.rank_tol * sv[0]:
        raise InputError("transition matrix is singular")
    minv = np.linalg.inv(m) if m.size else m
    report = {}
    if form.H_can is not None and p.H is not None:
        report["residual_H"] = _relative(minv.conj().T @ p.H @ minv, form.H_can)
    if form.linear:
        c_new = m @ p.C @ minv
    else:
        c_new = m @ p.C @ np.conj(minv)
    report["residual_C"] = _relative(c_new, form.C_can)
    report["passed"] = all(v <= tol.verify_tol for v in report.values())
    return report


def _as_pair(p, tol):
    if isinstance(p, SelfAdjointPair):
        return p
    h, c = p
    return validate_pair(h, c, tol)


def _assemble_form(flavor, chains, p, tol, builder, with_form=True):
    chains = sorted(chains, key=lambda ch: block_sort_key(ch[1]))
    n = p.C.shape[0]
    if chains:
        basis = np.hstack([ch[0] for ch in chains])
    else:
        basis = np.zeros((n, 0), dtype=complex)
    if basis.shape[1] != n:
        raise NumericalFailure(f"assembled {basis.shape[1]} basis vectors for dimension {n}")
    blocks = [ch[1] for ch in chains]
    h_can, c_can = assemble(blocks, builder)
    m = np.linalg.inv(basis) if n else basis
    form = CanonicalForm(flavor, blocks, m, h_can if with_form else None, c_can)
    form.residuals = verify_canonical(p, form, tol)
    if not form.residuals["passed"]:
        raise NumericalFailure(f"{flavor} form failed verification: {form.residuals}")
    return form


def canonicalize_pair(p, tol: ToleranceConfig = DEFAULT_TOL) -> CanonicalForm:
    """Standard canonical form of a pair (H, C)."""
    p = _as_pair(p, tol)
    profile = spectral_profile(p.C, tol)
    chains = []
    for cl in sorted(profile.clusters, key=lambda c: (c.lambda_sq.real, c.lambda_sq.imag)):
        try:
            sub = restrict_pair(p, cl.basis, tol)
            for ch in peel_cluster(sub, cl.lambda_sq, tol):
                chains.append((cl.basis @ ch.vectors, ch.block))
        except NumericalFailure as exc:
            raise NumericalFailure(f"cluster lambda^2={cl.lambda_sq:.6g}: {exc}") from exc
    return _assemble_form("standard", chains, p, tol, build_pair_block)


# ---------------------------------------------------------------- operator only

def _chain_heads(apply, kernels, partner=None):
    """Heads of Jordan chains for a nilpotent map given its kernel staircase.

    Works top-down: at level j the new heads complete ker^{j-1} plus the
    images of longer chains to ker^j. ``partner`` (if given) maps a head to a
    second head that must be taken along with it.
    Returns [(head, length)] in decreasing length.
    """
    heads = []
    s = len(kernels)
    for j in range(s, 0, -1):
        lower = kernels[j - 2] if j >= 2 else kernels[0][:, :0]
        span = [lower]
        for head, length in heads:
            img = head
            for _ in range(length - j):
                img = apply(img)
            span.append(img[:, None])
        u = orthonormal_basis(np.hstack(span)) if sum(x.shape[1] for x in span) else lower
        need = kernels[j - 1].shape[1] - u.shape[1]
        while need > 0:
            k = kernels[j - 1]
            rest = k - u @ (u.conj().T @ k)
            left, _, _ = np.linalg.svd(rest, full_matrices=False)
            new = [left[:, 0]]
            if partner is not None:
                new.append(partner(left[:, 0]))
            for v in new:
                heads.append((v, j))
            u = orthonormal_basis(np.hstack([u] + [v[:, None] for v in new]))
            need = kernels[j - 1].shape[1] - u.shape[1]
        if need < 0:
            raise NumericalFailure("inconsistent Jordan chain bookkeeping")
    return heads


def _apply_a(c, x):
    return c @ np.conj(x)


def _restrict_operator(c, basis):
    return np.linalg.lstsq(basis, c @ basis.conj(), rcond=None)[0]


def _operator_chains_positive(c, basis, lam_sq, tol):
    lam = float(np.sqrt(lam_sq))
    local = _restrict_operator(c, basis)
    d = local.shape[0]
    kreal = real_filtration(SelfAdjointPair(np.eye(d), local), lam, d, tol).columns
    if kreal.shape[1] != d:
        raise NumericalFailure("real eigenspace has the wrong dimension")
    # A is real in this basis
    a_real = np.linalg.solve(kreal, local @ kreal.conj())
    if np.max(np.abs(a_real.imag)) > tol.verify_tol * max(1.0, norm(a_real)):
        raise NumericalFailure("restricted operator is not real on the real form")
    lmat = a_real.real - lam * np.eye(d)
    kers = nested_kernels(lmat, tol, scale=max(norm(lmat), 1.0))
    out = []
    for head, length in _chain_heads(lambda x: lmat @ x, kers):
        chain = [head]
        for _ in range(length - 1):
            chain.append(lmat @ chain[-1])
        vecs = basis @ kreal @ np.stack(chain[::-1], axis=1)
        out.append((vecs, CanonicalBlock("positive-real", lam_sq, length, None)))
    return out


def _operator_chains_zero(c, basis, tol):
    local = _restrict_operator(c, basis)
    kers = nested_kernels(local, tol, antilinear=True, scale=max(norm(local), 1.0))
    out = []
    for head, length in _chain_heads(lambda x: _apply_a(local, x), kers):
        chain = [head]
        for _ in range(length - 1):
            chain.append(_apply_a(local, chain[-1]))
        out.append((basis @ np.stack(chain[::-1], axis=1), CanonicalBlock("zero", 0, length, None)))
    return out


def _operator_chains_paired(c, basis, lam_sq, tol, family):
    local = _restrict_operator(c, basis)
    b = local @ local.conj()
    nmat = b - lam_sq * np.eye(local.shape[0])
    kers = nested_kernels(nmat, tol, scale=max(norm(b), 1.0))
    partner = (lambda x: _apply_a(local, x)) if family == "negative" else None
    heads = _chain_heads(lambda x: nmat @ x, kers, partner)
    if partner is not None:
        heads = heads[::2]
    out = []
    for head, length in heads:
        g = [np.linalg.matrix_power(nmat, length - j) @ head for j in range(1, length + 1)]
        g += [_apply_a(local, v) for v in g]
        out.append((basis @ np.stack(g, axis=1), CanonicalBlock(family, lam_sq, length, None)))
    return out


def canonicalize_operator(c, tol: ToleranceConfig = DEFAULT_TOL) -> CanonicalForm:
    """Consimilarity canonical form of an antilinear operator (no Hermitian form used)."""
    c = as_matrix(c)
    profile = spectral_profile(c, tol)
    chains = []
    for cl in sorted(profile.clusters, key=lambda cl: (cl.lambda_sq.real, cl.lambda_sq.imag)):
        fam = cl.family
        if fam == "positive-real":
            chains += _operator_chains_positive(c, cl.basis, cl.lambda_sq.real, tol)
        elif fam == "zero":
            chains += _operator_chains_zero(c, cl.basis, tol)
        else:
            lam_sq = cl.lambda_sq if fam == "nonreal" else cl.lambda_sq.real
            chains += _operator_chains_paired(c, cl.basis, lam_sq, tol, fam)
    probe = SelfAdjointPair(None, c)
    return _assemble_form("operator-only", chains, probe, tol, build_pair_block, with_form=False)


def witness_form(c, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """A nondegenerate Hermitian H making C self-adjoint: M^* (+H_blocks) M."""
    form = canonicalize_operator(c, tol)
    h_can, _ = assemble([CanonicalBlock(b.family, b.lambda_sq, b.k, 1) for b in form.blocks])
    m = form.transition
    h = m.conj().T @ h_can @ m
    return (h + h.conj().T) / 2


__all__ = [
    "CanonicalForm",
    "FLAVORS",
    "canonicalize_pair",
    "canonicalize_operator",
    "witness_form",
    "verify_canonical",
    "square_operator",
]
