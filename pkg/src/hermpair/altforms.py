"""Alternative canonical form (blocks (+-N_{lam,k}, M_{lam,k})), per-block
converters from the standard form and the symmetry-group membership test."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import block_diag

from .atlas import (
    CanonicalBlock,
    assemble,
    build_alt_block,
    build_basic,
    build_pair_block,
    jordan_square_root,
)
from .canonicalizer import CanonicalForm, _as_pair, canonicalize_pair, verify_canonical
from .linalg import DEFAULT_TOL, NumericalFailure, ToleranceConfig, as_matrix, norm
from .pair import SelfAdjointPair, apply_basis_change


def explicit_zero6_converter() -> np.ndarray:
    """Hand-built converter for the nilpotent block of size 6 (pairs coordinates i and i+3)."""
    t = np.zeros((6, 6))
    for r in range(3):
        t[r, 2 * r] = t[r, 2 * r + 1] = 1
        t[r + 3, 2 * r] = -1
        t[r + 3, 2 * r + 1] = 1
    return t / np.sqrt(2)


def _same_blocks(a, b, tol):
    if len(a) != len(b):
        return False
    return all(
        (x.family, x.k, x.epsilon) == (y.family, y.k, y.epsilon)
        and abs(x.lambda_sq - y.lambda_sq) <= tol.cluster_tol ** 0.5 * max(1.0, abs(x.lambda_sq))
        for x, y in zip(a, b))


@lru_cache(maxsize=None)
def _converter_cached(block: CanonicalBlock, tol: ToleranceConfig) -> np.ndarray:
    std = SelfAdjointPair(*build_pair_block(block))
    alt = SelfAdjointPair(*build_alt_block(block))
    f_std = canonicalize_pair(std, tol)
    f_alt = canonicalize_pair(alt, tol)
    if not _same_blocks(f_std.blocks, f_alt.blocks, tol):
        raise NumericalFailure(f"standard and alternative atlas pairs differ for {block}")
    t = np.linalg.solve(f_alt.transition, f_std.transition)
    check = apply_basis_change(std, t, tol, validate=False)
    res = max(norm(check.H - alt.H), norm(check.C - alt.C)) / max(1.0, norm(alt.C))
    if res > tol.verify_tol:
        raise NumericalFailure(f"converter for {block} has residual {res:.2e}")
    t.setflags(write=False)
    return t


def block_converter(block: CanonicalBlock, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Transition T with apply_basis_change(standard atlas pair, T) = alternative atlas pair.

    Built by canonicalizing both atlas pairs and composing; cached per block.
    """
    ls = complex(round(block.lambda_sq.real, 10), round(block.lambda_sq.imag, 10))
    key = CanonicalBlock(block.family, ls, block.k, block.epsilon)
    return _converter_cached(key, tol).copy()


def alt_canonicalize(p, tol: ToleranceConfig = DEFAULT_TOL) -> CanonicalForm:
    """Canonical form with (+-N, M) blocks; same blocks as the standard form."""
    p = _as_pair(p, tol)
    std = canonicalize_pair(p, tol)
    if std.blocks:
        t = block_diag(*[block_converter(b, tol) for b in std.blocks])
    else:
        t = np.zeros((0, 0), dtype=complex)
    h_can, c_can = assemble(std.blocks, build_alt_block)
    form = CanonicalForm("alternative", list(std.blocks), t @ std.transition, h_can, c_can)
    form.residuals = verify_canonical(p, form, tol)
    if not form.residuals["passed"]:
        raise NumericalFailure(f"alternative form failed verification: {form.residuals}")
    return form


def standard_from_alternative(form: CanonicalForm, tol: ToleranceConfig = DEFAULT_TOL) -> CanonicalForm:
    """Undo the per-block converters of an alternative form."""
    t = block_diag(*[block_converter(b, tol) for b in form.blocks]) if form.blocks else form.transition
    h_can, c_can = assemble(form.blocks, build_pair_block)
    return CanonicalForm("standard", list(form.blocks), np.linalg.solve(t, form.transition),
                         h_can, c_can)


@dataclass(frozen=True)
class SymmetryCheck:
    ok: bool
    isometry_residual: float
    commutation_residual: float

    def __bool__(self):
        return self.ok


def is_glr_symmetry(m, n_dim: int, lambda_sq, tol: ToleranceConfig = DEFAULT_TOL) -> SymmetryCheck:
    """Whether M^* S M = S and M J = J M for S = S_n, J = J_{lambda_sq, n}."""
    m = as_matrix(m)
    if m.shape != (n_dim, n_dim):
        return SymmetryCheck(False, float("inf"), float("inf"))
    s = build_basic("S", n_dim)
    j = build_basic("J", n_dim, complex(lambda_sq))
    iso = norm(m.conj().T @ s @ m - s)
    com = norm(m @ j - j @ m) / max(1.0, norm(m))
    return SymmetryCheck(bool(iso <= tol.verify_tol and com <= tol.verify_tol), iso, com)


__all__ = [
    "alt_canonicalize",
    "block_converter",
    "explicit_zero6_converter",
    "is_glr_symmetry",
    "jordan_square_root",
    "standard_from_alternative",
    "SymmetryCheck",
]
