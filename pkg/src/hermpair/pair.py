"""Hermitian forms, antilinear operators and the GL_n action on pairs.

Conventions used everywhere in this package:

* ``H[i, j] = l(e_j, e_i)``, so ``l(v, w) = w^* H v`` (linear in the first
  slot, conjugate-linear in the second);
* an antilinear operator with matrix ``C`` acts as ``v -> C @ conj(v)``;
* a transition matrix ``M`` changes ``(H, C)`` into
  ``((M^-1)^* H M^-1, M C conj(M)^-1)``. Equivalently, the new basis vectors
  are the columns of ``M^-1`` written in old coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_TOL, InputError, ToleranceConfig, as_matrix, norm


class ValidationError(InputError):
    """A pair fails one of the structural conditions; ``condition`` names it."""

    condition = "invalid"

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class HermitianViolation(ValidationError):
    condition = "hermitian"


class DegeneracyViolation(ValidationError):
    condition = "nondegeneracy"


class SelfAdjointnessViolation(ValidationError):
    condition = "self-adjointness"


class SingularTransition(InputError):
    pass


@dataclass(frozen=True)
class SelfAdjointPair:
    """A nondegenerate Hermitian form ``H`` with an l-self-adjoint antilinear ``C``."""

    H: np.ndarray
    C: np.ndarray
    residuals: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.H.shape[0]

    def form(self, v, w) -> complex:
        """l(v, w)."""
        return complex(np.vdot(w, self.H @ v))

    def act(self, v) -> np.ndarray:
        """A(v) = C conj(v)."""
        return self.C @ np.conj(v)


def pair_residuals(h, c) -> dict:
    h = as_matrix(h)
    c = as_matrix(c)
    hc = h @ c
    sv = np.linalg.svd(h, compute_uv=False) if h.size else np.zeros(0)
    hn = sv[0] if sv.size else 0.0
    return {
        "hermitian": norm(h - h.conj().T) / hn if hn > 0 else 0.0,
        "nondegeneracy": (sv[-1] / hn) if hn > 0 else 0.0,
        "self-adjointness": norm(hc - hc.T) / max(norm(hc), 1e-300) if norm(hc) > 0 else 0.0,
    }


def validate_pair(h, c, tol: ToleranceConfig = DEFAULT_TOL) -> SelfAdjointPair:
    """Check H = H^*, det H != 0 and (HC)^T = HC to tolerance.

    Raises the specific :class:`ValidationError` subclass for the first
    violated condition, carrying its residual.
    """
    h = as_matrix(h)
    c = as_matrix(c)
    if h.shape != c.shape:
        raise InputError(f"H has shape {h.shape} but C has shape {c.shape}")
    r = pair_residuals(h, c)
    if r["hermitian"] > tol.verify_tol:
        raise HermitianViolation(f"H is not Hermitian (residual {r['hermitian']:.3g})",
                                 r["hermitian"])
    if h.shape[0] and r["nondegeneracy"] <= tol.rank_tol:
        raise DegeneracyViolation(
            f"H is degenerate (smallest/largest singular value {r['nondegeneracy']:.3g})",
            r["nondegeneracy"])
    if r["self-adjointness"] > tol.verify_tol:
        raise SelfAdjointnessViolation(
            f"C is not self-adjoint for H: (HC)^T != HC (residual {r['self-adjointness']:.3g})",
            r["self-adjointness"])
    return SelfAdjointPair(h, c, r)


def apply_basis_change(p: SelfAdjointPair, m, tol: ToleranceConfig = DEFAULT_TOL,
                       validate: bool = True) -> SelfAdjointPair:
    """Transform the pair by the transition matrix ``m``."""
    m = as_matrix(m)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size and sv[-1] <= tol.rank_tol * sv[0]:
        raise SingularTransition("transition matrix is singular")
    minv = np.linalg.inv(m)
    h = minv.conj().T @ p.H @ minv
    c = m @ p.C @ np.linalg.inv(m.conj())
    if validate:
        return validate_pair(h, c, tol)
    return SelfAdjointPair(h, c)


def square_operator(c) -> np.ndarray:
    """Matrix of the linear operator A^2, i.e. ``C conj(C)``."""
    c = as_matrix(c)
    return c @ c.conj()


def antilinear_power(c, k: int) -> np.ndarray:
    """Matrix P with A^k v = P @ conj^k(v) (conj applied k times)."""
    c = as_matrix(c)
    out = np.eye(c.shape[0], dtype=complex)
    for i in range(k):
        out = out @ (c if i % 2 == 0 else c.conj())
    return out


def symmetric_form_of_pair(p: SelfAdjointPair) -> np.ndarray:
    """Matrix ``F`` of the symmetric bilinear form l'(v, w) = l(w, Av).

    With ``F[i, j] = l'(e_j, e_i)`` one gets l'(v, w) = v^T (C^* H) w, and
    ``C^* H = conj(H C)`` because HC is symmetric.
    """
    return np.conj(p.H @ p.C)
