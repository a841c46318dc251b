"""Dense complex primitives: tolerances, eigenvalues, rank/kernel, Hermitian
diagonalization, Takagi factorization and signature.

Every routine is a pure function of its (array) inputs.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

MAX_DIM = 64


class NumericalFailure(RuntimeError):
    """An iteration or threshold test could not be satisfied."""


class InputError(ValueError):
    """Malformed input (shape, finiteness, structural precondition)."""


@dataclass(frozen=True)
class ToleranceConfig:
    rank_tol: float = 1e-9
    verify_tol: float = 1e-6
    cluster_tol: float = 1e-7

    def __post_init__(self):
        for name in ("rank_tol", "verify_tol", "cluster_tol"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be strictly positive")
        if not (self.rank_tol < self.cluster_tol < self.verify_tol):
            warnings.warn(
                "recommended ordering rank_tol < cluster_tol < verify_tol is violated",
                stacklevel=2,
            )


DEFAULT_TOL = ToleranceConfig()


def as_matrix(m, square=True) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    return a


def norm(m) -> float:
    """Spectral norm (0 for empty matrices)."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def eigenvalues(m, max_dim: int = MAX_DIM) -> np.ndarray:
    """All eigenvalues of a square matrix, repeated by algebraic multiplicity."""
    a = as_matrix(m)
    if a.shape[0] > max_dim:
        raise InputError(f"dimension {a.shape[0]} exceeds configured maximum {max_dim}")
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration did not converge: {exc}") from exc


def rank_and_kernel(m, tol: ToleranceConfig = DEFAULT_TOL, scale: float | None = None):
    """Numerical rank and an orthonormal kernel basis (as columns).

    A singular value counts toward the rank iff it exceeds
    ``tol.rank_tol * scale``; ``scale`` defaults to the spectral norm of ``m``.
    """
    a = np.asarray(m)
    if a.ndim != 2 or not np.all(np.isfinite(a)):
        raise InputError("expected a finite 2-d matrix")
    if not np.iscomplexobj(a):
        a = a.astype(float)
    rows, cols = a.shape
    if a.size == 0:
        return 0, np.eye(cols, dtype=a.dtype)
    _, sv, vh = np.linalg.svd(a)
    if scale is None:
        scale = sv[0] if sv.size else 0.0
    threshold = tol.rank_tol * scale
    rank = int(np.sum(sv > threshold)) if scale > 0 else 0
    kernel = vh[rank:].conj().T
    return rank, kernel


def orthonormal_basis(vectors, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column span, rank decided by SVD."""
    a = np.asarray(vectors, dtype=complex)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, sv, _ = np.linalg.svd(a, full_matrices=False)
    r = int(np.sum(sv > tol.rank_tol * sv[0])) if sv[0] > 0 else 0
    return u[:, :r]


def hermitian_diagonalize(h, tol: ToleranceConfig = DEFAULT_TOL):
    """Return ``(u, d)`` with ``h = u @ diag(d) @ u^*``, ``d`` sorted descending."""
    a = as_matrix(h)
    scale = norm(a)
    if norm(a - a.conj().T) > tol.verify_tol * max(scale, np.finfo(float).tiny):
        if scale > 0:
            raise InputError("matrix is not Hermitian")
    d, u = np.linalg.eigh((a + a.conj().T) / 2)
    order = np.argsort(-d, kind="stable")
    return u[:, order], d[order]


def takagi(s, tol: ToleranceConfig = DEFAULT_TOL):
    """Takagi factorization ``s = u @ diag(sigma) @ u.T`` of a complex symmetric matrix.

    Uses the real symmetric embedding [[P, Q], [Q, -P]] of ``s = P + iQ``:
    an eigenvector [x; y] with eigenvalue sigma gives u = x + iy with
    ``s @ conj(u) = sigma * u``. Zero singular values are allowed; their
    columns are completed to a unitary basis.
    """
    a = as_matrix(s)
    n = a.shape[0]
    scale = norm(a)
    if scale > 0 and norm(a - a.T) > tol.verify_tol * scale:
        raise InputError("matrix is not complex symmetric")
    if n == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros(0)
    a = (a + a.T) / 2
    p, q = a.real, a.imag
    big = np.block([[p, q], [q, -p]])
    w, v = np.linalg.eigh(big)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    keep = int(np.sum(w[:n] > tol.rank_tol * max(scale, 1e-300)))
    u = v[:n, :keep] + 1j * v[n:, :keep]
    u = u / np.linalg.norm(u, axis=0, keepdims=True) if keep else u
    sigma = np.zeros(n)
    sigma[:keep] = w[:keep]
    if keep < n:
        # remaining columns span conj(ker s); any orthonormal completion works
        proj = np.eye(n) - u @ u.conj().T
        _, _, vh = np.linalg.svd(proj)
        u = np.hstack([u, vh[: n - keep].conj().T])
    return u, sigma


def signature(h, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[int, int]:
    """Counts of positive and negative eigenvalues of a nondegenerate Hermitian matrix."""
    _, d = hermitian_diagonalize(h, tol)
    scale = np.max(np.abs(d)) if d.size else 0.0
    if d.size and np.min(np.abs(d)) <= tol.rank_tol * scale:
        raise InputError("Hermitian matrix is degenerate")
    return int(np.sum(d > 0)), int(np.sum(d < 0))


def realify(c) -> np.ndarray:
    """Real 2n x 2n matrix of the real-linear map x -> c @ conj(x) on (Re x, Im x)."""
    c = np.asarray(c, dtype=complex)
    cr, ci = c.real, c.imag
    return np.block([[cr, ci], [ci, -cr]])


def complexify(vectors) -> np.ndarray:
    """Inverse of the coordinate split used by :func:`realify` (column-wise)."""
    v = np.asarray(vectors, dtype=float)
    n = v.shape[0] // 2
    return v[:n] + 1j * v[n:]


def random_well_conditioned(n: int, rng: np.random.Generator, max_cond: float = 100.0,
                            max_tries: int = 10_000) -> np.ndarray:
    """Random complex matrix with entries uniform on [-1,1]+i[-1,1] and
    Frobenius condition estimate ``||M||_F ||M^-1||_F <= max_cond``."""
    for _ in range(max_tries):
        m = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
        try:
            inv = np.linalg.inv(m)
        except np.linalg.LinAlgError:
            continue
        if np.linalg.norm(m) * np.linalg.norm(inv) <= max_cond:
            return m
    raise NumericalFailure(f"no matrix with condition <= {max_cond} after {max_tries} draws")
