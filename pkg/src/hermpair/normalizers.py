"""Block extraction for one generalized eigenspace of B = A^2.

Each ``normalize_*`` function takes a pair restricted to (what is left of) a
single cluster, builds one chain basis realizing an atlas block, and returns
it together with the l-orthogonal complement of its span. ``peel_cluster``
repeats this until the cluster is exhausted.

All vectors are expressed in the coordinates of the pair that was passed in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from .atlas import CanonicalBlock, build_pair_block
from .linalg import (
    DEFAULT_TOL,
    InputError,
    NumericalFailure,
    ToleranceConfig,
    hermitian_diagonalize,
    norm,
    realify,
    takagi,
)
from .pair import SelfAdjointPair, square_operator
from .spectral import (
    SubspaceBasis,
    _invariant_basis,
    nested_kernels,
    orthogonal_complement,
    real_filtration,
    restrict_pair,
)


@dataclass
class ChainBasis:
    """Columns ``vectors`` realize ``block``: restricting the pair to them gives the atlas pair."""

    vectors: np.ndarray
    block: CanonicalBlock
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


# ---------------------------------------------------------------- scalar helpers

def fourier_seed_angle(a0: float, a1: float, b1: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Angle maximizing |a0 + a1 cos 2t + b1 sin 2t| on [0, pi)."""
    amp = math.hypot(a1, b1)
    if max(abs(a0), amp) <= tol.rank_tol:
        raise NumericalFailure("all Fourier coefficients vanish")

    def value(t):
        return abs(a0 + a1 * math.cos(2 * t) + b1 * math.sin(2 * t))

    phi = math.atan2(b1, a1) if amp > 0 else 0.0
    theta = phi / 2 if a0 >= 0 else (phi + math.pi) / 2
    theta %= math.pi
    best = max(abs(a0), amp)
    if value(theta) < best * (1 - 1e-12):
        grid = np.linspace(0, math.pi, 64, endpoint=False)
        theta = float(grid[np.argmax([value(t) for t in grid])])
    return theta


def toeplitz_rescale(h, lam=None, tol: ToleranceConfig = DEFAULT_TOL):
    """Coefficients alpha of a real Toeplitz polynomial normalizing a Hankel Gram.

    Returns ``(alpha, sign)`` with sum_{r+s+t=i} alpha_r alpha_s h_t = sign * delta_{i0}.
    ``lam`` is accepted for interface symmetry and unused.
    """
    h = [float(np.real(x)) for x in h]
    if not h or abs(h[0]) <= tol.rank_tol * max(1.0, max(abs(x) for x in h)):
        raise InputError("leading Hankel coefficient must be nonzero")
    k = len(h)
    alpha = [abs(h[0]) ** -0.5]
    for i in range(1, k):
        rest = 0.0
        for r in range(i + 1):
            for s in range(i + 1 - r):
                t = i - r - s
                if r == i or s == i:
                    continue
                if r < len(alpha) and s < len(alpha):
                    rest += alpha[r] * alpha[s] * h[t]
        alpha.append(-rest / (2 * alpha[0] * h[0]))
    return alpha, (1 if h[0] > 0 else -1)


def _toeplitz(coeffs, k):
    out = np.zeros((k, k), dtype=complex)
    for t, a in enumerate(coeffs[:k]):
        out += a * np.eye(k, k=t)
    return out


def _solve_affine(cond, x, directions, iterations=2, free=(), chain=None):
    """Drive the complex conditions ``cond(x)`` to zero by real combinations of ``directions``.

    Conditions are assumed real-affine in the coefficients, so finite
    responses give the exact Jacobian; a second pass mops up rounding.
    With ``chain`` given, the extra ``free`` directions (which must not move
    the conditions) are also used, and among all solutions the one that
    minimizes the Frobenius norm of ``chain(x)`` (a real-linear map) is taken.
    """
    dirs = list(directions) + list(free)
    for _ in range(iterations):
        r0 = np.atleast_1d(cond(x))
        jac = np.stack([np.atleast_1d(cond(x + d)) - r0 for d in dirs], axis=1)
        a = np.vstack([jac.real, jac.imag])
        b = -np.concatenate([r0.real, r0.imag])
        coef, *_ = np.linalg.lstsq(a, b, rcond=None)
        if chain is not None:
            _, sv, vh = np.linalg.svd(a)
            rank = int(np.sum(sv > 1e-10 * sv[0])) if sv.size and sv[0] > 0 else 0
            null = vh[rank:].T
            if null.shape[1]:
                w = np.stack([chain(d).ravel() for d in dirs], axis=1)
                w = np.vstack([w.real, w.imag])
                v0 = chain(x).ravel()
                v0 = np.concatenate([v0.real, v0.imag]) + w @ coef
                z, *_ = np.linalg.lstsq(w @ null, -v0, rcond=None)
                coef = coef + null @ z
        x = x + sum(c * d for c, d in zip(coef, dirs))
    return x


def _apply_a(c, x):
    return c @ np.conj(x)


def _a_power(c, x, k):
    for _ in range(k):
        x = _apply_a(c, x)
    return x


def _finish(p: SelfAdjointPair, vecs: np.ndarray, block: CanonicalBlock,
            tol: ToleranceConfig, diag: dict):
    h_ref, c_ref = build_pair_block(block)
    sub = restrict_pair(p, vecs, tol, check=False)
    scale = max(norm(p.H) * norm(vecs) ** 2, 1e-300)
    res_h = norm(sub.H - h_ref) / max(1.0, norm(h_ref))
    res_c = norm(sub.C - c_ref) / max(1.0, norm(c_ref))
    inv = norm(p.C @ vecs.conj() - vecs @ sub.C) / (max(norm(p.C), 1.0) * max(norm(vecs), 1e-300))
    diag.update(residual_H=res_h, residual_C=res_c, invariance=inv, gram_scale=scale)
    if max(res_h, res_c, inv) > tol.verify_tol:
        raise NumericalFailure(
            f"chain for {block} misses the atlas pair (H {res_h:.2e}, C {res_c:.2e}, inv {inv:.2e})")
    comp = orthogonal_complement(p, vecs, tol)
    return ChainBasis(vecs, block, diag), comp


def nilpotent_index(n_mat, tol: ToleranceConfig = DEFAULT_TOL, scale=None) -> int:
    """Largest Jordan size of the nilpotent part of ``n_mat`` (kernel staircase length)."""
    scale = max(norm(n_mat), 1.0) if scale is None else scale
    return len(nested_kernels(n_mat, tol, scale=scale))


# ---------------------------------------------------------------- GLR-type seed

def glr_seed_vector(h, b, lambda_sq, s1: int, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Vector v in ker (B - lambda_sq)^s1 with |l((B - lambda_sq)^(s1-1) v, v)| maximal among candidates.

    Primary candidate: top eigenvector of the Hermitian pairing restricted to
    the kernel. Kernel basis vectors and pairwise sums are swept as fallback.
    """
    h = np.asarray(h, dtype=complex)
    b = np.asarray(b, dtype=complex)
    lambda_sq = complex(lambda_sq)
    if abs(lambda_sq.imag) > 0:
        raise InputError("the self-pairing seed exists only for real lambda_sq")
    n = h.shape[0]
    nmat = b - lambda_sq * np.eye(n)
    scale = max(norm(b), abs(lambda_sq), 1.0)
    kers = nested_kernels(nmat, tol, scale=scale, max_steps=s1)
    if s1 < 1 or len(kers) < s1:
        raise NumericalFailure(f"Jordan chains of length {s1} do not exist for {lambda_sq}")
    k = kers[-1]
    top = np.linalg.matrix_power(nmat, s1 - 1)
    g = k.conj().T @ h @ top @ k
    g = (g + g.conj().T) / 2
    floor = tol.rank_tol * max(norm(h), 1e-300)

    def pairing(v):
        return abs(np.vdot(v, h @ top @ v))

    w, u = np.linalg.eigh(g)
    cands = [k @ u[:, i] for i in np.argsort(-np.abs(w))[:1]]
    cands += [k[:, i] for i in range(k.shape[1])]
    cands += [k[:, i] + k[:, j] for i in range(k.shape[1]) for j in range(i)]
    cands += [k[:, i] + 1j * k[:, j] for i in range(k.shape[1]) for j in range(i)]
    for v in cands:
        if pairing(v) >= floor * np.vdot(v, v).real:
            return v
    raise NumericalFailure(f"no seed with nonzero pairing for {lambda_sq}")


# ---------------------------------------------------------------- positive family

def normalize_positive(p: SelfAdjointPair, lambda_sq, tol: ToleranceConfig = DEFAULT_TOL):
    """One block (positive-real, lambda, s, eps) from a pair supported on W_lambda."""
    lam_sq = float(np.real(lambda_sq))
    if lam_sq <= 0:
        raise InputError("normalize_positive needs lambda_sq > 0")
    lam = math.sqrt(lam_sq)
    n = p.n
    b = square_operator(p.C)
    s = nilpotent_index(b - lam_sq * np.eye(n), tol, scale=max(norm(b), 1.0))
    seed = glr_seed_vector(p.H, b, lam_sq, s, tol)

    # split the seed along the real form W~ = {x : (A - lam)^s x = 0}
    k = real_filtration(p, lam, s, tol).columns
    if k.shape[1] != n:
        raise NumericalFailure(f"real eigenspace has dimension {k.shape[1]}, expected {n}")
    z = np.linalg.solve(k, seed)
    v_plus, v_minus = k @ z.real, k @ z.imag

    def shifted(x):
        return _apply_a(p.C, x) - lam * x

    def top(x):
        for _ in range(s - 1):
            x = shifted(x)
        return x

    def form(x, y):
        return np.vdot(y, p.H @ x)

    pp = form(top(v_plus), v_plus)
    rr = form(top(v_minus), v_minus)
    qq = -(form(top(v_plus), v_minus) + form(top(v_minus), v_plus))
    coeffs = np.array([pp + rr, pp - rr, qq])
    diag = {"fourier": coeffs, "fourier_imag": float(np.max(np.abs(coeffs.imag)))}
    if diag["fourier_imag"] > tol.verify_tol * max(1.0, np.max(np.abs(coeffs))):
        raise NumericalFailure("Fourier coefficients of the seed pairing are not real")
    theta = fourier_seed_angle(*coeffs.real, tol=tol)
    v = math.cos(theta) * v_plus - math.sin(theta) * v_minus
    diag["theta"] = theta

    chain = [v]
    for _ in range(s - 1):
        chain.append(shifted(chain[-1]))
    f = np.stack(chain[::-1], axis=1)
    gram = f.conj().T @ p.H @ f
    diag["gram"] = gram
    gscale = max(np.max(np.abs(gram)), 1e-300)
    idx = np.add.outer(np.arange(1, s + 1), np.arange(1, s + 1))
    hankel_res = float(np.max(np.abs(gram[idx <= s]))) / gscale if s > 1 else 0.0
    diag["hankel_residual"] = hankel_res
    if hankel_res > tol.verify_tol:
        raise NumericalFailure(f"chain Gram is not lower anti-triangular ({hankel_res:.2e})")
    h = [gram[idx == s + 1 + t].mean() for t in range(s)]
    alpha, eps = toeplitz_rescale(h, lam, tol)
    vecs = f @ _toeplitz(alpha, s)
    block = CanonicalBlock("positive-real", lam_sq, s, eps)
    return _finish(p, vecs, block, tol, diag)


# ---------------------------------------------------------------- zero family

def normalize_zero(p: SelfAdjointPair, tol: ToleranceConfig = DEFAULT_TOL):
    """One block (zero, 0, k, eps) from a pair on which A is nilpotent."""
    n = p.n
    r = realify(p.C)
    k = nilpotent_index(r, tol, scale=max(norm(r), 1.0))
    if k == 0:
        raise NumericalFailure("A is not nilpotent on the given space")
    b = square_operator(p.C)
    diag = {}
    floor = tol.rank_tol * max(norm(p.H), 1e-300)
    if k % 2:
        g = p.H @ np.linalg.matrix_power(b, (k - 1) // 2)
        u, w = hermitian_diagonalize((g + g.conj().T) / 2, tol)
        i = int(np.argmax(np.abs(w)))
        a, gamma = u[:, i], float(w[i])
        eps = 1 if gamma > 0 else -1
        diag["theta"] = 0.0 if eps > 0 else math.pi
    else:
        sm = p.H @ np.linalg.matrix_power(b, (k - 2) // 2) @ p.C
        sym_res = norm(sm - sm.T) / max(norm(sm), 1e-300)
        if sym_res > tol.verify_tol:
            raise NumericalFailure(f"top pairing is not symmetric ({sym_res:.2e})")
        u, sigma = takagi((sm + sm.T) / 2, tol)
        a, gamma = u[:, 0], float(sigma[0])
        eps = 1
    if abs(gamma) <= floor:
        raise NumericalFailure("no vector with nonzero top pairing")
    diag["gamma"] = gamma
    seed = a / math.sqrt(abs(gamma))

    def pairing(x, power):
        return np.vdot(x, p.H @ _a_power(p.C, x, power))

    def chain(x):
        return np.stack([_a_power(p.C, x, i) for i in range(k)][::-1], axis=1)

    leads = [_a_power(p.C, seed, d) for d in range(k)]
    e1 = seed
    for d in range(1, k):
        power = k - d - 1
        free = [v for dd in range(d + 1, k) for v in (leads[dd], 1j * leads[dd])]
        e1 = _solve_affine(lambda x, pw=power: pairing(x, pw), e1, [leads[d], 1j * leads[d]],
                           free=free, chain=chain)
    vecs = chain(e1)
    block = CanonicalBlock("zero", 0, k, eps)
    return _finish(p, vecs, block, tol, diag)


# ---------------------------------------------------------------- paired families

def _paired_chain(p, x, nmat, s):
    g = [np.linalg.matrix_power(nmat, s - j) @ x for j in range(1, s + 1)]
    return np.stack(g + [_apply_a(p.C, v) for v in g], axis=1)


def _final_scale(q):
    # conj(mu)^2 q = 1
    return np.conj(1 / np.sqrt(complex(q)))


def normalize_negative(p: SelfAdjointPair, lambda_sq, tol: ToleranceConfig = DEFAULT_TOL):
    """One block (negative, i sqrt|lambda_sq|, s, +1) from a pair on W_lambda, lambda_sq < 0."""
    lam_sq = float(np.real(lambda_sq))
    if lam_sq >= 0:
        raise InputError("normalize_negative needs lambda_sq < 0")
    n = p.n
    b = square_operator(p.C)
    nmat = b - lam_sq * np.eye(n)
    s = nilpotent_index(nmat, tol, scale=max(norm(b), 1.0))
    u = glr_seed_vector(p.H, b, lam_sq, s, tol)
    w = _apply_a(p.C, u)
    y = np.stack([u, w], axis=1)
    top = np.linalg.matrix_power(nmat, s - 1)
    g = y.conj().T @ p.H @ top @ y
    g = (g + g.conj().T) / 2
    vals, vec = np.linalg.eigh(g)
    if not vals[0] < 0 < vals[1]:
        raise NumericalFailure("seed pairing on span{u, Au} is not indefinite")
    sm = y.conj().T @ p.H @ p.C @ np.conj(top @ y)
    diag = {"seed_gram": g}

    def candidate(phi):
        return vec @ np.array([math.sqrt(vals[1]), np.exp(1j * phi) * math.sqrt(-vals[0])])

    grid = np.linspace(0, 2 * math.pi, 256, endpoint=False)
    qs = [abs(candidate(t).conj() @ sm @ np.conj(candidate(t))) for t in grid]
    phi = float(grid[int(np.argmax(qs))])
    if max(qs) <= tol.rank_tol * max(norm(p.H), 1e-300):
        raise NumericalFailure("isotropic seed with nonzero top pairing not found")
    x = y @ candidate(phi)
    diag["phi"] = phi

    def conds(t):
        def f(v):
            nv = np.linalg.matrix_power(nmat, t) @ v
            return np.array([np.vdot(v, p.H @ nv), np.vdot(v, p.H @ _apply_a(p.C, nv))])
        return f

    def dirs_at(d):
        nd = np.linalg.matrix_power(nmat, d)
        return [nd @ u, 1j * (nd @ u), nd @ w, 1j * (nd @ w)]

    def chain(v):
        return _paired_chain(p, v, nmat, s)

    for d in range(1, s):
        free = [v for dd in range(d + 1, s) for v in dirs_at(dd)]
        x = _solve_affine(conds(s - 1 - d), x, dirs_at(d), free=free, chain=chain)
    q = np.vdot(x, p.H @ _apply_a(p.C, top @ x))
    x = _final_scale(q) * x
    vecs = _paired_chain(p, x, nmat, s)
    block = CanonicalBlock("negative", lam_sq, s, 1)
    return _finish(p, vecs, block, tol, diag)


def normalize_nonreal(p: SelfAdjointPair, lambda_sq, tol: ToleranceConfig = DEFAULT_TOL):
    """One block (nonreal, lambda, s, +1) from a pair on W_lambda + W_conj(lambda)."""
    lam_sq = complex(lambda_sq)
    if lam_sq.imag == 0:
        raise InputError("normalize_nonreal needs a nonreal lambda_sq")
    if lam_sq.imag < 0:
        lam_sq = lam_sq.conjugate()
    n = p.n
    b = square_operator(p.C)
    nmat = b - lam_sq * np.eye(n)
    # W_lambda alone, from a reordered Schur form: a rank-decided kernel of
    # N^s would carry O(rank_tol) of W_conj(lambda), which N^(s-1) amplifies
    t, z = schur(b, output="complex")
    ev = np.diag(t)
    kb = _invariant_basis(t, z, np.abs(ev - lam_sq) < np.abs(ev - lam_sq.conjugate()))
    if 2 * kb.shape[1] != n:
        raise NumericalFailure(f"{lam_sq} and its conjugate have unequal multiplicities")
    local = kb.conj().T @ nmat @ kb
    s = nilpotent_index(local, tol, scale=max(norm(b), 1.0))
    if s == 0:
        raise NumericalFailure(f"{lam_sq} is not an eigenvalue on the given space")
    top = np.linalg.matrix_power(nmat, s - 1)
    sk = kb.conj().T @ p.H @ p.C @ np.conj(top @ kb)
    sym_res = norm(sk - sk.T) / max(norm(sk), 1e-300)
    if sym_res > tol.verify_tol:
        raise NumericalFailure(f"top pairing is not symmetric ({sym_res:.2e})")
    iso = kb.conj().T @ p.H @ kb
    diag = {"isotropy": norm(iso) / max(norm(p.H), 1e-300)}
    if diag["isotropy"] > tol.verify_tol:
        raise NumericalFailure("generalized eigenspace is not isotropic")
    uu, sigma = takagi((sk + sk.T) / 2, tol)
    if sigma[0] <= tol.rank_tol * max(norm(p.H), 1e-300):
        raise NumericalFailure("no vector with nonzero top pairing")
    seed = kb @ uu[:, 0]
    x = seed

    def cond(t):
        nt = np.linalg.matrix_power(nmat, t)
        return lambda v: np.vdot(v, p.H @ _apply_a(p.C, nt @ v))

    def dirs_at(d):
        nd = np.linalg.matrix_power(nmat, d) @ seed
        return [nd, 1j * nd]

    def chain(v):
        return _paired_chain(p, v, nmat, s)

    for d in range(1, s):
        free = [v for dd in range(d + 1, s) for v in dirs_at(dd)]
        x = _solve_affine(cond(s - 1 - d), x, dirs_at(d), free=free, chain=chain)
    q = np.vdot(x, p.H @ _apply_a(p.C, top @ x))
    x = _final_scale(q) * x
    vecs = _paired_chain(p, x, nmat, s)
    block = CanonicalBlock("nonreal", lam_sq, s, 1)
    return _finish(p, vecs, block, tol, diag)


# ---------------------------------------------------------------- recursion

def peel_cluster(p: SelfAdjointPair, lambda_sq, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """All chains of a pair supported on one cluster, in the pair's coordinates."""
    lambda_sq = complex(lambda_sq)
    basis = np.eye(p.n, dtype=complex)
    current = p
    chains = []
    while current.n:
        if lambda_sq.imag != 0:
            ch, comp = normalize_nonreal(current, lambda_sq, tol)
        elif lambda_sq.real > 0:
            ch, comp = normalize_positive(current, lambda_sq, tol)
        elif lambda_sq.real < 0:
            ch, comp = normalize_negative(current, lambda_sq, tol)
        else:
            ch, comp = normalize_zero(current, tol)
        chains.append(ChainBasis(basis @ ch.vectors, ch.block, ch.diagnostics))
        if comp.dim != current.n - ch.dim:
            raise NumericalFailure("complement dimension mismatch")
        if comp.dim == 0:
            break
        current = restrict_pair(current, comp, tol)
        basis = basis @ comp.columns
    return chains


__all__ = [
    "ChainBasis",
    "fourier_seed_angle",
    "toeplitz_rescale",
    "glr_seed_vector",
    "nilpotent_index",
    "normalize_positive",
    "normalize_zero",
    "normalize_negative",
    "normalize_nonreal",
    "peel_cluster",
    "SubspaceBasis",
]
