"""Spectral structure of B = A^2: eigenvalue clusters, generalized
eigenspaces, Jordan sizes, restriction of pairs to invariant subspaces and
l-orthogonal complements."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack, schur

from .atlas import family_of, principal_sqrt
from .linalg import (
    DEFAULT_TOL,
    InputError,
    NumericalFailure,
    ToleranceConfig,
    as_matrix,
    norm,
    rank_and_kernel,
    complexify,
    realify,
)
from .pair import SelfAdjointPair, square_operator


@dataclass
class SubspaceBasis:
    columns: np.ndarray
    tag: str = ""

    @property
    def dim(self) -> int:
        return self.columns.shape[1]


@dataclass
class Cluster:
    lambda_sq: complex
    jordan_sizes: list  # [(size, multiplicity)], sizes strictly decreasing
    basis: np.ndarray = field(repr=False)  # orthonormal columns spanning W_lambda

    @property
    def lam(self) -> complex:
        return principal_sqrt(self.lambda_sq)

    @property
    def family(self) -> str:
        return family_of(self.lambda_sq)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass
class SpectralProfile:
    clusters: list
    n: int

    @property
    def total_dim(self) -> int:
        return sum(c.dim for c in self.clusters)


def _radius_bound(center: complex, m: int, tol: ToleranceConfig) -> float:
    # a Jordan block of size m perturbed by delta splits into a circle of radius ~delta^(1/m)
    return max(1.0, abs(center)) * tol.cluster_tol ** (1.0 / m)


def cluster_eigenvalues(values, tol: ToleranceConfig = DEFAULT_TOL) -> list[list[int]]:
    """Group eigenvalues that plausibly come from one perturbed Jordan structure.

    From every ungrouped value take the largest set of its nearest
    neighbours (itself included) whose radius about the set mean is at most
    ``max(1, |mean|) * cluster_tol**(1/m)``, m the set size. The largest such
    set (ties: smallest radius) becomes a cluster; repeat. Returned sorted by mean.
    """
    values = np.asarray(values, dtype=complex)
    remaining = list(range(values.size))
    groups = []
    while remaining:
        idx = np.array(remaining)
        best = None
        for i in remaining:
            order = idx[np.argsort(np.abs(values[idx] - values[i]), kind="stable")]
            for m in range(order.size, 0, -1):
                g = order[:m]
                c = values[g].mean()
                rad = float(np.max(np.abs(values[g] - c)))
                if rad <= _radius_bound(c, m, tol):
                    if best is None or (m, -rad) > (best[0], -best[1]):
                        best = (m, rad, sorted(int(x) for x in g))
                    break
        groups.append(best[2])
        taken = set(best[2])
        remaining = [i for i in remaining if i not in taken]
    groups.sort(key=lambda g: (values[g].mean().real, values[g].mean().imag))
    return groups


def nested_kernels(n_mat, tol: ToleranceConfig = DEFAULT_TOL, antilinear: bool = False,
                   scale: float | None = None, max_steps: int | None = None) -> list:
    """Orthonormal bases of ker N, ker N^2, ... (staircase), until saturation.

    ``antilinear`` treats ``n_mat`` as the antilinear map x -> N conj(x).
    Each rank decision is made on ``P_perp N`` (P_perp projects off the
    previous kernel) against ``rank_tol * ||N||``, never on a matrix power.
    """
    n_mat = np.asarray(n_mat)
    d = n_mat.shape[0]
    real = not np.iscomplexobj(n_mat)
    scale = norm(n_mat) if scale is None else scale
    kernels = []
    prev = np.zeros((d, 0), dtype=n_mat.dtype)
    steps = d if max_steps is None else max_steps
    for _ in range(steps):
        proj = np.eye(d) - prev @ prev.conj().T
        mat = proj @ n_mat
        if scale == 0:
            ker = np.eye(d, dtype=n_mat.dtype)
        else:
            _, ker = rank_and_kernel(mat, tol, scale=scale)
            if real:
                ker = ker.real
            if antilinear:
                ker = ker.conj()
        if ker.shape[1] <= prev.shape[1]:
            break
        # keep nestedness exact: prev plus the part of ker orthogonal to it
        extra = ker - prev @ (prev.conj().T @ ker)
        u, sv, _ = np.linalg.svd(extra, full_matrices=False)
        add = u[:, : ker.shape[1] - prev.shape[1]]
        prev = np.hstack([prev, add])
        kernels.append(prev)
        if prev.shape[1] == d:
            break
    return kernels


def jordan_sizes_from_dims(dims, divisor: int = 1) -> list:
    """[(size, count)] with sizes decreasing from kernel dimensions of N^j."""
    dims = [0] + [d // divisor for d in dims]
    ge = [dims[j] - dims[j - 1] for j in range(1, len(dims))]  # blocks of size >= j
    out = []
    for j in range(len(ge), 0, -1):
        exact = ge[j - 1] - (ge[j] if j < len(ge) else 0)
        if exact < 0:
            raise NumericalFailure(f"inconsistent kernel dimensions {dims[1:]}")
        if exact:
            out.append((j, exact))
    return out


def _invariant_basis(t, z, select) -> np.ndarray:
    sel = np.asarray(select, dtype=np.int32)
    ts, qs, _, m, _, _, info = lapack.ztrsen(sel, t, z, job="N")
    if info != 0:
        raise NumericalFailure(f"Schur reordering failed (info={info})")
    return qs[:, :m]


def spectral_profile(c, tol: ToleranceConfig = DEFAULT_TOL) -> SpectralProfile:
    """Clusters of eigenvalues of B = C conj(C) with bases of W_lambda and Jordan sizes."""
    c = as_matrix(c)
    prof = linear_profile(square_operator(c), tol)
    for cl in prof.clusters:
        if cl.family == "negative" and any(r % 2 for _, r in cl.jordan_sizes):
            raise NumericalFailure(
                f"negative cluster {cl.lambda_sq} has unpaired Jordan blocks {cl.jordan_sizes}")
    return prof


def linear_profile(b, tol: ToleranceConfig = DEFAULT_TOL) -> SpectralProfile:
    """Clusters of a linear operator whose nonreal eigenvalues come in conjugate pairs.

    A nonreal cluster is stored once (Im > 0) with a basis of W_mu + W_conj(mu);
    its Jordan sizes are those of the Im > 0 half.
    """
    b = as_matrix(b)
    n = b.shape[0]
    if n == 0:
        return SpectralProfile([], 0)
    try:
        t, z = schur(b, output="complex")
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Schur decomposition failed: {exc}") from exc
    values = np.diag(t).copy()
    groups = cluster_eigenvalues(values, tol)
    centers = []
    for g in groups:
        cen = values[g].mean()
        bound = _radius_bound(cen, len(g), tol)
        if abs(cen.imag) <= bound:
            cen = complex(cen.real, 0.0)
        if abs(cen.real) <= bound:
            cen = complex(0.0, cen.imag)
        if abs(cen) <= _radius_bound(0, len(g), tol):
            cen = 0j
        centers.append(cen)

    used = set()
    clusters = []
    for i, g in enumerate(groups):
        if i in used:
            continue
        cen = centers[i]
        if cen.imag == 0:
            used.add(i)
            members = [i]
            lam_sq = cen
        else:
            candidates = [j for j in range(len(groups))
                          if j not in used and j != i and centers[j].imag != 0
                          and len(groups[j]) == len(g)]
            if not candidates:
                raise NumericalFailure(f"eigenvalue cluster {cen} has no conjugate partner")
            j = min(candidates, key=lambda j: abs(centers[j] - cen.conjugate()))
            used.update((i, j))
            members = [i, j]
            lam_sq = (cen + centers[j].conjugate()) / 2
            if lam_sq.imag < 0:
                lam_sq = lam_sq.conjugate()
        select = np.zeros(n, dtype=bool)
        for mi in members:
            select[groups[mi]] = True
        basis = _invariant_basis(t, z, select)
        local_b = basis.conj().T @ b @ basis
        nmat = local_b - lam_sq * np.eye(basis.shape[1])
        dims = [k.shape[1] for k in nested_kernels(nmat, tol, scale=max(norm(local_b), 1.0))]
        sizes = jordan_sizes_from_dims(dims)
        expected = basis.shape[1] // (2 if len(members) == 2 else 1)
        if (dims[-1] if dims else 0) != expected:
            raise NumericalFailure(
                f"generalized eigenspace of {lam_sq} has dimension {dims[-1] if dims else 0},"
                f" expected {expected}")
        clusters.append(Cluster(complex(lam_sq), sizes, basis))

    clusters.sort(key=lambda cl: (cl.lambda_sq.imag != 0, cl.lambda_sq.real, cl.lambda_sq.imag))
    prof = SpectralProfile(clusters, n)
    if prof.total_dim != n:
        raise NumericalFailure(f"cluster dimensions sum to {prof.total_dim}, expected {n}")
    return prof


def restrict_pair(p: SelfAdjointPair, sub, tol: ToleranceConfig = DEFAULT_TOL,
                  check: bool = True) -> SelfAdjointPair:
    """Matrices of l and A on an A-invariant subspace spanned by ``sub``'s columns.

    H' = V^* H V and C' solves V C' = C conj(V) in the least-squares sense.
    """
    v = sub.columns if isinstance(sub, SubspaceBasis) else np.asarray(sub, dtype=complex)
    h = v.conj().T @ p.H @ v
    target = p.C @ v.conj()
    c, *_ = np.linalg.lstsq(v, target, rcond=None)
    if check:
        inv_res = norm(v @ c - target) / (max(norm(p.C), 1.0) * max(norm(v), 1e-300))
        if inv_res > tol.verify_tol:
            raise NumericalFailure(f"subspace is not A-invariant (residual {inv_res:.3g})")
        sv = np.linalg.svd(h, compute_uv=False)
        if sv.size and sv[-1] <= tol.rank_tol * max(norm(p.H) * norm(v) ** 2, 1e-300):
            raise NumericalFailure("the form is degenerate on the subspace")
    h = (h + h.conj().T) / 2
    return SelfAdjointPair(h, c)


def orthogonal_complement(p: SelfAdjointPair, v, tol: ToleranceConfig = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of {w : l(w, v_i) = 0 for all columns v_i}."""
    cols = v.columns if isinstance(v, SubspaceBasis) else np.asarray(v, dtype=complex)
    if cols.shape[1] == 0:
        return SubspaceBasis(np.eye(p.n, dtype=complex), "complement")
    g = cols.conj().T @ p.H @ cols
    sv = np.linalg.svd(g, compute_uv=False)
    if sv[-1] <= tol.rank_tol * max(norm(p.H) * norm(cols) ** 2, 1e-300):
        raise NumericalFailure("the form is degenerate on the given span")
    # l(w, v_i) = v_i^* H w
    constraint = cols.conj().T @ p.H
    _, _, vh = np.linalg.svd(constraint)
    ker = vh[cols.shape[1]:].conj().T
    return SubspaceBasis(ker, "complement")


def primary_decomposition(p: SelfAdjointPair, profile: SpectralProfile,
                          tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """One basis of W_lambda per cluster, checked for l-orthogonality and A-invariance."""
    subs = [SubspaceBasis(cl.basis, f"W[{cl.lambda_sq}]") for cl in profile.clusters]
    if sum(s.dim for s in subs) != p.n:
        raise InputError("profile dimensions do not match the pair")
    hn = norm(p.H)
    for i, s in enumerate(subs):
        img = p.C @ s.columns.conj()
        off = img - s.columns @ (s.columns.conj().T @ img)
        if norm(off) > tol.verify_tol * max(norm(p.C), 1.0):
            raise NumericalFailure(f"W for cluster {i} is not A-invariant")
        for j in range(i):
            cross = subs[j].columns.conj().T @ p.H @ s.columns
            if norm(cross) > tol.verify_tol * hn:
                raise NumericalFailure(f"clusters {j} and {i} are not l-orthogonal")
    return subs


def real_filtration(p: SelfAdjointPair, lam: float, k: int,
                    tol: ToleranceConfig = DEFAULT_TOL) -> SubspaceBasis:
    """Real basis of {x : (A - lam I)^k x = 0}, returned as complex vectors.

    The map x -> C conj(x) - lam x is realified on 2n coordinates; by the
    half-space property the returned vectors are also complex-independent.
    """
    if isinstance(lam, complex):
        if lam.imag != 0:
            raise InputError("real_filtration needs a real eigenvalue")
        lam = lam.real
    lmat = realify(p.C) - lam * np.eye(2 * p.n)
    kers = nested_kernels(lmat, tol, max_steps=k, scale=max(norm(lmat), 1.0))
    if not kers:
        return SubspaceBasis(np.zeros((p.n, 0), dtype=complex), f"Wtilde[{lam}]^({k})")
    return SubspaceBasis(complexify(kers[-1]), f"Wtilde[{lam}]^({k})")
