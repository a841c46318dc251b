"""Random pairs with known canonical form, orbit comparison and small oracles."""
from __future__ import annotations

import re

import numpy as np

from .atlas import CanonicalBlock, assemble, sort_blocks
from .canonicalizer import canonicalize_pair
from .linalg import DEFAULT_TOL, InputError, ToleranceConfig, random_well_conditioned, signature
from .pair import SelfAdjointPair, apply_basis_change, validate_pair

# well separated values of lambda^2 covering every family
PALETTE = (4.0, 1.0, 0.0, -1.0, -4.0, 1j, 1 + 1j, 2j, 2.25, -2 + 1j)


def policy_epsilon(b: CanonicalBlock) -> int:
    """The sign the canonicalizer reports for a block: kept only where it is an invariant."""
    eps = 1 if b.epsilon is None else b.epsilon
    if b.family == "positive-real" or (b.family == "zero" and b.k % 2):
        return eps
    return 1


def block_key(b: CanonicalBlock, tol: ToleranceConfig = DEFAULT_TOL) -> tuple:
    grid = tol.cluster_tol
    ls = complex(b.lambda_sq)
    return (b.family, round(ls.real / grid), round(ls.imag / grid), b.k, policy_epsilon(b))


def block_keys(blocks, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    return sorted(block_key(b, tol) for b in blocks)


def parse_spec(spec) -> list:
    """Blocks from CanonicalBlocks, (lambda_sq, k[, eps]) tuples or a string like "4:2:-1,1j:1"."""
    if spec is None:
        return []
    if isinstance(spec, str):
        items = []
        for part in filter(None, (s.strip() for s in spec.split(","))):
            fields = part.split(":")
            if len(fields) not in (2, 3):
                raise InputError(f"bad block spec {part!r}; expected lambda_sq:k[:eps]")
            try:
                ls = complex(re.sub(r"(?<![\d.])j", "1j", fields[0].replace("i", "j")))
                k = int(fields[1])
                eps = int(fields[2]) if len(fields) == 3 else 1
            except ValueError as exc:
                raise InputError(f"bad block spec {part!r}") from exc
            items.append((ls, k, eps))
        spec = items
    out = []
    for item in spec:
        if isinstance(item, CanonicalBlock):
            out.append(item)
        elif isinstance(item, dict):
            out.append(CanonicalBlock.from_dict(item))
        else:
            ls, k, *rest = item
            out.append(CanonicalBlock.from_lambda_sq(ls, k, rest[0] if rest else 1))
    return out


def random_spec(n: int, rng: np.random.Generator, max_k: int = 3, palette=PALETTE) -> list:
    """Random block list of total dimension exactly n."""
    blocks, left = [], n
    while left:
        ls = palette[rng.integers(len(palette))]
        k = int(rng.integers(1, max_k + 1))
        b = CanonicalBlock.from_lambda_sq(ls, k, int(rng.choice([1, -1])))
        if b.dim <= left:
            blocks.append(b)
            left -= b.dim
    return blocks


def random_canonical_pair(n: int, spectrum_spec=None, seed=None, identity: bool = False,
                          max_cond: float = 100.0):
    """A random conjugate of the assembled atlas pair, plus its sorted ground-truth blocks."""
    rng = np.random.default_rng(seed)
    blocks = parse_spec(spectrum_spec) if spectrum_spec is not None else random_spec(n, rng)
    if sum(b.dim for b in blocks) != n:
        raise InputError(f"block dimensions sum to {sum(b.dim for b in blocks)}, not {n}")
    h, c = assemble(blocks)
    base = SelfAdjointPair(h, c)
    m = np.eye(n, dtype=complex) if identity else random_well_conditioned(n, rng, max_cond)
    return apply_basis_change(base, m, validate=False), sort_blocks(blocks)


def orbit_check(p, q, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True when both pairs have the same canonical block list."""
    fp = canonicalize_pair(p, tol)
    fq = canonicalize_pair(q, tol)
    return block_keys(fp.blocks, tol) == block_keys(fq.blocks, tol)


def brute_force_1d_oracle(h, c) -> CanonicalBlock:
    """Canonical block of a 1x1 pair: |c| is the only invariant besides sign(h)."""
    h = complex(np.asarray(h).reshape(-1)[0]) if np.ndim(h) else complex(h)
    c = complex(np.asarray(c).reshape(-1)[0]) if np.ndim(c) else complex(c)
    if h == 0 or abs(h.imag) > 0:
        raise InputError("h must be a nonzero real number")
    eps = 1 if h.real > 0 else -1
    if c == 0:
        return CanonicalBlock("zero", 0, 1, eps)
    return CanonicalBlock("positive-real", abs(c) ** 2, 1, eps)


def round_trip_trial(seed: int, n_max: int = 8, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Generate, canonicalize and compare with ground truth; returns a record."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, n_max + 1))
    p, truth = random_canonical_pair(n, random_spec(n, rng), seed=rng.integers(2 ** 32))
    valid = validate_pair(p.H, p.C, tol)
    form = canonicalize_pair(valid, tol)
    return {
        "seed": seed,
        "n": n,
        "residuals": form.residuals,
        "blocks_match": block_keys(form.blocks, tol) == block_keys(truth, tol),
        "signature_match": signature(valid.H, tol) == signature(form.H_can, tol),
        "families": sorted({b.family for b in truth}),
    }


__all__ = [
    "PALETTE",
    "block_key",
    "block_keys",
    "brute_force_1d_oracle",
    "orbit_check",
    "parse_spec",
    "policy_epsilon",
    "random_canonical_pair",
    "random_spec",
    "round_trip_trial",
]
