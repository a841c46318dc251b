"""The ten acceptance checks as plain functions.

Each ``criterion_*`` returns a :class:`CriterionResult`; trial counts are
parameters so that the CLI self-test can run a reduced version.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .altforms import explicit_zero6_converter
from .atlas import (
    FAMILIES,
    CanonicalBlock,
    assemble,
    build_alt_block,
    build_pair_block,
    catalan_closed_form,
    catalan_coefficients,
)
from .canonicalizer import canonicalize_operator, canonicalize_pair, witness_form
from .glr import glr_canonicalize, pair_blocks_to_glr
from .harness import (
    block_keys,
    brute_force_1d_oracle,
    random_canonical_pair,
    random_spec,
)
from .linalg import DEFAULT_TOL, ToleranceConfig, random_well_conditioned, signature
from .normalizers import normalize_positive
from .pair import SelfAdjointPair, apply_basis_change, square_operator, validate_pair
from .spectral import linear_profile


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] #{self.number} {self.name}: {self.detail}"


def _family_spec(n, rng, require=None):
    spec = random_spec(n, rng)
    if require is not None and require not in {b.family for b in spec}:
        seed_block = {"positive-real": (4.0, 1), "zero": (0, 1),
                      "negative": (-1.0, 1), "nonreal": (1j, 1)}[require]
        first = CanonicalBlock.from_lambda_sq(*seed_block, 1)
        spec = [first] + random_spec(n - first.dim, rng) if n >= first.dim else spec
    return spec


# ---------------------------------------------------------------- 1 and 3

def criterion_round_trip(trials=500, seed=0, n_max=8, tol: ToleranceConfig = DEFAULT_TOL,
                         time_limit=60.0) -> tuple:
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    passed = sig_ok = 0
    worst = 0.0
    seen = set()
    for t in range(trials):
        n = int(rng.integers(2, n_max + 1))
        require = FAMILIES[t % 4]
        spec = _family_spec(n, rng, require)
        p, truth = random_canonical_pair(n, spec, seed=int(rng.integers(2 ** 32)))
        p = validate_pair(p.H, p.C, tol)
        seen.update(b.family for b in truth)
        try:
            form = canonicalize_pair(p, tol)
        except Exception:  # noqa: BLE001 - a failure counts against the criterion
            continue
        res = max(form.residuals["residual_H"], form.residuals["residual_C"])
        worst = max(worst, res)
        if res <= 1e-6 and block_keys(form.blocks, tol) == block_keys(truth, tol):
            passed += 1
        if signature(p.H, tol) == signature(form.H_can, tol):
            sig_ok += 1
    elapsed = time.perf_counter() - start
    ok = passed == trials and elapsed < time_limit and seen == set(FAMILIES)
    r1 = CriterionResult(1, "round-trip canonicalization", ok,
                         f"{passed}/{trials} verified, worst residual {worst:.2e}, {elapsed:.1f}s",
                         {"passed": passed, "trials": trials, "elapsed": elapsed, "worst": worst})
    return r1, sig_ok, trials


def criterion_orbit_invariance(configs=100, conjugates=10, seed=1, n_max=8,
                               tol: ToleranceConfig = DEFAULT_TOL) -> tuple:
    rng = np.random.default_rng(seed)
    ok_configs = sig_ok = sig_total = 0
    for _ in range(configs):
        n = int(rng.integers(2, n_max + 1))
        spec = random_spec(n, rng)
        h, c = assemble(spec)
        base = SelfAdjointPair(h, c)
        keys = set()
        for _ in range(conjugates):
            m = random_well_conditioned(n, rng)
            q = apply_basis_change(base, m, tol)
            sig_total += 1
            try:
                form = canonicalize_pair(q, tol)
            except Exception:  # noqa: BLE001
                keys.add(None)
                continue
            keys.add(tuple(block_keys(form.blocks, tol)))
            if signature(q.H, tol) == signature(form.H_can, tol):
                sig_ok += 1
        if len(keys) == 1 and None not in keys:
            ok_configs += 1
    r2 = CriterionResult(2, "orbit invariance", ok_configs == configs,
                         f"{ok_configs}/{configs} configurations gave one block list over {conjugates} conjugates")
    return r2, sig_ok, sig_total


def criterion_signature(counts) -> CriterionResult:
    good = sum(c[0] for c in counts)
    total = sum(c[1] for c in counts)
    return CriterionResult(3, "signature conservation", good == total, f"{good}/{total} trials")


# ---------------------------------------------------------------- 4

def _exact_square_ok(lam: Fraction, k: int) -> bool:
    c = catalan_coefficients(lam, k)
    x = [[c[j - i] if j >= i else Fraction(0) for j in range(k)] for i in range(k)]
    sq = [[sum((x[i][m] * x[m][j] for m in range(k)), Fraction(0)) for j in range(k)] for i in range(k)]
    target = [[lam * lam if i == j else (Fraction(1) if j == i + 1 else Fraction(0))
               for j in range(k)] for i in range(k)]
    return sq == target


def criterion_catalan() -> CriterionResult:
    lams = [Fraction(1), Fraction(1, 2), Fraction(3)]
    closed = all(catalan_coefficients(lam, 13)[i] == catalan_closed_form(lam, i)
                 for lam in lams for i in range(1, 13))
    halves = [abs(x) for x in catalan_coefficients(Fraction(1, 2), 7)[1:]]
    catalan_ok = halves == [1, 1, 2, 5, 14, 42]
    squares = all(_exact_square_ok(lam, k) for lam in lams for k in range(1, 13))
    ok = closed and catalan_ok and squares
    return CriterionResult(4, "exact Catalan suite", ok,
                           f"closed form {closed}, |c_i(1/2)| = {[int(h) for h in halves]}, "
                           f"squares exact {squares}")


# ---------------------------------------------------------------- 5

def criterion_explicit_converter() -> CriterionResult:
    t = explicit_zero6_converter()
    h, c = build_pair_block(CanonicalBlock("zero", 0, 6, 1))
    n_alt, m_alt = build_alt_block(CanonicalBlock("zero", 0, 6, 1))
    ti = np.linalg.inv(t)
    rh = float(np.max(np.abs(ti.conj().T @ h @ ti - n_alt)))
    rc = float(np.max(np.abs(t @ c @ np.linalg.inv(t.conj()) - m_alt)))
    return CriterionResult(5, "explicit nilpotent converter", max(rh, rc) <= 1e-12,
                           f"H residual {rh:.1e}, C residual {rc:.1e}")


# ---------------------------------------------------------------- 6

def _expected_square_structure(b: CanonicalBlock) -> list:
    """[(lambda_sq, sorted Jordan sizes)] of the square of the block's operator."""
    if b.family == "zero":
        h = b.k // 2
        sizes = sorted([b.k - h, h] if h else [b.k], reverse=True)
        return [(0j, sizes)]
    if b.family == "nonreal":
        return [(b.lambda_sq, [b.k])]
    if b.family == "negative":
        return [(b.lambda_sq, [b.k, b.k])]
    return [(b.lambda_sq, [b.k])]


def _structure(sq, tol) -> list:
    out = []
    for cl in linear_profile(sq, tol).clusters:
        sizes = sorted((s for s, m in cl.jordan_sizes for _ in range(m)), reverse=True)
        out.append((cl.lambda_sq, sizes))
    return out


def _structure_matches(got, expected) -> bool:
    if len(got) != len(expected):
        return False
    return all(abs(g[0] - e[0]) <= 1e-10 * max(1, abs(e[0])) and g[1] == e[1]
               for g, e in zip(sorted(got, key=lambda x: (x[0].real, x[0].imag)),
                               sorted(expected, key=lambda x: (x[0].real, x[0].imag))))


def _glr_jordan(b: CanonicalBlock):
    from .atlas import build_basic

    j = build_basic("J", b.k, b.lambda_sq)
    if b.real_lambda:
        return j
    return np.block([[j, np.zeros_like(j)], [np.zeros_like(j), build_basic("J", b.k, np.conj(b.lambda_sq))]])


def criterion_atlas(k_max=8, tol: ToleranceConfig = DEFAULT_TOL) -> CriterionResult:
    palette = [4.0, 2.25, 0.0, -1.0, -4.0, 1j, 1 + 1j, -2 + 1j]
    checked = bad = 0
    worst = 0.0
    for ls in palette:
        for k in range(1, k_max + 1):
            for eps in (1, -1):
                b = CanonicalBlock.from_lambda_sq(ls, k, eps)
                for builder in (build_pair_block, build_alt_block):
                    checked += 1
                    h, c = builder(b)
                    try:
                        validate_pair(h, c, tol)
                    except Exception:  # noqa: BLE001
                        bad += 1
                        continue
                    sq = c @ c.conj()
                    if builder is build_alt_block and b.family != "zero":
                        err = float(np.max(np.abs(sq - _glr_jordan(b))))
                        worst = max(worst, err)
                        if err > 1e-10:
                            bad += 1
                    elif not _structure_matches(_structure(sq, tol), _expected_square_structure(b)):
                        bad += 1
    return CriterionResult(6, "atlas validity", bad == 0,
                           f"{checked - bad}/{checked} atlas pairs valid with correct square, "
                           f"max alternative-square error {worst:.1e}")


# ---------------------------------------------------------------- 7

def _random_operator(rng, n):
    if rng.random() < 0.3:
        return rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    spec = random_spec(n, rng)
    _, c = assemble(spec)
    m = random_well_conditioned(n, rng)
    return m @ c @ np.linalg.inv(m.conj())


def _lk_keys(blocks, tol):
    return sorted((k[0], k[1], k[2], k[3]) for k in block_keys(blocks, tol))


def criterion_hong_horn(trials=200, seed=7, n_max=6, tol: ToleranceConfig = DEFAULT_TOL) -> CriterionResult:
    rng = np.random.default_rng(seed)
    good = 0
    for _ in range(trials):
        n = int(rng.integers(1, n_max + 1))
        c = _random_operator(rng, n)
        try:
            op = canonicalize_operator(c, tol)
            h = witness_form(c, tol)
            pair = canonicalize_pair(validate_pair(h, c, tol), tol)
        except Exception:  # noqa: BLE001
            continue
        if _lk_keys(op.blocks, tol) == _lk_keys(pair.blocks, tol):
            good += 1
    return CriterionResult(7, "operator-only consistency", good == trials, f"{good}/{trials} operators")


# ---------------------------------------------------------------- 8

def _glr_keys(blocks, tol):
    g = tol.cluster_tol
    return sorted((round(b.eta.real / g), round(b.eta.imag / g), b.k, b.epsilon) for b in blocks)


def criterion_glr(trials=100, seed=11, n_max=8, tol: ToleranceConfig = DEFAULT_TOL) -> CriterionResult:
    rng = np.random.default_rng(seed)
    palette = (4.0, 1.0, -1.0, -4.0, 1j, 1 + 1j, 2j, 2.25, -2 + 1j)
    good = 0
    for _ in range(trials):
        n = int(rng.integers(1, n_max + 1))
        spec = random_spec(n, rng, palette=palette)
        p, _ = random_canonical_pair(n, spec, seed=int(rng.integers(2 ** 32)))
        try:
            form = canonicalize_pair(p, tol)
            glr = glr_canonicalize(p.H, square_operator(p.C), tol)
        except Exception:  # noqa: BLE001
            continue
        if _glr_keys(pair_blocks_to_glr(form.blocks), tol) == _glr_keys(glr.blocks, tol):
            good += 1
    return CriterionResult(8, "GLR consistency", good == trials, f"{good}/{trials} nonsingular pairs")


# ---------------------------------------------------------------- 9

def hankel_determinant_prediction(k: int, corner: complex) -> complex:
    return math.sqrt(2) * math.sin((2 * k * math.pi + math.pi) / 4) * corner ** k


def criterion_hankel_det(k_max=8, seed=3, tol: ToleranceConfig = DEFAULT_TOL) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(1, k_max + 1):
        lam_sq = float(rng.uniform(0.5, 4.0))
        eps = int(rng.choice([1, -1]))
        p, _ = random_canonical_pair(k, [(lam_sq, k, eps)], seed=int(rng.integers(2 ** 32)))
        chain, _ = normalize_positive(p, lam_sq, tol)
        gram = chain.diagnostics["gram"]
        det = np.linalg.det(gram)
        pred = hankel_determinant_prediction(k, gram[0, k - 1])
        worst = max(worst, abs(det - pred) / max(abs(pred), 1e-300))
    return CriterionResult(9, "anti-triangular Hankel determinant", worst <= 1e-8,
                           f"max relative error {worst:.1e} over k=1..{k_max}")


# ---------------------------------------------------------------- 10

def criterion_scalar_oracle(trials=1000, seed=5, tol: ToleranceConfig = DEFAULT_TOL) -> CriterionResult:
    rng = np.random.default_rng(seed)
    good = 0
    for t in range(trials):
        h = float(rng.uniform(-2, 2)) or 1.0
        c = 0j if t % 10 == 0 else complex(*rng.uniform(-2, 2, 2))
        try:
            form = canonicalize_pair((np.array([[h]]), np.array([[c]])), tol)
        except Exception:  # noqa: BLE001
            continue
        if block_keys(form.blocks, tol) == block_keys([brute_force_1d_oracle(h, c)], tol):
            good += 1
    return CriterionResult(10, "1x1 oracle agreement", good == trials, f"{good}/{trials} scalars")


def run_all(scale: float = 1.0, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """All ten criteria; ``scale`` < 1 shrinks the trial counts."""
    def n(x):
        return max(1, int(round(x * scale)))

    r1, s1, t1 = criterion_round_trip(trials=n(500), tol=tol)
    r2, s2, t2 = criterion_orbit_invariance(configs=n(100), tol=tol)
    return [
        r1,
        r2,
        criterion_signature([(s1, t1), (s2, t2)]),
        criterion_catalan(),
        criterion_explicit_converter(),
        criterion_atlas(tol=tol),
        criterion_hong_horn(trials=n(200), tol=tol),
        criterion_glr(trials=n(100), tol=tol),
        criterion_hankel_det(tol=tol),
        criterion_scalar_oracle(trials=n(1000), tol=tol),
    ]
