#!/usr/bin/env python3
"""Success rate and worst residual of canonicalize_pair as the 2-norm
condition number of the basis change grows, broken down by block family.

The basis change is U diag(s) V with Haar unitaries U, V and singular values
spaced geometrically from 1 to cond, so each row has exactly that condition.

Prints CSV: family,cond,trials,success,worst_residual,median_seconds
"""
import argparse
import csv
import statistics
import sys
import time

import numpy as np

from hermpair.canonicalizer import canonicalize_pair
from scipy.stats import unitary_group

from hermpair.atlas import assemble, sort_blocks
from hermpair.harness import block_keys, parse_spec
from hermpair.linalg import NumericalFailure
from hermpair.pair import SelfAdjointPair, apply_basis_change

SPECS = {
    "positive-real": [(4.0, 2, 1), (2.25, 1, -1), (4.0, 1, -1)],
    "zero": [(0, 3, -1), (0, 2, 1)],
    "negative": [(-1.0, 2, 1), (-4.0, 1, 1)],
    "nonreal": [(1 + 1j, 2, 1), (2j, 1, 1)],
}


def conditioned_matrix(n, cond, rng):
    u = unitary_group.rvs(n, random_state=rng)
    v = unitary_group.rvs(n, random_state=rng)
    return u @ np.diag(np.geomspace(1.0, cond, n)) @ v


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--conds", type=float, nargs="+", default=[10, 1e2, 1e3, 1e4, 1e5])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = csv.writer(sys.stdout)
    out.writerow(["family", "cond", "trials", "success", "worst_residual", "median_seconds"])
    for family, spec in SPECS.items():
        blocks = parse_spec(spec)
        n = sum(b.dim for b in blocks)
        base = SelfAdjointPair(*assemble(blocks))
        truth = sort_blocks(blocks)
        for cond in args.conds:
            rng = np.random.default_rng(args.seed)
            ok, worst, times = 0, 0.0, []
            for _ in range(args.trials):
                p = apply_basis_change(base, conditioned_matrix(n, cond, rng), validate=False)
                t0 = time.perf_counter()
                try:
                    form = canonicalize_pair(p)
                except NumericalFailure:
                    times.append(time.perf_counter() - t0)
                    continue
                times.append(time.perf_counter() - t0)
                worst = max(worst, form.residuals["residual_H"], form.residuals["residual_C"])
                ok += block_keys(form.blocks) == block_keys(truth)
            out.writerow([family, f"{cond:g}", args.trials, ok, f"{worst:.2e}",
                          f"{statistics.median(times):.4f}"])
            sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
