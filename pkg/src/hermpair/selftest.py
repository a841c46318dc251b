"""Reduced acceptance run for the ``selftest`` command."""
from __future__ import annotations

from .acceptance import run_all
from .linalg import DEFAULT_TOL


def run_selftest(trials: int = 50, seed: int = 0, tol=DEFAULT_TOL) -> list:
    scale = min(1.0, trials / 500)
    return [(f"#{r.number} {r.name}", r.passed, r.detail) for r in run_all(scale=scale, tol=tol)]
