"""Command line interface.

Exit codes: 0 success, 1 validation failure, 2 numerical failure or failed
verification, 3 I/O or parse error. Tolerances come from ``--rank-tol`` etc.,
then ``HERMPAIR_RANK_TOL`` / ``HERMPAIR_VERIFY_TOL`` / ``HERMPAIR_CLUSTER_TOL``,
then the defaults.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np
from scipy.linalg import block_diag

from .altforms import alt_canonicalize, block_converter
from .atlas import CanonicalBlock, assemble, build_alt_block, build_pair_block
from .canonicalizer import CanonicalForm, canonicalize_operator, canonicalize_pair, verify_canonical
from .glr import glr_canonicalize
from .harness import random_canonical_pair
from .linalg import DEFAULT_TOL, InputError, NumericalFailure, ToleranceConfig
from .pair import SelfAdjointPair, ValidationError, square_operator, validate_pair

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3
ENV_PREFIX = "HERMPAIR_"


class ParseError(Exception):
    pass


# ---------------------------------------------------------------- JSON helpers

def encode_matrix(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_matrix(data, n=None, name="matrix") -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: entries must be [re, im] number pairs") from exc
    if arr.ndim == 2 and arr.size == 0:
        arr = arr.reshape(0, 0, 2)
    if arr.ndim != 3 or arr.shape[-1] != 2 or arr.shape[0] != arr.shape[1]:
        raise ParseError(f"{name}: expected a square array of [re, im] pairs, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ParseError(f"{name}: declared n={n} but matrix is {arr.shape[0]}x{arr.shape[1]}")
    return arr[..., 0] + 1j * arr[..., 1]


def pair_document(h, c) -> dict:
    return {"n": int(np.shape(c)[0]), "H": encode_matrix(h), "C": encode_matrix(c)}


def read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def read_pair_matrices(path):
    doc = read_json(path)
    if not isinstance(doc, dict) or "C" not in doc and "B" not in doc:
        raise ParseError(f"{path}: expected an object with keys n, H, C")
    n = doc.get("n")
    h = decode_matrix(doc["H"], n, "H") if doc.get("H") is not None else None
    c = decode_matrix(doc["C"], n, "C") if "C" in doc else None
    b = decode_matrix(doc["B"], n, "B") if "B" in doc else None
    return h, c, b


def write_output(doc, path=None):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ParseError(f"cannot write {path}: {exc}") from exc


def form_from_document(doc) -> CanonicalForm:
    try:
        flavor = doc["flavor"]
        blocks = [CanonicalBlock.from_dict(b) for b in doc["blocks"]]
        m = decode_matrix(doc["M"], None, "M")
    except (KeyError, TypeError) as exc:
        raise ParseError(f"form document is missing a field: {exc}") from exc
    builder = build_alt_block if flavor == "alternative" else build_pair_block
    h_can, c_can = assemble(blocks, builder)
    return CanonicalForm(flavor, blocks, m, None if flavor == "operator-only" else h_can, c_can)


# ---------------------------------------------------------------- tolerances

def resolve_tolerances(args) -> ToleranceConfig:
    values = {}
    for name in ("rank_tol", "verify_tol", "cluster_tol"):
        flag = getattr(args, name, None)
        env = os.environ.get(ENV_PREFIX + name.upper())
        if flag is not None:
            values[name] = flag
        elif env is not None:
            try:
                values[name] = float(env)
            except ValueError as exc:
                raise ParseError(f"{ENV_PREFIX + name.upper()}={env!r} is not a number") from exc
        else:
            values[name] = getattr(DEFAULT_TOL, name)
    return ToleranceConfig(**values)


# ---------------------------------------------------------------- commands

def cmd_validate(args, tol):
    h, c, _ = read_pair_matrices(args.input)
    if h is None or c is None:
        raise ParseError("validate needs both H and C")
    p = validate_pair(h, c, tol)
    write_output({"valid": True, "n": p.n, "residuals": p.residuals}, args.output)
    return EXIT_OK


def cmd_canonicalize(args, tol):
    h, c, b = read_pair_matrices(args.input)
    if args.form == "operator":
        if c is None:
            raise ParseError("operator form needs C")
        form = canonicalize_operator(c, tol)
    elif args.form == "glr":
        if h is None:
            raise ParseError("glr form needs H")
        form = glr_canonicalize(h, b if b is not None else square_operator(c), tol)
    else:
        if h is None or c is None:
            raise ParseError("pair forms need H and C")
        p = validate_pair(h, c, tol)
        form = alt_canonicalize(p, tol) if args.form == "alt" else canonicalize_pair(p, tol)
    write_output(form.to_dict(), args.output)
    return EXIT_OK


def cmd_convert(args, tol):
    form = form_from_document(read_json(args.input))
    target = "alternative" if args.to == "alt" else "standard"
    if form.flavor not in ("standard", "alternative"):
        raise InputError(f"cannot convert a {form.flavor} form")
    if form.flavor != target and form.blocks:
        t = block_diag(*[block_converter(b, tol) for b in form.blocks])
        m = t @ form.transition if target == "alternative" else np.linalg.solve(t, form.transition)
    else:
        m = form.transition
    builder = build_alt_block if target == "alternative" else build_pair_block
    h_can, c_can = assemble(form.blocks, builder)
    out = CanonicalForm(target, form.blocks, m, h_can, c_can)
    if args.pair:
        h, c, _ = read_pair_matrices(args.pair)
        out.residuals = verify_canonical(SelfAdjointPair(h, c), out, tol)
    write_output(out.to_dict(), args.output)
    return EXIT_OK


def cmd_generate(args, tol):
    p, blocks = random_canonical_pair(args.size, args.spec, seed=args.seed, identity=args.identity)
    doc = pair_document(p.H, p.C)
    doc["blocks"] = [b.to_dict() for b in blocks]
    write_output(doc, args.output)
    return EXIT_OK


def cmd_verify(args, tol):
    h, c, b = read_pair_matrices(args.input)
    form = form_from_document(read_json(args.form))
    if form.flavor == "glr":
        raise InputError("verify supports pair and operator forms")
    report = verify_canonical(SelfAdjointPair(h, c), form, tol)
    write_output({"passed": bool(report["passed"]),
                  "residuals": {k: float(v) for k, v in report.items() if k != "passed"}},
                 args.output)
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


def cmd_selftest(args, tol):
    from .selftest import run_selftest

    results = run_selftest(trials=args.trials, seed=args.seed, tol=tol)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERICAL


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rank-tol", dest="rank_tol", type=float)
    common.add_argument("--verify-tol", dest="verify_tol", type=float)
    common.add_argument("--cluster-tol", dest="cluster_tol", type=float)
    common.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    parser = argparse.ArgumentParser(prog="hermpair", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a pair file")
    p.add_argument("--input", "-i", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("canonicalize", parents=[common], help="compute a canonical form")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--form", choices=("standard", "alt", "operator", "glr"), default="standard")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("convert", parents=[common], help="standard <-> alternative form document")
    p.add_argument("--input", "-i", required=True, help="form document")
    p.add_argument("--to", choices=("standard", "alt"), required=True)
    p.add_argument("--pair", help="optional pair file to verify the converted form against")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("generate", parents=[common], help="random pair with known blocks")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spec", default=None, help='blocks as "lambda_sq:k[:eps],..." e.g. "4:2:-1,i:1"')
    p.add_argument("--identity", action="store_true", help="skip the random conjugation")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", parents=[common], help="check a form document against a pair")
    p.add_argument("--input", "-i", required=True, help="pair file")
    p.add_argument("--form", "-f", required=True, help="form document")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("selftest", parents=[common], help="quick acceptance run")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = resolve_tolerances(args)
        return args.func(args, tol)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"validation failed ({exc.condition}): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
