"""Command-line front end.

Exit codes: 0 run complete (or every acceptance check passed), 1 acceptance
failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys

import numpy as np

from . import __version__
from .channels import channel_from_json, embed_local
from .conditions import classify
from .config import CheckConfig
from .destroyers import destroyer_from_name
from .errors import RDMError
from .monotones import FAMILIES, degeneracy_scan, default_grid, dtilde, measure_by_name
from .numerics import decode_matrix
from .states import state_from_json
from .suite import run_paper_suite


class InputError(Exception):
    """Bad command-line input; reported with exit code 2."""


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _load_aux(kind: str, path: str):
    """Loader for ``twirl:<file>`` (list of unitaries) and ``extreme:<file>`` (state)."""
    obj = _read_json(path)
    if kind == "twirl":
        mats = obj.get("unitaries") if isinstance(obj, dict) else obj
        if not isinstance(mats, list):
            raise InputError(f"{path}: expected a list of unitaries or {{'unitaries': [...]}}")
        return [decode_matrix(m) for m in mats]
    return state_from_json(obj).matrix


def _parse_dims(text):
    if text is None:
        return None
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"--dims must look like 2,2, got {text!r}") from None
    if len(dims) != 2 or min(dims) < 1:
        raise InputError(f"--dims needs two positive integers, got {text!r}")
    return dims


def _config(args) -> CheckConfig:
    return CheckConfig(tol=args.tol, samples=args.samples, remixes=args.remixes, seed=args.seed)


def _versions() -> dict:
    return {"rdmaps": __version__, "numpy": np.__version__, "python": platform.python_version()}


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_classify(args) -> int:
    cfg = _config(args)
    ch = channel_from_json(_read_json(args.channel))
    dims = _parse_dims(args.dims)
    if dims is not None and ch.dim_in == dims[0] and dims[0] * dims[1] != ch.dim_in:
        ch = embed_local(ch, dims[1], "A")
    lam = destroyer_from_name(args.destroyer, dims=dims, dim=ch.dim_in, loader=_load_aux)
    report = classify(ch, lam, cfg).to_json()
    report["config"] = cfg.as_dict()
    report["versions"] = _versions()
    _emit(_dump(report), args.out)
    return 0


def cmd_monotone(args) -> int:
    rho = state_from_json(_read_json(args.state))
    dims = _parse_dims(args.dims) or rho.dims
    lam = destroyer_from_name(args.destroyer, dims=dims, dim=rho.dim, loader=_load_aux)
    value = dtilde(rho, lam, measure_by_name(args.measure))
    _emit("inf\n" if math.isinf(value) else f"{value:.12f}\n", args.out)
    return 0


def cmd_paper_suite(args) -> int:
    cfg = _config(args)
    rows, elapsed = run_paper_suite(cfg)
    for row in rows:
        print(row.line())
    ok = bool(all(r.passed for r in rows))
    print(f"{sum(r.passed for r in rows)}/{len(rows)} checks passed in {elapsed:.1f} s")
    if args.out:
        report = {"config": cfg.as_dict(), "versions": _versions(), "passed": ok,
                  "rows": [r.to_json() for r in rows]}
        _emit(_dump(report), args.out)
    return 0 if ok else 1


def cmd_scan(args) -> int:
    try:
        family = FAMILIES[args.family]
    except KeyError:
        raise InputError(f"unknown family {args.family!r}; choose from {sorted(FAMILIES)}") from None
    if not args.step > 0 or args.hi < args.lo:
        raise InputError("need --step > 0 and --hi >= --lo")
    grid = default_grid(args.lo, args.hi, args.step)
    result = degeneracy_scan(family, grid, jump=args.jump, move=args.move)
    _emit(result.to_csv(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdmaps", description="Resource destroying map toolkit.")
    parser.add_argument("--version", action="version", version=f"rdmaps {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--samples", type=int, default=200)
        p.add_argument("--remixes", type=int, default=1000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("classify", help="decide the free-operation conditions for a channel")
    p.add_argument("channel", help="channel JSON file")
    p.add_argument("--destroyer", required=True, help="dephasing | discord | twirl:<file> | extreme:<file>")
    p.add_argument("--dims", help="bipartite dims d_A,d_B for the discord destroyer")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("monotone", help="evaluate D(rho, lambda(rho))")
    p.add_argument("state", help="state JSON file")
    p.add_argument("--destroyer", required=True)
    p.add_argument("--dims")
    p.add_argument("--measure", default="relative-entropy", help="relative-entropy | trace-distance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_monotone)

    p = sub.add_parser("paper-suite", help="run the example catalog and acceptance checks")
    common(p)
    p.set_defaults(func=cmd_paper_suite)

    p = sub.add_parser("scan", help="diagonal discord along a state family, as CSV")
    p.add_argument("--family", default="swap", help=f"one of {', '.join(sorted(FAMILIES))}")
    p.add_argument("--lo", type=float, default=-0.005)
    p.add_argument("--hi", type=float, default=0.005)
    p.add_argument("--step", type=float, default=5e-4)
    p.add_argument("--jump", type=float, default=0.1)
    p.add_argument("--move", type=float, default=1e-3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, RDMError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
