"""Command-line front end: ``distchaos construct | verify | table | replay``.

Exit codes: 0 pass, 1 fail, 2 usage or contract error, 3 inconclusive.
Every command writes ``manifest.json`` next to its outputs; ``replay``
re-runs a manifest and compares output digests.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from . import harmonic as hc
from ._errors import DistChaosError, ContractError, ParameterError
from .constructors import (ConstructionParams, WeightSchedule, WitnessTailBound,
                           build_irregular_entire, build_irregular_harmonic, build_weight_star,
                           choose_block_parameters, named_omega)
from .density import density_profile
from .series import EntireSeries, GrowthEnvelope, orbit_norms
from . import verifier as vf

EXIT = {"pass": 0, "fail": 1, "usage": 2, "inconclusive": 3}


class UsageError(DistChaosError):
    pass


# --------------------------------------------------------------------------
# file helpers

def _sha256_file(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _dump_json(obj) -> str:
    return json.dumps(vf.to_jsonable(obj), sort_keys=True, indent=1) + "\n"


def _write_outputs(out_dir: str, files: Dict[str, str]) -> Dict[str, str]:
    """Write all files at once (nothing is written if rendering failed earlier)."""
    os.makedirs(out_dir, exist_ok=True)
    digests = {}
    for name, text in files.items():
        with open(os.path.join(out_dir, name), "w", newline="") as fh:
            fh.write(text)
        digests[name] = hashlib.sha256(text.encode()).hexdigest()
    return digests


def _write_manifest(out_dir: str, argv: Sequence[str], args, inputs: Sequence[str],
                    outputs: Dict[str, str]):
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    manifest = {
        "command": args.command, "argv": list(argv), "parameters": params,
        "inputs": {os.path.abspath(p): _sha256_file(p) for p in inputs},
        "outputs": outputs, "seed": getattr(args, "seed", None),
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        fh.write(_dump_json(manifest))


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def load_function(source: str):
    """A function from a JSON file, or the shorthands ``exp:CAP`` and ``monomial:N``."""
    if source.startswith("exp:"):
        return EntireSeries.exp(int(source[4:])), []
    if source.startswith("monomial:"):
        return EntireSeries.e_n(int(source[9:])), []
    data = _read_json(source)
    kind = data.get("kind")
    if kind == "entire-series":
        return EntireSeries.from_json(data), [source]
    if kind == "harmonic-poly":
        return hc.MultiIndexPoly.from_json(data), [source]
    raise UsageError(f"{source}: unsupported kind {kind!r}")


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _r_grid(args) -> List[float]:
    if args.r_steps < 1 or not 0 < args.r_min <= args.r_max:
        raise UsageError("need 0 < r-min <= r-max and r-steps >= 1")
    return [float(r) for r in np.linspace(args.r_min, args.r_max, args.r_steps)]


# --------------------------------------------------------------------------
# construct

DEFAULT_PARAMS = {"omega": "log", "K_max": 2, "cap": 200, "alpha": None, "N": None,
                  "A_const": 1.0, "C_const": 1.0, "exact": True}


def _construction_params(kind: str, raw: dict) -> ConstructionParams:
    cfg = dict(DEFAULT_PARAMS)
    cfg.update(raw)
    if kind == "entire":
        alpha, N = "D", 1
    else:
        alpha = tuple(cfg["alpha"] or (1, 0))
        N = int(cfg["N"] or len(alpha))
    if "anchors_a" in cfg:
        a = tuple(int(x) for x in cfg["anchors_a"])
        b = tuple(int(x) for x in cfg.get("anchors_b", [2 * x * x + 1 for x in a]))
        return ConstructionParams(alpha, N, float(cfg["A_const"]), float(cfg["C_const"]), a, b,
                                  int(cfg["cap"]))
    p = choose_block_parameters(alpha, N, int(cfg["K_max"]), cfg["A_const"], cfg["C_const"])
    return p.with_cap(int(cfg["cap"]))


def cmd_construct(args, argv) -> int:
    raw = _read_json(args.params) if args.params else {}
    inputs = [args.params] if args.params else []
    params = _construction_params(args.kind, raw)
    omega = raw.get("omega", DEFAULT_PARAMS["omega"])
    omega_fn = named_omega(omega) if isinstance(omega, str) else omega
    if args.kind == "entire":
        sched = build_weight_star(omega_fn, params.B, params.cap)
        func = build_irregular_entire(params, sched, exact=bool(raw.get("exact", True)))
    else:
        sched = build_weight_star(omega_fn, params.B, params.cap + 1)
        func = build_irregular_harmonic(params, sched)
    files = {"function.json": _dump_json(func.to_json()),
             "params.json": _dump_json(params.to_json()),
             "schedule.json": _dump_json(sched.to_json())}
    digests = _write_outputs(args.out, files)
    _write_manifest(args.out, argv, args, inputs, digests)
    print(f"constructed {args.kind} witness: cap={params.cap} anchors_a={list(params.anchors_a)} "
          f"anchors_b={list(params.anchors_b)} -> {args.out}")
    return 0


# --------------------------------------------------------------------------
# verify

def _load_construction(path: str):
    params = ConstructionParams.from_json(_read_json(os.path.join(path, "params.json")))
    sched = WeightSchedule.from_json(_read_json(os.path.join(path, "schedule.json")))
    return params, sched, [os.path.join(path, "params.json"), os.path.join(path, "schedule.json")]


def _construction_dir(args) -> str:
    if args.construction:
        return args.construction
    if os.path.isfile(args.func):
        return os.path.dirname(os.path.abspath(args.func))
    raise UsageError("this claim needs --construction DIR (params.json and schedule.json)")


def _orbit(func, args, params):
    if not isinstance(func, EntireSeries):
        raise UsageError("orbit claims take an entire series")
    horizon = args.horizon if args.horizon is not None else func.cap
    tail = None
    if horizon > func.cap:
        # a constructed witness only has coefficients on B; a polynomial has none
        tail = WitnessTailBound(params.B) if args.tail == "witness" else 0
    return orbit_norms(func, horizon, args.radius, p=args.p, tail_bound=tail)


def _apply_overrides(args) -> List[str]:
    if not args.params:
        return []
    for key, value in _read_json(args.params).items():
        key = key.replace("-", "_")
        if key in ("command", "params", "out") or not hasattr(args, key):
            raise UsageError(f"{args.params}: unknown option {key!r}")
        setattr(args, key, value)
    return [args.params]


def cmd_verify(args, argv) -> int:
    extra = _apply_overrides(args)
    func, inputs = load_function(args.func)
    inputs += extra
    tol = args.tolerance
    table = None
    if args.claim == "growth-envelope":
        env = GrowthEnvelope(a=args.a, p=args.p, scale=args.scale, rate=args.rate)
        grid = _r_grid(args)
        cert = vf.check_growth_envelope(func, env, grid, tolerance=tol if tol is not None else vf.EXACT_TOL)
        table = (["r", "ratio"], list(zip(grid, cert.measured["ratios"])))
    elif args.claim in ("di-unbounded", "near-zero"):
        params, sched, extra = _load_construction(_construction_dir(args))
        inputs += extra
        norms = _orbit(func, args, params)
        if args.claim == "di-unbounded":
            cert = vf.certify_distributionally_unbounded(
                norms.values, params.B, sched, k_max=args.k_max,
                tolerance=tol if tol is not None else vf.EXACT_TOL)
        else:
            cert = vf.certify_near_zero(norms.values, params.A, None, radius=args.radius,
                                        k_max=args.k_max, tolerance=tol or 0.0)
        table = (["n", "norm", "tail_error"],
                 [(n, v, e) for n, (v, e) in enumerate(zip(norms.values, norms.tail_errors))])
    elif args.claim == "lower-bound-average":
        if not isinstance(func, EntireSeries):
            raise UsageError("lower-bound-average takes an entire series")
        m_max = args.horizon or min(func.cap, 300)
        cert = vf.lower_bound_average_check(func, args.p if math.isfinite(args.p) else 2.0,
                                            args.radius, m_max, envelope_const=args.scale,
                                            tolerance=tol if tol is not None else vf.QUAD_TOL)
        table = (["m", "average"], list(enumerate(cert.measured["averages"], start=1)))
    elif args.claim == "barnes":
        grid = _r_grid(args)
        cert = vf.barnes_series_check(args.alpha, args.beta, grid,
                                      stability_tol=tol if tol is not None else 1e-2)
        table = (["r", "ratio"], list(zip(grid, cert.measured["ratios"])))
    else:
        raise UsageError(f"claim {args.claim!r} is not available from the command line")
    files = {"certificate.json": cert.dumps() + "\n"}
    if args.format == "csv" and table is not None:
        files["table.csv"] = _csv_text(*table)
    digests = _write_outputs(args.out, files)
    _write_manifest(args.out, argv, args, inputs, digests)
    print(f"{cert.claim}: {cert.verdict} (digest {cert.inputs_digest[:12]})")
    return EXIT[cert.verdict]


# --------------------------------------------------------------------------
# table

def _int_range(text: str) -> range:
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"range must look like LO:HI, got {text!r}") from None
    if hi < lo:
        raise UsageError(f"empty range {text!r}")
    return range(lo, hi + 1)


def _table_rows(args):
    q = args.quantity
    if q == "dims":
        rows = [(N, m, hc.dim_harmonic(N, m), hc.laplacian_nullity(N, m))
                for N in _int_range(args.N_range) for m in _int_range(args.m_range)]
        return ["N", "m", "dim_harmonic", "laplacian_nullity"], rows, []
    if q == "constants":
        rows = []
        for N in _int_range(args.N_range):
            c = hc.cN_constant(N)
            rows.append((N, c, math.sqrt(N / 2), c - math.sqrt(N / 2)))
        return ["N", "c_N", "sqrt_half_N", "difference"], rows, []
    if q == "growth":
        func, inputs = load_function(args.func)
        env = GrowthEnvelope(a=args.a, p=args.p, scale=args.scale, rate=args.rate)
        rows = []
        for r in _r_grid(args):
            lm = vf._log_norm(func, r, args.p, 256)
            rows.append((r, math.exp(lm), env(r), math.exp(lm - env.log_value(r))))
        return ["r", "norm", "envelope", "ratio"], rows, inputs
    if q == "orbit":
        func, inputs = load_function(args.func)
        if not isinstance(func, EntireSeries):
            raise UsageError("orbit tables take an entire series")
        horizon = args.horizon if args.horizon is not None else func.cap
        tail = None if horizon <= func.cap else 0
        o = orbit_norms(func, horizon, args.radius, p=args.p, tail_bound=tail)
        return ["n", "norm", "tail_error"], [(n, v, e) for n, (v, e) in
                                               enumerate(zip(o.values, o.tail_errors))], inputs
    if q == "density":
        params, _, inputs = _load_construction(args.construction or args.func)
        rows = []
        horizon = args.horizon
        for name, S in (("A", params.A), ("B", params.B)):
            cps = [hi for lo, hi in S.intervals if horizon is None or hi <= horizon]
            if not cps:
                continue
            prof = density_profile(S, cps)
            rows += [(name, c, str(d), str(mx), str(mn)) for c, d, mx, mn in prof.rows()]
        return ["set", "checkpoint", "density", "running_max", "running_min"], rows, inputs
    raise UsageError(f"unknown quantity {q!r}")


def cmd_table(args, argv) -> int:
    header, rows, inputs = _table_rows(args)
    if args.format == "json":
        text = _dump_json([dict(zip(header, r)) for r in rows])
        name = "table.json"
    else:
        text = _csv_text(header, rows)
        name = "table.csv"
    if args.out is None:
        sys.stdout.write(text)
        return 0
    files = {name: text}
    if args.plot and args.format == "csv":
        files["table.gp"] = (f"set datafile separator ','\nset key autotitle columnhead\n"
                             f"plot 'table.csv' using 1:{len(header)} with linespoints\n")
    digests = _write_outputs(args.out, files)
    _write_manifest(args.out, argv, args, inputs, digests)
    return 0


# --------------------------------------------------------------------------
# replay

def cmd_replay(args, argv) -> int:
    manifest = _read_json(args.manifest)
    old_argv = list(manifest["argv"])
    for path, sha in manifest.get("inputs", {}).items():
        if not os.path.exists(path) or _sha256_file(path) != sha:
            print(f"input changed or missing: {path}", file=sys.stderr)
            return EXIT["fail"]
    out = args.out or tempfile.mkdtemp(prefix="distchaos-replay-")
    if "--out" not in old_argv:
        raise UsageError("manifest has no --out; nothing to compare")
    i = old_argv.index("--out")
    new_argv = old_argv[:i + 1] + [out] + old_argv[i + 2:]
    code = main(new_argv, _quiet=True)
    if code == EXIT["usage"]:
        return code
    replayed = _read_json(os.path.join(out, "manifest.json"))["outputs"]
    same = replayed == manifest["outputs"]
    print(f"replay {'matches' if same else 'differs'}: {sorted(manifest['outputs'])} -> {out}")
    return EXIT["pass"] if same else EXIT["fail"]


# --------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="distchaos", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def grid_flags(p, r_min=1.0, r_max=10.0, steps=10):
        p.add_argument("--r-min", type=float, default=r_min)
        p.add_argument("--r-max", type=float, default=r_max)
        p.add_argument("--r-steps", type=int, default=steps)

    def envelope_flags(p):
        p.add_argument("--a", type=float, default=0.25, help="power of r in the envelope denominator")
        p.add_argument("--p", type=float, default=2.0, help="norm index (inf allowed)")
        p.add_argument("--scale", type=float, default=1.0, help="envelope constant")
        p.add_argument("--rate", type=float, default=1.0, help="exponential type of the envelope")

    p = sub.add_parser("construct", help="build a witness")
    p.add_argument("kind", choices=("entire", "harmonic"))
    p.add_argument("--params", help="JSON file with omega, K_max, cap, alpha, anchors_a, ...")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("verify", help="produce a certificate")
    p.add_argument("claim", choices=("growth-envelope", "di-unbounded", "near-zero",
                                     "lower-bound-average", "barnes"))
    p.add_argument("func", nargs="?", default="exp:200",
                   help="function file, exp:CAP or monomial:N (ignored for barnes)")
    p.add_argument("--construction", help="directory with params.json and schedule.json")
    p.add_argument("--params", help="JSON file of option overrides, e.g. {\"r_max\": 20}")
    p.add_argument("--out", required=True)
    grid_flags(p)
    envelope_flags(p)
    p.add_argument("--radius", type=float, default=1.0, help="orbit radius")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--tail", choices=("witness", "polynomial"), default="witness",
                   help="what lies beyond the cap when --horizon exceeds it")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("table", help="emit a CSV or JSON table")
    p.add_argument("quantity", choices=("growth", "orbit", "density", "dims", "constants"))
    p.add_argument("func", nargs="?", default="exp:200")
    p.add_argument("--construction")
    p.add_argument("--out", default=None)
    p.add_argument("--N-range", default="2:5")
    p.add_argument("--m-range", default="0:12")
    grid_flags(p)
    envelope_flags(p)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--plot", action="store_true", help="also write a gnuplot script")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("replay", help="re-run a manifest and compare outputs")
    p.add_argument("manifest")
    p.add_argument("--out", default=None)
    return parser


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "table": cmd_table,
            "replay": cmd_replay}


def main(argv: Optional[Sequence[str]] = None, _quiet: bool = False) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT["usage"] if exc.code else 0
    try:
        if _quiet:
            with open(os.devnull, "w") as null:
                old, sys.stdout = sys.stdout, null
                try:
                    return COMMANDS[args.command](args, argv)
                finally:
                    sys.stdout = old
        return COMMANDS[args.command](args, argv)
    except (UsageError, ContractError, ParameterError, DistChaosError, ValueError, OverflowError,
            ZeroDivisionError, RuntimeError) as exc:
        print(f"distchaos: error: {exc}", file=sys.stderr)
        return EXIT["usage"]


if __name__ == "__main__":
    sys.exit(main())
