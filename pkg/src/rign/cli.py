"""Command-line front end.

Verbs
-----
``rearrange``   print ``t, u*(t), u**(t)`` as CSV for a family or a saved array
``verify``      run a JSON-configured verification and write report files
``scan``        emit CSV curves (Riesz-Herz ratios, necessary condition,
                pointwise ratios, dilation scans, falsification curves)
``holder``      Lorentz exponent arithmetic and Orlicz factorization checks
``young-check`` validate a Young function and print its indices

Exit codes: 0 pass, 1 mathematical failure or falsification, 2 usage or
configuration error.  ``GN_THREADS`` caps the worker threads used per run.

CSV columns
-----------
rearrange:        ``t,u_star,u_star_star``
scan riesz-herz:  ``family,t,ratio``
scan gnnc:        ``t,ratio``
scan mazya:       ``family,res,sup_ratio``
scan dilation:    ``family,s,ratio``
scan falsify:     ``s,analytic,empirical``
verify curve.csv: ``family,s,ratio`` (``s`` from ``s_range``)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, gn
from .grid import (Family, GridFunction, gaussian_bump, indicator, polynomial_bump, sa_bump,
                   sample)
from .holder import InfeasibleExponents, lorentz_factor, orlicz_factor_check
from .maximal import riesz_herz_curve
from .rearrange import maximal_rearrangement, rearrange
from .scaling import falsify, necessary_condition
from .spaces import SpaceParseError, parse_space, upper_index_estimate
from .young import NotYoungError, check_young

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CONFIG_KEYS = {"mode", "j", "k", "X", "Y", "Z", "families", "dim", "res", "half_width",
               "s_range", "box", "tolerances", "seed"}
TOLERANCE_KEYS = {"stability": "STABILITY_TOL", "mazya_floor": "MAZYA_FLOOR",
                  "cfo_limit": "CFO_LIMIT", "balance": "BALANCE_TOL"}


class UsageError(ValueError):
    """Bad arguments or configuration; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Family strings


_FAMILY_ALIASES = {
    "chi": ("indicator", indicator, ("measure",)),
    "indicator": ("indicator", indicator, ("measure",)),
    "gauss": ("gaussian_bump", gaussian_bump, ("width",)),
    "gaussian_bump": ("gaussian_bump", gaussian_bump, ("width",)),
    "poly": ("polynomial_bump", polynomial_bump, ("width", "power")),
    "polynomial_bump": ("polynomial_bump", polynomial_bump, ("width", "power")),
    "sa_bump": ("sa_bump", sa_bump, ("k",)),
}


def parse_family(text: str) -> Family:
    """Parse ``name[:arg,...]`` where args are positional or ``key=value``.

    Examples: ``chi:1.0``, ``gauss:0.5``, ``poly:1,4``, ``sa_bump:k=2``.
    Errors name the character position of the offending token.
    """
    name, _, rest = text.partition(":")
    if name not in _FAMILY_ALIASES:
        raise UsageError(f"family {text!r}: unknown name {name!r} at position 0 "
                         f"(choose from {', '.join(sorted(_FAMILY_ALIASES))})")
    _, ctor, fields = _FAMILY_ALIASES[name]
    kwargs = {}
    pos = len(name) + 1
    for i, token in enumerate(rest.split(",") if rest else []):
        key, eq, val = token.partition("=")
        if not eq:
            key, val = (fields[i] if i < len(fields) else None), token
        if key not in fields:
            raise UsageError(f"family {text!r}: unexpected argument {token!r} at position {pos}")
        try:
            num = float(val)
        except ValueError:
            raise UsageError(f"family {text!r}: expected a number at position "
                             f"{pos + (len(key) + 1 if eq else 0)}, got {val!r}") from None
        kwargs[key] = int(num) if key in ("k", "power") else num
        pos += len(token) + 1
    try:
        return ctor(**kwargs)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"family {text!r}: {exc}") from None


def _space(text: str):
    try:
        return parse_space(text)
    except NotYoungError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# Output helpers


def _write_csv(rows, header, out: str | None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{x:.12g}" if isinstance(x, float) else x for x in row])
    if out:
        Path(out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())


def _grid_for(fam: Family, dim: int, res: int, half_width: float | None) -> GridFunction:
    hw = half_width if half_width else 1.5 * fam.support_radius(dim)
    return sample(fam, dim, hw, res)


# ---------------------------------------------------------------------------
# rearrange


def cmd_rearrange(args) -> int:
    if args.input:
        values = np.load(args.input)
        if args.half_width is None:
            raise UsageError("--half-width is required with --input")
        f = GridFunction(values, args.half_width, values.ndim, 0, strict=False)
    else:
        f = _grid_for(parse_family(args.family), args.dim, args.res, args.half_width)
    r = rearrange(f)
    T = r.total_measure if not r.is_zero else 1.0
    t = T * np.logspace(-3, 2, args.t_samples)
    rows = [(float(a), float(b), float(c))
            for a, b, c in zip(t, r(t), maximal_rearrangement(r, t))]
    _write_csv(rows, ["t", "u_star", "u_star_star"], args.out)
    return EXIT_PASS


# ---------------------------------------------------------------------------
# verify


def load_config(path: str) -> dict:
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in ("j", "k", "X", "Y", "Z"):
        if key not in cfg:
            raise UsageError(f"config is missing {key!r}")
    return cfg


def _apply_tolerances(cfg: dict) -> dict:
    tol = dict(cfg.get("tolerances") or {})
    unknown = set(tol) - set(TOLERANCE_KEYS)
    if unknown:
        raise UsageError(f"unknown tolerance keys: {', '.join(sorted(unknown))}")
    for key, attr in TOLERANCE_KEYS.items():
        if key in tol:
            setattr(gn, attr, float(tol[key]))
        tol[key] = getattr(gn, attr)
    return tol


def problem_from_config(cfg: dict, mode: str) -> gn.GNProblem:
    families = [parse_family(s) for s in cfg.get("families", ["gauss:1", "poly:1"])]
    try:
        return gn.GNProblem(int(cfg["j"]), int(cfg["k"]), _space(cfg["X"]), _space(cfg["Y"]),
                            _space(cfg["Z"]), families, dim=int(cfg.get("dim", 1)),
                            res=int(cfg.get("res", 512)), half_width=cfg.get("half_width"),
                            mode=mode)
    except SpaceParseError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _s_values(cfg: dict):
    lo, hi, n = cfg.get("s_range", [0.25, 4.0, 9])
    return np.geomspace(float(lo), float(hi), int(n))


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    mode = args.mode or cfg.get("mode", "ribfs")
    tol = _apply_tolerances(cfg)
    np.random.seed(int(cfg.get("seed", 0)))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    envelope = {"config": cfg, "mode": mode, "version": __version__, "tolerances": tol}

    if mode == "falsify":
        X, Y, Z = _space(cfg["X"]), _space(cfg["Y"]), _space(cfg["Z"])
        s = np.geomspace(*cfg["s_range"][:2], int(cfg["s_range"][2])) if "s_range" in cfg else None
        res = falsify(X, Y, Z, int(cfg["j"]), int(cfg["k"]), s, dim=int(cfg.get("dim", 1)),
                      res=int(cfg.get("res", 512)))
        body = {**envelope, "falsify": res.to_dict()}
        text = [f"mode: falsify", f"verdict: {res.verdict}",
                f"witness: {', '.join(res.witness) or '-'}",
                f"slopes: s->0 {res.slopes['zero']:.6g}, s->inf {res.slopes['inf']:.6g}",
                f"growth over 4 decades: {res.growth():.6g}",
                f"empirical/analytic spread: {res.band:.6g}"]
        rows = [(float(a), float(b), float(c)) for a, b, c in zip(res.s, res.analytic, res.empirical)]
        _write_csv(rows, ["s", "analytic", "empirical"], str(out / "curve.csv"))
        _emit(out, body, "\n".join(text))
        print("\n".join(text))
        return EXIT_FAIL if res.verdict == "falsified" else EXIT_PASS

    problem = problem_from_config(cfg, mode)
    try:
        report = gn.verify(problem)
    except (gn.HypothesisError, gn.ExponentBalanceError) as exc:
        body = {**envelope, "verdict": "fail", "marker": "hypothesis", "error": str(exc)}
        _emit(out, body, f"verdict: fail\nhypothesis: {exc}")
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    if report.marker is None:
        scan = gn.best_constant_scan(problem, _s_values(cfg), box=cfg.get("box", "fixed"))
        for name, curve in scan.ratios.items():
            rows += [(name, float(s), float(r)) for s, r in zip(scan.s, curve)]
    _write_csv(rows, ["family", "s", "ratio"], str(out / "curve.csv"))
    _emit(out, {**envelope, **report.to_dict()}, report.to_text())
    print(report.to_text())
    return EXIT_PASS if report.passed else EXIT_FAIL


def _emit(out: Path, body: dict, text: str) -> None:
    (out / "report.json").write_text(json.dumps(body, indent=2, default=gn._json_default),
                                     encoding="utf-8")
    (out / "report.txt").write_text(text + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# scan


def cmd_scan(args) -> int:
    what = args.what
    if what == "riesz-herz":
        rows = []
        for text in args.family or ["chi:1.0"]:
            fam = parse_family(text)
            t, ratio = riesz_herz_curve(_grid_for(fam, args.dim, args.res, args.half_width))
            rows += [(fam.name, float(a), float(b)) for a, b in zip(t, ratio)]
        _write_csv(rows, ["family", "t", "ratio"], args.out)
        return EXIT_PASS
    if what == "gnnc":
        X, Y, Z = _spaces_from_args(args)
        res = necessary_condition(X, Y, Z, args.j, args.k)
        _write_csv([(float(a), float(b)) for a, b in zip(res.t, res.ratio)], ["t", "ratio"],
                   args.out)
        return EXIT_PASS if res.holds else EXIT_FAIL
    if what == "mazya":
        rows = []
        for text in args.family or ["gauss:1", "poly:1"]:
            fam = parse_family(text)
            u = _grid_for(fam, args.dim, args.res, args.half_width)
            rows.append((fam.name, args.res, gn.mazya_ratio(u, args.j, args.k)))
        _write_csv(rows, ["family", "res", "sup_ratio"], args.out)
        return EXIT_PASS
    if what == "dilation":
        if not args.config:
            raise UsageError("scan --what dilation needs --config")
        cfg = load_config(args.config)
        _apply_tolerances(cfg)
        problem = problem_from_config(cfg, cfg.get("mode", "ribfs"))
        scan = gn.best_constant_scan(problem, _s_values(cfg), box=cfg.get("box", "fixed"))
        rows = [(n, float(s), float(r)) for n, c in scan.ratios.items() for s, r in zip(scan.s, c)]
        _write_csv(rows, ["family", "s", "ratio"], args.out)
        return EXIT_PASS
    if what == "falsify":
        X, Y, Z = _spaces_from_args(args)
        res = falsify(X, Y, Z, args.j, args.k, dim=args.dim, res=args.res)
        rows = [(float(a), float(b), float(c)) for a, b, c in zip(res.s, res.analytic, res.empirical)]
        _write_csv(rows, ["s", "analytic", "empirical"], args.out)
        return EXIT_FAIL if res.verdict == "falsified" else EXIT_PASS
    raise UsageError(f"unknown scan {what!r}")


def _spaces_from_args(args):
    if not (args.X and args.Y and args.Z):
        raise UsageError(f"scan --what {args.what} needs --X, --Y and --Z")
    return _space(args.X), _space(args.Y), _space(args.Z)


# ---------------------------------------------------------------------------
# holder / young-check


def _exponent(text: str) -> float:
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def cmd_holder(args) -> int:
    if args.orlicz:
        try:
            A, B, C = (parse_space("Orl:" + s).A for s in args.orlicz)
        except NotYoungError as exc:
            raise UsageError(str(exc)) from None
        rep = orlicz_factor_check(A, B, C, pairs=args.pairs, seed=args.seed)
        print(json.dumps(rep.to_dict(), indent=2, default=gn._json_default))
        ok = rep.bounded and rep.ii_pass and rep.i_pass
        return EXIT_PASS if ok else EXIT_FAIL
    if None in (args.P, args.p, args.R, args.r):
        raise UsageError("holder needs --P --p --R --r, or --orlicz A B C")
    try:
        fac = lorentz_factor(*(_exponent(x) for x in (args.P, args.p, args.R, args.r)))
    except InfeasibleExponents as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_FAIL
    fmt = lambda x: "inf" if x == math.inf else f"{x:.12g}"  # noqa: E731
    print(f"Q={fmt(fac.Q)} q={fmt(fac.q)}")
    return EXIT_PASS


def cmd_young_check(args) -> int:
    try:
        A = parse_space("Orl:" + args.young).A
    except NotYoungError as exc:
        print(json.dumps({"young": args.young, "valid": False, "failures": exc.failures}))
        return EXIT_FAIL
    body = {"young": str(A), "valid": True, "checks": check_young(A),
            "asymptotics": A.asymptotics(), "upper_index": upper_index_estimate(A),
            "heuristic": A.heuristic}
    print(json.dumps(body, indent=2))
    return EXIT_PASS


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rign", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    def grid_args(sp):
        sp.add_argument("--dim", type=int, default=1)
        sp.add_argument("--res", type=int, default=512)
        sp.add_argument("--half-width", type=float, default=None,
                        help="box half-width (default 1.5 x support radius)")

    r = sub.add_parser("rearrange", help="CSV of t, u*(t), u**(t)")
    r.add_argument("--family", default="chi:1.0", help="e.g. chi:1.0, gauss:1, sa_bump:k=2")
    r.add_argument("--input", help=".npy array of grid values (needs --half-width)")
    r.add_argument("--t-samples", type=int, default=101)
    r.add_argument("--out")
    grid_args(r)
    r.set_defaults(func=cmd_rearrange)

    v = sub.add_parser("verify", help="run a verification from a JSON config")
    v.add_argument("config")
    v.add_argument("--mode", choices=["ribfs", "lorentz", "orlicz", "falsify"])
    v.add_argument("--out", default="rign-report")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan", help="emit CSV curves")
    s.add_argument("--what", required=True,
                   choices=["riesz-herz", "gnnc", "mazya", "dilation", "falsify"])
    s.add_argument("--family", action="append")
    s.add_argument("--j", type=int, default=1)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--X")
    s.add_argument("--Y")
    s.add_argument("--Z")
    s.add_argument("--config")
    s.add_argument("--out")
    grid_args(s)
    s.set_defaults(func=cmd_scan)

    h = sub.add_parser("holder", help="Lorentz exponents or Orlicz factorization")
    for name in ("P", "p", "R", "r"):
        h.add_argument(f"--{name}", dest=name)
    h.add_argument("--orlicz", nargs=3, metavar=("A", "B", "C"),
                   help="Young functions, e.g. pow:2 pow:4 pow:4")
    h.add_argument("--pairs", type=int, default=50)
    h.add_argument("--seed", type=int, default=0)
    h.set_defaults(func=cmd_holder)

    y = sub.add_parser("young-check", help="validate a Young function, e.g. plog:2,1")
    y.add_argument("young")
    y.set_defaults(func=cmd_young_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        return args.func(args)
    except (UsageError, SpaceParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # grid and family constructors reject bad sizes, boxes and parameters
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
