"""Command-line interface.

Subcommands: ``density list|eval``, ``sample``, ``hfox eval``, ``mellin prove``,
``verify run`` and ``report``.  Options for a subcommand may also come from
an INI file given with ``--config``; its section is named after the
subcommand (``[density]``, ``[sample]``, ``[hfox]``, ``[mellin]``,
``[verify]``, ``[report]``) and keys are the long option names with dashes
or underscores.  Command-line flags win over the file.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from . import densities as D
from . import hfox as H
from . import samplers as S
from . import verify as V
from .errors import ConvergenceError, DomainError, PoleError
from .mellin import GRID_IMAG, GRID_T, equal_on_strip, strip_abscissae

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
SCHEMA_VERSION = "1"
_LAW_FLAGS = ("mu", "gamma", "mu1", "mu2", "nu", "H", "n", "rho", "t2", "gamma1", "gamma2")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- JSON output

def _fmt(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def dumps(obj: Any, indent: Optional[int] = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    tokens: dict[str, str] = {}

    def sub(o):
        if isinstance(o, (bool, np.bool_)):
            return bool(o)
        if isinstance(o, (float, np.floating)):
            key = f"@@F{len(tokens)}@@"
            tokens[key] = _fmt(float(o))
            return key
        if isinstance(o, (int, np.integer)):
            return int(o)
        if isinstance(o, dict):
            return {str(k): sub(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [sub(v) for v in o]
        return o

    text = json.dumps(sub(obj), indent=indent)
    for key, val in tokens.items():
        text = text.replace(f'"{key}"', val, 1)
    return text


def _metadata() -> dict:
    # the only non-deterministic field; excluded from comparison fixtures
    return {"schema_version": SCHEMA_VERSION, "package_version": __version__,
            "generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}


def _write_text(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------- argument types

def _positive_int(s: str) -> int:
    v = int(s)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def seed_set(s: str) -> tuple[int, ...]:
    """'1-10' or '1,2,5' or a mix such as '1-3,7'."""
    out: list[int] = []
    for part in str(s).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise argparse.ArgumentTypeError(f"bad seed range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty seed set")
    return tuple(out)


def _pairs(s: str) -> tuple[tuple[float, float], ...]:
    if s is None or str(s).strip() in ("", "-"):
        return ()
    out = []
    for item in str(s).split(","):
        try:
            a, b = item.split(":")
            out.append((float(a), float(b)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected value:weight pairs, got {item!r}") from None
    return tuple(out)


def _kv(s: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in str(s).split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = float(v)
    return out


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ggsub", description="Subordinated generalized Gamma processes toolkit.")
    p.add_argument("--config", help="INI file with per-subcommand defaults")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    dens = sub.add_parser("density", help="density catalog")
    dsub = dens.add_subparsers(dest="action", required=True)
    dsub.add_parser("list", help="list catalog laws")
    ev = dsub.add_parser("eval", help="evaluate a density")
    ev.add_argument("--law", required=True)
    ev.add_argument("--t", type=_positive_float, required=True)
    ev.add_argument("--x", action="append", required=True,
                    help="point; comma-separated for vector points; repeat for several points")
    ev.add_argument("--params", type=_kv, default={}, help="key=value,... parameter overrides")
    for f in _LAW_FLAGS:
        ev.add_argument(f"--{f}", type=float, default=None, dest=f"law_{f}")
    ev.add_argument("--out", default=None)

    sm = sub.add_parser("sample", help="draw samples of a process expression")
    sm.add_argument("--expr", required=True)
    sm.add_argument("--t", type=_positive_float, required=True)
    sm.add_argument("--n", type=_positive_int, required=True)
    sm.add_argument("--seed", type=int, required=True)
    sm.add_argument("--out", default=None)
    sm.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)

    hf = sub.add_parser("hfox", help="Fox H-function")
    hsub = hf.add_subparsers(dest="action", required=True)
    he = hsub.add_parser("eval", help="evaluate H^{m,n}_{p,q}(x)")
    he.add_argument("--m", type=int, required=True)
    he.add_argument("--n", type=int, required=True)
    he.add_argument("--p", type=int, required=True)
    he.add_argument("--q", type=int, required=True)
    he.add_argument("--upper", type=_pairs, default=())
    he.add_argument("--lower", type=_pairs, default=())
    he.add_argument("--x", type=_positive_float, required=True)
    he.add_argument("--tol", type=_positive_float, default=1e-8)
    he.add_argument("--contour", choices=("standard", "saddle"), default="standard")
    he.add_argument("--out", default=None)

    me = sub.add_parser("mellin", help="symbolic Mellin checks")
    msub = me.add_subparsers(dest="action", required=True)
    mp = msub.add_parser("prove", help="compare the Mellin forms of an identity")
    mp.add_argument("case_id")
    mp.add_argument("--out", default=None)
    msub.add_parser("list", help="list identity cases")

    vr = sub.add_parser("verify", help="verification suites")
    vsub = vr.add_subparsers(dest="action", required=True)
    run = vsub.add_parser("run", help="run a suite")
    run.add_argument("--suite", choices=V.SUITES + ("all",), default="all")
    run.add_argument("--case", default=None)
    run.add_argument("--seed-set", type=seed_set, default=V.DEFAULT_SEEDS, dest="seed_set")
    run.add_argument("--n", type=_positive_int, default=V.DEFAULT_N)
    run.add_argument("--alpha", type=_positive_float, default=V.DEFAULT_ALPHA)
    run.add_argument("--json", default=None, dest="json_out")
    run.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)
    run.add_argument("--quiet", action="store_true")

    rp = sub.add_parser("report", help="merge JSON reports into one CSV summary table")
    rp.add_argument("inputs", nargs="+")
    rp.add_argument("--out", default=None)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = configparser.ConfigParser()
    try:
        with open(known.config, encoding="utf-8") as fh:
            cfg.read_file(fh)
    except OSError as exc:
        raise IOError(f"cannot read config {known.config}: {exc}") from exc
    subs = {a.dest: a for a in parser._actions if isinstance(a, argparse._SubParsersAction)}
    top = subs.get("command")
    if top is None:
        return
    for name, sp in top.choices.items():
        if not cfg.has_section(name):
            continue
        targets = [sp]
        for a in sp._actions:
            if isinstance(a, argparse._SubParsersAction):
                targets.extend(a.choices.values())
        for key, value in cfg.items(name):
            dest = key.replace("-", "_")
            if dest == "json":
                dest = "json_out"
            hit = False
            for tp in targets:
                for act in tp._actions:
                    if act.dest == dest or act.dest == f"law_{dest}":
                        act.default = value  # strings are converted by the action's type
                        act.required = False  # the file satisfies it; a flag still wins
                        hit = True
            if not hit:
                raise UsageError(f"config section [{name}] has unknown key {key!r}")


# ---------------------------------------------------------------- commands

def _parse_point(s: str, law: D.DensityLaw, params: dict):
    parts = [float(v) for v in s.split(",")]
    if law.support in ("real-n-space", "positive-quadrant"):
        return parts if len(parts) > 1 else parts[0]
    if len(parts) != 1:
        raise UsageError(f"law {law.id!r} takes scalar points")
    return parts[0]


def cmd_density(args) -> int:
    if args.action == "list":
        rows = [{"law": l.id, "label": l.label, "support": l.support, "params": dict(l.defaults),
                 "constant_alternatives": sorted(l.alt_constants)} for l in D.CATALOG.values()]
        _write_text(None, dumps(rows))
        return EXIT_OK
    try:
        law = D.get_law(args.law)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    overrides = dict(args.params)
    for f in _LAW_FLAGS:
        v = getattr(args, f"law_{f}")
        if v is not None:
            overrides[f] = v
    try:
        params = law.params(overrides)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    records = []
    for raw in args.x:
        x = _parse_point(raw, law, params)
        value = D.eval_density(law, x, args.t, params)
        records.append({"law": law.id, "params": params, "x": x, "t": args.t, "value": float(value)})
    _write_text(args.out, dumps(records[0] if len(records) == 1 else records))
    return EXIT_OK


def cmd_sample(args) -> int:
    try:
        expr = S.parse_expr(args.expr)
    except (ValueError, SyntaxError, TypeError) as exc:
        raise UsageError(f"bad expression: {exc}") from None
    batch = S.sample_process(expr, args.t, args.n, args.seed, jobs=args.jobs)
    buf = io.StringIO()
    buf.write(f"# expr_digest={batch.expr_digest} t={_fmt(batch.t)} seed={batch.seed}\n")
    for v in batch.values:
        buf.write(_fmt(float(v)).strip('"') + "\n")
    _write_text(args.out, buf.getvalue())
    return EXIT_OK


def cmd_hfox(args) -> int:
    if len(args.upper) != args.p or len(args.lower) != args.q:
        raise UsageError(f"--p/--q ({args.p}, {args.q}) do not match the pairs given "
                         f"({len(args.upper)}, {len(args.lower)})")
    params = H.HParams(args.m, args.n, args.upper, args.lower)
    res = H.h_eval(params, args.x, tol=args.tol, contour=args.contour)
    out = {"value": res.value, "T_used": res.T_used, "est_error": res.est_error, "theta": res.theta,
           "params": params.to_json(), "x": args.x}
    _write_text(args.out, dumps(out))
    return EXIT_OK


def cmd_mellin(args) -> int:
    if args.action == "list":
        rows = [{"id": c.id, "label": c.label, "mellin_provable": c.mellin_provable,
                 "expect_equal": c.expect_equal, "lhs": S.to_string(c.lhs), "rhs": S.to_string(c.rhs)}
                for c in V.IDENTITIES]
        _write_text(None, dumps(rows))
        return EXIT_OK
    try:
        case = V.get_identity(args.case_id)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    f, g = S.form_of(case.lhs), S.form_of(case.rhs)
    if f is None or g is None:
        raise UsageError(f"case {case.id!r} has no Gamma-product Mellin form on both sides")
    cmp = equal_on_strip(f, g)
    grid = []
    for t in GRID_T:
        for th in strip_abscissae(cmp.strip):
            for y in GRID_IMAG:
                eta = complex(th, y)
                d = complex(f.log_value(eta, t) - g.log_value(eta, t))
                grid.append({"t": t, "eta_re": th, "eta_im": y, "rel_dev": float(abs(np.expm1(d)))})
    out = {"case": case.id, "label": case.label, "lhs": S.to_string(case.lhs), "rhs": S.to_string(case.rhs),
           "lhs_form": f.to_json(), "rhs_form": g.to_json(), "equal": cmp.equal,
           "max_rel_dev": cmp.max_rel_dev, "expect_equal": case.expect_equal, "grid": grid}
    _write_text(args.out, dumps(out))
    return EXIT_OK if cmp.equal == case.expect_equal else EXIT_FAIL


def cmd_verify(args) -> int:
    reports = V.run_suite(args.suite, case=args.case, seeds=args.seed_set, n=args.n,
                          alpha=args.alpha, jobs=args.jobs)
    if not reports:
        raise UsageError("no verification case matched the selection")
    summary = V.summarize(reports)
    if not args.quiet:
        for r in reports:
            tag = "PASS" if r.passed else "FAIL"
            sys.stderr.write(f"{tag} {r.case_id} [{r.method}] {r.statistic:.6g} {r.sense} {r.threshold:.6g}\n")
        sys.stderr.write(f"{summary['passed']}/{summary['total']} passed\n")
    if args.json_out:
        doc = {"metadata": _metadata(), "config": {"suite": args.suite, "case": args.case,
                                                  "seeds": list(args.seed_set), "n": args.n, "alpha": args.alpha},
               "reports": [r.to_json() for r in reports], "summary": summary}
        _write_text(args.json_out, dumps(doc))
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAIL


def cmd_report(args) -> int:
    rows = []
    for path in args.inputs:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise IOError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path} is not valid JSON: {exc}") from None
        reps = doc.get("reports") if isinstance(doc, dict) else doc
        if not isinstance(reps, list):
            raise UsageError(f"{path} holds no report array")
        for r in reps:
            rows.append([os.path.basename(path), r["case_id"], r["method"], _fmt(float(r["statistic"])).strip('"'),
                         r["sense"], _fmt(float(r["threshold"])).strip('"'), "pass" if r["passed"] else "fail"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["source", "case_id", "method", "statistic", "sense", "threshold", "result"])
    w.writerows(rows)
    passed = sum(r[-1] == "pass" for r in rows)
    w.writerow(["TOTAL", f"{passed}/{len(rows)}", "", "", "", "", "pass" if passed == len(rows) else "fail"])
    _write_text(args.out, buf.getvalue())
    return EXIT_OK if passed == len(rows) else EXIT_FAIL


_COMMANDS = {"density": cmd_density, "sample": cmd_sample, "hfox": cmd_hfox,
             "mellin": cmd_mellin, "verify": cmd_verify, "report": cmd_report}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        sys.stderr.write(f"ggsub: error: {exc}\n")
        return EXIT_USAGE
    except IOError as exc:
        sys.stderr.write(f"ggsub: error: {exc}\n")
        return EXIT_IO
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"ggsub: error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, PoleError) as exc:
        sys.stderr.write(f"ggsub: error: {exc}\n")
        return EXIT_USAGE
    except ConvergenceError as exc:
        sys.stderr.write(f"ggsub: error: {exc}\n")
        return EXIT_FAIL
    except OSError as exc:
        sys.stderr.write(f"ggsub: error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
