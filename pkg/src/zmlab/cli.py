"""Command-line entry point: ``zmlab <subcommand> [options]``.

Exit codes: 0 success, 1 computation failure (JSON error object on stdout
in JSON mode, message on stderr otherwise), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from importlib import resources
from typing import Any, Callable

from . import bounds as bd
from .config import ConfigError, OutputFormat, RunConfig, load_config
from .density import count_density
from .errors import ZmlabError
from .kernel import fr_closed_form, fr_mellin, fr_ode
from .mollifier import mellin_identity_check, mollifier_build
from .multiplicity import (MomentBoundInput, certify_multiplicity, certify_zeros, jensen_probe,
                           moment_lower_bound, moment_mult_bound)
from .report import REPORT_COLUMNS, report_all
from .zeros import ZeroCache, read_cache, scan_zeros, write_cache

SIG_DIGITS = 15
Doc = dict
Rows = list


class UsageError(Exception):
    """Raised for argument combinations argparse cannot express."""


# --------------------------------------------------------------------------
# formatting
# --------------------------------------------------------------------------

def fmt_float(x: float) -> str:
    return format(x, f".{SIG_DIGITS}g")


def round_floats(obj: Any) -> Any:
    """Round every float to 15 significant digits (JSON-safe, deterministic)."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(fmt_float(obj))
    if isinstance(obj, complex):
        return [round_floats(obj.real), round_floats(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return round_floats(obj.item())
    return obj


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, complex):
        return f"{fmt_float(v.real)}{'+' if v.imag >= 0 else '-'}{fmt_float(abs(v.imag))}j"
    return str(v)


def render(doc: Doc, rows: Rows | None, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return json.dumps(round_floats(doc), indent=2) + "\n"
    if rows is None:
        rows = [{k: v for k, v in doc.items()
                 if not isinstance(v, (dict, list)) and k != "command"}]
    header = list(rows[0].keys()) if rows else []
    if fmt is OutputFormat.CSV:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(r[h]) for h in header])
        return buf.getvalue()
    cells = [header] + [[_cell(r[h]) for h in header] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    return "".join("  ".join(c.rjust(wd) for c, wd in zip(line, widths)) + "\n"
                   for line in cells)


def load_schema(command: str) -> dict:
    """The JSON schema shipped for a subcommand's output (or ``error``)."""
    text = resources.files("zmlab").joinpath("schemas", f"{command}.schema.json").read_text(
        encoding="utf-8")
    return json.loads(text)


# --------------------------------------------------------------------------
# zero cache plumbing
# --------------------------------------------------------------------------

def _load_zeros(args, cfg: RunConfig, lo: float, hi: float, certify: bool = False) -> ZeroCache:
    path = getattr(args, "cache", None) or cfg.cache_path
    if path:
        try:
            zeros = read_cache(path)
        except FileNotFoundError as exc:
            raise ZmlabError(f"zero cache not found: {path}") from exc
    else:
        zeros = scan_zeros(max(2.0, lo), hi)
    if certify and any(z.multiplicity is None for z in zeros):
        certify_zeros(zeros)
    return zeros


# --------------------------------------------------------------------------
# handlers: each returns (document, rows-or-None)
# --------------------------------------------------------------------------

def cmd_zeros(args, cfg):
    zeros = scan_zeros(args.t_min, args.t_max, coarse_step=args.step, workers=args.workers)
    if args.certify:
        certify_zeros(zeros)
    if args.out:
        write_cache(args.out, zeros)
    rows = [{"index": z.index, "gamma": z.gamma, "beta": z.beta,
             "multiplicity": z.multiplicity, "cert_radius": z.cert_radius,
             "cert_residual": z.cert_residual, "loc_error": z.loc_error} for z in zeros]
    doc = {"command": "zeros", "t_min": zeros.t_min, "t_max": zeros.t_max,
           "count": len(zeros), "zeros": rows}
    return doc, rows


def cmd_certify(args, cfg):
    zeros = _load_zeros(args, cfg, args.gamma - 2.0, args.gamma + 2.0)
    if not zeros:
        raise ZmlabError(f"no zero found near gamma = {args.gamma}")
    near = min(zeros, key=lambda z: abs(z.gamma - args.gamma))
    if abs(near.gamma - args.gamma) > 1.0:
        raise ZmlabError(f"no zero within 1 of gamma = {args.gamma} (nearest {near.gamma:.10g})")
    cert = certify_multiplicity(near.rho, args.radius, zeros)
    return {"command": "certify", "index": near.index, "gamma": near.gamma,
            **cert.to_dict()}, None


def cmd_jensen(args, cfg):
    zeros = _load_zeros(args, cfg, args.gamma - args.R - 1.0, args.gamma + args.R + 1.0,
                        certify=True)
    sides = jensen_probe(args.gamma, args.R, zeros)
    return {"command": "jensen", "gamma": args.gamma, "R": args.R, "lhs": sides.lhs,
            "rhs": sides.rhs, "gap": abs(sides.lhs - sides.rhs), "nodes": sides.nodes,
            "interior_zeros": sides.interior}, None


def cmd_moment(args, cfg):
    log_ell = None
    if args.ell_form is not None:
        log_ell = math.log(args.delta) - args.ell_form / args.delta * math.log(args.gamma)
        ell = math.exp(max(log_ell, -700.0))
        source = "power_form"
    elif args.ell is not None:
        ell, source = args.ell, "given"
    else:
        ell = moment_lower_bound(args.beta, args.gamma, args.delta, args.k,
                                 tol=cfg.tolerances.get("moment", 1e-9))
        source = "measured"
    inp = MomentBoundInput(args.beta, args.gamma, args.delta, args.k, ell, args.o1_const)
    rep = moment_mult_bound(inp, log_ell)
    doc = {"command": "moment-bound", "ell_source": source, **rep.to_dict()}
    return doc, None


def _strip_check(beta: float, gamma: float, gamma_min: float = 10.0) -> None:
    bad = bd._check_strip(beta, gamma, gamma_min)
    if bad:
        raise ZmlabError(bad)


def _load_constants(args, cfg: RunConfig) -> bd.BoundConstants:
    if getattr(args, "constants", None):
        return load_config(args.constants).constants
    return cfg.constants


def cmd_bounds(args, cfg):
    k = _load_constants(args, cfg)
    g = args.gamma
    which = args.theorem
    if which in ("thm1", "thm2") or args.beta is not None:
        if args.beta is None:
            raise UsageError(f"bounds {which} needs --beta")
        _strip_check(args.beta, g, 15.0 if which == "thm4" else 10.0)
    if which == "thm1":
        mlz = args.max_log_zeta
        if mlz is None:
            mlz = bd.measure_max(g, 0.5, 0.5, args.grid)
        rep = bd.thm1_bound(args.beta, g, mlz, k)
    elif which == "thm2":
        m_log = args.m_log
        if m_log is None:
            m_log = bd.measure_max(g, 0.5, math.log(g) ** 2, args.segment_grid, sigma_max=0.5)
        if args.optimize_c:
            rep = bd.thm2_optimize_c(args.beta, g, m_log, k)
        else:
            c = 1.5 - args.beta if args.c is None else args.c
            rep = bd.thm2_bound(args.beta, g, c, m_log, k)
    elif which == "thm3":
        rep = (bd.thm3_mult_bound(args.beta, g, k) if args.beta is not None
               else bd.thm3_beta_ceiling(_need_r(args), g, k))
    else:
        rep = (bd.thm4_mult_ceiling(args.beta, g, k) if args.beta is not None
               else bd.thm4_beta_ceiling(_need_r(args), g, k))
    return {"command": "bounds", "theorem": which, **rep.to_dict()}, None


def _need_r(args) -> float:
    if args.r is None:
        raise UsageError(f"bounds {args.theorem} needs --beta or --r")
    return args.r


def cmd_fm(args, cfg):
    res = bd.fm_series(args.sigma, args.t, args.m, n_max=args.n_max)
    main = 1.0 / (args.sigma - 1.0) ** args.m if args.t == 0 else None
    return {"command": "fm", "sigma": args.sigma, "t": args.t, "m": args.m,
            "value": res.value, "tail_envelope": res.tail, "n_max": res.n_max,
            "pole_main_term": main}, None


_KERNEL_METHODS: dict[str, Callable] = {
    "mellin": fr_mellin, "closed": fr_closed_form, "ode": fr_ode}


def cmd_kernel(args, cfg):
    names = list(_KERNEL_METHODS) if args.method == "all" else [args.method]
    rows = [_KERNEL_METHODS[n](args.r, args.x).to_dict() for n in names]
    return {"command": "kernel", "r": args.r, "x": args.x, "values": rows}, rows


def cmd_mollifier(args, cfg):
    table = mollifier_build(args.X, args.n_max)
    if args.dump:
        with open(args.dump, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "mu", "d", "a"])
            w.writerows(table.rows())
    nz = int((table.a[1:] != 0).sum())
    doc = {"command": "mollifier", "X": table.X, "n_max": table.n_max,
           "nonzero_a": nz, "max_abs_a": int(abs(table.a[1:]).max()),
           "a_head": [int(v) for v in table.a[1:min(table.n_max, 30) + 1]],
           "dump": args.dump}
    return doc, None


def cmd_identity(args, cfg):
    tol = cfg.tolerances.get("identity", 1e-6)
    res = mellin_identity_check(complex(args.beta, args.gamma), args.X, args.Y, args.R,
                                n_max=args.n_max, t_cut=args.t_cut, tol=tol)
    doc = {"command": "identity-check", "beta": args.beta, "gamma": args.gamma,
           "X": args.X, "Y": args.Y, "R": args.R, "t_cut": args.t_cut, **res.to_dict(),
           "within_tolerance": res.gap < tol}
    return doc, None


def cmd_density(args, cfg):
    zeros = _load_zeros(args, cfg, 2.0, args.T, certify=True)
    dc = count_density(zeros, args.sigma, args.T, args.r, args.exact)
    return {"command": "density", **dc.to_dict()}, None


def cmd_report(args, cfg):
    zeros = None
    if args.cache or cfg.cache_path:
        zeros = _load_zeros(args, cfg, args.gamma - 1.0, args.gamma + 1.0)
    doc = report_all(args.gamma, cfg, zeros=zeros)
    rows = [{c: r[c] for c in ("beta",) + REPORT_COLUMNS} for r in doc["rows"]]
    return doc, rows


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat 'name = value' config file (default: $ZMLAB_CONFIG)")
    p.add_argument("--format", choices=[f.value for f in OutputFormat],
                   help="output format (default json; zeros defaults to csv)")
    return p


def _cache_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cache", help="zero cache CSV; scans on the fly when omitted")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="zmlab", description="Numerical laboratory for multiplicities of zeta zeros.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
        return p

    p = add("zeros", cmd_zeros,
            "locate critical-line zeros by sign changes of Z(t), count-checked against "
            "N(T) = (T/2pi) log(T/2pi e) + 7/8 + S(T)")
    p.add_argument("--t-max", type=float, required=True, help="upper ordinate T (<= 1000)")
    p.add_argument("--t-min", type=float, default=2.0, help="lower ordinate (>= 2)")
    p.add_argument("--step", type=float, default=0.2, help="coarse grid step h in (0, 0.5]")
    p.add_argument("--workers", type=int, default=1, help="worker processes for the scan")
    p.add_argument("--certify", action="store_true",
                   help="also certify multiplicities by (1/2pi i) contour integral of zeta'/zeta")
    p.add_argument("--out", help="write the zero cache CSV here")

    p = add("certify", cmd_certify,
            "multiplicity of the zero nearest --gamma as the winding number "
            "(1/2pi i) contour integral of zeta'/zeta ds")
    p.add_argument("--gamma", type=float, required=True, help="approximate ordinate")
    p.add_argument("--radius", type=float, default=0.05,
                   help="circle radius (auto-shrinks to isolate the zero, >= 1e-4)")
    _cache_arg(p)

    p = add("jensen", cmd_jensen,
            "both sides of Jensen's formula log|f(0)| + sum log(R/|rho|) = mean of log|f| "
            "on |z| = R, for f(z) = zeta(1 + i gamma + z)")
    p.add_argument("--gamma", type=float, required=True, help="ordinate gamma >= 10")
    p.add_argument("--R", type=float, default=0.5, help="disk radius R")
    _cache_arg(p)

    p = add("moment-bound", cmd_moment,
            "m <= (log gamma - (1/k) log ell + O(1)) / log(1/delta), given "
            "int_delta^2delta |zeta(beta + i gamma + i alpha)|^k d alpha >= ell")
    p.add_argument("--beta", type=float, required=True, help="real part beta")
    p.add_argument("--gamma", type=float, required=True, help="ordinate gamma")
    p.add_argument("--delta", type=float, required=True, help="0 < delta < 1/4")
    p.add_argument("--k", type=int, required=True, choices=[1, 2], help="moment power k")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--ell", type=float,
                   help="lower bound ell for the moment integral (default: measured)")
    g.add_argument("--ell-form", type=float, metavar="A",
                   help="use ell = delta * gamma^(-A/delta)")
    p.add_argument("--o1-const", type=float, default=0.0, help="value used for the O(1) term")

    p = add("bounds", cmd_bounds, "evaluate a multiplicity bound with its free parameters")
    p.add_argument("theorem", choices=["thm1", "thm2", "thm3", "thm4"], help=(
        "thm1: (max log|zeta| + C loglog gamma)/log(1/(2-2beta)); "
        "thm2: three-circle bound with free c > 1 - beta; "
        "thm3: C(1-beta)^(3/2) log gamma + C2 loglog gamma (or with --r the ceiling "
        "1 - C(r/log gamma)^(2/3)); "
        "thm4: (C(1-beta) loglog gamma)^(2 loglog gamma) (or with --r the ceiling "
        "1 - r^(1/(2 loglog gamma))/(C loglog gamma))"))
    p.add_argument("--beta", type=float, help="hypothetical real part, 1/2 < beta < 1")
    p.add_argument("--gamma", type=float, required=True, help="ordinate gamma")
    p.add_argument("--r", type=float, help="multiplicity for the beta-ceiling forms (thm3, thm4)")
    p.add_argument("--c", type=float, help="thm2 constant c > 1 - beta (default 3/2 - beta)")
    p.add_argument("--optimize-c", action="store_true",
                   help="thm2: minimise over c in (1 - beta, 10] by golden-section search")
    p.add_argument("--m-log", type=float,
                   help="thm2: log max |zeta(1/2 + i gamma + i t)| over |t| <= log^2 gamma "
                        "(default: measured)")
    p.add_argument("--max-log-zeta", type=float,
                   help="thm1: max log|zeta(sigma + i gamma + i t)|, sigma >= 1/2, |t| <= 1/2 "
                        "(default: measured)")
    p.add_argument("--grid", type=int, default=64, help="grid for the thm1 maximum")
    p.add_argument("--segment-grid", type=int, default=512, help="grid for the thm2 maximum")
    p.add_argument("--constants", help="flat config file with BoundConstants overrides")

    p = add("fm", cmd_fm,
            "F_m(s) = sum Lambda(n) log^(m-1)(n) n^(-s), i.e. (-1)^m (d/ds)^(m-1) zeta'/zeta")
    p.add_argument("--m", type=int, required=True, help="order m >= 1")
    p.add_argument("--sigma", type=float, required=True, help="sigma > 1 + 1e-3")
    p.add_argument("--t", type=float, default=0.0, help="imaginary part t")
    p.add_argument("--n-max", type=int, default=10 ** 6, help="series truncation")

    p = add("kernel", cmd_kernel,
            "f_r(x) = (1/2pi i) int_(c) Gamma(s) x^(-s) s^(-r) ds "
            "= (1/r!) int_x^inf log^r(t/x) e^(-t) dt, with f_r' = -f_(r-1)/x")
    p.add_argument("--r", type=int, required=True, help="kernel index r >= 0")
    p.add_argument("--x", type=float, required=True, help="argument x > 0")
    p.add_argument("--method", choices=["mellin", "closed", "ode", "all"], default="all",
                   help="mellin: line integral; closed: log-power integral; "
                        "ode: iterated f_r = int_x^inf f_(r-1)(t) dt/t")

    p = add("mollifier", cmd_mollifier,
            "Moebius table with M_X(s) = sum_(n<=X) mu(n) n^(-s) and "
            "a(n) = sum_(d|n, d<=X) mu(d)")
    p.add_argument("--X", type=float, required=True, help="mollifier length X >= 1")
    p.add_argument("--n-max", type=int, required=True, help="table size (<= 1e7)")
    p.add_argument("--dump", help="write n,mu,d,a CSV here")

    p = add("identity-check", cmd_identity,
            "compare sum a(n) n^(-rho) f_R(n/Y) with "
            "(1/2pi i) int_(2) zeta(rho+s) M_X(rho+s) Y^s Gamma(s+1) s^(-R-1) ds")
    p.add_argument("--beta", type=float, required=True, help="Re rho > 1/2")
    p.add_argument("--gamma", type=float, required=True, help="Im rho")
    p.add_argument("--X", type=float, required=True, help="mollifier length, 1 <= X <= Y")
    p.add_argument("--Y", type=float, required=True, help="smoothing scale Y")
    p.add_argument("--R", type=int, required=True, help="kernel index R >= 0")
    p.add_argument("--n-max", type=int, help="sum truncation (default max(2Y log Y, 30Y))")
    p.add_argument("--t-cut", type=float, default=60.0, help="line truncation |Im s|")

    p = add("density", cmd_density,
            "N^(r)(sigma, T): zeros with beta >= sigma, 0 < gamma <= T, m >= r "
            "(r = 1 counts multiplicity); --exact gives N_r(T) with m = r")
    p.add_argument("--sigma", type=float, required=True, help="real-part threshold")
    p.add_argument("--T", type=float, required=True, help="ordinate cap T")
    p.add_argument("--r", type=int, default=1, help="multiplicity threshold r >= 1")
    p.add_argument("--exact", action="store_true", help="count m = r exactly")
    _cache_arg(p)

    p = add("report", cmd_report,
            "table of every bound at gamma for beta in {0.6, 0.7, 0.8, 0.9, 0.95}, with "
            "log gamma and the count N(gamma + 1) - N(gamma - 1)")
    p.add_argument("--gamma", type=float, required=True, help="ordinate gamma >= 15")
    _cache_arg(p)
    return parser


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def _resolve_format(args, cfg: RunConfig) -> OutputFormat:
    if args.format:
        return OutputFormat(args.format)
    if cfg.output_format is not None:
        return cfg.output_format
    return OutputFormat.CSV if args.command == "zeros" else OutputFormat.JSON


def dispatch(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        err.write(f"zmlab: error: {exc}\n")
        return 2
    fmt = _resolve_format(args, cfg)
    try:
        doc, rows = args.func(args, cfg)
    except (UsageError, ConfigError) as exc:
        err.write(f"zmlab: error: {exc}\n")
        return 2
    except (ZmlabError, ValueError, ArithmeticError) as exc:
        message = str(exc)
        if fmt is OutputFormat.JSON:
            out.write(json.dumps({"error": {"type": type(exc).__name__, "message": message,
                                            "command": args.command}}, indent=2) + "\n")
        err.write(f"zmlab: {message}\n")
        return 1
    out.write(render(doc, rows, fmt))
    return 0


def main(argv: list[str] | None = None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    raise SystemExit(main())
