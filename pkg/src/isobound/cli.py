"""Command-line front end.

isobound [--prec BITS] [--config FILE] [--format json|human] COMMAND ...

Commands: reduce, cluster, bound, verify. Every invocation prints one
document with a schema field; exit status is 0 when all checks pass,
1 on a check failure, 2 on usage or precondition errors and 3 when the
working precision runs out.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from typing import Optional

import mpmath

from . import bounds, curves, halfplane, hecke, heights, verify
from .errors import PrecisionExhausted, PreconditionError
from .halfplane import HPoint, I_POINT, ZETA, ZETA2
from .report import Check, render

SCHEMA = "isobound-report/1"
ENV_PRECISION = "ISOBOUND_PRECISION"
DEFAULTS = {"precision": 256, "format": "json"}

CLUSTER_LIST_LIMIT = 100           # list scanned matrices only for small N

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3


class InputError(ValueError):
    """Unparseable argument; ``position`` is the 0-based offset of the problem."""

    def __init__(self, text: str, position: int, message: str):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.position = position


# --- exact input parsing --------------------------------------------------------

_NEGATIVE = re.compile(r"^-[\d.]")
_NUMBER = re.compile(r"(\d+(?:\.\d*)?|\.\d+)([eE][+-]?\d+)?(?:/(\d+))?")


def parse_complex(text: str, allow_decimal: bool = True) -> tuple[Fraction, Fraction]:
    """Parse a/b+c/d*i style input (also 2i, -i, 0.5+1e-3i) into exact parts."""
    s = text.replace(" ", "")
    if not s:
        raise InputError(text, 0, "empty number")
    re_part, im_part = Fraction(0), Fraction(0)
    pos = 0
    while pos < len(s):
        start = pos
        sign = 1
        if s[pos] in "+-":
            sign = -1 if s[pos] == "-" else 1
            pos += 1
        elif start > 0:
            raise InputError(text, pos, "expected + or -")
        value = None
        m = _NUMBER.match(s, pos)
        if m:
            if not allow_decimal and ("." in m.group(1) or m.group(2)):
                raise InputError(text, pos, "decimal notation is not exact input here; use a/b")
            value = Fraction(m.group(1) + (m.group(2) or ""))
            if m.group(3) is not None:
                den = int(m.group(3))
                if den == 0:
                    raise InputError(text, m.start(3), "zero denominator")
                value /= den
            pos = m.end()
        imaginary = False
        if pos < len(s) and s[pos] == "*" and value is not None:
            pos += 1
            if pos >= len(s) or s[pos] != "i":
                raise InputError(text, pos, "expected i after *")
        if pos < len(s) and s[pos] == "i":
            imaginary = True
            pos += 1
        if value is None and not imaginary:
            raise InputError(text, pos, "expected a number or i")
        value = sign * (value if value is not None else Fraction(1))
        if imaginary:
            im_part += value
        else:
            re_part += value
    return re_part, im_part


def parse_point(text: str, prec: int, allow_decimal: bool = True) -> HPoint:
    re_part, im_part = parse_complex(text, allow_decimal)
    if im_part <= 0:
        raise PreconditionError("imaginary part must be positive", "Im(tau) > 0")
    return HPoint(re_part, im_part, prec)


def parse_real(text: str) -> Fraction:
    re_part, im_part = parse_complex(text)
    if im_part:
        raise InputError(text, text.find("i"), "expected a real number")
    return re_part


def parse_form(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise InputError(text, len(text), "expected three integers A,B,C")
    out, offset = [], 0
    for p in parts:
        try:
            out.append(int(p.strip()))
        except ValueError:
            raise InputError(text, offset, "expected an integer") from None
        offset += len(p) + 1
    return tuple(out)


def parse_xi(text: str, prec: int) -> HPoint:
    named = {"zeta": ZETA, "zeta2": ZETA2, "i": I_POINT}
    if text in named:
        return named[text].with_prec(prec)
    if "," in text:
        A, B, C = parse_form(text)
        if A == 0 or B * B - 4 * A * C >= 0:
            raise PreconditionError("A x^2 + B x + C has no root in the upper half-plane",
                                    "A != 0 and B^2 - 4AC < 0")
        return HPoint.quadratic(A, B, C, prec)
    return parse_point(text, prec, allow_decimal=False)


# --- configuration ----------------------------------------------------------------

def read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(line, 0, f"config line {lineno}: expected key=value")
            key, value = (t.strip() for t in line.split("=", 1))
            out[key] = value
    return out


def resolve_settings(args: argparse.Namespace, environ=None) -> dict:
    """default < environment < config file < command-line flags."""
    environ = os.environ if environ is None else environ
    settings = dict(DEFAULTS)
    if environ.get(ENV_PRECISION):
        settings["precision"] = environ[ENV_PRECISION]
    if getattr(args, "config", None):
        conf = read_config(args.config)
        unknown = set(conf) - set(DEFAULTS)
        if unknown:
            raise InputError(args.config, 0, f"unknown config keys {sorted(unknown)}")
        settings.update(conf)
    for key, attr in (("precision", "prec"), ("format", "format")):
        if getattr(args, attr, None) is not None:
            settings[key] = getattr(args, attr)
    try:
        settings["precision"] = int(settings["precision"])
    except ValueError:
        raise InputError(str(settings["precision"]), 0, "precision must be an integer") from None
    if settings["precision"] < halfplane.MIN_PREC:
        raise PreconditionError(f"precision must be at least {halfplane.MIN_PREC} bits", "precision >= 64")
    if settings["format"] not in ("json", "human"):
        raise InputError(settings["format"], 0, "format must be json or human")
    return settings


# --- commands -----------------------------------------------------------------------

def cmd_reduce(args, prec: int):
    re_part, im_part = parse_real(args.re), parse_real(args.im)
    if im_part <= 0:
        raise PreconditionError("imaginary part must be positive", "Im(tau) > 0")
    tau = HPoint(re_part, im_part, prec)
    point, g = halfplane.reduce(tau)
    chk = halfplane.check_reduction_height(tau)
    result = {"tau": tau.to_dict(), "reduced": point.to_dict(), "matrix": g.to_dict(),
              "D": render(halfplane.dmeasure(tau)), "H": halfplane.matrix_height(g)}
    return result, [chk]


def cmd_cluster(args, prec: int):
    tau0 = parse_point(args.tau0, prec)
    xi = parse_xi(args.xi, prec)
    if args.N < 1:
        raise PreconditionError("N must be positive", "N >= 1")
    eps = parse_real(args.eps)
    res = hecke.cluster_enumerate(tau0, args.N, eps, xi, strict=args.strict, cyclic_only=args.cyclic_only)
    count = len(res.members)
    result = res.to_dict()
    scanned = hecke.hecke_matrices(args.N, args.cyclic_only)
    result["matrices_scanned"] = len(scanned)
    if len(scanned) <= CLUSTER_LIST_LIMIT:
        result["matrices"] = [M.to_dict() for M in scanned]
    checks = [Check("members_le_lemma_bound", count <= res.bound_lemma, count, res.bound_lemma)]
    if res.bound_prop is not None:
        checks.append(Check("members_le_prop_bound", count <= res.bound_prop, count, res.bound_prop))
    return result, checks


def cmd_bound(args, prec: int):
    E = curves.CurveOverQ(parse_real(args.g2), parse_real(args.g3))
    if E.has_cm:
        raise PreconditionError(f"j0 = {E.j0} is a CM j-invariant; the bounds exclude it", "j0 not CM")
    if args.D < 1:
        raise PreconditionError("degree must be at least 1", "D >= 1")
    P = curves.periods(E, prec)
    h = curves.curve_height(E)
    h_j0 = heights.height(heights.AlgebraicNumber(E.j0))
    if args.index == "lombardo":
        hE = parse_real(args.hE)
        with mpmath.workprec(bounds.BASE_PREC):
            hE_max = max(mpmath.mpf(1), mpmath.mpf(hE.numerator) / hE.denominator, mpmath.log(args.D))
        index = bounds.lombardo_index(args.D, hE_max)
    else:
        try:
            index = int(args.index)
        except ValueError:
            raise InputError(args.index, 0, "index must be lombardo or an integer") from None
    cm = None
    cm_info = None
    if args.kind == "translate":
        if args.cm is None:
            raise PreconditionError("translate needs --cm A,B,C", "CM point xi given")
        xi = curves.cm_point(*parse_form(args.cm), prec=prec)
        if xi.disc == -3:
            raise PreconditionError("xi = zeta has alpha = 0; use the unit bound", "xi not in {zeta, zeta^2}")
        with mpmath.workprec(prec):
            H_xi = mpmath.exp(heights.height(xi.algebraic, prec))
        cm = bounds.CMData(xi.disc, curves.pen(xi.disc, prec), H_xi, xi.class_number)
        cm_info = {"xi": xi.to_dict(), "disc": xi.disc, "class_number": xi.class_number,
                   "Pen": render(cm.pen), "H_xi": render(H_xi)}
    inp = bounds.BoundInputs(args.D, h, h_j0, index, omega_max=P.omega_max, cm=cm)
    report = bounds.final_bound_unit(inp) if args.kind == "unit" else bounds.final_bound_translate(inp)
    result = {"curve": E.to_dict(), "tau0": P.tau0.to_dict(), "omega_max": render(P.omega_max),
              "h": render(h), "h_j0": render(h_j0), "D": args.D, "cm": cm_info,
              "report": report.to_dict()}
    checks = [Check("bound_available", report.available, None, None, {"reason": report.reason})]
    if report.available and report.value.level == 2:
        result["ln_ln_bound"] = render(report.value.mag)
        if index.level == 1:
            # the leading 2 ln(index) hides the rest at any printable digit count
            with mpmath.workprec(bounds.working_prec(report.value.mag)):
                result["ln_ln_bound_minus_2_ln_index"] = render(report.value.mag - 2 * index.mag)
    if report.available and inp.index.level == 0:
        cross = bounds.crossover_search(inp)
        result["crossover"] = cross.to_dict()
        checks.append(Check("crossover_certified", cross.certified, None, None))
        checks.append(Check("crossover_le_bound", bounds.LogValue.from_log(cross.ln_N) <= report.value,
                            cross.ln_N, report.value.ln_mpf(), {"compared": "log N"}))
    return result, checks


def cmd_verify(args, prec: int):
    reps = verify.run(args.suite, seed=args.seed, cases=args.cases, full=args.full, prec=prec)
    result = {"suite": args.suite, "seed": args.seed, "cases": args.cases, "full": args.full,
              "suites": [r.to_dict() for r in reps]}
    checks = [c for r in reps for c in r.checks]
    return result, checks


# --- output -----------------------------------------------------------------------

def build_document(command: str, settings: dict, result=None, checks=(), error=None) -> dict:
    doc = {"schema": SCHEMA, "command": command, "precision": settings["precision"]}
    if result is not None:
        doc["result"] = render(result)
    doc["checks"] = [c.to_dict() for c in checks]
    doc["passed"] = error is None and all(c.passed for c in checks)
    if error is not None:
        doc["error"] = error
    return doc


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)


def _human(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines += _human(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines += _human(v, indent + 1)
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{value}")
    return lines


def dump_human(doc: dict) -> str:
    lines = [f"{doc['command']} (precision {doc['precision']} bits)"]
    if "error" in doc:
        lines.append(f"error: {doc['error']['message']}")
        if doc["error"].get("inequality"):
            lines.append(f"violated: {doc['error']['inequality']}")
        return "\n".join(lines)
    if doc["command"] != "verify":
        lines += _human(doc.get("result", {}), 1)
    failed = None
    for c in doc["checks"]:
        lines.append(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: lhs={c['lhs']} rhs={c['rhs']}")
        if not c["passed"] and failed is None:
            failed = c
    if failed is not None:
        lines.append("first failing check:")
        lines += _human(failed, 1)
    lines.append("PASSED" if doc["passed"] else "FAILED")
    return "\n".join(lines)


# --- argument parser ----------------------------------------------------------------

def _global_options(p: argparse.ArgumentParser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--prec", type=int, default=default, help="working precision in bits (>= 64)")
    p.add_argument("--config", default=default, help="key=value file (precision, format)")
    p.add_argument("--format", choices=("json", "human"), default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isobound", description=__doc__.split("\n\n")[0])
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a point to the fundamental domain")
    p.add_argument("re")
    p.add_argument("im")

    p = sub.add_parser("cluster", help="enumerate Hecke images near xi")
    p.add_argument("--tau0", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--xi", required=True, help="zeta, zeta2, i, A,B,C or an exact a/b+c/d*i")
    p.add_argument("--eps", required=True)
    p.add_argument("--strict", action="store_true",
                   help="reject eps beyond (Im xi / (100 |xi|^3))^2")
    p.add_argument("--cyclic-only", action="store_true")

    p = sub.add_parser("bound", help="explicit isogeny-degree bound")
    p.add_argument("kind", choices=("unit", "translate"))
    p.add_argument("--g2", required=True)
    p.add_argument("--g3", required=True)
    p.add_argument("--cm", help="reduced CM form A,B,C for the translate bound")
    p.add_argument("--index", default="1", help="lombardo or a positive integer")
    p.add_argument("--hE", default="1", help="Faltings height input for the Lombardo index")
    p.add_argument("--D", type=int, default=1, help="degree of the field of definition")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=verify.SUITES + ("all",))
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cases", type=int, help="random cases per check (smoke runs)")
    p.add_argument("--full", action="store_true", help="acceptance-size runs")

    for name in ("reduce", "cluster", "bound", "verify"):
        _global_options(sub.choices[name], suppress=True)
    return parser


COMMANDS = {"reduce": cmd_reduce, "cluster": cmd_cluster, "bound": cmd_bound, "verify": cmd_verify}


def run(argv: Optional[list[str]] = None, environ=None) -> tuple[int, dict, str]:
    """Execute a command; returns (exit status, document, rendered output)."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # a leading space keeps negative numbers like -7/3 from being read as options
    args = parser.parse_args([" " + a if _NEGATIVE.match(a) else a for a in argv])
    settings = dict(DEFAULTS)
    try:
        settings = resolve_settings(args, environ)
        if args.command == "verify" and args.cases is not None and args.cases < 1:
            raise PreconditionError("--cases must be positive", "cases >= 1")
        result, checks = COMMANDS[args.command](args, settings["precision"])
        doc = build_document(args.command, settings, result, checks)
        status = EXIT_OK if doc["passed"] else EXIT_CHECK
    except PrecisionExhausted as exc:
        doc = build_document(args.command, settings, error={"type": "precision", "message": str(exc)})
        status = EXIT_PRECISION
    except PreconditionError as exc:
        doc = build_document(args.command, settings, error={
            "type": "precondition", "message": str(exc), "inequality": exc.inequality})
        status = EXIT_USAGE
    except (ValueError, OSError) as exc:
        doc = build_document(args.command, settings, error={"type": "usage", "message": str(exc)})
        status = EXIT_USAGE
    text = dump_json(doc) if settings["format"] == "json" else dump_human(doc)
    return status, doc, text


def main(argv: Optional[list[str]] = None) -> int:
    status, doc, text = run(argv)
    print(text)
    if "error" in doc:
        print(f"isobound: {doc['error']['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
