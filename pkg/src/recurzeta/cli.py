"""Command-line front end (``rz``)."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from .ball import ComplexEnclosure, format_real
from .errors import (
    InconsistencyError,
    LatticeError,
    MathematicalError,
    PolynomialParseError,
    PrecisionError,
    RecurZetaError,
)
from .poles import (
    enumerate_poles,
    fibre_brute_force,
    fibre_members,
    fibre_size,
    kappa_bound,
    plot_data,
    pole_location,
)
from .polyarith import conjugate_system, parse_polynomial
from .recurrence import make_recurrence, terms
from .relations import (
    SUFFICIENT_ASSERTIONS,
    decide_injectivity,
    find_relation_lattice,
    h0_lattice,
    line_through_e,
    norm_class,
    rank_arithmetic_check,
    sufficient_conditions,
)
from .zeta import dirichlet_sum, phi_eval

EXIT_OK, EXIT_USAGE, EXIT_MATH, EXIT_PRECISION = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 256
    confidence_bits: int = 128
    max_kappa: int = 10
    max_coeff: int = 32
    dirichlet_terms: int = 512
    output_format: str | None = None


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error [cli]: {message}\n")
        sys.exit(EXIT_USAGE)


def _digits(prec: int) -> int:
    return max(1, min(20, math.floor(prec / 2 * math.log10(2)) - 2))


def _num(x, digits: int) -> str:
    """Deterministic decimal for a Fraction or a raw/mpf float."""
    if isinstance(x, Fraction):
        if x == 0:
            return "0"
        from mpmath import libmp as L
        x = L.from_rational(x.numerator, x.denominator, 4 * digits + 64, "n")
    return format_real(x, digits)


def _ball_json(z: ComplexEnclosure, digits: int) -> dict:
    re_, im_ = z.mid_fraction()
    return {
        "re": _num(re_, digits),
        "im": _num(im_, digits),
        "radius_log2": None if z.is_exact() else int(z.radius_log2()),
    }


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse number {text!r}") from None


def parse_complex(text: str) -> tuple[Fraction, Fraction]:
    """``"a+bi"``, ``"a"``, ``"bi"``, ``"a-i"`` with decimal or rational parts."""
    t = re.sub(r"\s+", "", text).replace("−", "-").replace("i", "j")
    if not t:
        raise UsageError("empty complex number")
    if not t.endswith("j"):
        return _fraction(t), Fraction(0)
    body = t[:-1]
    split = max(body.rfind("+"), body.rfind("-"))
    real_text, imag_text = (body[:split], body[split:]) if split > 0 else ("", body)
    if imag_text in ("", "+", "-"):
        imag_text += "1"
    return (_fraction(real_text) if real_text else Fraction(0)), _fraction(imag_text)


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(";", ",").split(",") if t.strip())
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of integers") from None


def _system(args):
    return conjugate_system(parse_polynomial(args.polynomial), args.precision)


def _relations(system, args):
    return find_relation_lattice(system, confidence_bits=args.confidence, max_coeff=args.max_coeff)


def _flags_json(system) -> dict:
    return system.flags.as_dict()


# ---------------------------------------------------------------- commands

def cmd_roots(args) -> dict:
    system = _system(args)
    d = _digits(args.precision)
    return {
        "polynomial": str(system.polynomial),
        "precision_bits": args.precision,
        "flags": _flags_json(system),
        "roots": [_ball_json(z, d) for z in system.roots],
    }


def cmd_relations(args) -> dict:
    system = _system(args)
    lattice = _relations(system, args)
    h0 = decide_injectivity(system, lattice).h0_part
    return {
        "polynomial": str(system.polynomial),
        "norm_class": norm_class(system.polynomial).value,
        "relations": lattice.to_json(),
        "relation_status": list(lattice.statuses),
        "h0_intersection": h0.to_json(),
    }


def cmd_analyze(args) -> dict:
    system = _system(args)
    d = _digits(args.precision)
    lattice = _relations(system, args)
    verdict = decide_injectivity(system, lattice)
    L0 = verdict.h0_part
    e_line = line_through_e(lattice)
    return {
        "polynomial": str(system.polynomial),
        "coefficients": list(system.polynomial.coefficients),
        "degree": system.degree,
        "precision_bits": args.precision,
        "flags": _flags_json(system),
        "roots": [_ball_json(z, d) for z in system.roots],
        "norm_class": norm_class(system.polynomial).value,
        "relations": lattice.to_json(),
        "relation_status": list(lattice.statuses),
        "relations_on_e_line": list(e_line) if e_line else None,
        "h0_intersection": L0.to_json(),
        "injective": verdict.injective,
        "witness": list(verdict.witness) if verdict.witness else None,
        "sufficient_conditions": sufficient_conditions(system, args.assume or (), lattice),
        "rank_check": rank_arithmetic_check(lattice, h0_lattice(system.degree)),
        "fibre_at_zero": fibre_size(system, L0, (0,) * (system.degree - 1)),
    }


def _pole_records(args):
    system = _system(args)
    lattice = _relations(system, args)
    L0 = decide_injectivity(system, lattice).h0_part
    return system, enumerate_poles(system, L0, args.max_kappa, lattice)


def cmd_poles(args):
    system, records = _pole_records(args)
    d = _digits(args.precision)
    rows = []
    for row in plot_data(records):
        rows.append({
            "re": _num(row.re.mid_fraction()[0], d),
            "im": _num(row.im.mid_fraction()[0], d),
            "fibre_size": row.fibre_size,
            "representative_kappa": list(row.representative),
        })
    return {"polynomial": str(system.polynomial), "max_kappa": args.max_kappa, "rows": rows}


def cmd_fibre(args) -> dict:
    system = _system(args)
    kappa = _parse_int_list(args.kappa, "kappa")
    if len(kappa) != system.degree - 1:
        raise UsageError(f"kappa must have {system.degree - 1} entries, got {len(kappa)}")
    if any(k < 0 for k in kappa):
        raise UsageError("kappa entries must be nonnegative")
    lattice = _relations(system, args)
    L0 = decide_injectivity(system, lattice).h0_part
    members = fibre_members(system, L0, kappa)
    size = len(members)
    low = pole_location(system, kappa, 0, lattice).re_lower()
    reach = kappa_bound(system, math.floor(low)) if low < 0 else 0
    brute = fibre_brute_force(system, kappa, reach)
    return {
        "polynomial": str(system.polynomial),
        "kappa": list(kappa),
        "fibre_size": size,
        "brute_force": brute,
        "brute_force_max_kappa": reach,
        "agrees": brute == size,
        "members": [list(m) for m in members if sum(m) <= args.max_kappa],
    }


def cmd_seq(args) -> dict:
    system = _system(args)
    initial = _parse_int_list(args.initial_terms, "initial terms") if args.initial_terms else None
    spec = make_recurrence(system, initial)
    d = _digits(args.precision)
    return {
        "polynomial": str(system.polynomial),
        "initial_terms": list(spec.initial_terms),
        "start_index": spec.start_index,
        "binet_coefficients": [_ball_json(z, d) for z in spec.lambdas],
        "terms": [str(a) for a in terms(spec, args.count)],
    }


def cmd_zeta(args) -> dict:
    system = _system(args)
    initial = _parse_int_list(args.initial_terms, "initial terms") if args.initial_terms else None
    spec = make_recurrence(system, initial)
    re_, im_ = parse_complex(args.s)
    prec = system.work_prec
    s = ComplexEnclosure.from_parts(ComplexEnclosure.from_value(re_, prec), ComplexEnclosure.from_value(im_, prec))
    d = _digits(args.precision)
    phi = phi_eval(spec, s, args.truncation)
    out = {
        "polynomial": str(system.polynomial),
        "initial_terms": list(spec.initial_terms),
        "start_index": spec.start_index,
        "s": {"re": _num(re_, d), "im": _num(im_, d)},
        "phi": dict(_ball_json(phi.value, d), tail="certified" if phi.certified_tail else "uncertified"),
        "truncation": args.truncation,
    }
    if s.re_lower() > 0:
        direct = dirichlet_sum(spec, s, args.terms)
        out["dirichlet"] = _ball_json(direct, d)
        out["dirichlet_terms"] = args.terms
        out["intersect"] = phi.value.overlaps(direct)
    else:
        out["dirichlet"] = None
        out["intersect"] = None
    return out


# ---------------------------------------------------------------- rendering

def _render_text(obj, indent=0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, str, bool)) for x in v):
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v):
                lines.append(f"{pad}- {_scalar(v)}")
            elif isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return "\n".join(lines)


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=False)
    return str(v)


def _render_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im", "fibre_size", "representative_kappa"])
    for row in report["rows"]:
        w.writerow([row["re"], row["im"], row["fibre_size"], ";".join(str(k) for k in row["representative_kappa"])])
    return buf.getvalue()


def _render_svg(report) -> str:
    rows = report["rows"]
    width, height, margin = 640, 480, 48
    xs = [float(r["re"]) for r in rows] or [0.0]
    ys = [float(r["im"]) for r in rows] or [0.0]
    x0, x1 = min(xs + [0.0]), max(xs + [0.0])
    y0, y1 = min(ys + [0.0]), max(ys + [0.0])
    if x1 - x0 < 1e-9:
        x0, x1 = x0 - 1, x1 + 1
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 1, y1 + 1

    def px(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def py(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{py(0):.2f}" x2="{width - margin}" y2="{py(0):.2f}" stroke="black" stroke-width="1"/>',
        f'<line x1="{px(0):.2f}" y1="{margin}" x2="{px(0):.2f}" y2="{height - margin}" stroke="black" stroke-width="1"/>',
        f'<text x="{width - margin + 6}" y="{py(0) + 4:.2f}" font-family="sans-serif" font-size="14">Re</text>',
        f'<text x="{px(0) - 8:.2f}" y="{margin - 10}" font-family="sans-serif" font-size="14">Im</text>',
    ]
    for r, x, y in zip(rows, xs, ys):
        rad = 1.5 * r["fibre_size"]
        kappa = ";".join(str(k) for k in r["representative_kappa"])
        out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="{rad:.2f}" fill="steelblue" '
                   f'fill-opacity="0.6"><title>{kappa} x{r["fibre_size"]}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


COMMANDS = {
    "analyze": (cmd_analyze, "json"),
    "poles": (cmd_poles, "csv"),
    "zeta": (cmd_zeta, "json"),
    "fibre": (cmd_fibre, "json"),
    "roots": (cmd_roots, "json"),
    "relations": (cmd_relations, "json"),
    "seq": (cmd_seq, "json"),
}


def render(command: str, report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "text":
        return _render_text(report) + "\n"
    if command != "poles":
        raise UsageError(f"format {fmt!r} is only available for the poles command")
    return _render_csv(report) if fmt == "csv" else _render_svg(report)


def build_parser() -> argparse.ArgumentParser:
    env_prec = os.environ.get("RZ_PRECISION")
    try:
        default_prec = int(env_prec) if env_prec else RunConfig.precision_bits
    except ValueError:
        default_prec = RunConfig.precision_bits
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=default_prec, help="working precision in bits")
    common.add_argument("--confidence", type=int, default=RunConfig.confidence_bits,
                        help="bits of the relation search scale")
    common.add_argument("--max-kappa", type=int, default=RunConfig.max_kappa)
    common.add_argument("--max-coeff", type=int, default=RunConfig.max_coeff)
    common.add_argument("--terms", type=int, default=RunConfig.dirichlet_terms, help="Dirichlet terms")
    common.add_argument("--format", choices=["json", "csv", "svg", "text"], default=None)
    common.add_argument("--initial-terms", default=None, help="comma-separated a_0,...,a_{r-1}")
    common.add_argument("--s", default="2", help='complex argument, e.g. "3+1i"')

    parser = _Parser(prog="rz", description="Zeta functions of integer linear recurrences.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in [
        ("analyze", "classification, relation lattice, injectivity"),
        ("poles", "candidate poles with fibre sizes"),
        ("zeta", "evaluate the zeta function two ways"),
        ("fibre", "fibre of one multi-index"),
        ("roots", "certified roots"),
        ("relations", "relation lattice only"),
        ("seq", "sequence terms and Binet data"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("polynomial", help='e.g. "x^2-x-1" or "[-1,-1,1]"')
        if name == "fibre":
            p.add_argument("kappa", help="comma-separated multi-index")
        if name == "analyze":
            p.add_argument("--assume", action="append", choices=SUFFICIENT_ASSERTIONS,
                           help="assert a Galois-group condition")
        if name == "zeta":
            p.add_argument("--truncation", type=int, default=16, help="largest |kappa| summed")
        if name == "seq":
            p.add_argument("--count", type=int, default=20)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func, default_fmt = COMMANDS[args.command]
    fmt = args.format or default_fmt
    try:
        if args.precision < 64:
            raise UsageError("--precision must be at least 64")
        report = func(args)
        sys.stdout.write(render(args.command, report, fmt))
        return EXIT_OK
    except (UsageError, PolynomialParseError) as exc:
        sys.stderr.write(f"error [{getattr(exc, 'module', 'cli')}]: {exc}\n")
        return EXIT_USAGE
    except MathematicalError as exc:
        sys.stderr.write(f"error [{exc.module}]: {exc}\n")
        return EXIT_MATH
    except (PrecisionError, InconsistencyError, LatticeError) as exc:
        sys.stderr.write(f"error [{exc.module}]: {exc}\n")
        return EXIT_PRECISION
    except RecurZetaError as exc:
        sys.stderr.write(f"error [{exc.module}]: {exc}\n")
        return EXIT_PRECISION
    except ValueError as exc:
        sys.stderr.write(f"error [cli]: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
