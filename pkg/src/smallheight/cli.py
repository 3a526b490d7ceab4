"""Command-line interface."""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Any, Dict, List, Optional

from . import avoid as AV
from . import heights as HT
from . import lattices as LT
from . import siegel as SG
from . import suites as SU
from .certified import MAX_BITS, CertifiedReal, UnresolvedComparison, set_start_bits
from .fields import FieldDescriptor, FieldError
from .linalg import BudgetExhausted
from .serialize import (LATTICE_SCHEMA, TWISTED_SCHEMA, MalformedInput, dumps,
                        field_to_json, parse_field, parse_place, parse_problem, place_to_json,
                        problem_to_json, real_to_json, validate)
from .subspaces import dual_form, duality_check, grassmann, subspace_height

EXIT_OK, EXIT_FAIL, EXIT_NO_POINT, EXIT_MALFORMED, EXIT_UNRESOLVED, EXIT_BUDGET = 0, 1, 2, 3, 4, 5


class Context:
    def __init__(self, args):
        self.format = args.format
        self.precision = args.precision
        self.budget = args.budget
        self.seed = args.seed
        self.timing = args.timing
        self.digits = max(6, args.precision // 10)
        self.precision_given = args.precision_given

    def real(self, x: Optional[CertifiedReal]):
        return real_to_json(x, self.digits)


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON in {path}: {exc}") from exc


def _field_arg(text: Optional[str]) -> Optional[FieldDescriptor]:
    if text is None:
        return None
    try:
        return FieldDescriptor.parse(text)
    except FieldError as exc:
        raise MalformedInput(str(exc)) from exc


def _parse_value(text: str):
    """A JSON value if it parses, otherwise the raw string (so "3/2" works unquoted)."""
    if text == "-":
        text = sys.stdin.read().strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _elements(f: FieldDescriptor, encs) -> list:
    try:
        return [f.parse_element(e) for e in encs]
    except (FieldError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands


def cmd_height(args, ctx: Context):
    f = _field_arg(args.field) or FieldDescriptor.rational()
    raw = _parse_value(args.vector)
    if not isinstance(raw, list):
        raw = [raw]
    x = _elements(f, raw)
    out: Dict[str, Any] = {"command": "height", "field": field_to_json(f),
                           "vector": [f.format_element(c) for c in x]}
    if any(x):
        out["H"] = ctx.real(HT.height_H(x, f))
        out["cal_H"] = ctx.real(HT.height_cal_H(x, f))
    else:
        out["H"] = out["cal_H"] = None
    out["h"] = ctx.real(HT.height_h(x, f))
    return out, EXIT_OK


def cmd_weil(args, ctx: Context):
    f = _field_arg(args.field) or FieldDescriptor.rational()
    (a,) = _elements(f, [_parse_value(args.scalar)])
    return {"command": "weil", "field": field_to_json(f), "scalar": f.format_element(a),
            "weil_height": ctx.real(HT.weil_height(a, f))}, EXIT_OK


def cmd_subspace(args, ctx: Context):
    prob = _load_problem(args.file, ctx)
    X = prob.basis
    f = X.field
    gv = grassmann(X)
    A = dual_form(X)
    dual = duality_check(X, A)
    return {
        "command": "subspace",
        "problem": problem_to_json(prob),
        "N": X.N, "L": X.L,
        "HV": ctx.real(subspace_height(X)),
        "grassmann": [{"I": [i + 1 for i in I], "value": f.format_element(v)}
                      for I, v in zip(gv.subsets, gv.values)],
        "dual_form": [[f.format_element(c) for c in r] for r in A.rows],
        "gamma": f.format_element(dual.gamma),
        "duality_ok": dual.ok,
    }, EXIT_OK


def _siegel_json(sb: SG.SiegelBasis, f: FieldDescriptor, ctx: Context) -> dict:
    return {
        "vectors": [[f.format_element(c) for c in v] for v in sb.vectors],
        "h": [ctx.real(x) for x in sb.h],
        "H": [ctx.real(x) for x in sb.H],
        "product_h": ctx.real(sb.product_h),
        "bound": ctx.real(sb.bound),
        "HV": ctx.real(sb.HV),
        "status": sb.status,
        "comparison": sb.comparison,
        "lower_bound_ok": sb.lower_bound_ok,
        "nodes": sb.nodes,
        "extra": {k: v for k, v in sb.extra.items() if isinstance(v, (int, str, bool))},
    }


def _load_problem(path: str, ctx: Context):
    prob = parse_problem(_read_json(path))
    bits = prob.options.get("precision_bits")
    if bits is not None and not ctx.precision_given:
        set_start_bits(min(bits, MAX_BITS))
    return prob


def cmd_siegel(args, ctx: Context):
    prob = _load_problem(args.file, ctx)
    budget = ctx.budget or prob.options.get("budget", SG.DEFAULT_BUDGET)
    sb = SG.siegel_basis(prob.basis, budget)
    code = EXIT_OK if sb.certified else EXIT_BUDGET if sb.status == "budget exhausted" else \
        EXIT_UNRESOLVED if sb.status == "unresolved" else EXIT_FAIL
    return {"command": "siegel", "problem": problem_to_json(prob),
            "siegel": _siegel_json(sb, prob.field, ctx)}, code


def _checks_json(checks: dict, f: FieldDescriptor, ctx: Context) -> dict:
    out = {}
    for k, v in checks.items():
        if isinstance(v, CertifiedReal):
            out[k] = ctx.real(v)
        elif isinstance(v, (bool, int, str)) or v is None:
            out[k] = v
        elif k == "forms":
            out[k] = [[f.format_element(c) for c in r] for r in v]
    return out


def cmd_avoid(args, ctx: Context):
    prob = _load_problem(args.file, ctx)
    f = prob.field
    budget = ctx.budget or prob.options.get("budget", SG.DEFAULT_BUDGET)
    report: Dict[str, Any] = {"command": "avoid", "problem": problem_to_json(prob)}
    try:
        if prob.subspaces is not None:
            cert = AV.subspace_avoidance(prob.basis, prob.subspaces, budget)
        elif prob.families is not None:
            cert = AV.solve(prob.basis, AV.VarietyUnion(prob.families), budget)
        else:
            raise MalformedInput("problem needs 'varieties' or 'subspaces'")
    except AV.VContainedInVariety as exc:
        report.update({"verdict": "no-point-exists", "reason": str(exc)})
        return report, EXIT_NO_POINT
    except ValueError as exc:
        if isinstance(exc, (MalformedInput, FieldError)):
            raise
        raise MalformedInput(str(exc)) from exc
    fmt = f.format_element
    report.update({
        "verdict": cert.verdict,
        "certificate": {
            "point": [fmt(c) for c in cert.point],
            "xi": [fmt(c) for c in cert.xi],
            "basis": [[fmt(c) for c in v] for v in cert.basis],
            "chosen": [j + 1 for j in cert.chosen],
            "branch": cert.branch,
            "grid": {"R": ctx.real(cert.R), "size": cert.grid_size},
            "M": cert.M,
            "L": cert.L,
        },
        "heights": {"h_point": ctx.real(cert.h_point), "h_xi": ctx.real(cert.h_xi),
                    "HV": ctx.real(cert.HV)},
        "bound": ctx.real(cert.bound),
        "checks": _checks_json(cert.checks, f, ctx),
        "evaluations": cert.evaluations,
        "siegel": _siegel_json(cert.siegel, f, ctx),
    })
    code = {"certified": EXIT_OK, "unresolved": EXIT_UNRESOLVED}.get(cert.verdict, EXIT_FAIL)
    return report, code


def _radius(text: str, f: FieldDescriptor, M: Optional[int]):
    if M is not None:
        if f.is_number_field:
            inv = f.invariants()
            return CertifiedReal.radical(Fraction(2 ** inv.r1 * abs(inv.discriminant) * M * M), 2 * inv.degree)
        R = SG.R_K(f, M)
        if R is None:
            raise MalformedInput(f"q = {f.q} > M = {M}: the constant grid is used, no radius")
        return R
    if text is None:
        raise MalformedInput("grid needs --R or --M")
    try:
        return CertifiedReal.rational(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"bad radius {text!r}") from exc


def cmd_grid(args, ctx: Context):
    f = _field_arg(args.field)
    if f is None:
        raise MalformedInput("grid needs --field")
    R = _radius(args.R, f, args.M)
    out: Dict[str, Any] = {"command": "grid", "field": field_to_json(f), "R": ctx.real(R)}
    if f.is_number_field:
        try:
            g = LT.enumerate_S_R_numberfield(f, R)
        except ValueError as exc:
            raise MalformedInput(str(exc)) from exc
        chk = LT.lemma_count_check(f, R, g)
        out.update({
            "count": len(g),
            "lemma_applicable": chk.applicable,
            "lemma_ok": chk.ok,
            "lower": ctx.real(chk.lower),
            "upper": ctx.real(chk.upper),
            "conjugate_floor": chk.extra["conjugate_floor"],
        })
        if args.list:
            out["elements"] = [f.format_element(x) for x in g.elements]
        ok = chk.ok is not False
    else:
        res = LT.enumerate_S_R_functionfield(f.q, R)
        out.update({
            "direct_count": res.direct_count,
            "lemma_count": res.lemma_count,
            "lemma_applicable": res.applicable,
            "lemma_ok": res.ok,
            "lower": ctx.real(res.lower),
            "upper": ctx.real(res.upper),
        })
        ok = res.ok is not False
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_count_lattice(args, ctx: Context):
    obj = _read_json(args.file)
    validate(obj, LATTICE_SCHEMA)
    results = []
    ok = True
    for entry in obj["lattices"]:
        try:
            basis = [[int(Fraction(c)) for c in r] for r in entry["basis"]]
            R = Fraction(entry["R"])
            if entry["type"] == "fullrank":
                z = [Fraction(c) for c in entry["z"]] if "z" in entry else None
                c = Fraction(entry["c"]) if "c" in entry else None
                res = LT.cube_count_fullrank(basis, R, z, c)
            else:
                res = LT.cube_count_sublattice(basis, R)
        except (LT.PreconditionError, ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(str(exc)) from exc
        ok = ok and res.ok
        results.append({"type": entry["type"], "exact": res.exact, "lower": ctx.real(res.lower),
                        "upper": ctx.real(res.upper), "ok": res.ok,
                        "params": {k: str(v) for k, v in res.params.items()}})
    return {"command": "count-lattice", "results": results}, EXIT_OK if ok else EXIT_FAIL


def cmd_twisted(args, ctx: Context):
    obj = _read_json(args.file)
    validate(obj, TWISTED_SCHEMA)
    f = parse_field(obj["field"])
    x = _elements(f, obj["x"])
    comps = {}
    for c in obj.get("components", []):
        v = parse_place(c["place"], f)
        comps[v] = [_elements(f, row) for row in c["matrix"]]
    try:
        A = HT.TwistedOperator(len(x), f, comps)
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc
    res = HT.twisted_check(A, x)
    return {
        "command": "twisted",
        "field": field_to_json(f),
        "x": [f.format_element(c) for c in x],
        "places": [place_to_json(v) for v in comps],
        "H_A": ctx.real(res.twisted),
        "dilation": ctx.real(res.dilation),
        "H": ctx.real(res.height),
        "ok": res.ok,
    }, EXIT_OK if res.ok else EXIT_FAIL


def cmd_verify(args, ctx: Context):
    names = list(SU.SUITES) if args.suite == "all" else [args.suite]
    if any(n not in SU.SUITES for n in names):
        raise MalformedInput(f"unknown suite {args.suite!r}; choose from all, {', '.join(SU.SUITES)}")
    results = []
    for n in names:
        r = SU.run_suite(n, ctx.seed)
        entry = {"suite": n, "criterion": r.criterion, "passed": r.passed, "checks": r.checks,
                 "failures": r.failures[:20], "limit_seconds": r.limit}
        if ctx.timing:
            entry["elapsed_seconds"] = round(r.elapsed, 3)
        results.append(entry)
        if ctx.format == "text":
            print(r.line, file=sys.stderr)
    ok = all(r["passed"] for r in results)
    return {"command": "verify", "seed": ctx.seed, "results": results, "passed": ok}, \
        EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "height": cmd_height,
    "weil": cmd_weil,
    "subspace": cmd_subspace,
    "siegel": cmd_siegel,
    "avoid": cmd_avoid,
    "grid": cmd_grid,
    "count-lattice": cmd_count_lattice,
    "twisted": cmd_twisted,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS)
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS,
                        help="initial interval precision in bits (default 64)")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                        help="lattice enumeration cap")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for the random suites")
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                        help="include wall-clock timings (makes output non-deterministic)")

    p = argparse.ArgumentParser(prog="smallheight", description=__doc__, parents=[common])
    p.set_defaults(format="json", precision=None, budget=None, seed=0, timing=False)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("height", parents=[common], help="H, cal-H and h of a vector")
    s.add_argument("vector", nargs="?", default="-",
                   help='JSON array of encoded elements, e.g. "[3, 4]"; - or omitted reads stdin')
    s.add_argument("--field", help="Q, Q(sqrt(d)) or Fq(t)")

    s = sub.add_parser("weil", parents=[common], help="Weil height of a scalar")
    s.add_argument("scalar", nargs="?", default="-", help="encoded element; - or omitted reads stdin")
    s.add_argument("--field")

    for name, hlp in (("subspace", "height, Grassmann vector and dual form of V"),
                      ("siegel", "reduced basis with certification record"),
                      ("avoid", "point of V outside a union of varieties"),
                      ("count-lattice", "cube counts against the lattice lemmas"),
                      ("twisted", "twisted height against the dilation bound")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("file", help="JSON input file, or - for stdin")

    s = sub.add_parser("grid", parents=[common], help="enumerate or count S_R(K)")
    s.add_argument("--field", required=True)
    s.add_argument("--R", help="radius (rational)")
    s.add_argument("--M", type=int, help="use the solver radius for total degree M instead")
    s.add_argument("--list", action="store_true", help="include the elements")

    s = sub.add_parser("verify", parents=[common], help="run a named verification suite")
    s.add_argument("--suite", required=True, help="suite name or 'all'")
    return p


def _text(obj, indent=0) -> List[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        if set(obj) == {"exact", "interval"}:
            ex = obj["exact"]
            return [pad + (f"{ex} " if ex else "") + f"in [{obj['interval'][0]}, {obj['interval'][1]}]"]
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            sub = _text(v, indent + 1)
            lines.append(f"{pad}-" + (" " + sub[0].strip() if sub else ""))
            lines.extend(sub[1:])
    else:
        lines.append(pad + _inline(obj))
    return lines


def _flat(v) -> bool:
    if isinstance(v, dict):
        return set(v) == {"exact", "interval"}
    return all(not isinstance(x, (dict, list)) or _flat(x) for x in v)


def _inline(v) -> str:
    if isinstance(v, dict) and set(v) == {"exact", "interval"}:
        return _text(v)[0]
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return "null" if v is None else str(v)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.precision_given = args.precision is not None
    if args.precision is None:
        args.precision = 64
    try:
        set_start_bits(args.precision)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    ctx = Context(args)
    t0 = time.perf_counter()
    try:
        report, code = COMMANDS[args.command](args, ctx)
    except (MalformedInput, FieldError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except UnresolvedComparison as exc:
        print(f"error: unresolved comparison: {exc}", file=sys.stderr)
        return EXIT_UNRESOLVED
    except BudgetExhausted as exc:
        print(f"error: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if ctx.timing:
        report["timing_seconds"] = round(time.perf_counter() - t0, 3)
    if ctx.format == "json":
        sys.stdout.write(dumps(report))
    else:
        sys.stdout.write("\n".join(_text(report)) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
