"""Command-line front end.

Exit codes: 0 when every check passes, 1 when an inequality or identity is violated,
2 for malformed input or an unknown suite.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from math import isfinite

import numpy as np

from . import dyadic as dy
from . import hardy as hd
from . import interp as ip
from . import linops as lo
from . import probab as pb
from . import quasisym as qs
from . import varmin as vm
from .suites import SIZES, SUITES, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2
SUITE_CSV_HEADER = ["suite", "case", "lhs", "rhs", "tol", "status"]


class InputError(Exception):
    """Malformed input; the message names the offending line or field."""


# ---------------------------------------------------------------- formatting

def fmt(x: float) -> str:
    """17 significant digits, so every double round-trips."""
    x = float(x)
    if not isfinite(x):
        return "NaN" if x != x else ("Infinity" if x > 0 else "-Infinity")
    return format(x, ".17g")


def to_json_text(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits and keys in insertion order."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json_text(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(to_json_text(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json_text(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json_text([obj.real, obj.imag])
    if isinstance(obj, np.ndarray):
        return to_json_text(obj.tolist(), indent)
    return json.dumps(str(obj))


def scalar_json(v):
    v = complex(v)
    return [v.real, v.imag] if v.imag != 0 else v.real


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------- input parsing

def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _field(obj, name: str, where: str):
    if not isinstance(obj, dict) or name not in obj:
        raise InputError(f"{where}: missing field '{name}'")
    return obj[name]


def _scalar(v, where: str) -> complex | float:
    if isinstance(v, bool):
        raise InputError(f"{where}: expected a number")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v):
        return complex(v[0], v[1])
    raise InputError(f"{where}: expected a number or [re, im]")


def parse_stepfn(obj, where: str = "input") -> dy.DyadicStepFn:
    m = _field(obj, "m", where)
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise InputError(f"{where}: field 'm' must be a nonnegative integer")
    values = _field(obj, "values", where)
    if not isinstance(values, list) or len(values) != 2**m:
        got = len(values) if isinstance(values, list) else type(values).__name__
        raise InputError(f"{where}: field 'values' must hold 2^m = {2**m} entries, got {got}")
    vals = [_scalar(v, f"{where}: values[{i}]") for i, v in enumerate(values)]
    arr = np.array(vals, dtype=complex if any(isinstance(v, complex) for v in vals) else float)
    return dy.DyadicStepFn(m, arr)


def stepfn_json(f: dy.DyadicStepFn) -> dict:
    return {"m": f.m, "values": [scalar_json(v) for v in f.values]}


def stepfn_rows(f: dy.DyadicStepFn) -> tuple[list[str], list[list]]:
    n = 2**f.m
    rows = [[i, i / n, (i + 1) / n, float(np.real(v)), float(np.imag(v))] for i, v in enumerate(f.values)]
    return ["cell", "left", "right", "re", "im"], rows


def parse_matrix(obj, where: str = "input") -> np.ndarray:
    try:
        return lo.ComplexMatrix.from_json(obj).array
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{where}: bad matrix ({exc})") from exc


_KEY = re.compile(r"^\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*,?\s*\)$")


def parse_grid(obj, where: str = "input") -> tuple[vm.GridDomain, dict]:
    n = _field(obj, "n", where)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError(f"{where}: field 'n' must be a positive integer")
    pts = _field(obj, "points", where)
    if not isinstance(pts, list):
        raise InputError(f"{where}: field 'points' must be a list")
    for i, p in enumerate(pts):
        if not isinstance(p, list) or len(p) != n or not all(isinstance(c, int) and not isinstance(c, bool) for c in p):
            raise InputError(f"{where}: points[{i}] must be a list of {n} integers")
    try:
        dom = vm.GridDomain(n, [tuple(p) for p in pts])
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc
    raw = _field(obj, "boundary_values", where)
    if not isinstance(raw, dict):
        raise InputError(f"{where}: field 'boundary_values' must be an object")
    bv = {}
    for key, v in raw.items():
        mt = _KEY.match(key.strip())
        if not mt:
            raise InputError(f"{where}: boundary_values key {key!r} is not of the form \"(x, ...)\"")
        pt = tuple(int(c) for c in mt.group(1).split(","))
        if len(pt) != n:
            raise InputError(f"{where}: boundary_values key {key!r} needs {n} coordinates")
        bv[pt] = _scalar(v, f"{where}: boundary_values[{key!r}]")
    missing = [p for p in dom.boundary if p not in bv]
    if missing:
        raise InputError(f"{where}: boundary_values missing for boundary point {missing[0]}")
    return dom, bv


def parse_map_samples(path: str) -> tuple[np.ndarray, np.ndarray]:
    """``source,target`` CSV (1-D) or JSON ``{"source": [...], "target": [...]}``."""
    if path.endswith(".json"):
        obj = load_json(path)
        src, tgt = _field(obj, "source", path), _field(obj, "target", path)
        try:
            s, t = np.asarray(src, dtype=float), np.asarray(tgt, dtype=float)
        except (TypeError, ValueError) as exc:
            raise InputError(f"{path}: source/target must be numeric arrays") from exc
        return s, t
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    if not rows or [c.strip() for c in rows[0]] != ["source", "target"]:
        raise InputError(f"{path}: line 1: header must be 'source,target'")
    src, tgt = [], []
    for ln, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise InputError(f"{path}: line {ln}: expected 2 columns, got {len(row)}")
        try:
            src.append(float(row[0]))
            tgt.append(float(row[1]))
        except ValueError as exc:
            raise InputError(f"{path}: line {ln}: {exc}") from exc
    return np.array(src), np.array(tgt)


# ---------------------------------------------------------------- commands

class Output:
    """Result of a command: a JSON document, CSV rows, and whether all checks passed."""

    def __init__(self, doc, header=None, rows=None, ok: bool = True):
        self.doc, self.header, self.rows, self.ok = doc, header, rows, ok

    def render(self, fmt_name: str) -> str:
        if fmt_name == "csv" and self.header is not None:
            return csv_text(self.header, self.rows)
        return to_json_text(self.doc) + "\n"


def cmd_run_suite(args) -> Output:
    reports = run_suite(args.name, args.seed, args.size)
    for r in reports:
        print(f"{r.suite}: {r.cases} cases, {len(r.violations)} violations, {r.wall_time:.2f}s",
              file=sys.stderr)
    doc = {"seed": args.seed, "size": args.size, "suites": [
        {"suite": r.suite, "cases": r.cases,
         "violations": [{"case": v.case, "lhs": v.lhs, "rhs": v.rhs, "tol": v.tol} for v in r.violations]}
        for r in reports]}
    rows = [[r.suite, c.case, c.lhs, c.rhs, c.tol, "pass" if c.passed else "fail"]
            for r in reports for c in r.results]
    return Output(doc, SUITE_CSV_HEADER, rows, all(r.ok for r in reports))


def cmd_haar(args) -> Output:
    f = parse_stepfn(load_json(args.input), args.input)
    e = dy.haar_analyze(f)
    coeffs = [(I.k, I.j, c) for I, c in sorted(e.coeffs.items())]
    doc = {"m": f.m, "c0": scalar_json(e.c0),
           "coefficients": [{"k": k, "j": j, "value": scalar_json(c)} for k, j, c in coeffs]}
    rows = [["h0", "", "", float(np.real(e.c0)), float(np.imag(e.c0))]]
    rows += [["I", k, j, float(np.real(c)), float(np.imag(c))] for k, j, c in coeffs]
    return Output(doc, ["kind", "k", "j", "re", "im"], rows)


def _stepfn_output(g: dy.DyadicStepFn) -> Output:
    header, rows = stepfn_rows(g)
    return Output(stepfn_json(g), header, rows)


def cmd_expect(args) -> Output:
    if args.k < 0:
        raise InputError("k must be nonnegative")
    return _stepfn_output(dy.expectation(parse_stepfn(load_json(args.input), args.input), args.k))


def cmd_maximal(args) -> Output:
    return _stepfn_output(hd.maximal(parse_stepfn(load_json(args.input), args.input)))


def cmd_square(args) -> Output:
    return _stepfn_output(hd.square(parse_stepfn(load_json(args.input), args.input)))


def cmd_cz(args) -> Output:
    if not args.lam > 0:
        raise InputError("lambda must be positive")
    f = parse_stepfn(load_json(args.input), args.input)
    level = hd.maximal_level_set(f, args.lam)
    flat = hd.cz_flatten_m(f, args.lam)
    checks = hd.cz_m_checks(f, args.lam, flat)
    ok = all(l <= r for l, r in checks.values()) and level.measure <= level.bound + 1e-12
    doc = {"level_set": level.to_json(), "refined_bound": level.refined_bound,
           "family": [I.as_pair() for I in flat.family], "degenerate": flat.degenerate,
           "flattened": stepfn_json(flat.flattened),
           "checks": {k: {"lhs": l, "rhs": r} for k, (l, r) in checks.items()}}
    header, rows = stepfn_rows(flat.flattened)
    return Output(doc, header, rows, ok)


def cmd_khintchine(args) -> Output:
    if not args.p > 0:
        raise InputError("p must be positive")
    obj = load_json(args.input)
    alpha = _field(obj, "alpha", args.input)
    if not isinstance(alpha, list) or not alpha:
        raise InputError(f"{args.input}: field 'alpha' must be a nonempty list")
    a = np.array([_scalar(v, f"{args.input}: alpha[{i}]") for i, v in enumerate(alpha)])
    if np.iscomplexobj(a):
        raise InputError(f"{args.input}: field 'alpha' must be real")
    if len(a) > 20:
        raise InputError(f"{args.input}: at most 20 coefficients")
    rep = pb.khintchine_report(a, args.p)
    ok = True
    if args.p <= 4 and rep["l2"] > 0:
        c = pb.khintchine_constant(args.p)
        rep["constant"] = c
        ok = 1 / c - 1e-12 <= rep["ratio"] <= c + 1e-12
    rows = [[k, v] for k, v in rep.items()]
    return Output(rep, ["quantity", "value"], rows, ok)


def cmd_riesz(args) -> Output:
    p, q, t = args.p, args.q, args.t
    if not (1 <= p < q <= np.inf) or not 0 < t < 1:
        raise InputError("need 1 <= p < q <= inf and 0 < t < 1")
    a = parse_matrix(load_json(args.input), args.input)
    rep = ip.riesz_convexity_report(a, p, q, t, rng=np.random.default_rng(args.seed))
    ok = (not rep["endpoints_exact"]) or rep["lhs"] <= rep["rhs"] * (1 + 1e-9)
    rows = [[k, float(v)] for k, v in rep.items()]
    return Output(rep, ["quantity", "value"], rows, ok)


def cmd_pvar(args) -> Output:
    if not args.p >= 1:
        raise InputError("p must be at least 1")
    dom, bv = parse_grid(load_json(args.input), args.input)
    try:
        f = vm.minimize_vp(dom, bv, args.p)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rep = vm.maximum_principle_report(dom, bv, args.p, solution=f)
    doc = {"n": dom.n, "p": args.p, "vp": vm.vp_seminorm(f, args.p),
           "solution": [{"point": list(pt), "value": scalar_json(v)} for pt, v in zip(dom.points, f.values)],
           "maximum_principle": rep["ok"]}
    rows = [["(" + ", ".join(map(str, pt)) + ")", float(np.real(v)), float(np.imag(v))]
            for pt, v in zip(dom.points, f.values)]
    return Output(doc, ["point", "re", "im"], rows, bool(rep["ok"]))


def cmd_cantor(args) -> Output:
    if not 0 < args.r < 1:
        raise InputError("r must lie in (0, 1)")
    if not 0 <= args.depth <= qs.MAX_DEPTH:
        raise InputError(f"depth must lie in [0, {qs.MAX_DEPTH}]")
    if args.depth > 16:
        raise InputError("depth above 16 produces more than 2^16 intervals per level; refusing")
    levels = [qs.cantor_level(args.r, j) for j in range(args.depth + 1)]
    doc = {"r": args.r, "depth": args.depth, "levels": [lev.tolist() for lev in levels]}
    rows = [[j, i, float(a), float(b)] for j, lev in enumerate(levels) for i, (a, b) in enumerate(lev)]
    return Output(doc, ["level", "index", "left", "right"], rows)


def cmd_eta(args) -> Output:
    src, tgt = parse_map_samples(args.input)
    try:
        tab = qs.eta_empirical(src, tgt, args.samples, np.random.default_rng(args.seed))
    except ValueError as exc:
        raise InputError(f"{args.input}: {exc}") from exc
    doc = {"t": tab.t_hi.tolist(), "eta": tab.eta_hat.tolist(), "eta_raw": tab.eta.tolist(),
           "counts": tab.counts.tolist()}
    rows = [[float(t), float(e)] for t, e in zip(tab.t_hi, tab.eta_hat)]
    return Output(doc, ["t", "eta"], rows)


# ---------------------------------------------------------------- parser

def _float(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return float("inf")
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=1, help="seed for every random choice (default 1)")
    common.add_argument("--size", choices=sorted(SIZES), default="small", help="battery size for suites")
    common.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, *positional, aliases=()):
        sp = sub.add_parser(name, parents=[common], help=help_, aliases=list(aliases))
        for pname, kw in positional:
            sp.add_argument(pname, **kw)
        sp.set_defaults(func=func)
        return sp

    inp = ("input", {"help": "input file"})
    add("run_suite", cmd_run_suite, "run an invariant battery",
        ("name", {"choices": SUITES + ("all",)}), aliases=("verify",))
    add("haar", cmd_haar, "Haar coefficients of a step function", inp)
    add("expect", cmd_expect, "conditional expectation E_k", ("k", {"type": int}), inp)
    add("maximal", cmd_maximal, "dyadic maximal function", inp)
    add("square", cmd_square, "dyadic square function", inp)
    add("cz", cmd_cz, "level set of M and stopping-time flattening", ("lam", {"type": _float, "metavar": "lambda"}), inp)
    add("khintchine", cmd_khintchine, "norms of Rademacher sums", ("p", {"type": _float}), inp)
    add("riesz", cmd_riesz, "interpolation bound M_r <= M_p^t M_q^(1-t)",
        ("p", {"type": _float}), ("q", {"type": _float}), ("t", {"type": _float}), inp)
    add("pvar", cmd_pvar, "V_p minimiser with boundary data", ("p", {"type": _float}), inp)
    add("cantor", cmd_cantor, "intervals of the Cantor construction",
        ("r", {"type": _float}), ("depth", {"type": int}))
    sp = add("eta", cmd_eta, "empirical distortion modulus of a sampled map", inp)
    sp.add_argument("--samples", type=int, default=200_000, help="number of random triples")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        out = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = out.render(args.fmt)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out} ({exc.strerror})", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return EXIT_OK if out.ok else EXIT_VIOLATION
