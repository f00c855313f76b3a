"""Command line front end: invariant reports, verification suites, module files."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from math import comb

import jsonschema

from . import boxprod, dmod, exterior, pdiv
from .corpus import alpha, small_corpus
from .dmod import ModuleError
from .zplin import PadicContext

CSV_COLUMNS = ["p", "nu", "n", "q", "height", "dimension", "slope", "components",
               "dual_partner", "duality_kind", "manin_symmetric", "supersingular",
               "algebraicizable_possible"]

Q0_NOTE = "q = 0: Serre duality with the top degree breaks down; duality fields are n/a"

MODULE_SCHEMA = {
    "type": "object",
    "required": ["p", "nu", "orders", "V", "F"],
    "properties": {
        "p": {"type": "integer"},
        "nu": {"type": "integer"},
        "orders": {"type": "array", "items": {"type": "integer"}},
        "V": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "F": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "status": {"type": "string"},
    },
}


class UsageError(Exception):
    pass


def make_context(p, nu) -> PadicContext:
    try:
        return PadicContext(p, nu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def fmt_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# -- report -----------------------------------------------------------------


def report_row(ctx: PadicContext, n: int, q: int) -> dict:
    lat = pdiv.Lattice.from_lambda(exterior.build_lattice(n, q, ctx.p))
    inv = pdiv.invariants(lat)
    iso = pdiv.isogeny_type(lat)
    manin = pdiv.manin_check(iso)
    slope = Fraction(n - q, n)
    row = {
        "p": ctx.p, "nu": ctx.nu, "n": n, "q": q,
        "height": inv.height,
        "dimension": inv.dimension,
        "slope": fmt_fraction(slope),
        "components": [list(c) for c in iso.components],
        "dual_partner": n - q,
        "duality_kind": "plain" if n % 2 else "twisted",
        "manin_symmetric": manin.symmetric,
        "supersingular": manin.supersingular,
        "algebraicizable_possible": manin.algebraicizable_possible,
    }
    if q == 0:
        row["dual_partner"] = "n/a"
        row["duality_kind"] = "n/a"
        row["note"] = Q0_NOTE
    return row


def _components_text(comps) -> str:
    return " + ".join(f"R_{{{a},{b}}}^{m}" for a, b, m in comps)


def _cell(key, value) -> str:
    if key == "components":
        return _components_text(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render_report(rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([_cell(k, r[k]) for k in CSV_COLUMNS])
        return buf.getvalue()
    table = [CSV_COLUMNS] + [[_cell(k, r[k]) for k in CSV_COLUMNS] for r in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(CSV_COLUMNS))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in table]
    notes = sorted({r["note"] for r in rows if "note" in r})
    return "\n".join(lines + [f"note: {x}" for x in notes]) + "\n"


def cmd_report(args) -> int:
    ctx = make_context(args.p, args.nu)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if args.q is not None and not 0 <= args.q <= args.n:
        raise UsageError("--q must satisfy 0 <= q <= n")
    qs = [args.q] if args.q is not None else range(args.n + 1)
    rows = [report_row(ctx, args.n, q) for q in qs]
    _emit(render_report(rows, args.format), args.out)
    return 0


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- verify -------------------------------------------------------------------


def suite_lambda(ctx, n_max, seed=0, fixture=None):
    fails = []
    for n in range(1, n_max + 1):
        for q in range(n + 1):
            lat = exterior.build_lattice(n, q, ctx.p)
            tag = f"lambda n={n} q={q}"
            if lat.rank != comb(n, q):
                fails.append(f"{tag}: rank {lat.rank} != C({n},{q})")
            fails.extend(f"{tag}: {bad}" for bad in exterior.check_structure(lat))
            if not exterior.check_pairing_identity(n, q, ctx.p):
                fails.append(f"{tag}: pairing identity")
            if not exterior.is_signed_permutation(exterior.pairing_matrix(n, q)):
                fails.append(f"{tag}: pairing not unimodular")
            if q >= 1:
                dim = pdiv.invariants(pdiv.Lattice.from_lambda(lat)).dimension
                if dim != comb(n - 1, q - 1):
                    fails.append(f"{tag}: dimension {dim} != C({n - 1},{q - 1})")
            top = exterior.ExteriorAction(n, ctx.p)
            for I in lat.basis:
                if exterior.add(top.V(I), exterior.scale(-1, top.V_componentwise(I))):
                    fails.append(f"{tag}: V not multiplicative at {I}")
                    break
    if fixture is not None:
        fails.extend(f"fixture n={fixture.n} q={fixture.q}: {bad}"
                     for bad in exterior.check_structure(fixture))
    return fails


def suite_duality(ctx, n_max, seed=0):
    fails = []
    for n in range(2, n_max + 1):
        for q in range(n + 1):
            h, src, tgt = exterior.duality_map(n, q, ctx)
            if not dmod.is_isomorphism(h, src, tgt):
                fails.append(f"duality n={n} q={q}: pairing map is not an isomorphism")
        top = exterior.reduce_mod(exterior.build_lattice(n, n, ctx.p), ctx)
        expect = dmod.dualizing(ctx) if n % 2 else dmod.twisted_dualizing(ctx)
        if not dmod.is_isomorphic(top, expect, seed):
            fails.append(f"duality n={n}: top degree differs from the dualizing module")
    return fails


def suite_boxtimes(ctx, n_max, seed=0):
    fails = []
    u = dmod.unit(ctx)
    for name, m in small_corpus(ctx).items():
        for left in (True, False):
            fac = [u, m] if left else [m, u]
            t = boxprod.find_stable(lambda K: boxprod.truncated_power(fac, K), 4)
            if not t.stabilized or not dmod.is_isomorphic(t.result, m, seed):
                fails.append(f"boxtimes unit law fails for {name}")
    a = alpha(ctx)
    for K in range(6):
        t = boxprod.boxtimes_trunc(a, a, K)
        if t.stabilized or t.log_order != K + 1:
            fails.append(f"boxtimes alpha growth fails at K={K}")
    for n in range(2, min(n_max, 3) + 1):
        M = dmod.morava_module(ctx, n)
        t = boxprod.boxtimes_trunc(M, M, 2 * ctx.nu + 2)
        try:
            sq = boxprod.signed_symmetric_quotient(t)
        except boxprod.NotStabilized as exc:
            fails.append(f"boxtimes oracle n={n}: {exc}")
            continue
        lam = exterior.reduce_mod(exterior.build_lattice(n, 2, ctx.p), ctx)
        if sorted(sq.orders) != sorted(lam.orders) or not dmod.is_isomorphic(sq, lam, seed):
            fails.append(f"boxtimes oracle n={n}: signed quotient differs from the exterior square")
    return fails


def suite_isogeny(ctx, n_max, seed=0):
    fails = []
    for n in range(1, n_max + 1):
        for q in range(n + 1):
            tag = f"isogeny n={n} q={q}"
            lat = pdiv.Lattice.from_lambda(exterior.build_lattice(n, q, ctx.p))
            t = pdiv.isogeny_type(lat)
            slope = Fraction(n - q, n)
            if [(s.slope, s.multiplicity) for s in t.slopes] != [(slope, comb(n, q))]:
                fails.append(f"{tag}: slopes {[str(s) for s in t.slopes]}")
            if t.height != comb(n, q):
                fails.append(f"{tag}: components do not add up to the height")
            m = pdiv.manin_check(t)
            if m.symmetric != (2 * q == n) or m.supersingular != (2 * q == n):
                fails.append(f"{tag}: Manin verdict {m}")
            inv = pdiv.invariants(lat)
            dual_dim = pdiv.invariants(pdiv.serre_dual(lat)).dimension
            if inv.height != inv.dimension + dual_dim:
                fails.append(f"{tag}: height != dim + dual dim")
    return fails


def suite_quadratic(ctx, n_max, seed=0):
    qctx = dmod.QuadraticContext(ctx, dmod.least_nonresidue(ctx.p))
    rep = dmod.verify_twist_untwist_iso(qctx)
    return [f"quadratic: {f}" for f in rep.failures]


SUITES = {
    "lambda": suite_lambda,
    "duality": suite_duality,
    "boxtimes": suite_boxtimes,
    "isogeny": suite_isogeny,
    "quadratic": suite_quadratic,
}


def load_lattice_fixture(path, p):
    with open(path) as fh:
        doc = json.load(fh)
    try:
        n, q = int(doc["n"]), int(doc["q"])
        V, F = doc["V"], doc["F"]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad lattice fixture: {exc}") from None
    return exterior.LambdaLattice(n, q, int(doc.get("p", p)), tuple(exterior.basis(n, q)),
                                  tuple(map(tuple, V)), tuple(map(tuple, F)))


def cmd_verify(args) -> int:
    ctx = make_context(args.p, args.nu)
    if args.n_max < 1:
        raise UsageError("--n-max must be >= 1")
    fixture = load_lattice_fixture(args.lattice, ctx.p) if args.lattice else None
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failures = []
    for name in names:
        if name == "lambda":
            fails = suite_lambda(ctx, args.n_max, args.seed, fixture)
        else:
            fails = SUITES[name](ctx, args.n_max, args.seed)
        print(f"{name}: {'pass' if not fails else 'FAIL'} ({len(fails)} failures)")
        failures.extend(fails)
    if failures:
        json.dump({"failures": failures}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 1
    return 0


# -- module files ---------------------------------------------------------------


def module_to_json(m: dmod.FinModule) -> dict:
    return {"p": m.ctx.p, "nu": m.ctx.nu, "orders": list(m.orders),
            "V": [list(r) for r in m.V], "F": [list(r) for r in m.F]}


def module_from_json(doc) -> dmod.FinModule:
    try:
        jsonschema.validate(doc, MODULE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"schema violation: {exc.message}") from None
    ctx = make_context(doc["p"], doc["nu"])
    M = ctx.modulus
    for name in ("V", "F"):
        if any(not 0 <= x < M for row in doc[name] for x in row):
            raise UsageError(f"validation failed: {name} entries must lie in [0, {M})")
    try:
        m = dmod.make_module(ctx, doc["orders"], doc["V"], doc["F"])
    except ModuleError as exc:
        raise UsageError(f"validation failed: {exc}") from None
    return m


def read_module(path) -> dmod.FinModule:
    if path is None:
        raise UsageError("missing module file")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return module_from_json(doc)


def _dump_json(doc) -> str:
    return json.dumps(doc, separators=(",", ":")) + "\n"


def cmd_module(args) -> int:
    if args.action == "dump":
        ctx = make_context(args.p, args.nu)
        try:
            m = dmod.standard_module(ctx, args.kind, args.n, args.q)
        except (ModuleError, TypeError) as exc:
            raise UsageError(str(exc)) from None
        _emit(_dump_json(module_to_json(m)), args.out)
        return 0
    if args.action == "load":
        m = read_module(args.module_a)
        _emit(_dump_json(module_to_json(m)), args.out)
        return 0
    a, b = read_module(args.module_a), read_module(args.module_b)
    if a.ctx != b.ctx:
        raise UsageError("validation failed: modules live over different (p, nu)")
    if args.fbound < 0:
        raise UsageError("--fbound must be >= 0")
    t = boxprod.boxtimes_trunc(a, b, args.fbound)
    doc = {"p": a.ctx.p, "nu": a.ctx.nu, "orders": list(t.orders),
           "V": [list(r) for r in t.V], "F": t.F and [list(r) for r in t.F],
           "status": t.status, "fbound": t.fbound}
    _emit(_dump_json(doc), args.out)
    return 0


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dieudonne", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    rp = sub.add_parser("report", help="invariants of the exterior lattices for one n")
    rp.add_argument("--p", type=int, required=True)
    rp.add_argument("--nu", type=int, default=1)
    rp.add_argument("--n", type=int, required=True)
    rp.add_argument("--q", type=int)
    rp.add_argument("--format", choices=["text", "json", "csv"], default="text")
    rp.add_argument("--out")
    rp.set_defaults(func=cmd_report)

    vp = sub.add_parser("verify", help="run property suites")
    vp.add_argument("--suite", choices=["all"] + list(SUITES), default="all")
    vp.add_argument("--p", type=int, default=3)
    vp.add_argument("--nu", type=int, default=1)
    vp.add_argument("--n-max", type=int, default=4)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--lattice", help="extra lattice JSON {n, q, V, F} checked by the lambda suite")
    vp.set_defaults(func=cmd_verify)

    mp = sub.add_parser("module", help="read, write and multiply module files")
    mp.add_argument("action", choices=["dump", "load", "boxtimes"])
    mp.add_argument("--module-a")
    mp.add_argument("--module-b")
    mp.add_argument("--fbound", type=int, default=3)
    mp.add_argument("--out")
    mp.add_argument("--kind", default="unit",
                    choices=["unit", "dualizing", "twisted_dualizing", "morava", "rnq"])
    mp.add_argument("--p", type=int, default=3)
    mp.add_argument("--nu", type=int, default=1)
    mp.add_argument("--n", type=int)
    mp.add_argument("--q", type=int)
    mp.set_defaults(func=cmd_module)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
