"""Acceptance gate: twelve criteria, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` or as a script.
"""

import sys
import time
from fractions import Fraction
from math import comb

import pytest

from dieudonne import boxprod as bp, dmod, exterior as ex, pdiv
from dieudonne.corpus import alpha, small_corpus
from dieudonne.zplin import PadicContext


def announce(number, title, ok, detail=""):
    line = f"criterion {number:2d} [{title}]: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line, flush=True)
    return ok


def lattice(n, q, p):
    return pdiv.Lattice.from_lambda(ex.build_lattice(n, q, p))


def crit_heights():
    t0 = time.perf_counter()
    ok = True
    for p in (3, 5):
        for nu in (1, 2):
            ctx = PadicContext(p, nu)
            for n in range(1, 9):
                for q in range(n + 1):
                    m = ex.reduce_mod(ex.build_lattice(n, q, p), ctx)
                    ok &= m.rank == comb(n, q) and pdiv.invariants(lattice(n, q, p)).height == comb(n, q)
    dt = time.perf_counter() - t0
    return ok and dt < 10, f"{dt:.2f}s"


def crit_dimensions():
    ok = all(pdiv.invariants(lattice(n, q, p)).dimension == comb(n - 1, q - 1)
             for p in (3, 5) for n in range(1, 9) for q in range(1, n + 1))
    return ok, ""


def crit_structure():
    bad = [(n, q, b) for p in (3, 5) for n in range(1, 9) for q in range(n + 1)
           for b in ex.check_structure(ex.build_lattice(n, q, p))]
    return not bad, f"{len(bad)} violations"


def crit_pairing():
    ok = all(ex.check_pairing_identity(n, q, p) and ex.is_signed_permutation(ex.pairing_matrix(n, q))
             for p in (3, 5) for n in range(1, 9) for q in range(n + 1))
    return ok, ""


def crit_duality():
    ok = True
    for p in (3, 5):
        for nu in (1, 2):
            ctx = PadicContext(p, nu)
            for n in (2, 3, 4, 5):
                for q in range(n + 1):
                    h, src, tgt = ex.duality_map(n, q, ctx)
                    kind = dmod.dual if n % 2 else dmod.twisted_dual
                    other = ex.reduce_mod(ex.build_lattice(n, n - q, p), ctx)
                    ok &= tgt == kind(other) and dmod.is_isomorphism(h, src, tgt)
                top = ex.reduce_mod(ex.build_lattice(n, n, p), ctx)
                expect = dmod.dualizing(ctx) if n % 2 else dmod.twisted_dualizing(ctx)
                ok &= bool(dmod.is_isomorphic(top, expect))
    return ok, ""


def crit_isogeny():
    ok = True
    for n in range(1, 11):
        for q in range(1, n + 1):
            t = pdiv.isogeny_type(lattice(n, q, 3))
            slope = Fraction(n - q, n)
            n0 = slope.denominator
            ok &= t.components == ((n0, n0 - slope.numerator, comb(n, q) // n0),)
            ok &= comb(n, q) % n0 == 0
    spots = {(2, 1): (2, 1, 1), (4, 2): (2, 1, 3), (3, 2): (3, 2, 1), (6, 3): (2, 1, 10)}
    for (n, q), comp in spots.items():
        ok &= pdiv.isogeny_type(lattice(n, q, 3)).components == (comp,)
    return ok, ""


def crit_manin():
    ok = True
    for n in range(1, 11):
        for q in range(n + 1):
            m = pdiv.manin_check(pdiv.isogeny_type(lattice(n, q, 3)))
            ok &= m.symmetric == (2 * q == n)
            ok &= m.supersingular == (n % 2 == 0 and 2 * q == n)
            if n % 2 or 2 * q != n:
                ok &= not m.algebraicizable_possible
    return ok, ""


def crit_boxtimes_oracle():
    t0 = time.perf_counter()
    ok = True
    worst = 0
    for p in (3, 5):
        for nu in (1, 2):
            ctx = PadicContext(p, nu)
            for n in (2, 3):
                m = dmod.morava_module(ctx, n)
                kmax = 2 * nu + 2
                t = bp.find_stable(lambda K: bp.truncated_power([m, m], K, alternating=True), kmax)
                ok &= t.stabilized
                if not t.stabilized:
                    continue
                worst = max(worst, t.fbound)
                sq = bp.signed_symmetric_quotient(bp.boxtimes_trunc(m, m, t.fbound))
                lam = ex.reduce_mod(ex.build_lattice(n, 2, p), ctx)
                ok &= sorted(sq.orders) == sorted(lam.orders)
                ok &= bool(dmod.is_isomorphic(sq, lam))
    ctx = PadicContext(3, 1)
    cube = bp.find_stable(
        lambda K: bp.truncated_power([dmod.morava_module(ctx, 3)] * 3, K, alternating=True), 4)
    ok &= cube.stabilized and bool(dmod.is_isomorphic(cube.result, dmod.dualizing(ctx)))
    dt = time.perf_counter() - t0
    return ok and dt < 60, f"max K {worst}, {dt:.2f}s"


def crit_unit_law():
    ctx = PadicContext(3, 1)
    u = dmod.unit(ctx)
    corpus = small_corpus(ctx)
    ok = len(corpus) == 10 and all(m.log_order <= 4 for m in corpus.values())
    for m in corpus.values():
        t = bp.find_stable(lambda K: bp.boxtimes_trunc(u, m, K), 4)
        ok &= t.stabilized and bool(dmod.is_isomorphic(t.result, m))
    a = alpha(ctx)
    for K in range(11):
        t = bp.boxtimes_trunc(a, a, K)
        ok &= t.status == bp.TRUNCATED and t.log_order == K + 1
    return ok, ""


def crit_adjunction():
    ctx = PadicContext(3, 1)
    mods = small_corpus(ctx)
    passed = failed = nontrivial = 0
    names = ["unit", "dualizing", "m2", "m3", "alpha"]
    for a in names:
        for b in names:
            for c in names:
                r = bp.adjunction_check(mods[a], mods[b], mods[c], kmax=3, wmax=3)
                passed += r.status == "pass"
                failed += r.status == "fail"
                nontrivial += r.status == "pass" and bool(r.lhs)
    return nontrivial >= 5 and failed == 0, (
        f"{passed} stabilizing triples agree ({nontrivial} with nonzero Hom), {failed} disagree")


def crit_quadratic():
    ok = True
    for p in (3, 5, 7):
        for nu in (1, 2, 3):
            qctx = dmod.QuadraticContext(PadicContext(p, nu), dmod.least_nonresidue(p))
            ok &= dmod.verify_twist_untwist_iso(qctx).passed
    return ok, ""


def crit_height_additivity():
    ok = True
    lats = [lattice(n, q, 3) for n in range(1, 9) for q in range(n + 1)]
    lats += [pdiv.multiplicative(3), pdiv.etale(3)]
    for l in lats:
        h = pdiv.invariants(l)
        ok &= h.height == h.dimension + pdiv.invariants(pdiv.serre_dual(l)).dimension
    return ok, ""


CRITERIA = [
    (1, "height table", crit_heights),
    (2, "dimension table", crit_dimensions),
    (3, "structure identities", crit_structure),
    (4, "pairing", crit_pairing),
    (5, "duality realization", crit_duality),
    (6, "isogeny counts", crit_isogeny),
    (7, "Manin and supersingularity", crit_manin),
    (8, "boxtimes oracle", crit_boxtimes_oracle),
    (9, "unit law and growth", crit_unit_law),
    (10, "adjunction", crit_adjunction),
    (11, "quadratic twist", crit_quadratic),
    (12, "height additivity", crit_height_additivity),
]


@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, title, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print()
        announce(number, title, ok, detail)
    assert ok


if __name__ == "__main__":
    results = [announce(n, t, *c()) for n, t, c in CRITERIA]
    sys.exit(0 if all(results) else 1)
