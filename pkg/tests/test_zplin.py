import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dieudonne import zplin
from dieudonne.zplin import PadicContext, NewtonSlope

C9 = PadicContext(3, 2)
C25 = PadicContext(5, 2)


def brute_span(rows, M):
    m = len(rows[0])
    out = set()
    for coeffs in itertools.product(range(M), repeat=len(rows)):
        out.add(tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % M for j in range(m)))
    return frozenset(out)


def nonzero_rows(h):
    return [tuple(r) for r in h if any(r)]


def test_context_rules():
    with pytest.raises(ValueError, match="p=2"):
        PadicContext(2, 1)
    with pytest.raises(ValueError):
        PadicContext(9, 1)
    with pytest.raises(ValueError):
        PadicContext(3, 0)
    assert C9.modulus == 9
    assert C9.val(0) == 2 and C9.val(18) == 2 and C9.val(6) == 1
    assert (C9.inverse(4) * 4) % 9 == 1


def test_howell_small_example():
    h, t = zplin.howell_form([[3]], C9)
    assert nonzero_rows(h) == [(3,)]


def test_howell_exhaustive_2x2_mod_9():
    by_span = {}
    for entries in itertools.product(range(9), repeat=4):
        a = [list(entries[:2]), list(entries[2:])]
        h, t = zplin.howell_form(a, C9)
        assert zplin.mat_mul(t, a, 9) == zplin.mat_mod(h, 9)
        span = brute_span(a, 9)
        hs = nonzero_rows(h)
        if hs:
            assert brute_span([list(r) for r in hs], 9) == span
        else:
            assert span == {(0, 0)}
        by_span.setdefault(span, set()).add(tuple(hs))
    # canonical: equal spans give identical forms
    assert all(len(forms) == 1 for forms in by_span.values())


def test_howell_idempotent():
    rng = random.Random(1)
    for _ in range(100):
        a = [[rng.randrange(25) for _ in range(3)] for _ in range(3)]
        h, _ = zplin.howell_form(a, C25)
        h2, _ = zplin.howell_form(h, C25)
        assert nonzero_rows(h) == nonzero_rows(h2)


@pytest.mark.parametrize("ctx", [C9, C25])
def test_smith_random(ctx):
    rng = random.Random(7)
    M = ctx.modulus
    for _ in range(60):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        a = [[rng.randrange(M) for _ in range(c)] for _ in range(r)]
        sf = zplin.smith_mod(a, ctx, want_u=True)
        d = zplin.mat_mul(zplin.mat_mul(sf.u, a), sf.w, M)
        for i in range(r):
            for j in range(c):
                want = ctx.p ** sf.vals[i] % M if i == j and i < sf.rank else 0
                assert d[i][j] == want
        assert zplin.mat_mul(sf.w, sf.w_inv, M) == zplin.identity(c)
        # group order of the row span agrees with brute force on tiny cases
        if r * c <= 4 and M == 9:
            span = brute_span(a, M)
            assert len(span) == ctx.p ** zplin.Span(a, c, ctx).log_order


def test_solve_examples():
    sol = zplin.solve_mod([[3]], [[6]], C9)
    assert sol.particular == [[2]]
    assert nonzero_rows(sol.kernel) == [(3,)]
    assert zplin.solve_mod([[3]], [[1]], C9) is None


@pytest.mark.parametrize("ctx", [C9, C25])
def test_solve_substitution(ctx):
    rng = random.Random(3)
    M = ctx.modulus
    for _ in range(80):
        r, c = rng.randint(1, 3), rng.randint(1, 3)
        a = [[rng.randrange(M) for _ in range(c)] for _ in range(r)]
        x = [rng.randrange(M) for _ in range(r)]
        b = [zplin.vec_mat(x, a, M)]
        sol = zplin.solve_mod(a, b, ctx)
        assert sol is not None
        assert zplin.vec_mat(sol.particular[0], a, M) == b[0]
        for k in sol.kernel:
            assert not any(zplin.vec_mat(k, a, M))


def test_kernel_complete_mod_9():
    rng = random.Random(5)
    for _ in range(30):
        a = [[rng.randrange(9) for _ in range(2)] for _ in range(2)]
        ker = zplin.kernel_mod(a, C9)
        brute = {x for x in itertools.product(range(9), repeat=2) if not any(zplin.vec_mat(x, a, 9))}
        got = brute_span(ker, 9) if ker else frozenset({(0, 0)})
        assert got == brute


def test_span_and_quotient_orders():
    s = zplin.Span([[3, 0], [0, 1]], 2, C9)
    assert sorted(s.orders) == [1, 2]
    assert s.contains([6, 5]) and not s.contains([1, 0])
    q = zplin.Quotient([[3, 0]], 2, C9)
    assert sorted(q.orders) == [1, 2]
    assert q.coords([3, 0]) == [0] * len(q.orders)


def test_hom_kernel_brute_force():
    # x -> x·a from Z/9 + Z/3 to Z/9 + Z/3, kernel counted element by element
    rng = random.Random(11)
    src = dst = [2, 1]
    for _ in range(20):
        a = [[rng.randrange(9), 3 * rng.randrange(3)], [3 * rng.randrange(3), rng.randrange(3)]]
        rows = zplin.hom_kernel(a, src, dst, C9)
        brute = 0
        for x in itertools.product(range(9), range(3)):
            y = zplin.vec_mat(x, a)
            brute += all(v % 3**e == 0 for v, e in zip(y, dst))
        emb = zplin.embed_scale(src, C9)
        gens = [[(v * s) % 9 for v, s in zip(r, emb)] for r in rows]
        size = 3 ** zplin.Span(gens, 2, C9).log_order if gens else 1
        assert size == brute


def test_charpoly_example():
    assert zplin.charpoly_exact([[0, 1], [3, 0]]) == (-3, 0, 1)
    with pytest.raises(ValueError):
        zplin.charpoly_exact([[1, 2]])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.randoms(use_true_random=False))
def test_cayley_hamilton(n, rnd):
    a = [[rnd.randint(-5, 5) for _ in range(n)] for _ in range(n)]
    poly = zplin.charpoly_exact(a)
    assert poly[-1] == 1 and len(poly) == n + 1
    assert zplin.poly_eval_matrix(poly, a) == zplin.zeros(n, n)


def test_newton_slopes():
    assert zplin.newton_slopes([-3, 0, 1], 3) == [NewtonSlope(Fraction(1, 2), 2)]
    assert zplin.newton_slopes([9, -6, 1], 3) == [NewtonSlope(Fraction(1), 2)]
    # (x - 1)(x - 3): slopes 0 and 1, increasing
    assert zplin.newton_slopes([3, -4, 1], 3) == [NewtonSlope(Fraction(0), 1), NewtonSlope(Fraction(1), 1)]
    with pytest.raises(ValueError):
        zplin.newton_slopes([0, 1], 3)
    with pytest.raises(ValueError):
        zplin.newton_slopes([1, 2], 3)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=6))
def test_newton_slopes_of_products(vals):
    # prod (x - u p^v) with units u: slopes are exactly the v's
    poly = [1]
    for v in vals:
        poly = zplin._poly_mul(poly, [-(2 * 5**v), 1])
    got = zplin.newton_slopes(poly, 5)
    expect = sorted((Fraction(v), vals.count(v)) for v in set(vals))
    assert [(s.slope, s.multiplicity) for s in got] == expect
