import pytest

from dieudonne import boxprod as bp, dmod, exterior as ex
from dieudonne.corpus import alpha, small_corpus
from dieudonne.dmod import ModuleError
from dieudonne.zplin import PadicContext

C31 = PadicContext(3, 1)
C32 = PadicContext(3, 2)


def stable(factors, kmax=4, alternating=False):
    return bp.find_stable(lambda K: bp.truncated_power(factors, K, alternating), kmax)


def test_unit_times_morava_module():
    m = dmod.morava_module(C31, 2)
    t = bp.boxtimes_trunc(dmod.unit(C31), m, 2)
    assert t.status == bp.STABILIZED
    assert dmod.is_isomorphic(t.result, m)


@pytest.mark.parametrize("ctx", [C31, C32])
def test_unit_law_corpus(ctx):
    u = dmod.unit(ctx)
    for name, m in small_corpus(ctx).items():
        for fac in ([u, m], [m, u]):
            t = stable(fac)
            assert t.stabilized, name
            assert dmod.is_isomorphic(t.result, m), name


def test_dualizing_times_unit():
    for ctx in (C31, C32):
        d = dmod.dualizing(ctx)
        t = stable([d, dmod.unit(ctx)])
        assert dmod.is_isomorphic(t.result, d)


def test_alpha_growth():
    a = alpha(C31)
    for K in range(11):
        t = bp.boxtimes_trunc(a, a, K)
        assert t.status == bp.TRUNCATED and t.F is None
        assert t.log_order == K + 1


def test_stabilized_results_are_modules():
    # make_module revalidates VF = FV = p; generator labels land in the result
    mods = small_corpus(C31)
    for a in ("unit", "m2", "r31"):
        for b in ("unit", "dualizing"):
            t = stable([mods[a], mods[b]])
            if t.stabilized:
                assert set(t.generator_map) == {(k, (i, j)) for k in range(t.fbound + 1)
                                                for i in range(mods[a].rank)
                                                for j in range(mods[b].rank)}


def test_morava_square_does_not_stabilize():
    # F^k(a ⊗ a) for a generator outside the image of V survives at every level
    m = dmod.morava_module(C31, 2)
    t = bp.boxtimes_trunc(m, m, 4)
    assert t.status == bp.TRUNCATED


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("nu", [1, 2])
@pytest.mark.parametrize("n", [2, 3])
def test_signed_quotient_matches_exterior_square(p, nu, n):
    ctx = PadicContext(p, nu)
    m = dmod.morava_module(ctx, n)
    t = bp.boxtimes_trunc(m, m, 2 * nu + 2)
    sq = bp.signed_symmetric_quotient(t)
    lam = ex.reduce_mod(ex.build_lattice(n, 2, p), ctx)
    assert sorted(sq.orders) == sorted(lam.orders)
    assert dmod.is_isomorphic(sq, lam)


def test_signed_quotient_of_unit_square_vanishes():
    u = dmod.unit(C31)
    t = stable([u, u])
    assert t.stabilized
    assert bp.signed_symmetric_quotient(t).log_order == 0


def test_signed_quotient_errors():
    t = bp.boxtimes_trunc(dmod.unit(C31), dmod.dualizing(C31), 1)
    with pytest.raises(ModuleError):
        bp.signed_symmetric_quotient(t)
    aa = dmod.direct_sum(alpha(C31), alpha(C31))
    with pytest.raises(bp.NotStabilized):
        bp.signed_symmetric_quotient(bp.boxtimes_trunc(aa, aa, 2))


def test_cube_of_morava_modules():
    m3 = dmod.morava_module(C31, 3)
    top = bp.wedge_power_trunc(m3, 3, 2)
    assert dmod.is_isomorphic(top, dmod.dualizing(C31))
    assert bp.wedge_power_trunc(dmod.morava_module(C31, 2), 3, 2).log_order == 0


def test_wedge_power_matches_lattice_n4():
    ctx = C31
    m = dmod.morava_module(ctx, 4)
    for q in (2, 3, 4):
        w = bp.wedge_power_trunc(m, q, 0)
        lam = ex.reduce_mod(ex.build_lattice(4, q, 3), ctx)
        assert dmod.is_isomorphic(w, lam), q


def test_internal_hom_examples():
    d = dmod.dualizing(C31)
    mod, status = bp.internal_hom_trunc(dmod.unit(C31), d, (1, 1))
    assert status == bp.STABILIZED and dmod.is_isomorphic(mod, d)
    for n in (2, 3):
        m = dmod.morava_module(C31, n)
        mod, status, _ = bp.find_stable_hom(m, d)
        assert status == bp.STABILIZED
        assert dmod.is_isomorphic(mod, dmod.dual(m))


def test_internal_hom_nu2():
    d = dmod.dualizing(C32)
    m = dmod.morava_module(C32, 2)
    mod, status, _ = bp.find_stable_hom(m, d)
    assert status == bp.STABILIZED
    assert dmod.is_isomorphic(mod, dmod.dual(m))


def test_adjunction_triples():
    mods = small_corpus(C31)
    triples = [("unit", "unit", "unit"), ("unit", "dualizing", "dualizing"),
               ("dualizing", "unit", "dualizing"), ("m2", "unit", "m2"),
               ("m3", "unit", "m2"), ("unit", "m2", "dualizing")]
    for a, b, c in triples:
        r = bp.adjunction_check(mods[a], mods[b], mods[c])
        assert r.status == "pass", (a, b, c, r)


def test_adjunction_reports_non_stabilization():
    mods = small_corpus(C31)
    r = bp.adjunction_check(mods["dualizing"], mods["dualizing"], mods["unit"], kmax=2, wmax=2)
    assert r.status == "not stabilized"


def _full_signed_orders(m, q, K):
    """Orders of T_K built on all index tuples with explicit signed swap rows."""
    tower = bp._Tower([m] * q, K, alternating=False)
    M = m.ctx.modulus
    rows = list(tower.rows)
    for k in range(K + 1):
        for t in tower.tuples:
            for s in range(q - 1):
                u = t[:s] + (t[s + 1], t[s]) + t[s + 2:]
                row = [0] * tower.N
                row[tower.sym(k, tower.tpos[t])] += 1
                row[tower.sym(k, tower.tpos[u])] += 1
                rows.append([x % M for x in row])
    return sorted(bp.Quotient(rows, tower.N, m.ctx).orders)


@pytest.mark.parametrize("ctx", [C31, C32])
def test_sorted_alternating_presentation_matches_swap_relations(ctx):
    mods = small_corpus(ctx)
    mods["unit+unit"] = dmod.direct_sum(dmod.unit(ctx), dmod.unit(ctx))
    for name, m in mods.items():
        for q in (2, 3):
            if q > m.rank + 1:
                continue
            for K in range(3):
                t = bp.truncated_power([m] * q, K, alternating=True)
                assert sorted(t.orders) == _full_signed_orders(m, q, K), (name, q, K)


def test_signed_quotient_routes_agree_for_etale_square():
    uu = dmod.direct_sum(dmod.unit(C32), dmod.unit(C32))
    t = stable([uu, uu])
    assert t.stabilized
    a = bp.signed_symmetric_quotient(t)
    b = stable([uu, uu], alternating=True).result
    assert a.log_order == 2 and dmod.is_isomorphic(a, b)
