"""The bilinear product of finite Dieudonne modules, by truncation in F-degree.

``M1 ⊠ ... ⊠ Mq`` is generated by symbols ``F^k (x_1 ⊗ ... ⊗ x_q)`` with
``V`` acting diagonally on ``k = 0`` symbols and by ``p F^(k-1)`` above, and
relations (for every slot ``j``)::

    F (V x_1 ⊗ .. ⊗ x_j ⊗ .. ⊗ V x_q) = x_1 ⊗ .. ⊗ F x_j ⊗ .. ⊗ x_q

shifted by powers of ``F``.  For two factors these are exactly the two
defining relations ``F(Vm ⊗ n) = m ⊗ Fn`` and ``F(m ⊗ Vn) = Fm ⊗ n``.

The truncation ``T_K`` keeps the symbols with ``k <= K`` and the relations
living there.  Relations are invariant under the degree shift, which makes
the following test sound: if ``T_K -> T_(K+1)`` is an isomorphism then every
later map in the tower is one too, and ``T_K`` is the full product.  The same
holds after adding the signed transposition relations of an exterior power.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from . import zplin
from .dmod import FinModule, ModuleError, make_module, hom_group, zero_module
from .exterior import sort_sign
from .zplin import Quotient, Span

STABILIZED = "stabilized"
TRUNCATED = "truncated"


class NotStabilized(RuntimeError):
    pass


@dataclass
class TruncatedProduct:
    """``T_K`` for a product of ``factors``.

    ``orders`` and ``V`` describe ``T_K`` on its own cyclic generators.  When
    ``status`` is ``stabilized``, ``result`` is the full product with both
    ``V`` and ``F``; otherwise ``F`` is ``None`` because the top level cannot
    be pushed one step higher inside the truncation.  ``generator_map`` sends
    a symbol label ``(k, (i_1, ..., i_q))`` to its coordinates; for
    alternating powers only increasing index tuples are labels.
    """

    factors: tuple
    fbound: int
    status: str
    orders: list
    V: list
    F: Optional[list]
    generator_map: dict
    alternating: bool = False
    result: Optional[FinModule] = None

    @property
    def log_order(self) -> int:
        return sum(self.orders)

    @property
    def stabilized(self) -> bool:
        return self.status == STABILIZED


class _Tower:
    """Symbols, relations and operators of the truncated product at one level."""

    def __init__(self, factors: Sequence[FinModule], K: int, alternating: bool):
        self.factors = tuple(factors)
        self.ctx = factors[0].ctx
        self.K = K
        self.alternating = alternating
        if alternating:
            # x ⊗ y = -y ⊗ x and 2 is invertible, so sorted distinct tuples suffice
            g, q = factors[0].rank, len(factors)
            self.tuples = list(itertools.combinations(range(g), q))
            # relations still come from every multiset of generators
            self.rel_tuples = list(itertools.combinations_with_replacement(range(g), q))
        else:
            self.tuples = list(itertools.product(*(range(m.rank) for m in factors)))
            self.rel_tuples = self.tuples
        self.tpos = {t: i for i, t in enumerate(self.tuples)}
        self.T = len(self.tuples)
        self.N = (K + 1) * self.T
        p = self.ctx.p
        self.sym_orders = [min(m.orders[i] for m, i in zip(factors, t)) for t in self.tuples]
        self._col_cache = {}
        rows = []
        for k in range(K + 1):
            for ti, e in enumerate(self.sym_orders):
                rows.append(self._unit(k, ti, p**e))
        for k in range(K):
            rows.extend(self._shift_relations(k))
        self.rows = [r for r in rows if any(r)]

    def sym(self, k: int, ti: int) -> int:
        return k * self.T + ti

    def _unit(self, k, ti, c):
        row = [0] * self.N
        row[self.sym(k, ti)] = c % self.ctx.modulus
        return row

    def _expand(self, columns) -> dict:
        """Tensor product of vectors given as {generator: coefficient} dicts."""
        out = {(): 1}
        for col in columns:
            nxt = {}
            for key, c in out.items():
                for g, d in col.items():
                    nxt[key + (g,)] = nxt.get(key + (g,), 0) + c * d
            out = nxt
        return {k: v for k, v in out.items() if v}

    def _col(self, s, which, i):
        key = (s, which, i)
        if key not in self._col_cache:
            m = self.factors[s]
            if which == "id":
                col = {i: 1}
            else:
                mat = m.V if which == "V" else m.F
                col = {r: mat[r][i] for r in range(m.rank) if mat[r][i]}
            self._col_cache[key] = col
        return self._col_cache[key]

    def _shift_relations(self, k):
        M = self.ctx.modulus
        q = len(self.factors)
        out = []
        for t in self.rel_tuples:
            for j in range(q):
                row = [0] * self.N
                top = [self._col(s, "id" if s == j else "V", t[s]) for s in range(q)]
                for key, c in self._expand(top).items():
                    sign, ti = self._canon(key)
                    if sign:
                        idx = self.sym(k + 1, ti)
                        row[idx] = (row[idx] + sign * c) % M
                low = [self._col(s, "F" if s == j else "id", t[s]) for s in range(q)]
                for key, c in self._expand(low).items():
                    sign, ti = self._canon(key)
                    if sign:
                        idx = self.sym(k, ti)
                        row[idx] = (row[idx] - sign * c) % M
                out.append(row)
        return out

    def _canon(self, key):
        """``(sign, tuple index)`` of a generator tuple; sign 0 when it vanishes."""
        if not self.alternating:
            return 1, self.tpos[key]
        sign, srt = sort_sign(key)
        return (sign, self.tpos[srt]) if sign else (0, None)

    def apply_V(self, x: Sequence[int]) -> list:
        """V on a vector of symbols up to level K (stays within the level range)."""
        M = self.ctx.modulus
        p = self.ctx.p
        out = [0] * len(x)
        q = len(self.factors)
        for ti, t in enumerate(self.tuples):
            c = x[self.sym(0, ti)]
            if c:
                cols = [self._col(s, "V", t[s]) for s in range(q)]
                for key, d in self._expand(cols).items():
                    sign, tj = self._canon(key)
                    if sign:
                        idx = self.sym(0, tj)
                        out[idx] = (out[idx] + sign * c * d) % M
        for k in range(1, len(x) // self.T):
            for ti in range(self.T):
                c = x[self.sym(k, ti)]
                if c:
                    idx = self.sym(k - 1, ti)
                    out[idx] = (out[idx] + p * c) % M
        return out

    def shift_F(self, x: Sequence[int]) -> list:
        """F on symbols: raise every level by one (output one level longer)."""
        return [0] * self.T + list(x)


def _check_factors(factors):
    ctx = factors[0].ctx
    if any(m.ctx != ctx for m in factors):
        raise ModuleError("context mismatch")
    return ctx


def truncated_power(factors: Sequence[FinModule], K: int,
                    alternating: bool = False) -> TruncatedProduct:
    """``T_K`` of ``factors[0] ⊠ ... ⊠ factors[-1]``, optionally alternating.

    With ``alternating`` every adjacent transposition acts with a sign, giving
    the exterior power (all factors must then be equal).
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    ctx = _check_factors(factors)
    if alternating and any(m != factors[0] for m in factors):
        raise ModuleError("alternating power needs equal factors")
    if any(m.rank == 0 for m in factors):
        z = zero_module(ctx)
        return TruncatedProduct(tuple(factors), K, STABILIZED, [], [], [], {}, alternating, z)
    low = _Tower(factors, K, alternating)
    high = _Tower(factors, K + 1, alternating)
    q_low = Quotient(low.rows, low.N, ctx)
    q_high = Quotient(high.rows, high.N, ctx)
    # F-closure of the top level: level K+1 symbols are expressible below it
    top_cols = range(high.sym(K + 1, 0), high.N)
    top_rows = [[r[c] for c in top_cols] for r in high.rows]
    top = Quotient(top_rows, high.T, ctx)
    stabilized = top.log_order == 0 and q_low.log_order == q_high.log_order

    target = q_high if stabilized else q_low
    width = high.N if stabilized else low.N
    gmap = {}
    for k in range(K + 1):
        for ti, t in enumerate(low.tuples):
            e = [0] * width
            e[low.sym(k, ti)] = 1
            gmap[(k, t)] = target.coords(e)

    if not stabilized:
        V = _columns(q_low, low.apply_V, q_low.lifts)
        return TruncatedProduct(tuple(factors), K, TRUNCATED, list(q_low.orders), V, None,
                                gmap, alternating)

    # Work in T_(K+1) ~ T_K; rewrite lifts below the top level before shifting.
    lifts = [_push_below_top(x, high, top_rows, top_cols, ctx) for x in q_high.lifts]
    V = _columns(q_high, high.apply_V, lifts)
    F = [[0] * len(lifts) for _ in q_high.orders]
    for j, x in enumerate(lifts):
        fx = high.shift_F(x)[: high.N]
        for i, c in enumerate(q_high.coords(fx)):
            F[i][j] = c
    module = make_module(ctx, q_high.orders, V, F)
    return TruncatedProduct(tuple(factors), K, STABILIZED, list(q_high.orders), V, F,
                            gmap, alternating, module)


def _columns(quot: Quotient, op, lifts) -> list:
    g = len(quot.orders)
    out = [[0] * g for _ in range(g)]
    for j, x in enumerate(lifts):
        for i, c in enumerate(quot.coords(op(x))):
            out[i][j] = c
    return out


def _push_below_top(x, tower, top_rows, top_cols, ctx):
    """An equivalent symbol vector with nothing at the top level."""
    M = ctx.modulus
    target = [x[c] for c in top_cols]
    if not any(target):
        return list(x)
    sol = zplin.solve_mod(top_rows, [target], ctx)
    if sol is None:
        raise NotStabilized("top level not expressible")
    y = sol.particular[0]
    out = list(x)
    for coef, row in zip(y, tower.rows):
        if coef:
            out = [(a - coef * b) % M for a, b in zip(out, row)]
    return out


def boxtimes_trunc(m: FinModule, n: FinModule, K: int) -> TruncatedProduct:
    """``m ⊠ n`` truncated at F-degree ``K``."""
    return truncated_power([m, n], K)


def find_stable(build, kmax: int):
    """Smallest ``K <= kmax`` at which ``build(K)`` stabilizes, else the last try."""
    t = None
    for K in range(kmax + 1):
        t = build(K)
        if t.stabilized:
            return t
    return t


def quotient_module(m: FinModule, relations: Sequence[Sequence[int]]):
    """``m`` modulo the submodule generated by ``relations`` (which must be R-stable).

    Returns the quotient module and the coordinate map from ``m``'s coordinates.
    """
    ctx = m.ctx
    g = m.rank
    rows = [[ctx.p**e if i == j else 0 for j in range(g)] for i, e in enumerate(m.orders)]
    rows += [list(r) for r in relations]
    quot = Quotient(rows, g, ctx)
    V = _columns(quot, m.apply_V, quot.lifts)
    F = _columns(quot, m.apply_F, quot.lifts)
    return make_module(ctx, quot.orders, V, F), quot.coords


def signed_symmetric_quotient(t: TruncatedProduct) -> FinModule:
    """Sigma_2-coinvariants with sign of ``m ⊠ m``.

    A stabilized product is divided by ``x + swap(x)``.  A product that did
    not stabilize (``M ⊠ M`` usually keeps growing through ``F^k(x ⊗ x)``)
    gets the sign relations imposed level by level inside the same
    truncation; the resulting tower must then stabilize at ``t.fbound``.
    """
    if len(t.factors) != 2 or t.factors[0] != t.factors[1]:
        raise ModuleError("signed quotient needs a product of a module with itself")
    if not t.stabilized:
        alt = truncated_power(t.factors, t.fbound, alternating=True)
        if not alt.stabilized:
            raise NotStabilized(f"signed quotient did not stabilize at K={t.fbound}")
        return alt.result
    rels = []
    M = t.result.ctx.modulus
    for (k, (i, j)), coords in t.generator_map.items():
        other = t.generator_map[(k, (j, i))]
        rels.append([(a + b) % M for a, b in zip(coords, other)])
    module, _ = quotient_module(t.result, rels)
    return module


def wedge_power_trunc(m: FinModule, q: int, K: int) -> FinModule:
    """The degree ``q`` exterior power of ``m``, computed at F-degree bound ``K``."""
    if q < 2:
        raise ValueError("q must be >= 2")
    t = truncated_power([m] * q, K, alternating=True)
    if not t.stabilized:
        raise NotStabilized(f"exterior power did not stabilize at K={K}")
    return t.result


# -- internal Hom ---------------------------------------------------------------


class _HomWindow:
    """Unknown values ``f(r ⊗ g_l)`` for ``r`` in a window of R-monomials."""

    def __init__(self, m: FinModule, n: FinModule, I: int, J: int):
        self.m, self.n = m, n
        self.ctx = m.ctx
        self.I, self.J = I, J
        self.ks = list(range(-I, J + 1))
        gm, gn = m.rank, n.rank
        self.var = {}
        for k in self.ks:
            for t in range(gn):
                for l in range(gm):
                    self.var[k, t, l] = len(self.var)
        self.src = [n.orders[t] for (_, t, _) in self.var]
        self._solve()

    def mulV(self, k):
        p = self.ctx.p
        return (p, k - 1) if k > 0 else (1, k - 1)

    def mulF(self, k):
        p = self.ctx.p
        return (p, k + 1) if k < 0 else (1, k + 1)

    def _solve(self):
        m, n, ctx = self.m, self.n, self.ctx
        p = ctx.p
        gm, gn = m.rank, n.rank
        nv = len(self.var)
        cols, dst = [], []

        def new():
            return [0] * nv

        for (k, t, l), v in self.var.items():
            col = new()
            col[v] = p ** m.orders[l]
            cols.append(col)
            dst.append(n.orders[t])
        for k in self.ks:
            cv, kv = self.mulV(k)
            cf, kf = self.mulF(k)
            for l in range(gm):
                for t in range(gn):
                    # F f(Vr ⊗ g) = f(r ⊗ F g)
                    if kv >= -self.I:
                        col = new()
                        for s in range(gn):
                            col[self.var[kv, s, l]] += n.F[t][s] * cv
                        for j in range(gm):
                            col[self.var[k, t, j]] -= m.F[j][l]
                        cols.append(col)
                        dst.append(n.orders[t])
                    # F f(r ⊗ V g) = f(Fr ⊗ g)
                    if kf <= self.J:
                        col = new()
                        for s in range(gn):
                            for j in range(gm):
                                col[self.var[k, s, j]] += n.F[t][s] * m.V[j][l]
                        col[self.var[kf, t, l]] -= cf
                        cols.append(col)
                        dst.append(n.orders[t])
                    # V f(r ⊗ g) = f(Vr ⊗ V g)
                    if kv >= -self.I:
                        col = new()
                        for s in range(gn):
                            col[self.var[k, s, l]] += n.V[t][s]
                        for j in range(gm):
                            col[self.var[kv, t, j]] -= cv * m.V[j][l]
                        cols.append(col)
                        dst.append(n.orders[t])
        rows = zplin.hom_kernel(zplin.transpose(cols), self.src, dst, ctx)
        self.scale = zplin.embed_scale(self.src, ctx)
        M = ctx.modulus
        self.gens = [[(x * s) % M for x, s in zip(r, self.scale)] for r in rows]
        self.span = Span(self.gens, nv, ctx)


def internal_hom_trunc(m: FinModule, n: FinModule, window=(2, 2)):
    """``Hom(m, n)`` internal, from the values of ``f`` on ``V^i ⊗ g`` and ``F^j ⊗ g``.

    Returns ``(module, status)``.  The status is ``stabilized`` when the
    window grown by one in each direction restricts isomorphically onto it;
    the module is built only in that case (otherwise ``None``).
    """
    if m.ctx != n.ctx:
        raise ModuleError("context mismatch")
    ctx = m.ctx
    if m.rank == 0 or n.rank == 0:
        return zero_module(ctx), STABILIZED
    I, J = window
    small = _HomWindow(m, n, I, J)
    big = _HomWindow(m, n, I + 1, J + 1)
    index = [big.var[key] for key in small.var]
    restricted = [[g[i] for i in index] for g in big.gens]
    image = Span(restricted, len(index), ctx)
    if not (image.log_order == small.span.log_order == big.span.log_order):
        return None, TRUNCATED
    M = ctx.modulus
    p = ctx.p
    basis = small.span.basis
    acts = {"V": [], "F": []}
    for b in basis:
        sol = zplin.solve_mod(restricted, [b], ctx)
        ext = zplin.vec_mat(sol.particular[0], big.gens, M)
        val = lambda k, t, l: ext[big.var[k, t, l]]
        for name in ("V", "F"):
            out = [0] * len(small.var)
            for (k, t, l), v in small.var.items():
                if name == "F":
                    x = p * val(k + 1, t, l) if k < 0 else val(k + 1, t, l)
                else:
                    x = p * val(k - 1, t, l) if k > 0 else val(k - 1, t, l)
                out[v] = x % M
            acts[name].append(small.span.coords(out))
    g = len(basis)
    V = [[acts["V"][j][i] for j in range(g)] for i in range(g)]
    F = [[acts["F"][j][i] for j in range(g)] for i in range(g)]
    return make_module(ctx, small.span.orders, V, F), STABILIZED


def find_stable_hom(m, n, wmax: int = 4):
    for w in range(wmax + 1):
        mod, status = internal_hom_trunc(m, n, (w, w))
        if status == STABILIZED:
            return mod, status, w
    return None, TRUNCATED, wmax


@dataclass
class AdjunctionResult:
    status: str  # "pass", "fail" or "not stabilized"
    lhs: Optional[list] = None
    rhs: Optional[list] = None

    @property
    def passed(self):
        return self.status == "pass"


def adjunction_check(m: FinModule, n: FinModule, l: FinModule, kmax: int = 4,
                     wmax: int = 4) -> AdjunctionResult:
    """Compare ``Hom(m ⊠ n, l)`` with ``Hom(m, Hom(n, l))`` as abelian groups."""
    t = find_stable(lambda K: boxtimes_trunc(m, n, K), kmax)
    ih, status, _ = find_stable_hom(n, l, wmax)
    if not t.stabilized or status != STABILIZED:
        return AdjunctionResult("not stabilized")
    lhs = sorted(hom_group(t.result, l).orders)
    rhs = sorted(hom_group(m, ih).orders)
    return AdjunctionResult("pass" if lhs == rhs else "fail", lhs, rhs)
