"""Finite-length Dieudonne modules over Z/p^nu.

A module is a finite abelian p-group ``sum Z/p^e_i`` (generator ``i`` has
order ``p**e_i``) with two endomorphisms ``V`` and ``F`` satisfying
``VF = FV = p``.  Matrices use the column convention: ``V[i][j]`` is the
coefficient of generator ``i`` in ``V(g_j)``.  Row ``i`` of every stored
matrix is reduced mod ``p**e_i``.

The dual uses the pairing ``<g_i*, g_j> = delta_ij p^(nu - e_i)`` so that the
dual of a module whose orders are all ``nu`` is literally the transpose.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from . import zplin
from .zplin import PadicContext, Span, Quotient


class ModuleError(ValueError):
    pass


@dataclass(frozen=True)
class FinModule:
    ctx: PadicContext
    orders: tuple
    V: tuple
    F: tuple

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def log_order(self) -> int:
        """``log_p`` of the group order."""
        return sum(self.orders)

    def reduce(self, x: Sequence[int]) -> list:
        p = self.ctx.p
        return [xi % (p**e) for xi, e in zip(x, self.orders)]

    def apply(self, mat: Sequence[Sequence[int]], x: Sequence[int]) -> list:
        return self.reduce(zplin.mat_vec(mat, x))

    def apply_V(self, x):
        return self.apply(self.V, x)

    def apply_F(self, x):
        return self.apply(self.F, x)

    def elements(self):
        """Iterate over all group elements (only sensible for tiny modules)."""
        import itertools

        p = self.ctx.p
        return itertools.product(*(range(p**e) for e in self.orders))

    def __str__(self):
        return (f"FinModule(p={self.ctx.p}, nu={self.ctx.nu}, orders={list(self.orders)}, "
                f"V={[list(r) for r in self.V]}, F={[list(r) for r in self.F]})")


def _normalize(mat, orders, p):
    return tuple(tuple(x % (p**e) for x in row) for row, e in zip(mat, orders))


def check_map(mat, src_orders, dst_orders, p) -> bool:
    """True when ``mat`` defines a homomorphism ``sum Z/p^src -> sum Z/p^dst``."""
    for i, e_i in enumerate(dst_orders):
        for j, e_j in enumerate(src_orders):
            if mat[i][j] % (p ** max(0, e_i - e_j)):
                return False
    return True


def make_module(ctx: PadicContext, orders: Sequence[int], V, F) -> FinModule:
    """Validate and build a finite Dieudonne module."""
    orders = tuple(int(e) for e in orders)
    g = len(orders)
    for name, mat in (("V", V), ("F", F)):
        if len(mat) != g or any(len(row) != g for row in mat):
            raise ModuleError(f"{name} must be {g}x{g}")
    for e in orders:
        if not 1 <= e <= ctx.nu:
            raise ModuleError(f"generator order exponent {e} outside [1, {ctx.nu}]")
    p = ctx.p
    V = _normalize(V, orders, p)
    F = _normalize(F, orders, p)
    for name, mat in (("V", V), ("F", F)):
        if not check_map(mat, orders, orders, p):
            raise ModuleError(f"ill-defined map: {name} violates the order congruences")
    for name, a, b in (("VF", V, F), ("FV", F, V)):
        prod = zplin.mat_mul(a, b)
        for i, e in enumerate(orders):
            for j in range(g):
                if (prod[i][j] - (p if i == j else 0)) % (p**e):
                    raise ModuleError(f"VF != p: {name} differs from p*id at ({i},{j})")
    return FinModule(ctx, orders, V, F)


def zero_module(ctx: PadicContext) -> FinModule:
    return FinModule(ctx, (), (), ())


# -- standard modules ------------------------------------------------------


def unit(ctx):
    return make_module(ctx, [ctx.nu], [[1]], [[ctx.p]])


def dualizing(ctx):
    return make_module(ctx, [ctx.nu], [[ctx.p]], [[1]])


def twisted_dualizing(ctx):
    return make_module(ctx, [ctx.nu], [[-ctx.p]], [[-1]])


def morava_module(ctx, n: int) -> FinModule:
    """``M_nu`` for ``M = R/(V^(n-1) - F)`` in the basis ``a_0 .. a_{n-1}``.

    ``V a_0 = p a_{n-1}``, ``V a_i = a_{i-1}`` and ``F = V^(n-1)``.
    """
    if n < 1:
        raise ModuleError("n must be >= 1")
    V = zplin.zeros(n, n)
    V[n - 1][0] = ctx.p
    for i in range(1, n):
        V[i - 1][i] = 1
    F = zplin.mat_pow(V, n - 1)
    return make_module(ctx, [ctx.nu] * n, V, F)


def rnq_module(ctx, n: int, q: int) -> FinModule:
    """``R_{n,q} = R/(V^(n-q) - F^q)`` reduced mod ``p^nu``.

    Basis ``F^(q-1), ..., F, 1, V, ..., V^(n-q)`` (for ``q >= 1``) or
    ``1, V, ..., V^(n-1)`` (for ``q = 0``); ``V`` shifts one step right and
    wraps around, picking up a factor ``p`` on exactly ``q`` of the ``n`` steps.
    """
    if n < 1 or not 0 <= q <= n:
        raise ModuleError(f"need n >= 1 and 0 <= q <= n, got n={n}, q={q}")
    p = ctx.p
    step_factor = [1] * n
    if q >= 1:
        for i in range(q - 1):
            step_factor[i] = p
        step_factor[n - 1] = p
    V = zplin.zeros(n, n)
    F = zplin.zeros(n, n)
    for i in range(n):
        j = (i + 1) % n
        V[j][i] += step_factor[i]
        F[i][j] += p // step_factor[i]
    return make_module(ctx, [ctx.nu] * n, V, F)


def standard_module(ctx: PadicContext, kind: str, n: Optional[int] = None,
                    q: Optional[int] = None) -> FinModule:
    if kind == "unit":
        return unit(ctx)
    if kind == "dualizing":
        return dualizing(ctx)
    if kind == "twisted_dualizing":
        return twisted_dualizing(ctx)
    if kind == "morava":
        return morava_module(ctx, n)
    if kind == "rnq":
        return rnq_module(ctx, n, q)
    raise ModuleError(f"unknown standard module {kind!r}")


# -- constructions -------------------------------------------------------


def _dual_matrix(mat, orders, p):
    g = len(orders)
    out = zplin.zeros(g, g)
    for i in range(g):
        for k in range(g):
            shift = orders[i] - orders[k]
            x = mat[k][i]
            out[i][k] = x * p**shift if shift >= 0 else x // p ** (-shift)
    return out


def dual(m: FinModule) -> FinModule:
    """``Hom(M, Z/p^nu)`` with ``(F f)(x) = f(Vx)`` and ``(V f)(x) = f(Fx)``."""
    p = m.ctx.p
    return make_module(m.ctx, m.orders, _dual_matrix(m.F, m.orders, p),
                       _dual_matrix(m.V, m.orders, p))


def twisted_dual(m: FinModule) -> FinModule:
    """Dual into the twisted dualizing module: ``(F f)(x) = -f(Vx)``, ``(V f)(x) = -f(Fx)``."""
    p = m.ctx.p
    V = zplin.mat_scale(-1, _dual_matrix(m.F, m.orders, p))
    F = zplin.mat_scale(-1, _dual_matrix(m.V, m.orders, p))
    return make_module(m.ctx, m.orders, V, F)


def direct_sum(m: FinModule, n: FinModule) -> FinModule:
    if m.ctx != n.ctx:
        raise ModuleError("context mismatch")
    return make_module(m.ctx, m.orders + n.orders, zplin.block_diag(m.V, n.V),
                       zplin.block_diag(m.F, n.F))


def permute(m: FinModule, perm: Sequence[int]) -> FinModule:
    """Relabel generators: new generator ``k`` is old generator ``perm[k]``."""
    orders = [m.orders[i] for i in perm]
    V = [[m.V[i][j] for j in perm] for i in perm]
    F = [[m.F[i][j] for j in perm] for i in perm]
    return make_module(m.ctx, orders, V, F)


# -- maps and Hom groups -----------------------------------------------------


def is_module_map(h, m: FinModule, n: FinModule) -> bool:
    """``h`` (``n.rank x m.rank``) is a well-defined R-linear map ``m -> n``."""
    p = m.ctx.p
    if not check_map(h, m.orders, n.orders, p):
        return False
    for a, b in ((m.V, n.V), (m.F, n.F)):
        lhs = zplin.mat_mul(h, a) if m.rank else [[] for _ in range(n.rank)]
        rhs = zplin.mat_mul(b, h) if n.rank else []
        for i, e in enumerate(n.orders):
            for j in range(m.rank):
                if (lhs[i][j] - rhs[i][j]) % (p**e):
                    return False
    return True


def map_kernel(h, m: FinModule, n: FinModule) -> list:
    """Generators (coordinate rows) of the kernel of the group map ``h: m -> n``."""
    return zplin.hom_kernel(zplin.transpose(h) if h else [[] for _ in m.orders],
                            m.orders, n.orders, m.ctx)


def is_isomorphism(h, m: FinModule, n: FinModule) -> bool:
    return (m.log_order == n.log_order and is_module_map(h, m, n)
            and not map_kernel(h, m, n))


class HomGroup(NamedTuple):
    orders: list
    basis: list

    @property
    def log_order(self) -> int:
        return sum(self.orders)


def hom_group(m: FinModule, n: FinModule) -> HomGroup:
    """All R-linear maps ``m -> n`` as a sum of cyclic groups with generators."""
    if m.ctx != n.ctx:
        raise ModuleError("context mismatch")
    ctx = m.ctx
    p = ctx.p
    gm, gn = m.rank, n.rank
    if gm == 0 or gn == 0:
        return HomGroup([], [])
    var = {(t, l): t * gm + l for t in range(gn) for l in range(gm)}
    src = [n.orders[t] for t in range(gn) for l in range(gm)]
    cols = []
    dst = []
    # well-definedness: p^e_l h[t][l] = 0 in Z/p^f_t
    for t in range(gn):
        for l in range(gm):
            col = [0] * len(src)
            col[var[t, l]] = p ** m.orders[l]
            cols.append(col)
            dst.append(n.orders[t])
    for a, b in ((m.V, n.V), (m.F, n.F)):
        for t in range(gn):
            for l in range(gm):
                col = [0] * len(src)
                for k in range(gm):
                    col[var[t, k]] += a[k][l]
                for s in range(gn):
                    col[var[s, l]] -= b[t][s]
                cols.append(col)
                dst.append(n.orders[t])
    A = zplin.transpose(cols)
    rows = zplin.hom_kernel(A, src, dst, ctx)
    scale = zplin.embed_scale(src, ctx)
    M = ctx.modulus
    span = Span([[(x * s) % M for x, s in zip(r, scale)] for r in rows], len(src), ctx)
    basis = []
    for b in span.basis:
        h = zplin.zeros(gn, gm)
        for (t, l), k in var.items():
            h[t][l] = (b[k] // scale[k]) % (p ** n.orders[t])
        basis.append(h)
    return HomGroup(list(span.orders), basis)


# -- isomorphism testing -----------------------------------------------------


def _endo_kernel_type(mat, m: FinModule) -> list:
    rows = zplin.hom_kernel(zplin.transpose(mat), m.orders, m.orders, m.ctx)
    return subgroup_type(rows, m.orders, m.ctx)


def _endo_coker_type(mat, m: FinModule) -> list:
    ctx = m.ctx
    g = m.rank
    rels = [[ctx.p**e if i == j else 0 for j in range(g)] for i, e in enumerate(m.orders)]
    rels += zplin.transpose(mat)
    return sorted(Quotient(rels, g, ctx).orders)


def subgroup_type(rows, orders, ctx) -> list:
    """Invariant factors of the subgroup of ``sum Z/p^orders`` generated by ``rows``."""
    scale = zplin.embed_scale(orders, ctx)
    M = ctx.modulus
    emb = [[(x * s) % M for x, s in zip(r, scale)] for r in rows]
    return sorted(Span(emb, len(orders), ctx).orders)


def module_invariants(m: FinModule) -> dict:
    """Isomorphism invariants: orders and (co)kernel types of powers of V and F."""
    ctx = m.ctx
    inv = {"orders": sorted(m.orders)}
    top = max(1, ctx.nu * m.rank)
    for name, mat in (("V", m.V), ("F", m.F)):
        power = [list(r) for r in mat]
        for k in range(1, top + 1):
            inv[f"coker {name}^{k}"] = _endo_coker_type(power, m)
            inv[f"ker {name}^{k}"] = _endo_kernel_type(power, m)
            power = zplin.mat_mul(power, mat, ctx.modulus)
    return inv


class IsoVerdict(NamedTuple):
    verdict: str  # "yes", "no" or "unknown"
    witness: Optional[list] = None
    reason: str = ""

    def __bool__(self):
        return self.verdict == "yes"


def is_isomorphic(m: FinModule, n: FinModule, seed: int = 0, budget: int = 200) -> IsoVerdict:
    """Sound but incomplete isomorphism test.

    ``no`` comes with the first differing invariant, ``yes`` with an explicit
    invertible module map found by seeded random search in ``hom_group``.
    """
    if m.ctx != n.ctx:
        raise ModuleError("context mismatch")
    if m == n:
        return IsoVerdict("yes", zplin.identity(m.rank), "identical")
    if m.rank == 0 or n.rank == 0:
        if m.log_order == n.log_order == 0:
            return IsoVerdict("yes", zplin.zeros(n.rank, m.rank), "both zero")
        return IsoVerdict("no", None, "one module is zero")
    inv_m, inv_n = module_invariants(m), module_invariants(n)
    for key in inv_m:
        if inv_m[key] != inv_n.get(key):
            return IsoVerdict("no", None, f"{key}: {inv_m[key]} vs {inv_n.get(key)}")
    hom = hom_group(m, n)
    rng = random.Random(seed)
    p = m.ctx.p
    candidates = list(hom.basis)
    for _ in range(budget):
        coeffs = [rng.randrange(p**e) for e in hom.orders]
        h = zplin.zeros(n.rank, m.rank)
        for c, b in zip(coeffs, hom.basis):
            if c:
                h = zplin.mat_add(h, zplin.mat_scale(c, b))
        candidates.append(h)
    for h in candidates:
        h = [[x % (p**e) for x in row] for row, e in zip(h, n.orders)]
        if not map_kernel(h, m, n):
            return IsoVerdict("yes", h, "invertible map found")
    return IsoVerdict("unknown", None, f"no invertible map in {budget} trials")


# -- quadratic base change ------------------------------------------------------


def least_nonresidue(p: int) -> int:
    squares = {(x * x) % p for x in range(1, p)}
    for a in range(2, p):
        if a not in squares:
            return a
    raise ValueError(f"no quadratic nonresidue mod {p}")


@dataclass(frozen=True)
class QuadraticContext:
    """``W = Z/p^nu[s]/(s^2 - nonresidue)`` with Frobenius ``s -> -s``."""

    base: PadicContext
    nonresidue: int

    def __post_init__(self):
        p = self.base.p
        if any((x * x - self.nonresidue) % p == 0 for x in range(p)):
            raise ModuleError(f"{self.nonresidue} is a square mod {p}")

    def mul(self, a, b):
        M = self.base.modulus
        return ((a[0] * b[0] + self.nonresidue * a[1] * b[1]) % M,
                (a[0] * b[1] + a[1] * b[0]) % M)

    def add(self, a, b):
        M = self.base.modulus
        return ((a[0] + b[0]) % M, (a[1] + b[1]) % M)

    def sigma(self, a):
        M = self.base.modulus
        return (a[0] % M, (-a[1]) % M)

    def scalar(self, x: int):
        return (x % self.base.modulus, 0)

    def elements(self):
        M = self.base.modulus
        return ((a, b) for a in range(M) for b in range(M))


@dataclass(frozen=True)
class SemilinearModule:
    """A module over ``W`` with ``F`` sigma-semilinear and ``V`` sigma^-1-semilinear."""

    qctx: QuadraticContext
    orders: tuple
    V: tuple  # matrices of W-elements (pairs), column convention
    F: tuple

    @property
    def rank(self):
        return len(self.orders)

    def _reduce(self, vec):
        p = self.qctx.base.p
        return [(a % p**e, b % p**e) for (a, b), e in zip(vec, self.orders)]

    def _apply(self, mat, vec, twist):
        q = self.qctx
        out = []
        for row in mat:
            acc = (0, 0)
            for x, alpha in zip(row, vec):
                acc = q.add(acc, q.mul(x, twist(alpha)))
            out.append(acc)
        return self._reduce(out)

    def apply_F(self, vec):
        return self._apply(self.F, vec, self.qctx.sigma)

    def apply_V(self, vec):
        # sigma has order 2, so sigma^-1 == sigma
        return self._apply(self.V, vec, self.qctx.sigma)


def base_change_quadratic(m: FinModule, qctx: QuadraticContext) -> SemilinearModule:
    if m.ctx != qctx.base:
        raise ModuleError("context mismatch")
    lift = lambda mat: tuple(tuple(qctx.scalar(x) for x in row) for row in mat)
    return SemilinearModule(qctx, m.orders, lift(m.V), lift(m.F))


@dataclass
class Report:
    passed: bool = True
    failures: list = field(default_factory=list)

    def fail(self, msg):
        self.passed = False
        self.failures.append(msg)


def check_scalar_iso(src: SemilinearModule, dst: SemilinearModule, scalar) -> Report:
    """Check that ``x -> scalar·x`` is a bijective module map ``src -> dst``.

    Both sides are additive, so intertwining is tested on the additive
    generators ``e_j`` and ``s·e_j``.
    """
    q = src.qctx
    rep = Report()
    g = src.rank
    phi = lambda vec: dst._reduce([q.mul(scalar, a) for a in vec])
    gens = []
    for j in range(g):
        for alpha in ((1, 0), (0, 1)):
            vec = [(0, 0)] * g
            vec[j] = alpha
            gens.append(vec)
    for vec in gens:
        if dst.apply_F(phi(vec)) != phi(src.apply_F(vec)):
            rep.fail(f"F does not intertwine on {vec}")
        if dst.apply_V(phi(vec)) != phi(src.apply_V(vec)):
            rep.fail(f"V does not intertwine on {vec}")
        for beta in ((1, 0), (0, 1)):
            if phi([q.mul(beta, a) for a in vec]) != dst._reduce([q.mul(beta, a) for a in phi(vec)]):
                rep.fail(f"not W-linear on {vec}")
    # bijectivity: multiplication by the scalar on W = Z/p^nu^2 must be invertible
    a, b = scalar
    det = (a * a - q.nonresidue * b * b) % q.base.p
    if det == 0:
        rep.fail("scalar is not a unit of W")
    return rep


def verify_twist_untwist_iso(qctx: QuadraticContext, scalar=(0, 1)) -> Report:
    """Check that ``x -> s·x`` identifies the twisted and plain dualizing modules over W."""
    ctx = qctx.base
    plain = base_change_quadratic(dualizing(ctx), qctx)
    twisted = base_change_quadratic(twisted_dualizing(ctx), qctx)
    return check_scalar_iso(twisted, plain, scalar)
